#include "namesim/exact_bench.hpp"

#include "namesim/errors.hpp"

#include <cmath>

namespace namesim {

Tableau parse_tableau(const std::string& name) {
    if (name == "rk4")
        return Tableau::rk4;
    if (name == "dopri5")
        return Tableau::dopri5;
    if (name == "cash_karp54")
        return Tableau::cash_karp54;
    if (name == "fehlberg78")
        return Tableau::fehlberg78;
    throw DomainError("unknown tableau '" + name + "'");
}

const char* to_string(Tableau t) {
    switch (t) {
    case Tableau::rk4: return "rk4";
    case Tableau::dopri5: return "dopri5";
    case Tableau::cash_karp54: return "cash_karp54";
    case Tableau::fehlberg78: return "fehlberg78";
    }
    return "unknown";
}

Closure parse_closure(const std::string& name) {
    if (name == "paper_truncated")
        return Closure::paper_truncated;
    if (name == "full_covariance")
        return Closure::full_covariance;
    throw DomainError("unknown closure '" + name + "'");
}

const char* to_string(Closure c) {
    return c == Closure::full_covariance ? "full_covariance" : "paper_truncated";
}

BathModeSet sample_bath_modes(const BathSpec& b) {
    b.validate();
    const int n = b.n_modes;
    BathModeSet modes;
    modes.mass = b.bath_mass;
    modes.omega.resize(static_cast<std::size_t>(n));
    double g = b.g;
    if (n > 1) {
        double dw = b.bandwidth() / (n - 1);
        for (int i = 0; i < n; ++i)
            modes.omega[static_cast<std::size_t>(i)] = b.omega_min + i * dw;
        modes.omega.back() = b.omega_max;
        if (b.reference_modes && *b.reference_modes > 1)
            g *= std::sqrt(static_cast<double>(*b.reference_modes - 1) / (n - 1));
    } else {
        modes.omega[0] = b.omega_min;
    }
    modes.g.assign(static_cast<std::size_t>(n), g);
    return modes;
}

std::vector<ModeMoments> thermal_initial_moments(const BathModeSet& modes, double T,
                                                 const UnitSystem& u) {
    std::vector<ModeMoments> out(modes.size());
    for (std::size_t i = 0; i < modes.size(); ++i) {
        double w = modes.omega[i];
        double coth = T > 0.0 ? 1.0 / std::tanh(u.hbar * w / (2.0 * u.kB * T)) : 1.0;
        out[i].q2 = u.hbar / (2.0 * modes.mass * w) * coth;
        out[i].p2 = modes.mass * u.hbar * w / 2.0 * coth;
        out[i].s = 0.0;
    }
    return out;
}

QuadratureMoments system_initial_moments(const ObservableVector& v0, double omega0, double m,
                                         const UnitSystem& u) {
    QuadratureMoments q = quadratures_from_observables(v0, omega0, m);
    double bound = u.hbar * u.hbar / 4.0;
    if (!(q.Q2 > 0.0) || !(q.P2 > 0.0) || q.Q2 * q.P2 - q.S * q.S < bound * (1.0 - 1e-10))
        throw PhysicalityError("initial system moments violate the uncertainty bound");
    return q;
}

namespace {

// Coordinates: Q = 0, P = 1, q_i = 2 + 2i, p_i = 3 + 2i.
Eigen::Index qi(std::size_t i) { return static_cast<Eigen::Index>(2 + 2 * i); }
Eigen::Index pi_(std::size_t i) { return static_cast<Eigen::Index>(3 + 2 * i); }

// Index of the symmetrized moment (a, b) in the truncated state, -1 if dropped.
Eigen::Index truncated_index(Eigen::Index a, Eigen::Index b) {
    if (a > b)
        std::swap(a, b);
    if (a < 2) {
        if (b < 2)
            return a == b ? a : 2;
        Eigen::Index mode = (b - 2) / 2;
        bool is_p = (b - 2) % 2 == 1;
        return 3 + 7 * mode + (a == 0 ? 0 : 2) + (is_p ? 1 : 0);
    }
    Eigen::Index ma = (a - 2) / 2;
    Eigen::Index mb = (b - 2) / 2;
    if (ma != mb)
        return -1;
    Eigen::Index base = 3 + 7 * ma;
    if (a == b)
        return base + ((a - 2) % 2 == 0 ? 4 : 5);
    return base + 6;
}

using Triplets = std::vector<Eigen::Triplet<double>>;

// Moment generator induced by x' = A x on the tracked pairs: untracked
// pairs generated by A are dropped.
Eigen::SparseMatrix<double, Eigen::RowMajor> moment_generator_of(
    const Eigen::SparseMatrix<double, Eigen::RowMajor>& A, Eigen::Index n_coord,
    Eigen::Index n_moments) {
    Triplets trip;
    for (Eigen::Index a = 0; a < n_coord; ++a) {
        for (Eigen::Index b = a; b < n_coord; ++b) {
            Eigen::Index row = truncated_index(a, b);
            if (row < 0)
                continue;
            for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(A, a); it; ++it) {
                Eigen::Index col = truncated_index(it.col(), b);
                if (col >= 0)
                    trip.emplace_back(row, col, it.value());
            }
            for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(A, b); it; ++it) {
                Eigen::Index col = truncated_index(a, it.col());
                if (col >= 0)
                    trip.emplace_back(row, col, it.value());
            }
        }
    }
    Eigen::SparseMatrix<double, Eigen::RowMajor> G(n_moments, n_moments);
    G.setFromTriplets(trip.begin(), trip.end());
    G.prune(0.0);
    return G;
}

} // namespace

BenchGenerator::BenchGenerator(const BathModeSet& modes, double m, Closure closure)
    : closure_(closure), n_modes_(modes.size()),
      n_coord_(static_cast<Eigen::Index>(2 + 2 * modes.size())) {
    if (modes.size() == 0 || modes.g.size() != modes.size())
        throw DomainError("bath mode set is empty or inconsistent");
    if (!(m > 0.0) || !(modes.mass > 0.0))
        throw DomainError("masses must be positive");
    const double mb = modes.mass;
    Triplets c, w, g;
    c.emplace_back(0, 1, 1.0 / m);
    w.emplace_back(1, 0, -m);
    for (std::size_t i = 0; i < n_modes_; ++i) {
        double wi = modes.omega[i];
        c.emplace_back(qi(i), pi_(i), 1.0 / mb);
        c.emplace_back(pi_(i), qi(i), -mb * wi * wi);
        g.emplace_back(1, qi(i), -modes.g[i]);
        g.emplace_back(pi_(i), 0, -modes.g[i]);
    }
    auto make = [&](const Triplets& t) {
        RowSparse A(n_coord_, n_coord_);
        A.setFromTriplets(t.begin(), t.end());
        return A;
    };
    a_const_ = make(c);
    a_omega_ = make(w);
    a_coupling_ = make(g);
    if (closure_ == Closure::paper_truncated) {
        Eigen::Index nm = state_size();
        g_const_ = moment_generator_of(a_const_, n_coord_, nm);
        g_omega_ = moment_generator_of(a_omega_, n_coord_, nm);
        g_coupling_ = moment_generator_of(a_coupling_, n_coord_, nm);
    }
}

Eigen::Index BenchGenerator::state_size() const {
    if (closure_ == Closure::paper_truncated)
        return static_cast<Eigen::Index>(3 + 7 * n_modes_);
    return n_coord_ * n_coord_;
}

Eigen::SparseMatrix<double> BenchGenerator::dynamics(double omega, double coupling) const {
    RowSparse A = a_const_ + (omega * omega) * a_omega_ + coupling * a_coupling_;
    return Eigen::SparseMatrix<double>(A);
}

Eigen::SparseMatrix<double> BenchGenerator::moment_generator(double omega, double coupling) const {
    if (closure_ != Closure::paper_truncated)
        throw DomainError("moment_generator is defined for the truncated closure only");
    RowSparse G = g_const_ + (omega * omega) * g_omega_ + coupling * g_coupling_;
    return Eigen::SparseMatrix<double>(G);
}

void BenchGenerator::rhs(const Eigen::VectorXd& y, Eigen::VectorXd& dy, double omega,
                         double coupling) const {
    if (closure_ == Closure::paper_truncated) {
        dy.noalias() = g_const_ * y;
        dy.noalias() += (omega * omega) * (g_omega_ * y);
        dy.noalias() += coupling * (g_coupling_ * y);
        return;
    }
    Eigen::Map<const Eigen::MatrixXd> S(y.data(), n_coord_, n_coord_);
    dy.resize(y.size());
    Eigen::Map<Eigen::MatrixXd> dS(dy.data(), n_coord_, n_coord_);
    Eigen::MatrixXd AS = a_const_ * S;
    AS.noalias() += (omega * omega) * (a_omega_ * S);
    AS.noalias() += coupling * (a_coupling_ * S);
    dS = AS + AS.transpose();
}

QuadratureMoments BenchGenerator::system_moments(const Eigen::VectorXd& y) const {
    if (closure_ == Closure::paper_truncated)
        return {y(0), y(1), y(2)};
    return {y(0), y(n_coord_ + 1), y(n_coord_)};
}

ModeMoments BenchGenerator::mode_moments(const Eigen::VectorXd& y, std::size_t i) const {
    if (closure_ == Closure::paper_truncated) {
        auto b = static_cast<Eigen::Index>(3 + 7 * i);
        return {y(b + 4), y(b + 5), y(b + 6)};
    }
    Eigen::Map<const Eigen::MatrixXd> S(y.data(), n_coord_, n_coord_);
    return {S(qi(i), qi(i)), S(pi_(i), pi_(i)), S(qi(i), pi_(i))};
}

double BenchGenerator::system_bath_qq(const Eigen::VectorXd& y, std::size_t i) const {
    if (closure_ == Closure::paper_truncated)
        return y(static_cast<Eigen::Index>(3 + 7 * i));
    Eigen::Map<const Eigen::MatrixXd> S(y.data(), n_coord_, n_coord_);
    return S(0, qi(i));
}

Eigen::SparseMatrix<double> build_generator(const BathModeSet& modes, const Protocol& p, double t,
                                            double m, Closure closure,
                                            CouplingPrefactor prefactor) {
    BenchGenerator gen(modes, m, closure);
    double w = omega_at(p, t);
    double s = prefactor == CouplingPrefactor::omega_t ? w : 1.0;
    return closure == Closure::paper_truncated ? gen.moment_generator(w, s) : gen.dynamics(w, s);
}

Eigen::VectorXd bench_initial_state(const BenchGenerator& gen, const QuadratureMoments& system,
                                    const std::vector<ModeMoments>& bath) {
    if (bath.size() != gen.n_modes())
        throw DomainError("bath moment count does not match the generator");
    Eigen::VectorXd y = Eigen::VectorXd::Zero(gen.state_size());
    if (gen.closure() == Closure::paper_truncated) {
        y(0) = system.Q2;
        y(1) = system.P2;
        y(2) = system.S;
        for (std::size_t i = 0; i < bath.size(); ++i) {
            auto b = static_cast<Eigen::Index>(3 + 7 * i);
            y(b + 4) = bath[i].q2;
            y(b + 5) = bath[i].p2;
            y(b + 6) = bath[i].s;
        }
        return y;
    }
    auto n = static_cast<Eigen::Index>(2 + 2 * bath.size());
    Eigen::Map<Eigen::MatrixXd> S(y.data(), n, n);
    S(0, 0) = system.Q2;
    S(1, 1) = system.P2;
    S(0, 1) = S(1, 0) = system.S;
    for (std::size_t i = 0; i < bath.size(); ++i) {
        S(qi(i), qi(i)) = bath[i].q2;
        S(pi_(i), pi_(i)) = bath[i].p2;
        S(qi(i), pi_(i)) = S(pi_(i), qi(i)) = bath[i].s;
    }
    return y;
}

double bench_total_energy(const Eigen::VectorXd& y, const BenchGenerator& gen,
                          const BathModeSet& modes, double omega, double coupling, double m) {
    double e = observables_from_quadratures(gen.system_moments(y), omega, m).H;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        auto mm = gen.mode_moments(y, i);
        double wi = modes.omega[i];
        e += mm.p2 / (2.0 * modes.mass) + 0.5 * modes.mass * wi * wi * mm.q2;
        e += coupling * modes.g[i] * gen.system_bath_qq(y, i);
    }
    return e;
}

namespace {

void check_stable(const Eigen::VectorXd& y, const BenchGenerator& gen, double t, double tol) {
    if (!y.allFinite())
        throw InstabilityError("bench state became non-finite at t = " + std::to_string(t) +
                               "; reduce dt");
    auto s = gen.system_moments(y);
    if (s.Q2 < -tol * std::max(1.0, std::abs(s.P2)) || s.P2 < -tol * std::max(1.0, std::abs(s.Q2)))
        throw InstabilityError("negative system variance at t = " + std::to_string(t) +
                               "; reduce dt");
    for (std::size_t i = 0; i < gen.n_modes(); ++i) {
        auto mm = gen.mode_moments(y, i);
        if (mm.q2 < -tol || mm.p2 < -tol)
            throw InstabilityError("negative bath variance at t = " + std::to_string(t) +
                                   "; reduce dt");
    }
}

} // namespace

std::vector<BenchSample> integrate_bench(Eigen::VectorXd state0, const BenchGenerator& gen,
                                         const BathModeSet& modes, const Protocol& p, double m,
                                         const BenchOptions& opt) {
    if (!(opt.dt > 0.0) || !(opt.horizon >= 0.0) || opt.stride == 0)
        throw DomainError("bench needs dt > 0, horizon >= 0 and stride >= 1");
    if (state0.size() != gen.state_size())
        throw DomainError("bench state has the wrong dimension");
    p.check_time(opt.horizon);
    double steps = opt.horizon / opt.dt;
    auto n_steps = static_cast<std::size_t>(std::llround(steps));
    if (std::abs(steps - static_cast<double>(n_steps)) > 1e-6)
        throw DomainError("bench horizon must be an integer multiple of dt");

    const double t_end = p.t_final();
    auto coupling_at = [&](double w) {
        return opt.prefactor == CouplingPrefactor::omega_t ? w : 1.0;
    };
    auto rhs = [&](const Eigen::VectorXd& y, Eigen::VectorXd& dy, double t) {
        double w = omega_at(p, std::min(t, t_end));
        gen.rhs(y, dy, w, coupling_at(w));
    };

    std::vector<BenchSample> out;
    out.reserve(n_steps / opt.stride + 2);
    integrate_fixed(opt.tableau, rhs, state0, 0.0, opt.dt, n_steps, opt.stride,
                    [&](std::size_t, double t, const Eigen::VectorXd& y) {
                        check_stable(y, gen, t, opt.instability_tol);
                        double w = omega_at(p, std::min(t, t_end));
                        BenchSample s;
                        s.t = t;
                        s.system = gen.system_moments(y);
                        s.v = observables_from_quadratures(s.system, w, m);
                        s.total_energy = bench_total_energy(y, gen, modes, w, coupling_at(w), m);
                        out.push_back(s);
                    });
    return out;
}

} // namespace namesim
