#include "namesim/propagation.hpp"

#include "namesim/errors.hpp"

#include <cmath>

namespace namesim {

double casimir(const ObservableVector& v) { return v.H * v.H - v.L * v.L - v.C * v.C; }

ObservableVector observables_from_quadratures(const QuadratureMoments& q, double omega, double m) {
    double kin = q.P2 / (2.0 * m);
    double pot = 0.5 * m * omega * omega * q.Q2;
    return {kin + pot, kin - pot, omega * q.S, 1.0};
}

QuadratureMoments quadratures_from_observables(const ObservableVector& v, double omega, double m) {
    return {(v.H - v.L) / (m * omega * omega), m * (v.H + v.L), v.C / omega};
}

Eigen::Matrix4d segment_propagator(double mu, double omega_start, double tau) {
    double k = kappa(mu);
    double theta;
    if (mu == 0.0) {
        theta = omega_start * tau;
    } else {
        double d = 1.0 - mu * omega_start * tau;
        if (d <= 0.0)
            throw DomainError("segment_propagator: omega diverges");
        theta = -std::log(d) / mu;
    }
    double c = std::cos(k * theta);
    double s = std::sin(k * theta);
    double pre = std::exp(mu * theta) / (k * k);
    Eigen::Matrix4d U = Eigen::Matrix4d::Zero();
    U(0, 0) = 4.0 - mu * mu * c;
    U(0, 1) = -mu * k * s;
    U(0, 2) = -2.0 * mu * (c - 1.0);
    U(1, 0) = -mu * k * s;
    U(1, 1) = k * k * c;
    U(1, 2) = -2.0 * k * s;
    U(2, 0) = 2.0 * mu * (c - 1.0);
    U(2, 1) = 2.0 * k * s;
    U(2, 2) = 4.0 * c - mu * mu;
    U.topLeftCorner<3, 3>() *= pre;
    U(3, 3) = 1.0;
    return U;
}

Eigen::Matrix4d free_propagator_matrix(const Protocol& p, double t) {
    std::size_t k = p.segment_index(t);
    Eigen::Matrix4d U = Eigen::Matrix4d::Identity();
    for (std::size_t i = 0; i <= k; ++i) {
        const auto& s = p.segment(i);
        double tau = i < k ? s.duration : t - s.t_start;
        U = segment_propagator(s.mu, s.omega_start, tau) * U;
    }
    return U;
}

ObservableVector isolated_evolve(const ObservableVector& v0, const Protocol& p, double t) {
    return ObservableVector::from(free_propagator_matrix(p, t) * v0.vec());
}

Eigen::Matrix4cd BBasisMap::inverse() const { return M.inverse(); }

ObservableVector BBasisMap::apply(const InteractionMoments& mom) const {
    Eigen::Vector4cd b(mom.s, mom.n, std::conj(mom.s), 1.0);
    Eigen::Vector4cd v = M * b;
    return {v(0).real(), v(1).real(), v(2).real(), v(3).real()};
}

InteractionMoments BBasisMap::pull_back(const ObservableVector& v) const {
    Eigen::Vector4cd b = inverse() * v.vec().cast<cplx>();
    return {b(1).real(), b(0)};
}

BBasisMap build_b_basis_map(const QuadratureCoefficients& q, double omega_start, double m,
                            const UnitSystem&) {
    // (b^2, b^dagger b, b^dagger^2, 1) in terms of (Q^2, P^2, S, 1), S = <QP + PQ>/2,
    // using b = sqrt(c)(A Q + B P) and [Q, P] = i hbar.
    const cplx A = q.A;
    const cplx B = q.B;
    const double c = q.c;
    Eigen::Matrix4cd K;
    K << c * A * A, c * B * B, 2.0 * c * A * B, 0.0,
        c * std::norm(A), c * std::norm(B), 2.0 * c * std::real(std::conj(A) * B), -0.5,
        c * std::conj(A * A), c * std::conj(B * B), 2.0 * c * std::conj(A * B), 0.0,
        0.0, 0.0, 0.0, 1.0;

    const double w = omega_start;
    Eigen::Matrix4cd M1;
    M1 << 0.5 * m * w * w, 1.0 / (2.0 * m), 0.0, 0.0,
        -0.5 * m * w * w, 1.0 / (2.0 * m), 0.0, 0.0,
        0.0, 0.0, w, 0.0,
        0.0, 0.0, 0.0, 1.0;

    Eigen::JacobiSVD<Eigen::Matrix4cd> svd(K);
    const auto& sv = svd.singularValues();
    if (sv(3) == 0.0 || sv(0) / sv(3) > 1e12)
        throw DefectiveMatrixError("b-basis map is ill-conditioned");
    return {M1 * K.inverse()};
}

BBasisMap build_b_basis_map(const QuadratureCoefficients& coeffs, const Protocol& p, double m,
                            const UnitSystem& u) {
    return build_b_basis_map(coeffs, p.segment(0).omega_start, m, u);
}

ObservableVector observables_from_params(const GaussianStateParams& st, const Protocol& p,
                                         double t, double m, const UnitSystem& u) {
    NameSample s;
    s.t = t;
    s.segment = p.segment_index(t);
    s.params = st;
    return observables_from_sample(s, p, m, u);
}

ObservableVector observables_from_sample(const NameSample& smp, const Protocol& p, double m,
                                         const UnitSystem& u) {
    const auto& s = p.segment(smp.segment);
    auto q = eigenoperator_coefficients(s.mu, s.omega_start, m, u);
    auto v0 = build_b_basis_map(q, s.omega_start, m, u).apply(moments_from_params(smp.params));
    double tau = std::max(0.0, smp.t - s.t_start);
    return ObservableVector::from(segment_propagator(s.mu, s.omega_start, tau) * v0.vec());
}

ObservableVector observables_at(const NameTrajectory& traj, const Protocol& p, double t) {
    for (const auto& s : traj.samples)
        if (std::abs(s.t - t) <= 1e-12 * std::max(1.0, std::abs(t)))
            return observables_from_sample(s, p, traj.mass, traj.units);
    throw DomainError("observables_at: t is not a sample time of the trajectory");
}

double coherence_measure(const ObservableVector& v, double omega, const UnitSystem& u) {
    if (!(omega > 0.0))
        throw DomainError("coherence_measure: omega must be positive");
    return std::hypot(v.L, v.C) / (u.hbar * omega);
}

InteractionMoments adiabatic_moments_from_observables(const ObservableVector& v, double omega,
                                                      const UnitSystem& u) {
    double e = u.hbar * omega;
    return {v.H / e - 0.5, cplx(-v.L, v.C) / e};
}

std::vector<AdiabaticSample> adiabatic_evolve(double n0, std::complex<double> s0,
                                              const Protocol& p, const NameProblem& prob,
                                              const std::vector<double>& t_grid) {
    if (t_grid.empty())
        throw DomainError("output grid is empty");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]))
            throw DomainError("output grid must be strictly ascending");
    p.check_time(t_grid.front());
    p.check_time(t_grid.back());
    prob.bath.validate();

    using State3 = std::array<double, 3>;
    auto rhs = [&](const State3& y, State3& dy, double t) {
        t = std::min(t, p.t_final());
        Rates r = adiabatic_rates(prob.bath, p, t, prob.mass, prob.rates, prob.units);
        double w = omega_at(p, t);
        double relax = r.down - r.up;
        dy[0] = -relax * y[0] + r.up;
        // ds/dt = -(2 i omega + relax) s
        dy[1] = -relax * y[1] + 2.0 * w * y[2];
        dy[2] = -relax * y[2] - 2.0 * w * y[1];
    };
    std::vector<AdiabaticSample> out(t_grid.size());
    auto record = [&](std::size_t k, const State3& y) {
        auto& a = out[k];
        a.t = t_grid[k];
        a.n = y[0];
        a.s = {y[1], y[2]};
        double e = prob.units.hbar * omega_at(p, a.t);
        a.v = {e * (a.n + 0.5), -e * y[1], e * y[2], 1.0};
        a.rates = adiabatic_rates(prob.bath, p, a.t, prob.mass, prob.rates, prob.units);
    };
    auto check = [](double t, const State3& y) {
        if (!std::isfinite(y[0]) || !std::isfinite(y[1]) || !std::isfinite(y[2]))
            throw StepFailure("adiabatic solver produced non-finite values at t = " +
                              std::to_string(t));
    };
    State3 x{n0, s0.real(), s0.imag()};
    integrate_on_grid(rhs, x, t_grid, prob.solver.adaptive(), record, check);
    return out;
}

} // namespace namesim
