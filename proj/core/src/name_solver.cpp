#include "namesim/name_solver.hpp"

#include "namesim/errors.hpp"
#include "namesim/propagation.hpp"

#include <array>
#include <cmath>
#include <string>

namespace namesim {

double discriminant(const GaussianStateParams& st) {
    double xm1 = std::expm1(-st.beta);
    return xm1 * xm1 - 4.0 * std::norm(st.gamma);
}

bool is_physical(const GaussianStateParams& st) {
    return std::isfinite(st.beta) && std::isfinite(st.gamma.real()) &&
           std::isfinite(st.gamma.imag()) && st.beta < 0.0 && discriminant(st) > 0.0;
}

namespace {

void require_physical(const GaussianStateParams& st, const char* where) {
    if (!is_physical(st))
        throw PhysicalityError(std::string(where) + ": state outside the physical domain (beta = " +
                               std::to_string(st.beta) + ", |gamma| = " +
                               std::to_string(std::abs(st.gamma)) + ")");
}

} // namespace

double partition_function(const GaussianStateParams& st) {
    require_physical(st, "partition_function");
    return std::exp(-st.beta) / std::sqrt(discriminant(st));
}

NameDerivative name_rhs(const GaussianStateParams& st, double k_down, double k_up) {
    double eb = std::exp(st.beta);
    double emb = std::exp(-st.beta);
    NameDerivative d;
    d.dbeta = k_down * std::expm1(st.beta) + k_up * (std::expm1(-st.beta) + 4.0 * eb * std::norm(st.gamma));
    d.dgamma = (k_down + k_up) * st.gamma - 2.0 * k_up * st.gamma * emb;
    return d;
}

InteractionMoments moments_from_params(const GaussianStateParams& st) {
    require_physical(st, "moments_from_params");
    double delta = discriminant(st);
    return {std::expm1(-st.beta) / delta, 2.0 * std::conj(st.gamma) / delta};
}

GaussianStateParams params_from_moments(const InteractionMoments& mom) {
    double gap = mom.n * mom.n - std::norm(mom.s);
    if (!(mom.n > 0.0) || !(gap > 0.0))
        throw PhysicalityError("params_from_moments: requires n > 0 and n^2 > |s|^2");
    double D = 1.0 / gap;
    return {-std::log1p(mom.n * D), std::conj(mom.s) * D / 2.0};
}

Attractor instantaneous_attractor(const Protocol& p, const BathSpec& b, double t, double m,
                                  const RateOptions& opt, const UnitSystem& u) {
    if (!(b.temperature > 0.0))
        throw DomainError("instantaneous_attractor: requires T > 0");
    Attractor a;
    a.rates = name_rates(b, p, t, m, opt, u);
    if (!(a.rates.down > 0.0))
        throw DomainError("instantaneous_attractor: k_down = 0, no coupling at alpha(t)");
    double alpha = opt.memory_correction ? alpha_bar_at(p, t, b.tau_B) : alpha_at(p, t);
    double x = u.hbar * alpha / (u.kB * b.temperature);
    a.params = {-x, {0.0, 0.0}};
    a.occupation = 1.0 / std::expm1(x);
    return a;
}

AdaptiveOptions SolverOptions::adaptive() const {
    AdaptiveOptions a;
    a.rtol = rtol;
    a.atol = atol;
    a.dt_max = dt_max;
    a.dt_min = dt_min;
    a.max_steps = max_steps;
    return a;
}

namespace {

using State3 = std::array<double, 3>;

State3 pack(const GaussianStateParams& st) { return {st.beta, st.gamma.real(), st.gamma.imag()}; }
GaussianStateParams unpack(const State3& x) { return {x[0], {x[1], x[2]}}; }

void validate_grid(const Protocol& p, const std::vector<double>& grid) {
    if (grid.empty())
        throw DomainError("output grid is empty");
    if (std::abs(grid.front()) > 1e-12 * std::max(1.0, p.t_final()))
        throw DomainError("output grid must start at t = 0");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw DomainError("output grid must be strictly ascending");
    p.check_time(grid.back());
}

// Integrates one segment over local_grid; record(k, x) at every local grid point.
template <class Record>
void run_segment(const Protocol& p, const NameProblem& prob, std::size_t seg,
                 const QuadratureCoefficients& q, State3& x, const std::vector<double>& local_grid,
                 Record&& record) {
    auto rhs = [&](const State3& y, State3& dy, double t) {
        Rates r = name_rates(prob.bath, p, q, std::min(t, p.segment(seg).t_end()), prob.mass,
                             prob.rates, prob.units);
        NameDerivative d = name_rhs(unpack(y), r.down, r.up);
        dy = {d.dbeta, d.dgamma.real(), d.dgamma.imag()};
    };
    auto check = [](double t, const State3& y) {
        if (!is_physical(unpack(y)))
            throw PhysicalityError("NAME state left the physical domain at t = " +
                                   std::to_string(t));
    };
    if (prob.solver.fixed_dt > 0.0) {
        odeint::runge_kutta4<State3> stepper;
        record(std::size_t{0}, x);
        for (std::size_t k = 1; k < local_grid.size(); ++k) {
            double t0 = local_grid[k - 1];
            double span = local_grid[k] - t0;
            auto n = static_cast<std::size_t>(std::ceil(span / prob.solver.fixed_dt - 1e-9));
            n = std::max<std::size_t>(n, 1);
            double h = span / static_cast<double>(n);
            for (std::size_t j = 0; j < n; ++j) {
                stepper.do_step(rhs, x, t0 + static_cast<double>(j) * h, h);
                check(t0 + static_cast<double>(j + 1) * h, x);
            }
            record(k, x);
        }
        return;
    }
    integrate_on_grid(rhs, x, local_grid, prob.solver.adaptive(), record, check);
}

} // namespace

NameTrajectory integrate_name(const GaussianStateParams& st0, const Protocol& p,
                              const NameProblem& prob, const std::vector<double>& t_grid) {
    validate_grid(p, t_grid);
    require_physical(st0, "integrate_name");
    prob.bath.validate();

    NameTrajectory traj;
    traj.mass = prob.mass;
    traj.units = prob.units;
    traj.samples.reserve(t_grid.size());

    State3 x = pack(st0);
    std::size_t gi = 0;
    const std::size_t nseg = p.segment_count();
    for (std::size_t seg = 0; seg < nseg && gi < t_grid.size(); ++seg) {
        const auto& s = p.segment(seg);
        const bool last = seg + 1 == nseg;
        auto q = eigenoperator_coefficients(s.mu, s.omega_start, prob.mass, prob.units);

        std::vector<double> local{s.t_start};
        std::vector<std::size_t> out_index{SIZE_MAX};
        while (gi < t_grid.size() && (last || t_grid[gi] < s.t_end())) {
            if (t_grid[gi] == s.t_start) {
                out_index.front() = gi;
            } else {
                local.push_back(std::min(t_grid[gi], s.t_end()));
                out_index.push_back(gi);
            }
            ++gi;
        }
        if (!last && local.back() < s.t_end()) {
            local.push_back(s.t_end());
            out_index.push_back(SIZE_MAX);
        }

        run_segment(p, prob, seg, q, x, local, [&](std::size_t k, const State3& y) {
            if (out_index[k] == SIZE_MAX)
                return;
            NameSample smp;
            smp.t = t_grid[out_index[k]];
            smp.segment = seg;
            smp.params = unpack(y);
            smp.rates = name_rates(prob.bath, p, q, std::min(smp.t, s.t_end()), prob.mass,
                                   prob.rates, prob.units);
            traj.samples.push_back(smp);
        });

        if (!last) {
            // Observables are continuous across the junction; re-express them
            // in the next segment's eigenoperator basis.
            auto map = build_b_basis_map(q, s.omega_start, prob.mass, prob.units);
            Eigen::Vector4d v = segment_propagator(s.mu, s.omega_start, s.duration) *
                                map.apply(moments_from_params(unpack(x))).vec();
            const auto& nxt = p.segment(seg + 1);
            auto qn = eigenoperator_coefficients(nxt.mu, nxt.omega_start, prob.mass, prob.units);
            auto mapn = build_b_basis_map(qn, nxt.omega_start, prob.mass, prob.units);
            x = pack(params_from_moments(mapn.pull_back(ObservableVector::from(v))));
        }
    }
    return traj;
}

GaussianStateParams params_from_observables(const ObservableVector& v0, const Protocol& p,
                                            double m, const UnitSystem& u) {
    const auto& s = p.segment(0);
    auto q = eigenoperator_coefficients(s.mu, s.omega_start, m, u);
    return params_from_moments(build_b_basis_map(q, s.omega_start, m, u).pull_back(v0));
}

} // namespace namesim
