#pragma once

#include "namesim/errors.hpp"

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>
#include <boost/numeric/odeint/external/eigen/eigen.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace namesim {

namespace odeint = boost::numeric::odeint;

struct AdaptiveOptions {
    double rtol = 1e-8;
    double atol = 1e-10;
    // 0 means unbounded.
    double dt_max = 0.0;
    double dt_min = 1e-14;
    double dt_initial = 1e-4;
    std::size_t max_steps = 50'000'000;
};

// Adaptive Dormand-Prince 4(5) over an ascending output grid. record(k, x) is
// called at every grid time, check(t, x) after every accepted step.
template <class State, class Rhs, class Record, class Check>
std::size_t integrate_on_grid(Rhs&& rhs, State& x, const std::vector<double>& grid,
                              const AdaptiveOptions& o, Record&& record, Check&& check) {
    if (grid.empty())
        return 0;
    auto stepper = odeint::make_controlled(o.atol, o.rtol, odeint::runge_kutta_dopri5<State>());
    double t = grid.front();
    double dt = o.dt_initial;
    if (o.dt_max > 0.0)
        dt = std::min(dt, o.dt_max);
    std::size_t steps = 0;
    record(std::size_t{0}, x);
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const double target = grid[k];
        if (!(target >= t))
            throw StepFailure("output grid must be ascending");
        while (t < target) {
            double remaining = target - t;
            bool last = dt >= remaining;
            double h = last ? remaining : dt;
            double h_try = h;
            if (stepper.try_step(rhs, x, t, h_try) == odeint::success) {
                ++steps;
                if (last)
                    t = target;
                check(t, x);
                if (!last || h_try > dt)
                    dt = h_try;
            } else {
                dt = h_try;
                if (dt < o.dt_min * std::max(1.0, std::abs(t)))
                    throw StepFailure("step size underflow at t = " + std::to_string(t));
            }
            if (o.dt_max > 0.0)
                dt = std::min(dt, o.dt_max);
            if (steps > o.max_steps)
                throw StepFailure("maximum number of steps exceeded at t = " + std::to_string(t));
            if (!std::isfinite(dt))
                throw StepFailure("non-finite step size at t = " + std::to_string(t));
        }
        record(k, x);
    }
    return steps;
}

enum class Tableau { rk4, dopri5, cash_karp54, fehlberg78 };

Tableau parse_tableau(const std::string& name);
const char* to_string(Tableau t);

using EigenRk4 = odeint::runge_kutta4<Eigen::VectorXd, double, Eigen::VectorXd, double,
                                      odeint::vector_space_algebra>;
using EigenDopri5 = odeint::runge_kutta_dopri5<Eigen::VectorXd, double, Eigen::VectorXd, double,
                                               odeint::vector_space_algebra>;
using EigenCashKarp = odeint::runge_kutta_cash_karp54<Eigen::VectorXd, double, Eigen::VectorXd,
                                                      double, odeint::vector_space_algebra>;
using EigenFehlberg = odeint::runge_kutta_fehlberg78<Eigen::VectorXd, double, Eigen::VectorXd,
                                                     double, odeint::vector_space_algebra>;

// Fixed-step explicit integration with t_k = t0 + k*dt. record(k, t, x) is
// called every `stride` steps including k = 0 and k = n_steps.
template <class Rhs, class Record>
void integrate_fixed(Tableau tableau, Rhs&& rhs, Eigen::VectorXd& x, double t0, double dt,
                     std::size_t n_steps, std::size_t stride, Record&& record) {
    auto run = [&](auto stepper) {
        for (std::size_t k = 0;; ++k) {
            double t = t0 + static_cast<double>(k) * dt;
            if (k % stride == 0 || k == n_steps)
                record(k, t, x);
            if (k == n_steps)
                break;
            stepper.do_step(rhs, x, t, dt);
        }
    };
    switch (tableau) {
    case Tableau::rk4: run(EigenRk4{}); break;
    case Tableau::dopri5: run(EigenDopri5{}); break;
    case Tableau::cash_karp54: run(EigenCashKarp{}); break;
    case Tableau::fehlberg78: run(EigenFehlberg{}); break;
    }
}

} // namespace namesim
