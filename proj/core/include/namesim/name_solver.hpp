#pragma once

#include "namesim/bath.hpp"
#include "namesim/integrator.hpp"
#include "namesim/protocol.hpp"
#include "namesim/units.hpp"

#include <complex>
#include <vector>

namespace namesim {

struct ObservableVector;

// rho = exp(gamma b^2) exp(beta b^dagger b) exp(gamma* b^dagger^2) / Z
struct GaussianStateParams {
    double beta = -1.0;
    std::complex<double> gamma{0.0, 0.0};
};

// n = <b^dagger b>, s = <b^2> in the interaction picture.
struct InteractionMoments {
    double n = 0.0;
    std::complex<double> s{0.0, 0.0};
};

// (e^{-beta} - 1)^2 - 4|gamma|^2; positive on the physical domain.
double discriminant(const GaussianStateParams& st);
bool is_physical(const GaussianStateParams& st);

double partition_function(const GaussianStateParams& st);

struct NameDerivative {
    double dbeta = 0.0;
    std::complex<double> dgamma{0.0, 0.0};
};

NameDerivative name_rhs(const GaussianStateParams& st, double k_down, double k_up);

InteractionMoments moments_from_params(const GaussianStateParams& st);
GaussianStateParams params_from_moments(const InteractionMoments& mom);

struct Attractor {
    GaussianStateParams params;
    double occupation = 0.0;
    Rates rates;
};

Attractor instantaneous_attractor(const Protocol& p, const BathSpec& b, double t, double m = 1.0,
                                  const RateOptions& opt = {}, const UnitSystem& u = {});

struct SolverOptions {
    double rtol = 1e-8;
    double atol = 1e-10;
    double dt_max = 0.0;
    double dt_min = 1e-14;
    std::size_t max_steps = 50'000'000;
    // Nonzero selects fixed-step RK4 with this step instead of adaptive stepping.
    double fixed_dt = 0.0;

    AdaptiveOptions adaptive() const;
};

struct NameSample {
    double t = 0.0;
    std::size_t segment = 0;
    GaussianStateParams params;
    Rates rates;
};

struct NameTrajectory {
    std::vector<NameSample> samples;
    double mass = 1.0;
    UnitSystem units;
};

struct NameProblem {
    BathSpec bath;
    double mass = 1.0;
    RateOptions rates;
    SolverOptions solver;
    UnitSystem units;
};

// Integrates the (beta, gamma) flow on t_grid (ascending, within the protocol
// domain, starting at 0). Piecewise protocols hand the state across segment
// junctions through the observables, which are continuous there.
NameTrajectory integrate_name(const GaussianStateParams& st0, const Protocol& p,
                              const NameProblem& prob, const std::vector<double>& t_grid);

// Gaussian parameters whose t = 0 observables equal v0.
GaussianStateParams params_from_observables(const ObservableVector& v0, const Protocol& p,
                                            double m, const UnitSystem& u = {});

} // namespace namesim
