#pragma once

#include "namesim/algebra.hpp"
#include "namesim/bath.hpp"
#include "namesim/name_solver.hpp"
#include "namesim/protocol.hpp"
#include "namesim/units.hpp"

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace namesim {

// (H, L, C, I): energy, kinetic minus potential, omega * <QP + PQ>/2, identity.
struct ObservableVector {
    double H = 0.0;
    double L = 0.0;
    double C = 0.0;
    double I = 1.0;

    Eigen::Vector4d vec() const { return {H, L, C, I}; }
    static ObservableVector from(const Eigen::Vector4d& v) { return {v(0), v(1), v(2), v(3)}; }
};

// H^2 - L^2 - C^2.
double casimir(const ObservableVector& v);

// Second moments <Q^2>, <P^2>, <QP + PQ>/2.
struct QuadratureMoments {
    double Q2 = 0.0;
    double P2 = 0.0;
    double S = 0.0;
};

ObservableVector observables_from_quadratures(const QuadratureMoments& q, double omega, double m);
QuadratureMoments quadratures_from_observables(const ObservableVector& v, double omega, double m);

Eigen::Matrix4d free_propagator_matrix(const Protocol& p, double t);
// Propagator of one constant-mu stretch of length tau starting at omega_start.
Eigen::Matrix4d segment_propagator(double mu, double omega_start, double tau);

ObservableVector isolated_evolve(const ObservableVector& v0, const Protocol& p, double t);

// Maps (<b^2>, <b^dagger b>, <b^dagger^2>, 1) to (H, L, C, I) at the start of
// the segment whose initial frequency is omega_start.
struct BBasisMap {
    Eigen::Matrix4cd M;

    Eigen::Matrix4cd inverse() const;
    ObservableVector apply(const InteractionMoments& mom) const;
    InteractionMoments pull_back(const ObservableVector& v) const;
};

BBasisMap build_b_basis_map(const QuadratureCoefficients& coeffs, double omega_start, double m,
                            const UnitSystem& u = {});
BBasisMap build_b_basis_map(const QuadratureCoefficients& coeffs, const Protocol& p, double m,
                            const UnitSystem& u = {});

// Observables at time t of the state whose segment-local parameters are st.
ObservableVector observables_from_params(const GaussianStateParams& st, const Protocol& p,
                                         double t, double m, const UnitSystem& u = {});
ObservableVector observables_from_sample(const NameSample& s, const Protocol& p, double m,
                                         const UnitSystem& u = {});

// t must be a sample time of the trajectory (to 1e-12 relative).
ObservableVector observables_at(const NameTrajectory& traj, const Protocol& p, double t);

double coherence_measure(const ObservableVector& v, double omega, const UnitSystem& u = {});

struct AdiabaticSample {
    double t = 0.0;
    double n = 0.0;
    std::complex<double> s{0.0, 0.0};
    ObservableVector v;
    Rates rates;
};

// n, s of the instantaneous a(t) for observables at frequency omega.
InteractionMoments adiabatic_moments_from_observables(const ObservableVector& v, double omega,
                                                      const UnitSystem& u = {});

std::vector<AdiabaticSample> adiabatic_evolve(double n0, std::complex<double> s0,
                                              const Protocol& p, const NameProblem& prob,
                                              const std::vector<double>& t_grid);

} // namespace namesim
