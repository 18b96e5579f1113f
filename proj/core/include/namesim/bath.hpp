#pragma once

#include "namesim/algebra.hpp"
#include "namesim/protocol.hpp"
#include "namesim/units.hpp"

#include <optional>

namespace namesim {

enum class SpectralModel { flat, ohmic };

// Which system quadrature couples linearly to the bath coordinates.
enum class CouplingKind { momentum, position };

// Time profile s(t) of the system-bath coupling: 1 or omega(t).
enum class CouplingPrefactor { constant, omega_t };

struct BathSpec {
    double temperature = 4.0;
    SpectralModel spectral = SpectralModel::flat;
    // Spectral amplitude; unset means g^2 times the mode density.
    std::optional<double> J0;
    double exponent = 1.0;
    double omega_ref = 1.0;
    double omega_min = 0.6;
    double omega_max = 1000.0;
    double g = 0.025;
    double tau_B = 0.0;
    int n_modes = 1000;
    // Mode count whose spectral density is kept fixed when n_modes changes;
    // unset means n_modes.
    std::optional<int> reference_modes;
    CouplingKind coupling = CouplingKind::momentum;
    double bath_mass = 1.0;
    // Modes per unit frequency used for the default J0; unset picks 1 for
    // momentum coupling and the discretized-bath density for position coupling.
    std::optional<double> density;

    double bandwidth() const { return omega_max - omega_min; }
    void validate() const;
};

double mode_density(const BathSpec& b);
double spectral_amplitude(const BathSpec& b);

// J(omega), hard-cut outside [omega_min, omega_max].
double spectral_density(const BathSpec& b, double omega);

double bose_occupation(double omega, double T, const UnitSystem& u = {});

// Golden-rule decay frequency at effective frequency alpha.
double gamma_rate(const BathSpec& b, double alpha, double m, const UnitSystem& u = {});

struct RateOptions {
    bool include_xi_sq = true;
    bool memory_correction = false;
    CouplingPrefactor prefactor = CouplingPrefactor::constant;
};

struct Rates {
    double down = 0.0;
    double up = 0.0;
};

// NAME rates at t; coeffs must belong to the segment containing t.
Rates name_rates(const BathSpec& b, const Protocol& p, const QuadratureCoefficients& coeffs,
                 double t, double m, const RateOptions& opt = {}, const UnitSystem& u = {});
Rates name_rates(const BathSpec& b, const Protocol& p, double t, double m,
                 const RateOptions& opt = {}, const UnitSystem& u = {});

// Rates of the adiabatic master equation, jump operator a(t).
Rates adiabatic_rates(const BathSpec& b, const Protocol& p, double t, double m,
                      const RateOptions& opt = {}, const UnitSystem& u = {});

// (k_down / k_down_adi, k_up / k_up_adi).
std::pair<double, double> rate_ratio_adiabatic(const BathSpec& b, const Protocol& p, double t,
                                               double m = 1.0, const UnitSystem& u = {});

const char* to_string(SpectralModel m);
const char* to_string(CouplingKind k);
const char* to_string(CouplingPrefactor k);

} // namespace namesim
