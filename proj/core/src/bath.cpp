#include "namesim/bath.hpp"

#include "namesim/errors.hpp"

#include <cmath>
#include <numbers>

namespace namesim {

void BathSpec::validate() const {
    if (!(temperature >= 0.0))
        throw DomainError("bath temperature must be non-negative");
    if (!(omega_min > 0.0) || !(omega_max > omega_min))
        throw DomainError("bath band must satisfy 0 < omega_min < omega_max");
    if (J0 && !(*J0 >= 0.0))
        throw DomainError("J0 must be non-negative");
    if (spectral == SpectralModel::ohmic && (!(exponent >= 0.0) || !(omega_ref > 0.0)))
        throw DomainError("ohmic bath needs exponent >= 0 and omega_ref > 0");
    if (!(tau_B >= 0.0))
        throw DomainError("tau_B must be non-negative");
    if (n_modes < 1)
        throw DomainError("n_modes must be at least 1");
    if (reference_modes && *reference_modes < 1)
        throw DomainError("reference_modes must be at least 1");
    if (!(bath_mass > 0.0))
        throw DomainError("bath mass must be positive");
    if (density && !(*density > 0.0))
        throw DomainError("density must be positive");
}

double mode_density(const BathSpec& b) {
    if (b.density)
        return *b.density;
    if (b.coupling == CouplingKind::momentum)
        return 1.0;
    int n = b.reference_modes.value_or(b.n_modes);
    return n > 1 ? (n - 1) / b.bandwidth() : 1.0 / b.bandwidth();
}

double spectral_amplitude(const BathSpec& b) {
    return b.J0 ? *b.J0 : b.g * b.g * mode_density(b);
}

double spectral_density(const BathSpec& b, double omega) {
    if (omega < b.omega_min || omega > b.omega_max)
        return 0.0;
    double J = spectral_amplitude(b);
    if (b.spectral == SpectralModel::ohmic)
        J *= std::pow(omega / b.omega_ref, b.exponent);
    return J;
}

double bose_occupation(double omega, double T, const UnitSystem& u) {
    if (!(omega > 0.0))
        throw DomainError("bose_occupation: omega must be positive");
    if (T <= 0.0)
        return 0.0;
    return 1.0 / std::expm1(u.hbar * omega / (u.kB * T));
}

double gamma_rate(const BathSpec& b, double alpha, double m, const UnitSystem& u) {
    if (!(alpha > 0.0))
        throw DomainError("gamma_rate: alpha must be positive");
    double J = spectral_density(b, alpha);
    if (J == 0.0)
        return 0.0;
    double N1 = bose_occupation(alpha, b.temperature, u) + 1.0;
    constexpr double pi = std::numbers::pi;
    if (b.coupling == CouplingKind::position)
        return pi / (u.hbar * b.bath_mass * alpha) * J * N1;
    return m * pi / u.hbar * alpha * J * N1;
}

namespace {

double boltzmann(double omega, double T, const UnitSystem& u) {
    if (T <= 0.0)
        return 0.0;
    return std::exp(-u.hbar * omega / (u.kB * T));
}

double coupling_scale(const RateOptions& opt, double w) {
    return opt.prefactor == CouplingPrefactor::omega_t ? w * w : 1.0;
}

} // namespace

Rates name_rates(const BathSpec& b, const Protocol& p, const QuadratureCoefficients& coeffs,
                 double t, double m, const RateOptions& opt, const UnitSystem& u) {
    const auto& seg = p.segment(p.segment_index(t));
    double w = omega_at(p, t);
    double alpha = 0.5 * coeffs.kappa * w;
    double pref = opt.include_xi_sq ? seg.omega_start / w : 1.0;
    if (opt.memory_correction && b.tau_B != 0.0) {
        alpha *= 1.0 - seg.mu * w * b.tau_B / 2.0;
        pref += seg.mu * b.tau_B * seg.omega_start / 2.0;
    }
    if (!(alpha > 0.0))
        return {};
    Rates r;
    r.down = pref * gamma_rate(b, alpha, m, u) / coeffs.c * coupling_scale(opt, w);
    r.up = r.down * boltzmann(alpha, b.temperature, u);
    return r;
}

Rates name_rates(const BathSpec& b, const Protocol& p, double t, double m,
                 const RateOptions& opt, const UnitSystem& u) {
    const auto& seg = p.segment(p.segment_index(t));
    return name_rates(b, p, eigenoperator_coefficients(seg.mu, seg.omega_start, m, u), t, m, opt,
                      u);
}

Rates adiabatic_rates(const BathSpec& b, const Protocol& p, double t, double m,
                      const RateOptions& opt, const UnitSystem& u) {
    double w = omega_at(p, t);
    double c0 = 2.0 * m * w / u.hbar;
    Rates r;
    r.down = gamma_rate(b, w, m, u) / c0 * coupling_scale(opt, w);
    r.up = r.down * boltzmann(w, b.temperature, u);
    return r;
}

std::pair<double, double> rate_ratio_adiabatic(const BathSpec& b, const Protocol& p, double t,
                                               double m, const UnitSystem& u) {
    double w = omega_at(p, t);
    if (spectral_density(b, w) == 0.0)
        throw DomainError("rate_ratio_adiabatic: J(omega(t)) = 0");
    Rates na = name_rates(b, p, t, m, {}, u);
    Rates ad = adiabatic_rates(b, p, t, m, {}, u);
    double up = ad.up > 0.0 ? na.up / ad.up : na.down / ad.down;
    return {na.down / ad.down, up};
}

const char* to_string(SpectralModel m) {
    return m == SpectralModel::ohmic ? "ohmic" : "flat";
}

const char* to_string(CouplingKind k) {
    return k == CouplingKind::position ? "position" : "momentum";
}

const char* to_string(CouplingPrefactor k) {
    return k == CouplingPrefactor::omega_t ? "omega_t" : "constant";
}

} // namespace namesim
