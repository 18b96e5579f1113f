#include "namesim/protocol.hpp"

#include "namesim/bath.hpp"
#include "namesim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace namesim {

namespace {

constexpr double kTimeSlack = 1e-12;

void check_segment(double mu, double omega_start, double duration, std::size_t index) {
    if (!std::isfinite(mu) || !std::isfinite(duration))
        throw DomainError("segment " + std::to_string(index) + ": non-finite parameters");
    if (std::abs(mu) >= 2.0)
        throw ExceptionalPointError("segment " + std::to_string(index) +
                                    ": |mu| >= 2 is the exceptional point");
    if (duration < 0.0)
        throw DomainError("segment " + std::to_string(index) + ": negative duration");
    if (1.0 - mu * omega_start * duration <= 0.0)
        throw DomainError("segment " + std::to_string(index) +
                          ": omega diverges before the end of the segment");
}

double segment_omega(const Segment& s, double t) {
    double d = 1.0 - s.mu * s.omega_start * (t - s.t_start);
    if (d <= 0.0)
        throw DomainError("omega(t) diverges: 1 - mu*omega0*t <= 0");
    return s.omega_start / d;
}

double segment_phase(const Segment& s, double tau) {
    if (s.mu == 0.0)
        return s.omega_start * tau;
    double d = 1.0 - s.mu * s.omega_start * tau;
    if (d <= 0.0)
        throw DomainError("omega(t) diverges: 1 - mu*omega0*t <= 0");
    return -std::log(d) / s.mu;
}

} // namespace

void UnitSystem::validate() const {
    if (!(hbar > 0.0) || !(kB > 0.0))
        throw DomainError("unit system: hbar and kB must be strictly positive");
}

Protocol::Protocol(double mu, double omega0, double t_final)
    : Protocol(omega0, std::vector<SegmentSpec>{{mu, t_final}}) {}

Protocol::Protocol(double omega0, const std::vector<SegmentSpec>& segments) : omega0_(omega0) {
    if (!(omega0 > 0.0) || !std::isfinite(omega0))
        throw DomainError("omega0 must be positive");
    if (segments.empty())
        throw DomainError("protocol needs at least one segment");
    double t = 0.0;
    double w = omega0;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto& spec = segments[i];
        check_segment(spec.mu, w, spec.duration, i);
        Segment s{spec.mu, t, spec.duration, w};
        segments_.push_back(s);
        t += spec.duration;
        w = w / (1.0 - spec.mu * w * spec.duration);
    }
    t_final_ = t;
}

double Protocol::mu() const {
    if (piecewise())
        throw DomainError("mu is not a single number for a piecewise protocol");
    return segments_.front().mu;
}

void Protocol::check_time(double t) const {
    double slack = kTimeSlack * std::max(1.0, t_final_);
    if (!(t >= -slack && t <= t_final_ + slack))
        throw DomainError("time " + std::to_string(t) + " outside protocol domain [0, " +
                          std::to_string(t_final_) + "]");
}

std::size_t Protocol::segment_index(double t) const {
    check_time(t);
    for (std::size_t i = 0; i + 1 < segments_.size(); ++i)
        if (t < segments_[i].t_end())
            return i;
    return segments_.size() - 1;
}

Protocol Protocol::segment_protocol(std::size_t i) const {
    const auto& s = segments_.at(i);
    return Protocol(s.mu, s.omega_start, s.duration);
}

double kappa(double mu) {
    if (!(std::abs(mu) < 2.0))
        throw ExceptionalPointError("|mu| >= 2 is the exceptional point");
    return std::sqrt(4.0 - mu * mu);
}

double kappa(const Protocol& p) { return kappa(p.mu()); }

double omega_at(const Protocol& p, double t) {
    const auto& s = p.segment(p.segment_index(t));
    return segment_omega(s, t);
}

double phase_integral(const Protocol& p, double t) {
    std::size_t k = p.segment_index(t);
    double theta = 0.0;
    for (std::size_t i = 0; i < k; ++i)
        theta += segment_phase(p.segment(i), p.segment(i).duration);
    const auto& s = p.segment(k);
    return theta + segment_phase(s, t - s.t_start);
}

std::pair<double, double> theta_pm(const Protocol& p, double t) {
    double half = 0.5 * kappa(p.segment(p.segment_index(t)).mu) * phase_integral(p, t);
    return {-half, half};
}

double alpha_at(const Protocol& p, double t) {
    const auto& s = p.segment(p.segment_index(t));
    return 0.5 * kappa(s.mu) * segment_omega(s, t);
}

double alpha_bar_at(const Protocol& p, double t, double tau_B) {
    if (tau_B < 0.0)
        throw DomainError("tau_B must be non-negative");
    const auto& s = p.segment(p.segment_index(t));
    double w = segment_omega(s, t);
    return 0.5 * kappa(s.mu) * w * (1.0 - s.mu * w * tau_B / 2.0);
}

double memory_parameter(const Protocol& p, double t, double tau_B) {
    const auto& s = p.segment(p.segment_index(t));
    return s.mu * segment_omega(s, t) * tau_B;
}

const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::warn: return "warn";
    case Verdict::fail: return "fail";
    }
    return "unknown";
}

Verdict classify_ratio(double value) {
    if (value < 0.1)
        return Verdict::pass;
    if (value < 1.0)
        return Verdict::warn;
    return Verdict::fail;
}

Verdict ValidityReport::overall() const {
    Verdict v = Verdict::pass;
    for (const auto& r : ratios)
        v = std::max(v, r.verdict);
    return v;
}

ValidityReport validity_report(const Protocol& p, const BathSpec& bath) {
    // omega is monotone on each segment, so extremes sit at segment ends.
    double w_min = std::numeric_limits<double>::infinity();
    double w_max = 0.0;
    double tau_d = std::numeric_limits<double>::infinity();
    double mu_max = 0.0;
    for (const auto& s : p.segments()) {
        double a = s.omega_start;
        double b = segment_omega(s, s.t_end());
        w_min = std::min({w_min, a, b});
        w_max = std::max({w_max, a, b});
        mu_max = std::max(mu_max, std::abs(s.mu));
        if (s.mu != 0.0)
            tau_d = std::min(tau_d, 1.0 / (std::abs(s.mu) * std::max(a, b)));
    }

    double dnu = bath.bandwidth();
    ValidityReport r;
    r.tau_S = 1.0 / w_min;
    r.tau_B = bath.tau_B > 0.0 ? bath.tau_B : 1.0 / dnu;
    double g2rho = bath.g * bath.g * mode_density(bath);
    r.tau_R = g2rho > 0.0 ? 1.0 / g2rho : std::numeric_limits<double>::infinity();
    r.tau_d = tau_d;

    double weak = bath.g * bath.g / (dnu * w_min);
    double drive = w_max / (dnu * std::min(1.0, mu_max > 0.0 ? 1.0 / mu_max : 1.0));
    double memory = bath.g * r.tau_B;
    r.ratios = {{"g^2/(dnu*min omega)", weak, classify_ratio(weak)},
                {"max omega/(dnu*min(1,1/|mu|))", drive, classify_ratio(drive)},
                {"g*tau_B", memory, classify_ratio(memory)}};
    return r;
}

} // namespace namesim
