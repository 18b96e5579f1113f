#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace namesim {

struct BathSpec;

struct SegmentSpec {
    double mu = 0.0;
    double duration = 0.0;
};

// One constant-mu stretch of a (possibly piecewise) protocol.
struct Segment {
    double mu = 0.0;
    double t_start = 0.0;
    double duration = 0.0;
    double omega_start = 0.0;

    double t_end() const { return t_start + duration; }
};

// omega(t) = omega0 / (1 - mu*omega0*t), optionally chained over segments
// with omega continuous at every junction.
class Protocol {
public:
    Protocol(double mu, double omega0, double t_final);
    Protocol(double omega0, const std::vector<SegmentSpec>& segments);

    double omega0() const noexcept { return omega0_; }
    double t_final() const noexcept { return t_final_; }
    bool piecewise() const noexcept { return segments_.size() > 1; }

    // Throws DomainError for piecewise protocols.
    double mu() const;

    std::size_t segment_count() const noexcept { return segments_.size(); }
    const Segment& segment(std::size_t i) const { return segments_.at(i); }
    const std::vector<Segment>& segments() const noexcept { return segments_; }

    // Segment containing t; junction times belong to the later segment.
    std::size_t segment_index(double t) const;

    // Segment i as a standalone protocol starting at t = 0.
    Protocol segment_protocol(std::size_t i) const;

    // Throws DomainError unless 0 <= t <= t_final (up to rounding).
    void check_time(double t) const;

private:
    double omega0_ = 0.0;
    double t_final_ = 0.0;
    std::vector<Segment> segments_;
};

double kappa(double mu);
double kappa(const Protocol& p);

double omega_at(const Protocol& p, double t);

// Theta(t) = integral of omega from 0 to t.
double phase_integral(const Protocol& p, double t);

// (theta_plus, theta_minus) = (-kappa/2 Theta, +kappa/2 Theta).
std::pair<double, double> theta_pm(const Protocol& p, double t);

double alpha_at(const Protocol& p, double t);
double alpha_bar_at(const Protocol& p, double t, double tau_B);

// mu*omega(t)*tau_B; the memory correction is perturbative while |.| < 1.
double memory_parameter(const Protocol& p, double t, double tau_B);

enum class Verdict { pass, warn, fail };

const char* to_string(Verdict v);

struct ValidityRatio {
    const char* name;
    double value;
    Verdict verdict;
};

struct ValidityReport {
    double tau_S = 0.0;
    double tau_B = 0.0;
    double tau_R = 0.0;
    double tau_d = 0.0;
    std::vector<ValidityRatio> ratios;

    Verdict overall() const;
};

Verdict classify_ratio(double value);

ValidityReport validity_report(const Protocol& p, const BathSpec& bath);

} // namespace namesim
