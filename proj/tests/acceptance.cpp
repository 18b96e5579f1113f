// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "oracles.hpp"

#include "namesim/namesim.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace namesim;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<double> grid(double t_final, int n) {
    std::vector<double> g(n + 1);
    for (int i = 0; i <= n; ++i)
        g[i] = t_final * i / n;
    return g;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Fig 1 initial-state mapping.
void fig1_mapping(Outcome& o) {
    auto t0 = Clock::now();
    Protocol p(-0.1, 40.0, 2.0);
    NameProblem prob;
    prob.bath.temperature = 20.0;
    prob.bath.g = 1.0;
    auto traj = integrate_name({-1.0, {0.5, 0.0}}, p, prob, {0.0});
    auto v = observables_at(traj, p, 0.0);
    double secs = seconds_since(t0);
    o.detail << "(H, L, C) = (" << v.H << ", " << v.L << ", " << v.C << ")";
    o.require(rel(v.H, 55.3) < 0.02 && rel(v.L, -20.5) < 0.02 && rel(v.C, 3.79) < 0.02,
              "within 2% of (55.3, -20.5, 3.79)");
    // deviation from the one-decimal quotes (55, -20.5, 3.7), reported only
    o.detail << ", vs quoted (" << rel(v.H, 55.0) << ", " << rel(v.L, -20.5) << ", "
             << rel(v.C, 3.7) << ")";
    o.require(std::abs(v.C - 3.7) < 0.1, "C rounds to the quoted 3.7 at one-decimal resolution");
    o.detail << ", " << secs << " s";
    o.require(secs < 1.0, "runtime < 1 s");
}

// Fig 4 attractor energies and coherences at t = 0.
void fig4_attractor(Outcome& o) {
    auto t0 = Clock::now();
    BathSpec b;
    b.temperature = 20.0;
    b.g = 1.0;
    std::vector<double> mus{-0.1, -0.01, -0.001};
    std::vector<double> H_ref{26.3, 26.2, 26.2};
    std::vector<double> C_ref{1.31, 0.131, 0.0131};
    std::vector<double> Cs;
    o.detail << "(H, C) =";
    for (std::size_t i = 0; i < mus.size(); ++i) {
        Protocol p(mus[i], 40.0, 2.0);
        auto a = instantaneous_attractor(p, b, 0.0);
        auto v = observables_from_params(a.params, p, 0.0, 1.0);
        o.detail << " (" << v.H << ", " << v.C << ")";
        o.require(std::abs(v.H - H_ref[i]) <= 0.1, "H within 0.1");
        o.require(rel(std::abs(v.C), C_ref[i]) < 0.02, "|C| within 2%");
        Cs.push_back(v.C);
    }
    // least-squares line through the origin and through all points
    double sxx = 0, sxy = 0, sx = 0, sy = 0;
    for (std::size_t i = 0; i < mus.size(); ++i) {
        sxx += mus[i] * mus[i];
        sxy += mus[i] * Cs[i];
        sx += mus[i];
        sy += Cs[i];
    }
    double n = static_cast<double>(mus.size());
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double intercept = (sy - slope * sx) / n;
    double worst = 0.0;
    for (std::size_t i = 0; i < mus.size(); ++i)
        worst = std::max(worst, rel(slope * mus[i] + intercept, Cs[i]));
    double secs = seconds_since(t0);
    o.detail << ", slope " << slope << ", max fit error " << worst << ", " << secs << " s";
    o.require(worst < 0.01, "linear fit error < 1%");
    o.require(secs < 1.0, "runtime < 1 s");
}

// Attractor fixed point and detailed balance over random tuples.
void attractor_fixed_point(Outcome& o) {
    std::mt19937 rng(20240601);
    std::uniform_real_distribution<double> umu(-1.9, 1.9), uw(1.0, 100.0), uT(0.5, 200.0),
        ufrac(0.0, 1.0);
    double worst_rhs = 0.0, worst_occ = 0.0;
    int beta_mismatch = 0;
    for (int i = 0; i < 100; ++i) {
        double mu = umu(rng), w0 = uw(rng), T = uT(rng);
        // keep 1 - mu w0 t bounded away from zero
        double t_max = mu > 0 ? 0.9 / (mu * w0) : 5.0 / w0;
        Protocol p(mu, w0, t_max);
        double t = ufrac(rng) * t_max;
        BathSpec b;
        b.temperature = T;
        b.g = 1.0;
        b.omega_min = 1e-6;
        b.omega_max = 1e6;
        auto a = instantaneous_attractor(p, b, t);
        auto d = name_rhs(a.params, a.rates.down, a.rates.up);
        worst_rhs = std::max({worst_rhs, std::abs(d.dbeta) / a.rates.down,
                              std::abs(d.dgamma) / a.rates.down});
        if (a.params.beta != -alpha_at(p, t) / T)
            ++beta_mismatch;
        double nbar = bose_occupation(alpha_at(p, t), T);
        worst_occ = std::max(worst_occ, rel(a.occupation, nbar));
    }
    o.detail << "max |rhs|/k_down " << worst_rhs << ", beta mismatches " << beta_mismatch
             << ", max occupation error " << worst_occ;
    o.require(worst_rhs < 1e-12, "fixed point to 1e-12");
    o.require(beta_mismatch == 0, "beta = -alpha/T exactly");
    o.require(worst_occ < 1e-12, "occupation to 1e-12");
}

// Free propagator against moment-ODE integration.
void propagator_oracle(Outcome& o) {
    const double m = 1.0, w0 = 40.0;
    std::array<double, 3> x0{0.03, 25.0, 0.2};
    auto v0 = observables_from_quadratures({x0[0], x0[1], x0[2]}, w0, m);
    double worst = 0.0, worst_cas = 0.0;
    for (double mu : {-0.5, -0.1, 0.0, 0.1, 0.5}) {
        double t_end = oracle::time_for_phase(mu, w0, 20.0);
        Protocol p(mu, w0, t_end * (1 + 1e-12));
        for (int k = 1; k <= 40; ++k) {
            double t = oracle::time_for_phase(mu, w0, 0.5 * k);
            auto ref = oracle::moment_ode(x0, mu, w0, m, t, 1e-14);
            double w = omega_at(p, t);
            auto e = observables_from_quadratures({ref[0], ref[1], ref[2]}, w, m);
            auto v = isolated_evolve(v0, p, t);
            double scale = std::abs(e.H);
            worst = std::max({worst, std::abs(v.H - e.H) / scale, std::abs(v.L - e.L) / scale,
                              std::abs(v.C - e.C) / scale});
            worst_cas = std::max(worst_cas, rel(casimir(v) / (w * w), casimir(v0) / (w0 * w0)));
        }
    }
    o.detail << "max relative error " << worst << ", Casimir drift " << worst_cas;
    o.require(worst < 1e-8, "agreement to 1e-8");
    o.require(worst_cas < 1e-9, "Casimir to 1e-9");
}

// Adiabatic limit and Ohmic suppression.
void adiabatic_limit(Outcome& o) {
    NameProblem prob;
    prob.bath.temperature = 20.0;
    prob.bath.g = 1.0;
    double tau_R = 1.0 / (prob.bath.g * prob.bath.g * mode_density(prob.bath));
    Protocol p(-1e-6, 40.0, tau_R);
    ObservableVector v0{60.0, 0.0, 0.0};
    auto g = grid(tau_R, 100);
    auto st0 = params_from_observables(v0, p, 1.0);
    auto name = integrate_name(st0, p, prob, g);
    auto mom = adiabatic_moments_from_observables(v0, 40.0);
    auto adi = adiabatic_evolve(mom.n, mom.s, p, prob, g);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        worst = std::max(worst, rel(observables_from_sample(name.samples[i], p, 1.0).H, adi[i].v.H));
    double worst_ratio = 0.0;
    for (double t : g) {
        auto [rd, ru] = rate_ratio_adiabatic(prob.bath, p, t);
        worst_ratio = std::max({worst_ratio, std::abs(rd - 1.0), std::abs(ru - 1.0)});
    }
    BathSpec ohm = prob.bath;
    ohm.spectral = SpectralModel::ohmic;
    ohm.exponent = 1.0;
    ohm.omega_ref = 40.0;
    int violations = 0, checked = 0;
    for (double mu : {-1.99, -1.5, -1.0, -0.5, -0.1, -1e-3, 1e-3, 0.1, 0.5, 1.0, 1.5, 1.99}) {
        for (double T : {0.0, 1.0, 20.0, 1e3}) {
            ohm.temperature = T;
            double t_max = mu > 0 ? 0.5 / (mu * 40.0) : 1.0;
            Protocol q(mu, 40.0, t_max);
            for (double t : grid(t_max, 20)) {
                if (spectral_density(ohm, alpha_at(q, t)) == 0.0 ||
                    spectral_density(ohm, omega_at(q, t)) == 0.0)
                    continue;
                ++checked;
                double kn = name_rates(ohm, q, t, 1.0).down;
                double ka = adiabatic_rates(ohm, q, t, 1.0).down;
                if (kn > ka * (1 + 1e-12))
                    ++violations;
            }
        }
    }
    o.detail << "max energy deviation over tau_R " << worst << ", max |ratio - 1| "
             << worst_ratio << ", Ohmic points " << checked << " with " << violations
             << " violations";
    o.require(worst < 1e-3, "energies within 0.1%");
    o.require(worst_ratio < 1e-5, "rate ratio within 1e-5");
    o.require(checked > 0 && violations == 0, "Ohmic suppression");
}

// Round trip through the moment map.
void round_trip(Outcome& o) {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> ub(-6.0, -1e-3), ua(0.0, 0.95), uph(0.0, 2 * std::numbers::pi);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        double beta = ub(rng);
        double bound = 0.5 * std::expm1(-beta);
        GaussianStateParams st{beta, std::polar(ua(rng) * bound, uph(rng))};
        auto back = params_from_moments(moments_from_params(st));
        worst = std::max({worst, rel(back.beta, beta),
                          std::abs(back.gamma - st.gamma) / std::max(bound, 1e-300)});
    }
    o.detail << "max error " << worst;
    o.require(worst < 1e-10, "identity to 1e-10");
}

RunConfig bench_config(int n_modes, double g) {
    auto cfg = parse_config("", "fig5");
    cfg.bath.n_modes = n_modes;
    cfg.bath.reference_modes = 1000;
    cfg.bath.g = g;
    return cfg;
}

double max_energy_deviation(const std::vector<TrajectoryRow>& a,
                            const std::vector<TrajectoryRow>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, rel(*a[i].H, *b[i].H));
    return worst;
}

// Exact benchmark agreement.
void exact_benchmark(Outcome& o) {
    std::vector<double> devs;
    double secs200 = 0.0;
    for (int n : {100, 200, 400}) {
        auto cfg = bench_config(n, 0.025);
        auto p = cfg.protocol.build();
        auto t0 = Clock::now();
        auto exact = exact_rows(cfg, p);
        std::vector<double> g;
        for (const auto& r : exact)
            g.push_back(r.t);
        auto name = name_rows(cfg, p, g);
        if (n == 200)
            secs200 = seconds_since(t0);
        if (exact.size() != name.size() || exact.back().t != 50.0) {
            o.require(false, "bench grid covers [0, 50]");
            return;
        }
        devs.push_back(max_energy_deviation(name, exact));
    }
    o.detail << "max |dH|/H at N = 100, 200, 400: " << devs[0] << ", " << devs[1] << ", "
             << devs[2];
    o.require(devs[1] < 0.1, "N = 200 within 10%");
    o.require(devs[1] <= devs[0] && devs[2] <= devs[1], "non-increasing in N");

    auto cfg = bench_config(200, 0.0);
    auto p = cfg.protocol.build();
    auto exact = exact_rows(cfg, p);
    std::vector<double> g;
    for (const auto& r : exact)
        g.push_back(r.t);
    auto iso = isolated_rows(cfg, p, g);
    auto name = name_rows(cfg, p, g);
    double d_exact = max_energy_deviation(exact, iso);
    double d_name = max_energy_deviation(name, iso);
    o.detail << "; g = 0 vs isolated: exact " << d_exact << ", NAME " << d_name
             << "; N = 200 run " << secs200 << " s";
    o.require(d_exact < 1e-6 && d_name < 1e-6, "g = 0 reduces to isolated within 1e-6");
    o.require(secs200 < 300.0, "N = 200 under 5 min");
}

// Memory correction: exact reduction at tau_B = 0 and O(mu omega tau_B) response.
void memory_correction(Outcome& o) {
    BathSpec b;
    b.temperature = 20.0;
    b.g = 1.0;
    Protocol p(-0.1, 40.0, 2.0);
    RateOptions on;
    on.memory_correction = true;
    auto g = grid(2.0, 200);
    bool identical = true;
    for (double t : g) {
        Rates r0 = name_rates(b, p, t, 1.0), r1 = name_rates(b, p, t, 1.0, on);
        identical = identical && r0.down == r1.down && r0.up == r1.up;
    }
    double abar = alpha_bar_at(p, 0.0, 0.01);

    b.tau_B = 0.01;
    double rate_ratio = 0.0;
    for (double t : g) {
        Rates r0 = name_rates(b, p, t, 1.0), r1 = name_rates(b, p, t, 1.0, on);
        double eps = std::abs(memory_parameter(p, t, b.tau_B));
        rate_ratio = std::max(rate_ratio, std::max(rel(r1.down, r0.down), rel(r1.up, r0.up)) / eps);
    }

    NameProblem off_prob;
    off_prob.bath = b;
    NameProblem on_prob = off_prob;
    on_prob.rates = on;
    GaussianStateParams st{-1.0, {0.5, 0.0}};
    auto a = integrate_name(st, p, off_prob, g);
    auto c = integrate_name(st, p, on_prob, g);
    double occ_ratio = 0.0;
    for (std::size_t i = 1; i < g.size(); ++i) {
        double n0 = moments_from_params(a.samples[i].params).n;
        double n1 = moments_from_params(c.samples[i].params).n;
        occ_ratio = std::max(occ_ratio, rel(n1, n0) / std::abs(memory_parameter(p, g[i], b.tau_B)));
    }
    o.detail << "tau_B = 0 identical: " << (identical ? "yes" : "no") << ", alpha_bar(0) = "
             << abar << ", rate change / |mu omega tau_B| = " << rate_ratio
             << ", occupation change / |mu omega tau_B| = " << occ_ratio;
    o.require(identical, "tau_B = 0 reproduces the rates exactly");
    o.require(std::abs(abar - 40.749) < 5e-4, "alpha_bar = 40.749");
    o.require(rate_ratio > 1.0 / 3 && rate_ratio < 3.0, "rate response within a factor 3");
    o.require(occ_ratio > 1.0 / 3 && occ_ratio < 3.0, "trajectory response within a factor 3");
}

// Coherence generation by the non-adiabatic drive.
void coherence_generation(Outcome& o) {
    NameProblem prob;
    prob.bath.temperature = 20.0;
    prob.bath.g = 1.0;
    Protocol p(-0.1, 40.0, 2.0);
    ObservableVector v0{60.0, 0.0, 0.0};
    auto g = grid(2.0, 200);
    auto name = integrate_name(params_from_observables(v0, p, 1.0), p, prob, g);
    double peak = 0.0;
    for (const auto& s : name.samples)
        peak = std::max(peak, coherence_measure(observables_from_sample(s, p, 1.0), omega_at(p, s.t)));
    auto mom = adiabatic_moments_from_observables(v0, 40.0);
    auto adi = adiabatic_evolve(mom.n, mom.s, p, prob, g);
    double adi_peak = 0.0;
    for (const auto& s : adi)
        adi_peak = std::max(adi_peak, coherence_measure(s.v, omega_at(p, s.t)));
    o.detail << "NAME peak coherence " << peak << ", adiabatic peak " << adi_peak;
    o.require(peak > 1e-3, "NAME coherence exceeds 1e-3");
    o.require(adi_peak == 0.0, "adiabatic coherence stays 0");
}

} // namespace

int main(int argc, char** argv) {
    struct Criterion {
        const char* name;
        std::function<void(Outcome&)> run;
    };
    std::vector<Criterion> criteria{
        {"fig1-state-mapping", fig1_mapping},
        {"fig4-attractor-values", fig4_attractor},
        {"attractor-fixed-point", attractor_fixed_point},
        {"propagator-oracle", propagator_oracle},
        {"adiabatic-limit", adiabatic_limit},
        {"round-trip-inversion", round_trip},
        {"exact-benchmark", exact_benchmark},
        {"memory-correction", memory_correction},
        {"coherence-generation", coherence_generation},
    };
    // an optional argument selects a single criterion
    std::string only = argc > 1 ? argv[1] : "";
    int failed = 0, ran = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && only != c.name)
            continue;
        ++ran;
        Outcome o;
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        if (!o.pass)
            ++failed;
        std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.str().c_str());
        std::fflush(stdout);
    }
    if (ran == 0) {
        std::fprintf(stderr, "unknown criterion '%s'\n", only.c_str());
        return 2;
    }
    return failed == 0 ? 0 : 1;
}
