#include "namesim/scenario.hpp"

#include "namesim/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

#ifndef NAMESIM_VERSION
#define NAMESIM_VERSION "0.0.0"
#endif

namespace namesim {

const char* library_version() { return NAMESIM_VERSION; }

std::vector<double> uniform_grid(double t_final, int samples) {
    if (samples < 1)
        throw DomainError("grid needs at least one interval");
    std::vector<double> g(static_cast<std::size_t>(samples) + 1);
    for (int k = 0; k <= samples; ++k)
        g[static_cast<std::size_t>(k)] = t_final * k / samples;
    g.back() = t_final;
    return g;
}

NameProblem name_problem(const RunConfig& cfg) {
    NameProblem prob;
    prob.bath = cfg.bath;
    prob.mass = cfg.mass;
    prob.rates = cfg.rates;
    prob.solver = cfg.solver;
    prob.units = cfg.units;
    return prob;
}

GaussianStateParams initial_params(const RunConfig& cfg, const Protocol& p) {
    if (cfg.initial.params)
        return *cfg.initial.params;
    return params_from_observables(*cfg.initial.observables, p, cfg.mass, cfg.units);
}

ObservableVector initial_observables(const RunConfig& cfg, const Protocol& p) {
    if (cfg.initial.observables)
        return *cfg.initial.observables;
    return observables_from_params(*cfg.initial.params, p, 0.0, cfg.mass, cfg.units);
}

namespace {

TrajectoryRow base_row(double t, double omega, const char* solver, double g) {
    TrajectoryRow r;
    r.t = t;
    r.omega = omega;
    r.solver = solver;
    r.g = g;
    return r;
}

void fill_observables(TrajectoryRow& r, const ObservableVector& v, const UnitSystem& u) {
    r.H = v.H;
    r.L = v.L;
    r.C = v.C;
    r.coherence = coherence_measure(v, r.omega, u);
}

bool attractor_defined(const RunConfig& cfg, const Rates& rates) {
    return cfg.bath.temperature > 0.0 && rates.down > 0.0;
}

} // namespace

std::vector<TrajectoryRow> name_rows(const RunConfig& cfg, const Protocol& p,
                                     const std::vector<double>& grid) {
    NameProblem prob = name_problem(cfg);
    NameTrajectory traj = integrate_name(initial_params(cfg, p), p, prob, grid);
    std::vector<TrajectoryRow> rows;
    rows.reserve(traj.samples.size());
    for (const auto& s : traj.samples) {
        auto r = base_row(s.t, omega_at(p, s.t), "name", cfg.bath.g);
        fill_observables(r, observables_from_sample(s, p, cfg.mass, cfg.units), cfg.units);
        auto mom = moments_from_params(s.params);
        r.beta = s.params.beta;
        r.gamma_re = s.params.gamma.real();
        r.gamma_im = s.params.gamma.imag();
        r.n = mom.n;
        r.k_down = s.rates.down;
        r.k_up = s.rates.up;
        if (attractor_defined(cfg, s.rates)) {
            auto a = instantaneous_attractor(p, cfg.bath, s.t, cfg.mass, cfg.rates, cfg.units);
            auto va = observables_from_params(a.params, p, s.t, cfg.mass, cfg.units);
            r.H_attr = va.H;
            r.C_attr = va.C;
            r.L_attr = va.L;
        }
        rows.push_back(r);
    }
    return rows;
}

std::vector<TrajectoryRow> isolated_rows(const RunConfig& cfg, const Protocol& p,
                                         const std::vector<double>& grid) {
    ObservableVector v0 = initial_observables(cfg, p);
    std::vector<TrajectoryRow> rows;
    rows.reserve(grid.size());
    for (double t : grid) {
        auto r = base_row(t, omega_at(p, t), "isolated", 0.0);
        fill_observables(r, isolated_evolve(v0, p, t), cfg.units);
        rows.push_back(r);
    }
    return rows;
}

std::vector<TrajectoryRow> adiabatic_rows(const RunConfig& cfg, const Protocol& p,
                                          const std::vector<double>& grid) {
    ObservableVector v0 = initial_observables(cfg, p);
    auto mom = adiabatic_moments_from_observables(v0, p.omega0(), cfg.units);
    auto traj = adiabatic_evolve(mom.n, mom.s, p, name_problem(cfg), grid);
    std::vector<TrajectoryRow> rows;
    rows.reserve(traj.size());
    for (const auto& a : traj) {
        auto r = base_row(a.t, omega_at(p, a.t), "adiabatic", cfg.bath.g);
        fill_observables(r, a.v, cfg.units);
        r.n = a.n;
        r.k_down = a.rates.down;
        r.k_up = a.rates.up;
        rows.push_back(r);
    }
    return rows;
}

std::vector<TrajectoryRow> attractor_rows(const RunConfig& cfg, const Protocol& p,
                                          const std::vector<double>& grid) {
    std::vector<TrajectoryRow> rows;
    rows.reserve(grid.size());
    for (double t : grid) {
        Rates k = name_rates(cfg.bath, p, t, cfg.mass, cfg.rates, cfg.units);
        if (!(k.down > 0.0) || !(cfg.bath.temperature > 0.0)) {
            // no attractor without coupling at alpha(t) or at T = 0
            auto r = base_row(t, omega_at(p, t), "attractor", cfg.bath.g);
            r.k_down = k.down;
            r.k_up = k.up;
            rows.push_back(r);
            continue;
        }
        auto a = instantaneous_attractor(p, cfg.bath, t, cfg.mass, cfg.rates, cfg.units);
        auto v = observables_from_params(a.params, p, t, cfg.mass, cfg.units);
        auto r = base_row(t, omega_at(p, t), "attractor", cfg.bath.g);
        r.beta = a.params.beta;
        r.gamma_re = 0.0;
        r.gamma_im = 0.0;
        r.n = a.occupation;
        r.k_down = a.rates.down;
        r.k_up = a.rates.up;
        r.H_attr = v.H;
        r.C_attr = v.C;
        r.L_attr = v.L;
        rows.push_back(r);
    }
    return rows;
}

std::vector<TrajectoryRow> exact_rows(const RunConfig& cfg, const Protocol& p) {
    BathModeSet modes = sample_bath_modes(cfg.bath);
    BenchGenerator gen(modes, cfg.mass, cfg.bench.closure);
    ObservableVector v0 = initial_observables(cfg, p);
    auto y0 = bench_initial_state(gen, system_initial_moments(v0, p.omega0(), cfg.mass, cfg.units),
                                  thermal_initial_moments(modes, cfg.bath.temperature, cfg.units));
    BenchOptions opt;
    opt.dt = cfg.bench.dt;
    opt.horizon = cfg.bench.horizon;
    opt.tableau = cfg.bench.tableau;
    opt.prefactor = cfg.rates.prefactor;
    opt.stride = static_cast<std::size_t>(std::llround(cfg.bench.sample_interval / cfg.bench.dt));
    auto samples = integrate_bench(std::move(y0), gen, modes, p, cfg.mass, opt);
    std::vector<TrajectoryRow> rows;
    rows.reserve(samples.size());
    for (const auto& s : samples) {
        auto r = base_row(s.t, omega_at(p, s.t), "exact", cfg.bath.g);
        fill_observables(r, s.v, cfg.units);
        rows.push_back(r);
    }
    return rows;
}

unsigned resolve_threads(unsigned requested) {
    unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("NAME_SIM_THREADS")) {
        char* end = nullptr;
        long cap = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && cap >= 1)
            n = std::min(n, static_cast<unsigned>(cap));
    }
    return n;
}

namespace {

struct Job {
    std::string file;
    std::function<std::vector<TrajectoryRow>()> run;
};

std::vector<TrajectoryRow> strided(std::vector<TrajectoryRow> rows, int stride) {
    if (stride <= 1)
        return rows;
    std::vector<TrajectoryRow> out;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (i % static_cast<std::size_t>(stride) == 0 || i + 1 == rows.size())
            out.push_back(rows[i]);
    return out;
}

std::string label(double x) {
    std::string s = format_number(x);
    std::replace(s.begin(), s.end(), '+', 'p');
    return s;
}

std::vector<double> g_values(const RunConfig& cfg) {
    return cfg.sweep.g.empty() ? std::vector<double>{cfg.bath.g} : cfg.sweep.g;
}

RunConfig with_g(RunConfig cfg, double g) {
    cfg.bath.g = g;
    return cfg;
}

std::vector<double> bench_grid(const RunConfig& cfg) {
    auto stride = std::llround(cfg.bench.sample_interval / cfg.bench.dt);
    auto steps = std::llround(cfg.bench.horizon / cfg.bench.dt);
    std::vector<double> g;
    for (long long k = 0;; k += stride) {
        if (k > steps)
            k = steps;
        g.push_back(static_cast<double>(k) * cfg.bench.dt);
        if (k == steps)
            break;
    }
    return g;
}

std::vector<Job> build_jobs(const RunConfig& cfg) {
    const Protocol p = cfg.protocol.build();
    const auto grid = uniform_grid(p.t_final(), cfg.output.samples);
    const std::string& sc = cfg.scenario;
    std::vector<Job> jobs;
    if (sc == "fig1" || sc == "fig3") {
        for (double g : g_values(cfg)) {
            RunConfig c = with_g(cfg, g);
            jobs.push_back({sc + "_name_g" + label(g) + ".csv",
                            [c, p, grid] { return name_rows(c, p, grid); }});
        }
    } else if (sc == "fig2") {
        jobs.push_back({"fig2_name.csv", [cfg, p, grid] { return name_rows(cfg, p, grid); }});
        jobs.push_back({"fig2_isolated.csv", [cfg, p, grid] { return isolated_rows(cfg, p, grid); }});
        jobs.push_back({"fig2_adiabatic.csv", [cfg, p, grid] { return adiabatic_rows(cfg, p, grid); }});
        jobs.push_back({"fig2_attractor.csv", [cfg, p, grid] { return attractor_rows(cfg, p, grid); }});
    } else if (sc == "fig4") {
        std::vector<double> mus = cfg.sweep.mu.empty() ? std::vector<double>{cfg.protocol.mu}
                                                       : cfg.sweep.mu;
        for (double mu : mus) {
            Protocol pm(mu, cfg.protocol.omega0, cfg.protocol.t_final);
            jobs.push_back({"fig4_attractor_mu" + label(mu) + ".csv",
                            [cfg, pm, grid] { return attractor_rows(cfg, pm, grid); }});
        }
    } else if (sc == "fig5" || sc == "bench") {
        auto bg = bench_grid(cfg);
        jobs.push_back({sc + "_name.csv", [cfg, p, bg] { return name_rows(cfg, p, bg); }});
        jobs.push_back({sc + "_adiabatic.csv", [cfg, p, bg] { return adiabatic_rows(cfg, p, bg); }});
        jobs.push_back({sc + "_isolated.csv", [cfg, p, bg] { return isolated_rows(cfg, p, bg); }});
        jobs.push_back({sc + "_exact.csv", [cfg, p] { return exact_rows(cfg, p); }});
    } else if (sc == "attractor") {
        jobs.push_back({"attractor.csv", [cfg, p, grid] { return attractor_rows(cfg, p, grid); }});
    }
    return jobs;
}

nlohmann::json validity_json(const Protocol& p, const BathSpec& b) {
    auto rep = validity_report(p, b);
    nlohmann::json j;
    auto finite_or_null = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(); };
    j["tau_S"] = finite_or_null(rep.tau_S);
    j["tau_B"] = finite_or_null(rep.tau_B);
    j["tau_R"] = finite_or_null(rep.tau_R);
    j["tau_d"] = finite_or_null(rep.tau_d);
    j["ratios"] = nlohmann::json::array();
    for (const auto& r : rep.ratios)
        j["ratios"].push_back({{"name", r.name}, {"value", r.value}, {"verdict", to_string(r.verdict)}});
    j["overall"] = to_string(rep.overall());
    return j;
}

nlohmann::json attractor_point_json(const RunConfig& cfg, const Protocol& p) {
    double t = std::min(cfg.query_time, p.t_final());
    auto a = instantaneous_attractor(p, cfg.bath, t, cfg.mass, cfg.rates, cfg.units);
    auto v = observables_from_params(a.params, p, t, cfg.mass, cfg.units);
    return {{"t", t},
            {"omega", omega_at(p, t)},
            {"alpha", alpha_at(p, t)},
            {"beta", a.params.beta},
            {"occupation", a.occupation},
            {"k_down", a.rates.down},
            {"k_up", a.rates.up},
            {"H", v.H},
            {"L", v.L},
            {"C", v.C}};
}

void remove_quietly(const std::filesystem::path& f) {
    std::error_code ec;
    std::filesystem::remove(f, ec);
    std::filesystem::path tmp = f;
    tmp += ".tmp";
    std::filesystem::remove(tmp, ec);
}

} // namespace

ScenarioResult run_scenario(const RunConfig& cfg, const RunOptions& opt) {
    namespace fs = std::filesystem;
    ScenarioResult res;
    res.directory = opt.out_dir ? *opt.out_dir : fs::path(cfg.output.directory);
    fs::create_directories(res.directory);

    const Protocol p = cfg.protocol.build();
    std::vector<Job> jobs = build_jobs(cfg);

    nlohmann::json manifest;
    manifest["version"] = library_version();
    manifest["scenario"] = cfg.scenario;
    manifest["config"] = cfg.to_json();
    manifest["validity"] = validity_json(p, cfg.bath);
    nlohmann::json warnings = nlohmann::json::array();
    if (manifest["validity"]["overall"] != "pass")
        warnings.push_back("validity report: " + manifest["validity"]["overall"].get<std::string>());
    if (cfg.rates.memory_correction) {
        double worst = 0.0;
        for (double t : uniform_grid(p.t_final(), cfg.output.samples))
            worst = std::max(worst, std::abs(memory_parameter(p, t, cfg.bath.tau_B)));
        if (worst >= 1.0)
            warnings.push_back("memory correction is not perturbative: max |mu omega tau_B| = " +
                               format_number(worst));
    }
    manifest["warnings"] = warnings;

    std::vector<fs::path> written(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= jobs.size() || failed.load())
                return;
            try {
                auto rows = strided(jobs[i].run(), cfg.output.stride);
                fs::path f = res.directory / jobs[i].file;
                written[i] = f;
                write_file_atomic(f, to_csv(rows));
            } catch (...) {
                errors[i] = std::current_exception();
                failed.store(true);
            }
        }
    };

    unsigned n = std::min<unsigned>(resolve_threads(opt.threads),
                                    static_cast<unsigned>(std::max<std::size_t>(jobs.size(), 1)));
    manifest["threads"] = n;
    if (n <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned k = 0; k < n; ++k)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }

    auto cleanup = [&] {
        for (const auto& f : written)
            if (!f.empty())
                remove_quietly(f);
        remove_quietly(res.directory / "manifest.json");
    };
    for (auto& e : errors) {
        if (e) {
            cleanup();
            std::rethrow_exception(e);
        }
    }

    try {
        nlohmann::json outputs = nlohmann::json::array();
        for (const auto& f : written)
            outputs.push_back(f.filename().string());
        if (cfg.scenario == "validity") {
            fs::path f = res.directory / "validity.json";
            written.push_back(f);
            write_file_atomic(f, manifest["validity"].dump(2) + "\n");
            outputs.push_back(f.filename().string());
        }
        if (cfg.scenario == "attractor") {
            fs::path f = res.directory / "attractor_point.json";
            written.push_back(f);
            write_file_atomic(f, attractor_point_json(cfg, p).dump(2) + "\n");
            outputs.push_back(f.filename().string());
        }
        manifest["outputs"] = outputs;
        fs::path mf = res.directory / "manifest.json";
        write_file_atomic(mf, manifest.dump(2) + "\n");
        written.push_back(mf);
    } catch (...) {
        cleanup();
        throw;
    }

    for (const auto& f : written)
        if (!f.empty())
            res.files.push_back(f);
    res.manifest = std::move(manifest);
    return res;
}

} // namespace namesim
