#pragma once

#include "namesim/bath.hpp"
#include "namesim/exact_bench.hpp"
#include "namesim/name_solver.hpp"
#include "namesim/propagation.hpp"
#include "namesim/protocol.hpp"
#include "namesim/units.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace namesim {

struct ProtocolSpec {
    double mu = -1e-5;
    double omega0 = 40.0;
    double t_final = 50.0;
    std::vector<SegmentSpec> segments;

    Protocol build() const;
};

struct InitialSpec {
    std::optional<GaussianStateParams> params;
    std::optional<ObservableVector> observables;
};

struct BenchSpec {
    Closure closure = Closure::paper_truncated;
    double dt = 5e-4;
    double horizon = 50.0;
    double sample_interval = 0.5;
    Tableau tableau = Tableau::rk4;
};

struct OutputSpec {
    std::string directory = "out";
    int samples = 200;
    int stride = 1;
};

struct SweepSpec {
    std::vector<double> g;
    std::vector<double> mu;
};

struct RunConfig {
    std::string scenario = "fig5";
    ProtocolSpec protocol;
    BathSpec bath;
    double mass = 1.0;
    UnitSystem units;
    RateOptions rates;
    InitialSpec initial;
    SolverOptions solver;
    BenchSpec bench;
    OutputSpec output;
    SweepSpec sweep;
    double query_time = 0.0;
    // Every "section.key" filled from a default.
    std::vector<std::string> defaults_applied;

    nlohmann::json to_json() const;
};

const std::vector<std::string>& known_scenarios();

// Parses sectioned `key = value` text (a TOML subset: numbers, booleans,
// strings, arrays). Unknown sections or keys are errors. A non-empty
// scenario overrides the one in the text and selects its defaults.
RunConfig parse_config(std::string_view text, const std::string& scenario = {});
RunConfig load_config(const std::string& path, const std::string& scenario = {});

} // namespace namesim
