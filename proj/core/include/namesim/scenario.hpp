#pragma once

#include "namesim/config.hpp"
#include "namesim/trajectory_io.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <vector>

namespace namesim {

// Uniform grid with `samples` intervals on [0, t_final].
std::vector<double> uniform_grid(double t_final, int samples);

NameProblem name_problem(const RunConfig& cfg);

// Initial observables implied by the config (computed from beta0/gamma0 when
// the state is given that way).
ObservableVector initial_observables(const RunConfig& cfg, const Protocol& p);
GaussianStateParams initial_params(const RunConfig& cfg, const Protocol& p);

std::vector<TrajectoryRow> name_rows(const RunConfig& cfg, const Protocol& p,
                                     const std::vector<double>& grid);
std::vector<TrajectoryRow> isolated_rows(const RunConfig& cfg, const Protocol& p,
                                         const std::vector<double>& grid);
std::vector<TrajectoryRow> adiabatic_rows(const RunConfig& cfg, const Protocol& p,
                                          const std::vector<double>& grid);
std::vector<TrajectoryRow> attractor_rows(const RunConfig& cfg, const Protocol& p,
                                          const std::vector<double>& grid);
std::vector<TrajectoryRow> exact_rows(const RunConfig& cfg, const Protocol& p);

struct RunOptions {
    // Overrides the config's output directory when set.
    std::optional<std::filesystem::path> out_dir;
    unsigned threads = 1;
};

struct ScenarioResult {
    std::filesystem::path directory;
    std::vector<std::filesystem::path> files;
    nlohmann::json manifest;
};

// Worker count: the requested value (0 = hardware concurrency), capped by
// NAME_SIM_THREADS when that is set.
unsigned resolve_threads(unsigned requested);

// Runs every (solver, parameter) job of the scenario and writes one CSV per
// job plus manifest.json. On failure every file written so far is removed.
ScenarioResult run_scenario(const RunConfig& cfg, const RunOptions& opt = {});

const char* library_version();

} // namespace namesim
