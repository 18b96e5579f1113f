#pragma once

#include "namesim/trajectory_io.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace namesim {

enum class Metric {
    // |a - b| / max(|b|, floor) per point
    relative,
    // |a - b| / max over the column of |b|
    scaled,
};

Metric parse_metric(const std::string& name);
const char* to_string(Metric m);

struct CompareOptions {
    std::vector<std::string> columns{"H", "L", "C"};
    Metric metric = Metric::relative;
    double floor = 1e-12;
    // Start and end times must agree to this (relative to the horizon).
    double time_tol = 1e-9;
};

struct ColumnDeviation {
    std::string column;
    double max_dev = 0.0;
    double mean_dev = 0.0;
    double t_at_max = 0.0;
    std::size_t points = 0;
};

struct ComparisonReport {
    Metric metric = Metric::relative;
    std::vector<ColumnDeviation> columns;

    double max_deviation() const;
    nlohmann::json to_json() const;
};

// The candidate is linearly resampled onto the reference time grid.
ComparisonReport compare_trajectories(const CsvTable& reference, const CsvTable& candidate,
                                      const CompareOptions& opt = {});
ComparisonReport compare_trajectories(const std::filesystem::path& reference,
                                      const std::filesystem::path& candidate,
                                      const CompareOptions& opt = {});

} // namespace namesim
