#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace namesim {

// One output row; unset cells are written empty.
struct TrajectoryRow {
    double t = 0.0;
    double omega = 0.0;
    std::optional<double> H, L, C, coherence;
    std::optional<double> beta, gamma_re, gamma_im, n;
    std::optional<double> k_down, k_up;
    std::optional<double> H_attr, C_attr, L_attr;
    std::string solver;
    std::optional<double> g;
};

const std::vector<std::string>& csv_columns();

// Shortest representation that round-trips.
std::string format_number(double x);

std::string to_csv(const std::vector<TrajectoryRow>& rows);

// Writes through a temporary file in the same directory and renames it.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    bool has_column(const std::string& name) const;
    // Empty cells become nullopt.
    std::vector<std::optional<double>> column(const std::string& name) const;
};

CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);

} // namespace namesim
