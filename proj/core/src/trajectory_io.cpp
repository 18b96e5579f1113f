#include "namesim/trajectory_io.hpp"

#include "namesim/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace namesim {

const std::vector<std::string>& csv_columns() {
    static const std::vector<std::string> cols = {
        "t",     "omega",  "H",    "L",      "C",      "coherence", "beta",   "gamma_re", "gamma_im",
        "n",     "k_down", "k_up", "H_attr", "C_attr", "L_attr",    "solver", "g"};
    return cols;
}

std::string format_number(double x) {
    if (x == 0.0)
        return "0";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace {

void cell(std::string& out, const std::optional<double>& v) {
    out += ',';
    if (v)
        out += format_number(*v);
}

} // namespace

std::string to_csv(const std::vector<TrajectoryRow>& rows) {
    std::string out;
    const auto& cols = csv_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i)
            out += ',';
        out += cols[i];
    }
    out += '\n';
    for (const auto& r : rows) {
        out += format_number(r.t);
        cell(out, r.omega);
        cell(out, r.H);
        cell(out, r.L);
        cell(out, r.C);
        cell(out, r.coherence);
        cell(out, r.beta);
        cell(out, r.gamma_re);
        cell(out, r.gamma_im);
        cell(out, r.n);
        cell(out, r.k_down);
        cell(out, r.k_up);
        cell(out, r.H_attr);
        cell(out, r.C_attr);
        cell(out, r.L_attr);
        out += ',';
        out += r.solver;
        cell(out, r.g);
        out += '\n';
    }
    return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error("cannot open '" + tmp.string() + "' for writing");
        out << content;
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw Error("failed writing '" + tmp.string() + "'");
        }
    }
    fs::rename(tmp, path);
}

bool CsvTable::has_column(const std::string& name) const {
    return std::find(header.begin(), header.end(), name) != header.end();
}

std::vector<std::optional<double>> CsvTable::column(const std::string& name) const {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
        throw Error("CSV has no column '" + name + "'");
    auto idx = static_cast<std::size_t>(it - header.begin());
    std::vector<std::optional<double>> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        const std::string& s = idx < row.size() ? row[idx] : std::string();
        if (s.empty()) {
            out.emplace_back();
            continue;
        }
        double d = 0.0;
        auto res = std::from_chars(s.data(), s.data() + s.size(), d);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size())
            throw Error("non-numeric cell '" + s + "' in column '" + name + "'");
        out.emplace_back(d);
    }
    return out;
}

CsvTable parse_csv(std::string_view text) {
    CsvTable t;
    std::istringstream in{std::string(text)};
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::vector<std::string> cells;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                cells.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        cells.push_back(cur);
        if (first) {
            t.header = std::move(cells);
            first = false;
        } else {
            t.rows.push_back(std::move(cells));
        }
    }
    if (t.header.empty())
        throw Error("empty CSV");
    return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str());
}

} // namespace namesim
