#include "namesim/compare.hpp"

#include "namesim/errors.hpp"

#include <algorithm>
#include <cmath>

namespace namesim {

Metric parse_metric(const std::string& name) {
    if (name == "relative")
        return Metric::relative;
    if (name == "scaled")
        return Metric::scaled;
    throw Error("unknown metric '" + name + "' (expected relative or scaled)");
}

const char* to_string(Metric m) { return m == Metric::scaled ? "scaled" : "relative"; }

double ComparisonReport::max_deviation() const {
    double m = 0.0;
    for (const auto& c : columns)
        m = std::max(m, c.max_dev);
    return m;
}

nlohmann::json ComparisonReport::to_json() const {
    nlohmann::json j;
    j["metric"] = to_string(metric);
    j["columns"] = nlohmann::json::array();
    for (const auto& c : columns)
        j["columns"].push_back({{"column", c.column},
                                {"max", c.max_dev},
                                {"mean", c.mean_dev},
                                {"t_at_max", c.t_at_max},
                                {"points", c.points}});
    j["max"] = max_deviation();
    return j;
}

namespace {

struct Series {
    std::vector<double> t;
    std::vector<double> y;
};

Series series(const CsvTable& tab, const std::string& col) {
    auto t = tab.column("t");
    auto y = tab.column(col);
    Series s;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!t[i] || !y[i])
            continue;
        if (!s.t.empty() && !(*t[i] > s.t.back()))
            throw GridMismatchError("time column must be strictly ascending");
        s.t.push_back(*t[i]);
        s.y.push_back(*y[i]);
    }
    return s;
}

double interpolate(const Series& s, double t) {
    auto it = std::lower_bound(s.t.begin(), s.t.end(), t);
    if (it == s.t.end())
        return s.y.back();
    auto j = static_cast<std::size_t>(it - s.t.begin());
    if (*it == t || j == 0)
        return s.y[j];
    double w = (t - s.t[j - 1]) / (s.t[j] - s.t[j - 1]);
    return s.y[j - 1] + w * (s.y[j] - s.y[j - 1]);
}

} // namespace

ComparisonReport compare_trajectories(const CsvTable& reference, const CsvTable& candidate,
                                      const CompareOptions& opt) {
    ComparisonReport rep;
    rep.metric = opt.metric;
    for (const auto& col : opt.columns) {
        Series a = series(reference, col);
        Series b = series(candidate, col);
        if (a.t.empty() || b.t.empty())
            throw GridMismatchError("column '" + col + "' has no values in one of the files");
        double span = std::max({1.0, std::abs(a.t.back()), std::abs(b.t.back())});
        if (std::abs(a.t.front() - b.t.front()) > opt.time_tol * span ||
            std::abs(a.t.back() - b.t.back()) > opt.time_tol * span)
            throw GridMismatchError("horizons differ for column '" + col + "': [" +
                                    std::to_string(a.t.front()) + ", " +
                                    std::to_string(a.t.back()) + "] vs [" +
                                    std::to_string(b.t.front()) + ", " +
                                    std::to_string(b.t.back()) + "]");
        double scale = 0.0;
        for (double y : a.y)
            scale = std::max(scale, std::abs(y));
        ColumnDeviation d;
        d.column = col;
        double sum = 0.0;
        for (std::size_t i = 0; i < a.t.size(); ++i) {
            double diff = std::abs(interpolate(b, a.t[i]) - a.y[i]);
            double den = opt.metric == Metric::scaled ? std::max(scale, opt.floor)
                                                      : std::max(std::abs(a.y[i]), opt.floor);
            double dev = diff / den;
            sum += dev;
            if (dev > d.max_dev) {
                d.max_dev = dev;
                d.t_at_max = a.t[i];
            }
        }
        d.points = a.t.size();
        d.mean_dev = sum / static_cast<double>(a.t.size());
        rep.columns.push_back(d);
    }
    return rep;
}

ComparisonReport compare_trajectories(const std::filesystem::path& reference,
                                      const std::filesystem::path& candidate,
                                      const CompareOptions& opt) {
    return compare_trajectories(read_csv(reference), read_csv(candidate), opt);
}

} // namespace namesim
