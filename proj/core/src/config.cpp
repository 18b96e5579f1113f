#include "namesim/config.hpp"

#include "namesim/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <variant>

namespace namesim {

namespace {

// ---- sectioned key = value reader ----

struct Value;
using Array = std::vector<Value>;

struct Value {
    std::variant<double, bool, std::string, Array> v;
};

struct Entry {
    Value value;
    int line = 0;
};

struct Document {
    std::map<std::string, std::map<std::string, Entry>> sections;
    std::map<std::string, int> section_lines;
};

[[noreturn]] void syntax(int line, const std::string& msg) {
    throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

class ValueParser {
public:
    ValueParser(std::string_view s, int line) : s_(s), line_(line) {}

    Value parse_all() {
        Value v = parse();
        skip_ws();
        if (pos_ != s_.size())
            syntax(line_, "unexpected trailing characters '" + std::string(s_.substr(pos_)) + "'");
        return v;
    }

private:
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
    }

    Value parse() {
        skip_ws();
        if (pos_ >= s_.size())
            syntax(line_, "missing value");
        char c = s_[pos_];
        if (c == '[')
            return parse_array();
        if (c == '"' || c == '\'')
            return parse_string(c);
        if (s_.compare(pos_, 4, "true") == 0) {
            pos_ += 4;
            return {true};
        }
        if (s_.compare(pos_, 5, "false") == 0) {
            pos_ += 5;
            return {false};
        }
        return parse_number();
    }

    Value parse_array() {
        ++pos_;
        Array out;
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == ']') {
            ++pos_;
            return {out};
        }
        while (true) {
            out.push_back(parse());
            skip_ws();
            if (pos_ >= s_.size())
                syntax(line_, "unterminated array");
            if (s_[pos_] == ',') {
                ++pos_;
                skip_ws();
                if (pos_ < s_.size() && s_[pos_] == ']') {
                    ++pos_;
                    return {out};
                }
                continue;
            }
            if (s_[pos_] == ']') {
                ++pos_;
                return {out};
            }
            syntax(line_, "expected ',' or ']' in array");
        }
    }

    Value parse_string(char quote) {
        ++pos_;
        std::string out;
        while (pos_ < s_.size() && s_[pos_] != quote) {
            if (quote == '"' && s_[pos_] == '\\' && pos_ + 1 < s_.size()) {
                char e = s_[pos_ + 1];
                out += e == 'n' ? '\n' : e == 't' ? '\t' : e;
                pos_ += 2;
                continue;
            }
            out += s_[pos_++];
        }
        if (pos_ >= s_.size())
            syntax(line_, "unterminated string");
        ++pos_;
        return {out};
    }

    Value parse_number() {
        std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
                                    s_[pos_] == '.' || s_[pos_] == '-' || s_[pos_] == '+' ||
                                    s_[pos_] == '_'))
            ++pos_;
        std::string tok(s_.substr(start, pos_ - start));
        tok.erase(std::remove(tok.begin(), tok.end(), '_'), tok.end());
        if (tok.empty())
            syntax(line_, "invalid value");
        const char* b = tok.data() + (tok[0] == '+' ? 1 : 0);
        const char* e = tok.data() + tok.size();
        double d = 0.0;
        if (tok == "inf" || tok == "+inf")
            return {HUGE_VAL};
        if (tok == "-inf")
            return {-HUGE_VAL};
        auto res = std::from_chars(b, e, d);
        if (res.ec != std::errc() || res.ptr != e)
            syntax(line_, "invalid value '" + tok + "'");
        return {d};
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    int line_;
};

std::string strip_comment(const std::string& line) {
    char quote = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quote) {
            if (c == '\\' && quote == '"')
                ++i;
            else if (c == quote)
                quote = 0;
        } else if (c == '"' || c == '\'') {
            quote = c;
        } else if (c == '#') {
            return line.substr(0, i);
        }
    }
    return line;
}

std::string trim(std::string s) {
    auto ns = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), ns));
    s.erase(std::find_if(s.rbegin(), s.rend(), ns).base(), s.end());
    return s;
}

bool valid_key(const std::string& k) {
    return !k.empty() && std::all_of(k.begin(), k.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '-';
    });
}

int bracket_depth(const std::string& s) {
    int depth = 0;
    char quote = 0;
    for (char c : s) {
        if (quote) {
            if (c == quote)
                quote = 0;
        } else if (c == '"' || c == '\'') {
            quote = c;
        } else if (c == '[') {
            ++depth;
        } else if (c == ']') {
            --depth;
        }
    }
    return depth;
}

Document parse_document(std::string_view text) {
    Document doc;
    std::string section;
    doc.sections[section];
    std::istringstream in{std::string(text)};
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trim(strip_comment(raw));
        if (line.empty())
            continue;
        if (line.front() == '[' && line.find('=') == std::string::npos) {
            if (line.back() != ']')
                syntax(lineno, "malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!valid_key(section))
                syntax(lineno, "invalid section name '" + section + "'");
            if (doc.section_lines.count(section))
                syntax(lineno, "duplicate section [" + section + "]");
            doc.section_lines[section] = lineno;
            doc.sections[section];
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            syntax(lineno, "expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (!valid_key(key))
            syntax(lineno, "invalid key '" + key + "'");
        int start = lineno;
        while (bracket_depth(val) > 0) {
            if (!std::getline(in, raw))
                syntax(start, "unterminated array for key '" + key + "'");
            ++lineno;
            val += " " + trim(strip_comment(raw));
        }
        auto& sec = doc.sections[section];
        if (sec.count(key))
            syntax(start, "duplicate key '" + key + "'");
        sec[key] = Entry{ValueParser(val, start).parse_all(), start};
    }
    return doc;
}

// ---- typed access with defaults and violation collection ----

using Json = nlohmann::json;

class Reader {
public:
    Reader(const Document& doc, std::map<std::string, Json> scenario_defaults)
        : doc_(doc), scen_(std::move(scenario_defaults)) {}

    std::vector<std::string> violations;
    std::vector<std::string> defaulted;

    bool has(const std::string& sec, const std::string& key) const {
        auto s = doc_.sections.find(sec);
        return s != doc_.sections.end() && s->second.count(key);
    }

    double number(const std::string& sec, const std::string& key, double base) {
        if (const Entry* e = find(sec, key)) {
            if (auto* d = std::get_if<double>(&e->value.v))
                return *d;
            bad(sec, key, e->line, "expected a number");
            return base;
        }
        return fallback(sec, key, Json(base)).get<double>();
    }

    std::optional<double> optional_number(const std::string& sec, const std::string& key) {
        if (const Entry* e = find(sec, key)) {
            if (auto* d = std::get_if<double>(&e->value.v))
                return *d;
            bad(sec, key, e->line, "expected a number");
            return std::nullopt;
        }
        auto it = scen_.find(sec + "." + key);
        if (it != scen_.end()) {
            defaulted.push_back(sec + "." + key);
            return it->second.get<double>();
        }
        return std::nullopt;
    }

    int integer(const std::string& sec, const std::string& key, int base) {
        double d = number(sec, key, base);
        if (d != std::floor(d) || std::abs(d) > 1e9) {
            bad(sec, key, line_of(sec, key), "expected an integer");
            return base;
        }
        return static_cast<int>(d);
    }

    bool boolean(const std::string& sec, const std::string& key, bool base) {
        if (const Entry* e = find(sec, key)) {
            if (auto* b = std::get_if<bool>(&e->value.v))
                return *b;
            bad(sec, key, e->line, "expected true or false");
            return base;
        }
        return fallback(sec, key, Json(base)).get<bool>();
    }

    std::string string(const std::string& sec, const std::string& key, const std::string& base) {
        if (const Entry* e = find(sec, key)) {
            if (auto* s = std::get_if<std::string>(&e->value.v))
                return *s;
            bad(sec, key, e->line, "expected a string");
            return base;
        }
        return fallback(sec, key, Json(base)).get<std::string>();
    }

    std::vector<double> numbers(const std::string& sec, const std::string& key,
                                const std::vector<double>& base) {
        if (const Entry* e = find(sec, key)) {
            std::vector<double> out;
            if (auto* a = std::get_if<Array>(&e->value.v)) {
                for (const auto& v : *a) {
                    if (auto* d = std::get_if<double>(&v.v)) {
                        out.push_back(*d);
                    } else {
                        bad(sec, key, e->line, "expected an array of numbers");
                        return base;
                    }
                }
                return out;
            }
            if (auto* d = std::get_if<double>(&e->value.v))
                return {*d};
            bad(sec, key, e->line, "expected an array of numbers");
            return base;
        }
        return fallback(sec, key, Json(base)).get<std::vector<double>>();
    }

    std::vector<SegmentSpec> segments(const std::string& sec, const std::string& key) {
        std::vector<SegmentSpec> out;
        const Entry* e = find(sec, key);
        if (!e)
            return out;
        auto* a = std::get_if<Array>(&e->value.v);
        if (!a) {
            bad(sec, key, e->line, "expected [[mu, duration], ...]");
            return out;
        }
        for (const auto& item : *a) {
            auto* pair = std::get_if<Array>(&item.v);
            if (!pair || pair->size() != 2 || !std::get_if<double>(&(*pair)[0].v) ||
                !std::get_if<double>(&(*pair)[1].v)) {
                bad(sec, key, e->line, "expected [[mu, duration], ...]");
                return {};
            }
            out.push_back({std::get<double>((*pair)[0].v), std::get<double>((*pair)[1].v)});
        }
        return out;
    }

    void bad(const std::string& sec, const std::string& key, int line, const std::string& msg) {
        std::string where = sec.empty() ? key : sec + "." + key;
        if (line > 0)
            where += " (line " + std::to_string(line) + ")";
        violations.push_back(where + ": " + msg);
    }

    int line_of(const std::string& sec, const std::string& key) const {
        const Entry* e = find(sec, key);
        return e ? e->line : 0;
    }

    void check_known(const std::map<std::string, std::set<std::string>>& schema) {
        for (const auto& [sec, keys] : doc_.sections) {
            auto s = schema.find(sec);
            if (s == schema.end()) {
                int line = doc_.section_lines.count(sec) ? doc_.section_lines.at(sec) : 0;
                violations.push_back("[" + sec + "] (line " + std::to_string(line) +
                                     "): unknown section");
                continue;
            }
            for (const auto& [key, entry] : keys)
                if (!s->second.count(key))
                    bad(sec, key, entry.line, "unknown key");
        }
    }

private:
    const Entry* find(const std::string& sec, const std::string& key) const {
        auto s = doc_.sections.find(sec);
        if (s == doc_.sections.end())
            return nullptr;
        auto k = s->second.find(key);
        return k == s->second.end() ? nullptr : &k->second;
    }

    Json fallback(const std::string& sec, const std::string& key, Json base) {
        defaulted.push_back(sec.empty() ? key : sec + "." + key);
        auto it = scen_.find(sec + "." + key);
        return it != scen_.end() ? it->second : base;
    }

    const Document& doc_;
    std::map<std::string, Json> scen_;
};

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s = {
        {"", {"scenario"}},
        {"protocol", {"mu", "omega0", "t_final", "segments"}},
        {"system", {"mass", "hbar", "kB"}},
        {"bath",
         {"temperature", "spectral", "J0", "exponent", "omega_ref", "omega_min", "omega_max", "g",
          "tau_B", "n_modes", "coupling", "bath_mass", "density", "reference_modes",
          "memory_correction", "include_xi_sq"}},
        {"initial", {"beta0", "gamma0_re", "gamma0_im", "H0", "L0", "C0"}},
        {"solver", {"rtol", "atol", "dt_max", "dt_min", "output_stride", "fixed_dt", "max_steps"}},
        {"bench",
         {"n_modes", "closure", "dt", "coupling_prefactor", "bench_horizon", "tableau",
          "reference_modes", "sample_interval"}},
        {"output", {"directory", "samples"}},
        {"sweep", {"g", "mu"}},
        {"attractor", {"time"}},
    };
    return s;
}

// Parameters of each figure scenario; keys absent here fall back to
// the benchmark-table defaults.
std::map<std::string, Json> scenario_defaults(const std::string& scenario) {
    const std::map<std::string, Json> fig2 = {
        {"protocol.mu", -0.1},  {"protocol.omega0", 40.0}, {"protocol.t_final", 2.0},
        {"bath.temperature", 20.0}, {"bath.g", 1.0},        {"initial.H0", 60.0},
        {"initial.L0", 0.0},    {"initial.C0", 0.0},
    };
    if (scenario == "fig1") {
        return {{"protocol.mu", -0.1},        {"protocol.omega0", 40.0},
                {"protocol.t_final", 2.0},    {"bath.temperature", 20.0},
                {"initial.beta0", -1.0},      {"initial.gamma0_re", 0.5},
                {"initial.gamma0_im", 0.0},   {"sweep.g", std::vector<double>{0.0, 0.5, 1.0, 2.0}}};
    }
    if (scenario == "fig2")
        return fig2;
    if (scenario == "fig3") {
        auto d = fig2;
        d["sweep.g"] = std::vector<double>{0.0, 0.25, 0.5, 1.0, 2.0};
        return d;
    }
    if (scenario == "fig4" || scenario == "attractor") {
        std::map<std::string, Json> d = {{"protocol.mu", -0.1},
                                         {"protocol.omega0", 40.0},
                                         {"protocol.t_final", 2.0},
                                         {"bath.temperature", 20.0},
                                         {"bath.g", 1.0}};
        if (scenario == "fig4")
            d["sweep.mu"] = std::vector<double>{-0.1, -0.01, -0.001};
        return d;
    }
    if (scenario == "fig5" || scenario == "bench") {
        return {{"system.mass", 2.0},         {"bath.coupling", "position"},
                {"bath.bath_mass", 2.0},      {"initial.H0", 1037.5},
                {"initial.L0", -562.5},       {"initial.C0", 600.0}};
    }
    return {};
}

template <class E, class F>
E parse_enum(Reader& r, const std::string& sec, const std::string& key, const std::string& base,
             F&& parse) {
    std::string s = r.string(sec, key, base);
    try {
        return parse(s);
    } catch (const DomainError& e) {
        r.bad(sec, key, r.line_of(sec, key), e.what());
        return parse(base);
    }
}

} // namespace

Protocol ProtocolSpec::build() const {
    if (segments.empty())
        return Protocol(mu, omega0, t_final);
    return Protocol(omega0, segments);
}

const std::vector<std::string>& known_scenarios() {
    static const std::vector<std::string> s = {"fig1", "fig2",     "fig3",     "fig4",
                                               "fig5", "bench",    "validity", "attractor"};
    return s;
}

RunConfig parse_config(std::string_view text, const std::string& scenario_override) {
    Document doc = parse_document(text);

    RunConfig cfg;
    std::vector<std::string> violations;
    {
        Reader pre(doc, {});
        std::string scen = scenario_override;
        if (scen.empty()) {
            if (pre.has("", "scenario")) {
                scen = pre.string("", "scenario", cfg.scenario);
            } else {
                scen = cfg.scenario;
                cfg.defaults_applied.push_back("scenario");
            }
        }
        violations = pre.violations;
        const auto& known = known_scenarios();
        if (std::find(known.begin(), known.end(), scen) == known.end()) {
            violations.push_back("scenario: unknown scenario '" + scen + "'");
            scen = "fig5";
        }
        cfg.scenario = scen;
    }

    Reader r(doc, scenario_defaults(cfg.scenario));
    r.check_known(schema());

    // protocol
    cfg.protocol.mu = r.number("protocol", "mu", cfg.protocol.mu);
    cfg.protocol.omega0 = r.number("protocol", "omega0", cfg.protocol.omega0);
    cfg.protocol.segments = r.segments("protocol", "segments");
    if (cfg.protocol.segments.empty()) {
        cfg.protocol.t_final = r.number("protocol", "t_final", cfg.protocol.t_final);
    } else {
        if (r.has("protocol", "mu") || r.has("protocol", "t_final"))
            r.bad("protocol", "segments", r.line_of("protocol", "segments"),
                  "segments cannot be combined with mu or t_final");
        cfg.protocol.t_final = 0.0;
        for (const auto& s : cfg.protocol.segments)
            cfg.protocol.t_final += s.duration;
    }

    // system
    cfg.mass = r.number("system", "mass", 1.0);
    cfg.units.hbar = r.number("system", "hbar", 1.0);
    cfg.units.kB = r.number("system", "kB", 1.0);

    // bath
    BathSpec& b = cfg.bath;
    b.temperature = r.number("bath", "temperature", b.temperature);
    b.spectral = parse_enum<SpectralModel>(r, "bath", "spectral", "flat", [](const std::string& s) {
        if (s == "flat")
            return SpectralModel::flat;
        if (s == "ohmic")
            return SpectralModel::ohmic;
        throw DomainError("expected flat or ohmic");
    });
    b.J0 = r.optional_number("bath", "J0");
    b.exponent = r.number("bath", "exponent", b.exponent);
    b.omega_ref = r.number("bath", "omega_ref", b.omega_ref);
    b.omega_min = r.number("bath", "omega_min", b.omega_min);
    b.omega_max = r.number("bath", "omega_max", b.omega_max);
    b.g = r.number("bath", "g", b.g);
    b.tau_B = r.number("bath", "tau_B", b.tau_B);
    b.coupling = parse_enum<CouplingKind>(r, "bath", "coupling", "momentum",
                                          [](const std::string& s) {
                                              if (s == "momentum")
                                                  return CouplingKind::momentum;
                                              if (s == "position")
                                                  return CouplingKind::position;
                                              throw DomainError("expected momentum or position");
                                          });
    b.bath_mass = r.number("bath", "bath_mass", b.bath_mass);
    b.density = r.optional_number("bath", "density");

    bool bath_n = r.has("bath", "n_modes");
    bool bench_n = r.has("bench", "n_modes");
    int n_bath = r.integer("bath", "n_modes", b.n_modes);
    int n_bench = r.integer("bench", "n_modes", n_bath);
    if (bath_n && bench_n && n_bath != n_bench)
        r.bad("bench", "n_modes", r.line_of("bench", "n_modes"),
              "conflicts with bath.n_modes");
    b.n_modes = bench_n ? n_bench : n_bath;
    if (r.has("bath", "reference_modes") || r.has("bench", "reference_modes")) {
        std::string sec = r.has("bench", "reference_modes") ? "bench" : "bath";
        b.reference_modes = r.integer(sec, "reference_modes", b.n_modes);
    }
    cfg.rates.memory_correction = r.boolean("bath", "memory_correction", false);
    cfg.rates.include_xi_sq = r.boolean("bath", "include_xi_sq", true);

    // initial state
    bool has_params = r.has("initial", "beta0") || r.has("initial", "gamma0_re") ||
                      r.has("initial", "gamma0_im");
    bool has_obs = r.has("initial", "H0") || r.has("initial", "L0") || r.has("initial", "C0");
    if (has_params && has_obs) {
        r.bad("initial", "H0", r.line_of("initial", "H0"),
              "give either beta0/gamma0 or H0/L0/C0, not both");
    }
    auto scen = scenario_defaults(cfg.scenario);
    bool params_route = has_params || (!has_obs && scen.count("initial.beta0"));
    if (params_route) {
        GaussianStateParams st;
        st.beta = r.number("initial", "beta0", -1.0);
        st.gamma = {r.number("initial", "gamma0_re", 0.0), r.number("initial", "gamma0_im", 0.0)};
        cfg.initial.params = st;
    } else {
        // Thermal-like state at omega0 by default: H = hbar omega0 (N + 1/2) at T.
        double H0 = 0.0;
        if (!r.has("initial", "H0") && !scen.count("initial.H0")) {
            double T = b.temperature;
            double w = cfg.protocol.omega0;
            double n = (T > 0.0 && w > 0.0) ? 1.0 / std::expm1(cfg.units.hbar * w / (cfg.units.kB * T))
                                            : 0.0;
            H0 = cfg.units.hbar * w * (n + 0.5);
        }
        ObservableVector v;
        v.H = r.number("initial", "H0", H0);
        v.L = r.number("initial", "L0", 0.0);
        v.C = r.number("initial", "C0", 0.0);
        cfg.initial.observables = v;
    }

    // solver
    cfg.solver.rtol = r.number("solver", "rtol", 1e-8);
    cfg.solver.atol = r.number("solver", "atol", 1e-10);
    cfg.solver.dt_max = r.number("solver", "dt_max", 0.0);
    cfg.solver.dt_min = r.number("solver", "dt_min", 1e-14);
    cfg.solver.fixed_dt = r.number("solver", "fixed_dt", 0.0);
    cfg.solver.max_steps = static_cast<std::size_t>(r.integer("solver", "max_steps", 50'000'000));
    cfg.output.stride = r.integer("solver", "output_stride", 1);

    // bench
    cfg.bench.closure = parse_enum<Closure>(r, "bench", "closure", "paper_truncated",
                                            [](const std::string& s) { return parse_closure(s); });
    cfg.bench.dt = r.number("bench", "dt", cfg.bench.dt);
    cfg.bench.horizon = r.number("bench", "bench_horizon", cfg.bench.horizon);
    cfg.bench.sample_interval = r.number("bench", "sample_interval", cfg.bench.sample_interval);
    cfg.bench.tableau = parse_enum<Tableau>(r, "bench", "tableau", "rk4",
                                            [](const std::string& s) { return parse_tableau(s); });
    cfg.rates.prefactor = parse_enum<CouplingPrefactor>(
        r, "bench", "coupling_prefactor", "constant", [](const std::string& s) {
            if (s == "constant")
                return CouplingPrefactor::constant;
            if (s == "omega_t")
                return CouplingPrefactor::omega_t;
            throw DomainError("expected constant or omega_t");
        });

    // output, sweeps, point queries
    cfg.output.directory = r.string("output", "directory", cfg.output.directory);
    cfg.output.samples = r.integer("output", "samples", cfg.output.samples);
    cfg.sweep.g = r.numbers("sweep", "g", {});
    cfg.sweep.mu = r.numbers("sweep", "mu", {});
    cfg.query_time = r.number("attractor", "time", 0.0);

    // semantic validation, all at once
    auto check = [&](bool ok, const std::string& sec, const std::string& key,
                     const std::string& msg) {
        if (!ok)
            r.bad(sec, key, r.line_of(sec, key), msg);
    };
    try {
        cfg.units.validate();
    } catch (const Error& e) {
        r.violations.push_back(std::string("system: ") + e.what());
    }
    check(cfg.mass > 0.0, "system", "mass", "must be positive");
    check(std::abs(cfg.protocol.mu) < 2.0, "protocol", "mu", "|mu| must be below 2");
    check(cfg.protocol.omega0 > 0.0, "protocol", "omega0", "must be positive");
    check(cfg.protocol.t_final >= 0.0, "protocol", "t_final", "must be non-negative");
    if (std::abs(cfg.protocol.mu) < 2.0 && cfg.protocol.omega0 > 0.0 &&
        cfg.protocol.t_final >= 0.0) {
        try {
            cfg.protocol.build();
        } catch (const Error& e) {
            r.violations.push_back(std::string("protocol: ") + e.what());
        }
    }
    check(cfg.sweep.mu.empty() || cfg.protocol.segments.empty(), "sweep", "mu",
          "a mu sweep needs a single-segment protocol");
    for (double mu : cfg.sweep.mu) {
        check(std::abs(mu) < 2.0, "sweep", "mu", "every |mu| must be below 2");
        if (std::abs(mu) < 2.0 && cfg.protocol.omega0 > 0.0 && cfg.protocol.t_final >= 0.0) {
            try {
                Protocol(mu, cfg.protocol.omega0, cfg.protocol.t_final);
            } catch (const Error& e) {
                r.violations.push_back(std::string("sweep.mu: ") + e.what());
            }
        }
    }
    for (double g : cfg.sweep.g)
        check(g >= 0.0, "sweep", "g", "couplings must be non-negative");
    check(b.temperature >= 0.0, "bath", "temperature", "must be non-negative");
    check(b.omega_min > 0.0, "bath", "omega_min", "must be positive");
    check(b.omega_max > b.omega_min, "bath", "omega_max", "must exceed omega_min");
    check(!b.J0 || *b.J0 >= 0.0, "bath", "J0", "must be non-negative");
    check(b.exponent >= 0.0, "bath", "exponent", "must be non-negative");
    check(b.omega_ref > 0.0, "bath", "omega_ref", "must be positive");
    check(b.g >= 0.0, "bath", "g", "must be non-negative");
    check(b.tau_B >= 0.0, "bath", "tau_B", "must be non-negative");
    check(b.n_modes >= 1, "bath", "n_modes", "must be at least 1");
    check(!b.reference_modes || *b.reference_modes >= 1, "bench", "reference_modes",
          "must be at least 1");
    check(b.bath_mass > 0.0, "bath", "bath_mass", "must be positive");
    check(!b.density || *b.density > 0.0, "bath", "density", "must be positive");
    check(cfg.solver.rtol > 0.0, "solver", "rtol", "must be positive");
    check(cfg.solver.atol > 0.0, "solver", "atol", "must be positive");
    check(cfg.solver.dt_max >= 0.0, "solver", "dt_max", "must be non-negative");
    check(cfg.solver.fixed_dt >= 0.0, "solver", "fixed_dt", "must be non-negative");
    check(cfg.output.stride >= 1, "solver", "output_stride", "must be at least 1");
    check(cfg.output.samples >= 1, "output", "samples", "must be at least 1");
    check(!cfg.output.directory.empty(), "output", "directory", "must not be empty");
    check(cfg.bench.dt > 0.0, "bench", "dt", "must be positive");
    check(cfg.bench.horizon >= 0.0, "bench", "bench_horizon", "must be non-negative");
    check(cfg.bench.sample_interval > 0.0, "bench", "sample_interval", "must be positive");
    if (cfg.bench.dt > 0.0 && cfg.bench.horizon >= 0.0 && cfg.bench.sample_interval > 0.0) {
        double n = cfg.bench.horizon / cfg.bench.dt;
        check(std::abs(n - std::round(n)) < 1e-6, "bench", "bench_horizon",
              "must be an integer multiple of bench.dt");
        double k = cfg.bench.sample_interval / cfg.bench.dt;
        check(std::abs(k - std::round(k)) < 1e-6 && std::round(k) >= 1, "bench",
              "sample_interval", "must be a positive integer multiple of bench.dt");
    }
    if (cfg.scenario == "fig5" || cfg.scenario == "bench")
        check(cfg.bench.horizon <= cfg.protocol.t_final * (1 + 1e-12), "bench", "bench_horizon",
              "must not exceed protocol.t_final");
    check(cfg.query_time >= 0.0 && cfg.query_time <= cfg.protocol.t_final * (1 + 1e-12),
          "attractor", "time", "must lie in [0, t_final]");
    if (cfg.initial.params) {
        check(is_physical(*cfg.initial.params), "initial", "beta0",
              "(beta0, gamma0) is not a physical state: need beta0 < 0 and "
              "(e^-beta0 - 1)^2 > 4|gamma0|^2");
    }
    if (cfg.initial.observables) {
        const auto& v = *cfg.initial.observables;
        check(v.H > 0.0 && casimir(v) > 0.0, "initial", "H0",
              "observables must satisfy H0 > 0 and H0^2 > L0^2 + C0^2");
    }

    violations.insert(violations.end(), r.violations.begin(), r.violations.end());
    if (!violations.empty())
        throw ConfigError(violations);

    cfg.defaults_applied.insert(cfg.defaults_applied.end(), r.defaulted.begin(),
                                r.defaulted.end());
    return cfg;
}

RunConfig load_config(const std::string& path, const std::string& scenario) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), scenario);
}

nlohmann::json RunConfig::to_json() const {
    Json j;
    j["scenario"] = scenario;
    Json segs = Json::array();
    for (const auto& s : protocol.segments)
        segs.push_back({s.mu, s.duration});
    j["protocol"] = {{"mu", protocol.mu},
                     {"omega0", protocol.omega0},
                     {"t_final", protocol.t_final},
                     {"segments", segs}};
    j["system"] = {{"mass", mass}, {"hbar", units.hbar}, {"kB", units.kB}};
    j["bath"] = {{"temperature", bath.temperature},
                 {"spectral", to_string(bath.spectral)},
                 {"J0", spectral_amplitude(bath)},
                 {"J0_explicit", bath.J0.has_value()},
                 {"exponent", bath.exponent},
                 {"omega_ref", bath.omega_ref},
                 {"omega_min", bath.omega_min},
                 {"omega_max", bath.omega_max},
                 {"g", bath.g},
                 {"tau_B", bath.tau_B},
                 {"n_modes", bath.n_modes},
                 {"reference_modes", bath.reference_modes.value_or(bath.n_modes)},
                 {"coupling", to_string(bath.coupling)},
                 {"bath_mass", bath.bath_mass},
                 {"density", mode_density(bath)},
                 {"memory_correction", rates.memory_correction},
                 {"include_xi_sq", rates.include_xi_sq}};
    if (initial.params)
        j["initial"] = {{"beta0", initial.params->beta},
                        {"gamma0_re", initial.params->gamma.real()},
                        {"gamma0_im", initial.params->gamma.imag()}};
    else if (initial.observables)
        j["initial"] = {{"H0", initial.observables->H},
                        {"L0", initial.observables->L},
                        {"C0", initial.observables->C}};
    j["solver"] = {{"rtol", solver.rtol},         {"atol", solver.atol},
                   {"dt_max", solver.dt_max},     {"dt_min", solver.dt_min},
                   {"fixed_dt", solver.fixed_dt}, {"max_steps", solver.max_steps},
                   {"output_stride", output.stride}};
    j["bench"] = {{"n_modes", bath.n_modes},
                  {"closure", to_string(bench.closure)},
                  {"dt", bench.dt},
                  {"coupling_prefactor", to_string(rates.prefactor)},
                  {"bench_horizon", bench.horizon},
                  {"sample_interval", bench.sample_interval},
                  {"tableau", to_string(bench.tableau)}};
    j["output"] = {{"directory", output.directory}, {"samples", output.samples}};
    j["sweep"] = {{"g", sweep.g}, {"mu", sweep.mu}};
    j["attractor"] = {{"time", query_time}};
    j["defaults_applied"] = defaults_applied;
    return j;
}

} // namespace namesim
