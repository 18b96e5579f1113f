#include "namesim/namesim.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kSolver = 3 };

int report(const namesim::ConfigError& e) {
    std::cerr << "config error:\n";
    for (const auto& v : e.violations())
        std::cerr << "  " << v << "\n";
    return kConfig;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Driven harmonic oscillator open-system simulator"};
    app.set_version_flag("--version", namesim::library_version());
    app.require_subcommand(1);

    std::string config_path;
    std::string scenario;
    std::string out_dir;
    unsigned threads = 0;
    auto* run = app.add_subcommand("run", "Run a scenario and write trajectory CSVs");
    run->add_option("--config", config_path, "Config file (sectioned key = value)")->required();
    run->add_option("--scenario", scenario, "Scenario id (overrides the config)");
    run->add_option("--out", out_dir, "Output directory (overrides [output] directory)");
    run->add_option("--threads", threads, "Worker threads (0 = all cores)");

    std::string reference;
    std::string candidate;
    std::string columns = "H,L,C";
    std::string metric = "relative";
    double threshold = -1.0;
    auto* cmp = app.add_subcommand("compare", "Compare two trajectory CSVs");
    cmp->add_option("reference", reference, "Reference CSV")->required()->check(CLI::ExistingFile);
    cmp->add_option("candidate", candidate, "Candidate CSV")->required()->check(CLI::ExistingFile);
    cmp->add_option("--columns", columns, "Comma-separated columns to compare");
    cmp->add_option("--metric", metric, "relative | scaled")
        ->check(CLI::IsMember({"relative", "scaled"}));
    cmp->add_option("--threshold", threshold, "Fail (exit 1) when the max deviation exceeds this");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            auto cfg = namesim::load_config(config_path, scenario);
            namesim::RunOptions opt;
            if (!out_dir.empty())
                opt.out_dir = out_dir;
            opt.threads = threads;
            auto res = namesim::run_scenario(cfg, opt);
            for (const auto& f : res.files)
                std::cout << f.string() << "\n";
            for (const auto& w : res.manifest["warnings"])
                std::cerr << "warning: " << w.get<std::string>() << "\n";
            return kOk;
        }
        namesim::CompareOptions opt;
        opt.metric = namesim::parse_metric(metric);
        opt.columns.clear();
        std::string col;
        for (char c : columns + ",") {
            if (c == ',') {
                if (!col.empty())
                    opt.columns.push_back(col);
                col.clear();
            } else {
                col += c;
            }
        }
        auto rep = namesim::compare_trajectories(reference, candidate, opt);
        std::cout << rep.to_json().dump(2) << "\n";
        if (threshold >= 0.0 && rep.max_deviation() > threshold)
            return kFailure;
        return kOk;
    } catch (const namesim::ConfigError& e) {
        return report(e);
    } catch (const namesim::GridMismatchError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    } catch (const namesim::Error& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
}
