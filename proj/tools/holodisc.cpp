// Batch front end: run one experiment per invocation from a JSON config and
// emit report.json, series.csv, summary.txt and plot-ready .dat files.
//
// Exit codes: 0 all criteria PASS, 1 experiment FAIL, 2 parse error,
// 3 validation error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "holodisc/experiments.hpp"

namespace fs = std::filesystem;
using namespace holodisc;

namespace {

int effective_threads(int config_threads) {
    if (const char* env = std::getenv("HOLODISC_THREADS")) {
        try {
            const int cap = std::stoi(env);
            if (cap >= 1) return std::min(config_threads, cap);
        } catch (...) {
            // Unparseable values behave like an absent variable.
        }
    }
    return config_threads;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"holodisc - pseudo-holomorphic disc boundary-value experiments"};
    app.require_subcommand(0);

    std::string kind;
    std::string config_path;
    std::string out_dir = "out";
    double tol_override = -1.0;
    std::string grid_override;

    app.add_option("kind", kind,
                   "experiment kind: transforms-check | solve | reflect | analyticity | lift-check | converge")
        ->required();
    app.add_option("--config", config_path, "JSON experiment config")->required();
    app.add_option("--out", out_dir, "output directory (default: out)");
    app.add_option("--tol", tol_override, "override the config tolerance");
    app.add_option("--grid", grid_override, "override the grid, formatted NRxNA (e.g. 16x64)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        json raw = load_json_file(config_path);
        if (tol_override > 0.0) raw["tol"] = tol_override;
        if (!grid_override.empty()) {
            const auto x = grid_override.find('x');
            if (x == std::string::npos) throw ValidationError("--grid must be formatted NRxNA");
            raw["grid"] = {std::stoi(grid_override.substr(0, x)), std::stoi(grid_override.substr(x + 1))};
        }
        ExperimentConfig cfg = parse_config(raw, kind);
        cfg.threads = effective_threads(cfg.threads);

        const ExperimentResult result = run_experiment(cfg);

        fs::create_directories(out_dir);
        write_text_file((fs::path(out_dir) / "report.json").string(), result.report.dump(2) + "\n");
        write_text_file((fs::path(out_dir) / "summary.txt").string(), result.summary);
        if (!result.series_csv.empty())
            write_text_file((fs::path(out_dir) / "series.csv").string(), result.series_csv);
        for (const auto& [name, content] : result.dat_files)
            write_text_file((fs::path(out_dir) / name).string(), content);

        std::cout << result.summary;
        std::cout << (result.pass ? "PASS" : "FAIL") << "\n";
        return result.pass ? 0 : 1;
    } catch (const ParseError& ex) {
        std::cerr << "parse error: " << ex.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& ex) {
        std::cerr << "parse error: " << ex.what() << "\n";
        return 2;
    } catch (const ValidationError& ex) {
        std::cerr << "validation error: " << ex.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& ex) {
        std::cerr << "validation error: " << ex.what() << "\n";
        return 3;
    } catch (const SolverError& ex) {
        std::cerr << "solver failure: " << ex.what() << "\n";
        return 1;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
}
