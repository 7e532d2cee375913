// Command-line frontend: validate configs, run scenarios and sweeps, and
// recompute metrics from existing run logs.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rft/config.hpp"
#include "rft/metrics.hpp"
#include "rft/run_log.hpp"
#include "rft/scenario.hpp"

namespace fs = std::filesystem;
using rft::Json;

namespace {

constexpr int kExitConfigInvalid = 2;
constexpr int kExitSimulationDiverged = 3;
constexpr int kExitIo = 4;

void write_text_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw rft::IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw rft::IoError("failed to write '" + path.string() + "'");
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw rft::IoError("cannot open '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const Json::exception& e) {
        throw rft::ConfigError("'" + path + "' is not valid JSON: " + e.what());
    }
    return j;
}

int cmd_validate(const std::string& config_path) {
    const auto cfg = rft::ScenarioConfig::from_file(config_path);
    std::printf("config OK: %d agents, dimension %d, duration %g s, dt %g s, hash %s\n",
                cfg.agent_count, cfg.dimension, cfg.duration, cfg.dt, cfg.hash_hex().c_str());
    return 0;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            std::optional<std::uint64_t> seed_override) {
    auto doc = load_json_file(config_path);
    if (seed_override) doc["seed"] = *seed_override;
    const auto cfg = rft::ScenarioConfig::from_json(doc);

    const auto log = rft::run_scenario(cfg);
    const auto summary = rft::summarize_run(log, cfg);

    const std::string stem = fs::path(config_path).stem().string();
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    rft::write_csv(log, (dir / (stem + ".csv")).string());
    write_text_file(dir / (stem + ".summary.json"), summary.dump(2) + "\n");

    std::cout << summary.dump(2) << "\n";
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& overrides_path,
              const std::string& out_dir, int jobs, std::optional<std::uint64_t> seed_override) {
    auto base = load_json_file(config_path);
    if (seed_override) base["seed"] = *seed_override;
    const auto overrides = rft::parse_sweep_spec(load_json_file(overrides_path));

    const auto summaries = rft::run_sweep(base, overrides, jobs);
    Json out = Json::array();
    for (const auto& s : summaries) out.push_back(s);

    const fs::path dir(out_dir);
    fs::create_directories(dir);
    const std::string stem = fs::path(config_path).stem().string();
    write_text_file(dir / (stem + ".sweep.json"), out.dump(2) + "\n");
    std::cout << out.dump(2) << "\n";

    for (const auto& s : summaries) {
        if (s.contains("error")) return 1;  // sweep completed, but some runs failed
    }
    return 0;
}

int cmd_metrics(const std::string& csv_path, const std::optional<std::string>& reference_path,
                const std::optional<std::string>& config_path, double t_a,
                std::optional<double> t_end, const std::optional<std::string>& out_dir) {
    const auto csv = rft::CsvLog::read(csv_path);
    const auto t = csv.column("t");

    rft::MetricsConfig mcfg;
    std::vector<double> index;
    if (config_path) {
        // Recompute the index from the logged per-agent errors with the
        // config's constants; otherwise trust the logged column.
        const auto cfg = rft::ScenarioConfig::from_file(*config_path);
        mcfg = cfg.metrics;
        const int agents = csv.agent_count();
        std::vector<std::vector<double>> xerr, ebar;
        for (int i = 0; i < agents; ++i) {
            xerr.push_back(csv.column("xerr" + std::to_string(i)));
            ebar.push_back(csv.column("ebar1" + std::to_string(i)));
        }
        index.resize(t.size());
        for (std::size_t k = 0; k < t.size(); ++k) {
            double local = 0.0, global = 0.0;
            for (int i = 0; i < agents; ++i) {
                local += ebar[static_cast<std::size_t>(i)][k];
                global += xerr[static_cast<std::size_t>(i)][k];
            }
            index[k] = (mcfg.vartheta + local) / (mcfg.vartheta + local + mcfg.alpha * global);
        }
    } else {
        index = csv.column("perf_index");
    }

    const double window_end = t_end.value_or(t.back());

    Json out;
    out["csv"] = csv_path;
    out["rows"] = csv.row_count();
    out["t_a"] = t_a;
    out["t_end"] = window_end;
    double min_i = index.front(), final_i = index.back();
    for (double v : index) min_i = std::min(min_i, v);
    out["min_perf_index"] = min_i;
    out["final_perf_index"] = final_i;

    const auto res = rft::restoration(t, index, t_a, mcfg);
    out["restoration"] = {{"recovered", res.recovered}};
    if (res.recovered) {
        out["restoration"]["R_s"] = res.restoration;
        out["restoration"]["t_r"] = *res.recovery_time;
    } else {
        out["restoration"]["R_s"] = nullptr;
        out["restoration"]["t_r"] = nullptr;
    }

    if (reference_path) {
        const auto ref = rft::CsvLog::read(*reference_path);
        const auto ref_t = ref.column("t");
        if (ref_t.size() != t.size()) {
            throw std::invalid_argument("reference CSV grid does not match");
        }
        for (std::size_t k = 0; k < t.size(); ++k) {
            if (std::abs(ref_t[k] - t[k]) > 1e-9) {
                throw std::invalid_argument("reference CSV grid does not match");
            }
        }
        out["modified_restoration"] =
            rft::modified_restoration(t, ref.column("perf_index"), index, t_a, window_end);
        out["reference"] = *reference_path;
    }

    const std::string text = out.dump(2) + "\n";
    if (out_dir) {
        const std::string stem = fs::path(csv_path).stem().string();
        write_text_file(fs::path(*out_dir) / (stem + ".metrics.json"), text);
    }
    std::cout << text;
    return 0;
}

int cmd_list_scenarios(const std::string& dir) {
    if (!fs::is_directory(dir)) {
        throw rft::IoError("scenario directory '" + dir + "' does not exist");
    }
    std::vector<fs::path> paths;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() == ".json") paths.push_back(entry.path());
    }
    std::sort(paths.begin(), paths.end());
    for (const auto& p : paths) {
        std::string name;
        try {
            const auto j = load_json_file(p.string());
            if (j.contains("name")) name = j.at("name").get<std::string>();
        } catch (const std::exception&) {
            name = "(unreadable)";
        }
        std::printf("%-48s %s\n", p.filename().string().c_str(), name.c_str());
    }
    return 0;
}

void print_error_record(const char* kind, const std::string& message) {
    Json err = {{"error", kind}, {"message", message}};
    std::cerr << err.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"resilient time-varying formation tracking simulator"};
    app.require_subcommand(1);

    std::string config_path, overrides_path, csv_path;
    std::string out_dir = ".";
    std::string scenario_dir = "scenarios";
    std::optional<std::string> reference_path, metrics_config, metrics_out;
    std::optional<std::uint64_t> seed_override;
    double t_a = 0.0;
    std::optional<double> t_end;
    int jobs = 1;

    auto* validate = app.add_subcommand("validate", "parse and validate a scenario config");
    validate->add_option("--config", config_path, "scenario config path")->required();

    auto* run = app.add_subcommand("run", "run one scenario, write CSV log and JSON summary");
    run->add_option("--config", config_path, "scenario config path")->required();
    run->add_option("--out", out_dir, "output directory (default: current)");
    run->add_option("--seed", seed_override, "override the config seed");

    auto* sweep = app.add_subcommand("sweep", "run a list of config overrides");
    sweep->add_option("--config", config_path, "base scenario config path")->required();
    sweep->add_option("--overrides", overrides_path, "sweep spec (runs array)")->required();
    sweep->add_option("--out", out_dir, "output directory (default: current)");
    sweep->add_option("--jobs", jobs, "parallel runs")->check(CLI::PositiveNumber);
    sweep->add_option("--seed", seed_override, "override the base seed");

    auto* metrics = app.add_subcommand("metrics", "recompute metrics from an existing run CSV");
    metrics->add_option("--csv", csv_path, "run CSV path")->required();
    metrics->add_option("--reference", reference_path,
                        "attack-free reference CSV on the same grid");
    metrics->add_option("--config", metrics_config,
                        "scenario config; recomputes the index from logged errors");
    metrics->add_option("--t-a", t_a, "window start / attack onset (default 0)");
    metrics->add_option("--t-end", t_end, "window end (default: last sample)");
    metrics->add_option("--out", metrics_out, "directory for the metrics JSON");

    auto* list = app.add_subcommand("list-scenarios", "list bundled scenario configs");
    list->add_option("--dir", scenario_dir, "scenario directory (default: scenarios)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(config_path);
        if (run->parsed()) return cmd_run(config_path, out_dir, seed_override);
        if (sweep->parsed()) {
            return cmd_sweep(config_path, overrides_path, out_dir, jobs, seed_override);
        }
        if (metrics->parsed()) {
            return cmd_metrics(csv_path, reference_path, metrics_config, t_a, t_end,
                               metrics_out);
        }
        if (list->parsed()) return cmd_list_scenarios(scenario_dir);
    } catch (const rft::SimulationDivergedError& e) {
        print_error_record("simulation-diverged", e.what());
        return kExitSimulationDiverged;
    } catch (const rft::ConfigError& e) {
        print_error_record("config-invalid", e.what());
        return kExitConfigInvalid;
    } catch (const rft::IoError& e) {
        print_error_record("io", e.what());
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        print_error_record("config-invalid", e.what());
        return kExitConfigInvalid;
    } catch (const std::exception& e) {
        print_error_record("internal", e.what());
        return 1;
    }
    return 0;
}
