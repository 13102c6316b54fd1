// Command-line front end: run a scenario file, a built-in preset, a directory
// sweep, or validate a config without running it.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ptzgs/errors.hpp"
#include "ptzgs/scenario.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitEnvelope = 3;

void print_summary(const ptzgs::RunResult& res, std::ostream& out) {
    const auto& rep = res.report;
    out << res.config.name << " (" << ptzgs::to_string(res.problem.params.variant) << "): "
        << res.trajectory.size() << " samples, x* = (";
    for (Eigen::Index k = 0; k < res.xstar.size(); ++k) out << (k ? ", " : "") << res.xstar(k);
    out << ")\n";
    const double worst = *std::max_element(rep.final_er.begin(), rep.final_er.end());
    out << "  final max Er      : " << worst << '\n';
    out << "  Er <= 1e-2 from t : ";
    if (rep.er_threshold_time) {
        out << *rep.er_threshold_time << '\n';
    } else {
        out << "never\n";
    }
    out << "  envelope          : " << (rep.envelope.ok ? "ok" : "VIOLATED")
        << " (max ratio " << rep.envelope.max_ratio << " at t = " << rep.envelope.worst_time
        << ")\n";
    out << "  wall clock        : " << rep.wall_seconds << " s\n";
}

int run_config(ptzgs::ScenarioConfig cfg, const std::string& out_dir, bool no_plots) {
    if (!out_dir.empty()) cfg.output.dir = out_dir;
    if (no_plots) cfg.output.plots = false;
    const ptzgs::RunResult res = ptzgs::run(cfg);
    print_summary(res, std::cout);
    if (!cfg.output.dir.empty()) std::cout << "  output            : " << cfg.output.dir << '\n';
    return res.report.envelope.ok ? kExitOk : kExitEnvelope;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const ptzgs::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const ptzgs::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const ptzgs::DimensionMismatch& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const ptzgs::NonFiniteInput& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const ptzgs::EnvelopeViolation& e) {
        std::cerr << "envelope violation: " << e.what() << '\n';
        return kExitEnvelope;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
}

int sweep(const fs::path& config_dir, const std::string& out_root, unsigned jobs) {
    std::vector<fs::path> configs;
    for (const auto& entry : fs::directory_iterator(config_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            configs.push_back(entry.path());
        }
    }
    std::sort(configs.begin(), configs.end());
    if (configs.empty()) {
        std::cerr << "error: no *.json configs in " << config_dir << '\n';
        return kExitInvalid;
    }

    struct Outcome {
        int code = kExitOk;
        std::string log;
    };
    auto work = [&](const fs::path& path) {
        Outcome o;
        std::ostringstream log;
        o.code = guarded([&] {
            ptzgs::ScenarioConfig cfg = ptzgs::load_config(path);
            const fs::path root = out_root.empty() ? config_dir / "out" : fs::path(out_root);
            cfg.output.dir = root / path.stem();
            const ptzgs::RunResult res = ptzgs::run(cfg);
            print_summary(res, log);
            return res.report.envelope.ok ? kExitOk : kExitEnvelope;
        });
        o.log = path.filename().string() + ": exit " + std::to_string(o.code) + "\n" + log.str();
        return o;
    };

    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    int worst = kExitOk;
    for (std::size_t begin = 0; begin < configs.size(); begin += jobs) {
        std::vector<std::future<Outcome>> batch;
        for (std::size_t k = begin; k < std::min(configs.size(), begin + jobs); ++k) {
            batch.push_back(std::async(std::launch::async, work, configs[k]));
        }
        for (auto& f : batch) {
            const Outcome o = f.get();
            std::cout << o.log;
            worst = std::max(worst, o.code);
        }
    }
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Prescribed-time zero-gradient-sum distributed optimization simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    bool no_plots = false;

    auto* run_cmd = app.add_subcommand("run", "Simulate a scenario config file");
    run_cmd->add_option("--config", config_path, "Scenario JSON file")->required();
    run_cmd->add_option("--out-dir", out_dir, "Output directory (overrides config)");
    run_cmd->add_flag("--no-plots", no_plots, "Skip SVG figures");

    std::string preset_name;
    std::string algorithm;
    std::string write_config;
    auto* preset_cmd = app.add_subcommand("preset", "Simulate a built-in scenario");
    preset_cmd->add_option("name", preset_name, "Preset name (paper-sec4)")->required();
    preset_cmd->add_option("--algorithm", algorithm, "ms or ss")
        ->required()
        ->check(CLI::IsMember({"ms", "ss"}));
    preset_cmd->add_option("--out-dir", out_dir, "Output directory");
    preset_cmd->add_option("--write-config", write_config,
                           "Write the preset as a JSON config instead of running it");
    preset_cmd->add_flag("--no-plots", no_plots, "Skip SVG figures");

    std::string config_dir;
    unsigned jobs = 0;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run every *.json config in a directory");
    sweep_cmd->add_option("--config-dir", config_dir, "Directory of scenario files")->required();
    sweep_cmd->add_option("--out-dir", out_dir, "Root for per-config output directories");
    sweep_cmd->add_option("--jobs", jobs, "Parallel runs (default: hardware threads)");

    auto* check_cmd = app.add_subcommand("check", "Validate a config without running it");
    check_cmd->add_option("--config", config_path, "Scenario JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitInvalid;
    }

    if (*run_cmd) {
        return guarded([&] { return run_config(ptzgs::load_config(config_path), out_dir, no_plots); });
    }
    if (*preset_cmd) {
        return guarded([&] {
            const auto variant =
                algorithm == "ms" ? ptzgs::Variant::MultiStage : ptzgs::Variant::SingleStage;
            ptzgs::ScenarioConfig cfg = ptzgs::preset_config(preset_name, variant);
            if (!write_config.empty()) {
                if (!out_dir.empty()) cfg.output.dir = out_dir;
                const fs::path target(write_config);
                if (target.has_parent_path()) fs::create_directories(target.parent_path());
                std::ofstream out(target);
                if (!out) throw ptzgs::IoError("cannot write " + write_config);
                out << ptzgs::config_to_json(cfg);
                return kExitOk;
            }
            return run_config(cfg, out_dir, no_plots);
        });
    }
    if (*sweep_cmd) {
        return guarded([&] { return sweep(config_dir, out_dir, jobs); });
    }
    if (*check_cmd) {
        return guarded([&] {
            const ptzgs::ScenarioConfig cfg = ptzgs::load_config(config_path);
            std::cout << config_path << ": ok (" << cfg.agents << " agents, algorithm "
                      << ptzgs::to_string(cfg.params.variant) << ")\n";
            return kExitOk;
        });
    }
    return kExitError;
}
