#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ptzgs/diagnostics.hpp"
#include "ptzgs/dynamics.hpp"
#include "ptzgs/graph.hpp"
#include "ptzgs/integrator.hpp"

namespace ptzgs {

struct QuadraticSpec {
    Matrix q;
    Vector center;
    double offset = 0.0;
};

struct OutputSpec {
    std::filesystem::path dir;  // empty: no files written
    bool csv = true;
    bool plots = true;
};

/// Everything one simulation run needs. Built by load_config() or preset_config().
struct ScenarioConfig {
    std::string name = "scenario";
    std::size_t agents = 0;
    std::vector<Edge> edges;
    std::vector<QuadraticSpec> objectives;
    AlgorithmParams params;

    double t0 = 0.0;
    double T1 = 0.0;
    double h1 = 0.0;
    std::optional<double> T2;
    std::optional<double> h2;
    double epsilon_rel = 1e-4;

    IntegratorConfig integrator;

    // Explicit initial positions; when absent they are drawn uniformly from
    // [box_lo, box_hi]^n using `seed`.
    std::optional<std::vector<Vector>> initial_x;
    double box_lo = -5.0;
    double box_hi = 5.0;
    std::uint64_t seed = 0;

    std::optional<double> p;
    std::optional<double> delta;

    // Post-deadline integration length as a fraction of the prescribed horizon.
    double hold_fraction = 0.2;

    OutputSpec output;
};

/// Parses and validates a JSON scenario. ParseError carries line/column for
/// syntax errors and the field path for type errors; ValidationError names
/// the violated invariant.
ScenarioConfig parse_config(std::string_view text, std::string_view source = "<config>");
ScenarioConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ScenarioConfig& cfg);

/// Eager invariant checks: agent counts, MS/SS stage fields, SPD objectives,
/// connectivity, integrator and gain settings.
void validate(const ScenarioConfig& cfg);

/// Six agents on the unit-weight ring 1-2-3-4-5-6-1 with the benchmark
/// quadratics, gains kappa1 = 2, kappa2 = 3, c = 1 and
///   MS: T1 = 0.1, h1 = 3, T2 = 0.2, h2 = 2.5
///   SS: T1 = 0.3, h1 = 2.3
ScenarioConfig preset_config(std::string_view name, Variant variant);

inline constexpr std::uint64_t kPresetSeed = 20240917;

/// The six benchmark objectives
///   (x1-1)^2 + (x2-2)^2, (x1-3)^2 + (x2-4)^2, (x1-5)^2 + (x2-6)^2,
///   x1^2 + 2 x2^2,       2 x1^2 + x2^2,       3 x1^2 + 2 x2^2.
std::vector<QuadraticSpec> benchmark_quadratics();

std::vector<ObjectivePtr> make_objectives(std::span<const QuadraticSpec> specs);
ZgsProblem build_problem(const ScenarioConfig& cfg);
std::vector<Vector> initial_positions(const ScenarioConfig& cfg);

struct RunReport {
    std::vector<double> final_er;
    std::optional<double> er_threshold_time;  // first t with max_i Er_i <= 1e-2
    EnvelopeReport envelope;
    double wall_seconds = 0.0;
};

struct RunResult {
    ScenarioConfig config;
    ZgsProblem problem;
    Vector xstar;
    TheoryConstants consts;
    Trajectory trajectory;
    std::vector<DiagnosticsSample> diagnostics;
    RunReport report;
};

/// Integrates to the final deadline plus the post-deadline hold, evaluates all
/// diagnostics and the envelope report, and writes CSV/plots when
/// cfg.output.dir is set.
RunResult run(const ScenarioConfig& cfg);

std::string csv_header(std::size_t agents, std::size_t dim);
void write_csv(std::ostream& out, const RunResult& result);
void write_csv(const std::filesystem::path& path, const RunResult& result);
void write_report(const std::filesystem::path& path, const RunResult& result);

/// Four SVG figures: agent states, Er (log y), |s_i| and global function
/// error (log y), each with vertical markers at the stage deadlines.
std::vector<std::filesystem::path> emit_plots(const RunResult& result,
                                              const std::filesystem::path& dir);

}  // namespace ptzgs
