#include "ptzgs/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ptzgs/errors.hpp"

namespace ptzgs {

using nlohmann::json;

namespace {

// --- JSON field access with path-qualified errors -------------------------

const json& require(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) throw ParseError(path + ": expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(path + "." + key + ": missing required field");
    return *it;
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ParseError(path + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ParseError(path + ": expected a finite number");
    return v;
}

std::optional<double> optional_number(const json& obj, const std::string& key,
                                      const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    return as_number(*it, path + "." + key);
}

std::size_t as_count(const json& j, const std::string& path) {
    if (!j.is_number_integer() || j.get<long long>() < 0) {
        throw ParseError(path + ": expected a nonnegative integer");
    }
    return j.get<std::size_t>();
}

Vector as_vector(const json& j, const std::string& path) {
    if (!j.is_array()) throw ParseError(path + ": expected an array of numbers");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) {
        v(static_cast<Eigen::Index>(k)) = as_number(j[k], path + "[" + std::to_string(k) + "]");
    }
    return v;
}

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        const bool known = std::any_of(allowed.begin(), allowed.end(),
                                       [&](const char* k) { return it.key() == k; });
        if (!known) throw ParseError(path + "." + it.key() + ": unknown field");
    }
}

std::string line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
        if (text[k] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

Variant parse_variant(const json& j, const std::string& path) {
    if (!j.is_string()) throw ParseError(path + ": expected \"ms\" or \"ss\"");
    const auto s = j.get<std::string>();
    if (s == "ms") return Variant::MultiStage;
    if (s == "ss") return Variant::SingleStage;
    throw ParseError(path + ": expected \"ms\" or \"ss\", got \"" + s + "\"");
}

Edge parse_edge(const json& j, const std::string& path) {
    Edge e;
    if (j.is_array()) {
        if (j.size() != 2 && j.size() != 3) throw ParseError(path + ": expected [i, j] or [i, j, w]");
        e.i = as_count(j[0], path + "[0]");
        e.j = as_count(j[1], path + "[1]");
        if (j.size() == 3) e.weight = as_number(j[2], path + "[2]");
    } else if (j.is_object()) {
        reject_unknown(j, {"i", "j", "weight"}, path);
        e.i = as_count(require(j, "i", path), path + ".i");
        e.j = as_count(require(j, "j", path), path + ".j");
        e.weight = optional_number(j, "weight", path).value_or(1.0);
    } else {
        throw ParseError(path + ": expected an edge array or object");
    }
    return e;
}

QuadraticSpec parse_quadratic(const json& j, const std::string& path) {
    if (!j.is_object()) throw ParseError(path + ": expected an object");
    reject_unknown(j, {"Q", "center", "offset"}, path);
    QuadraticSpec q;
    q.center = as_vector(require(j, "center", path), path + ".center");
    const Vector flat = as_vector(require(j, "Q", path), path + ".Q");
    const auto n = q.center.size();
    if (flat.size() != n * n) {
        throw ParseError(path + ".Q: expected " + std::to_string(n * n) +
                         " row-major entries for dimension " + std::to_string(n));
    }
    q.q.resize(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c) q.q(r, c) = flat(r * n + c);
    q.offset = optional_number(j, "offset", path).value_or(0.0);
    return q;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

ScenarioConfig parse_config(std::string_view text, std::string_view source) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string(source) + ": syntax error at " + line_column(text, e.byte) +
                         ": " + e.what());
    }
    if (!root.is_object()) throw ParseError(std::string(source) + ": top level must be an object");

    const std::string r = "config";
    reject_unknown(root,
                   {"name", "algorithm", "graph", "objectives", "params", "schedule", "integrator",
                    "initial_x", "initial_box", "seed", "theory", "hold_fraction", "output"},
                   r);

    ScenarioConfig cfg;
    if (auto it = root.find("name"); it != root.end()) {
        if (!it->is_string()) throw ParseError(r + ".name: expected a string");
        cfg.name = it->get<std::string>();
    }
    cfg.params.variant = parse_variant(require(root, "algorithm", r), r + ".algorithm");

    const json& graph = require(root, "graph", r);
    reject_unknown(graph, {"agents", "edges"}, r + ".graph");
    cfg.agents = as_count(require(graph, "agents", r + ".graph"), r + ".graph.agents");
    const json& edges = require(graph, "edges", r + ".graph");
    if (!edges.is_array()) throw ParseError(r + ".graph.edges: expected an array");
    for (std::size_t k = 0; k < edges.size(); ++k) {
        cfg.edges.push_back(parse_edge(edges[k], r + ".graph.edges[" + std::to_string(k) + "]"));
    }

    const json& objectives = require(root, "objectives", r);
    if (!objectives.is_array()) throw ParseError(r + ".objectives: expected an array");
    for (std::size_t k = 0; k < objectives.size(); ++k) {
        cfg.objectives.push_back(
            parse_quadratic(objectives[k], r + ".objectives[" + std::to_string(k) + "]"));
    }

    if (auto it = root.find("params"); it != root.end()) {
        const std::string pp = r + ".params";
        if (!it->is_object()) throw ParseError(pp + ": expected an object");
        reject_unknown(*it, {"kappa1", "kappa2", "c"}, pp);
        if (auto k = it->find("kappa1"); k != it->end()) cfg.params.kappa1 = as_number(*k, pp + ".kappa1");
        if (auto k = it->find("kappa2"); k != it->end()) cfg.params.kappa2 = as_number(*k, pp + ".kappa2");
        if (auto k = it->find("c"); k != it->end()) cfg.params.c = as_number(*k, pp + ".c");
    }

    const std::string sp = r + ".schedule";
    const json& schedule = require(root, "schedule", r);
    reject_unknown(schedule, {"t0", "T1", "h1", "T2", "h2", "epsilon_rel"}, sp);
    cfg.t0 = optional_number(schedule, "t0", sp).value_or(0.0);
    cfg.T1 = as_number(require(schedule, "T1", sp), sp + ".T1");
    cfg.h1 = as_number(require(schedule, "h1", sp), sp + ".h1");
    cfg.T2 = optional_number(schedule, "T2", sp);
    cfg.h2 = optional_number(schedule, "h2", sp);
    cfg.epsilon_rel = optional_number(schedule, "epsilon_rel", sp).value_or(cfg.epsilon_rel);

    if (auto it = root.find("integrator"); it != root.end()) {
        const std::string ip = r + ".integrator";
        reject_unknown(*it, {"base_step", "gain_cap_theta", "min_step", "method", "max_points"}, ip);
        auto& ic = cfg.integrator;
        ic.base_step = optional_number(*it, "base_step", ip).value_or(ic.base_step);
        ic.gain_cap_theta = optional_number(*it, "gain_cap_theta", ip).value_or(ic.gain_cap_theta);
        ic.min_step = optional_number(*it, "min_step", ip).value_or(ic.min_step);
        if (auto m = it->find("method"); m != it->end()) {
            const std::string name = m->is_string() ? m->get<std::string>() : "";
            if (name == "rk4") {
                ic.method = Method::RK4;
            } else if (name == "euler") {
                ic.method = Method::Euler;
            } else {
                throw ParseError(ip + ".method: expected \"rk4\" or \"euler\"");
            }
        }
        if (auto m = it->find("max_points"); m != it->end()) {
            ic.max_points = as_count(*m, ip + ".max_points");
        }
    }

    if (auto it = root.find("initial_x"); it != root.end()) {
        if (!it->is_array()) throw ParseError(r + ".initial_x: expected an array of vectors");
        std::vector<Vector> xs;
        for (std::size_t k = 0; k < it->size(); ++k) {
            xs.push_back(as_vector((*it)[k], r + ".initial_x[" + std::to_string(k) + "]"));
        }
        cfg.initial_x = std::move(xs);
    }
    if (auto it = root.find("initial_box"); it != root.end()) {
        const Vector box = as_vector(*it, r + ".initial_box");
        if (box.size() != 2) throw ParseError(r + ".initial_box: expected [lo, hi]");
        cfg.box_lo = box(0);
        cfg.box_hi = box(1);
    }
    if (auto it = root.find("seed"); it != root.end()) {
        if (!it->is_number_unsigned()) throw ParseError(r + ".seed: expected a nonnegative integer");
        cfg.seed = it->get<std::uint64_t>();
    }
    if (auto it = root.find("theory"); it != root.end()) {
        reject_unknown(*it, {"p", "delta"}, r + ".theory");
        cfg.p = optional_number(*it, "p", r + ".theory");
        cfg.delta = optional_number(*it, "delta", r + ".theory");
    }
    cfg.hold_fraction = optional_number(root, "hold_fraction", r).value_or(cfg.hold_fraction);
    if (auto it = root.find("output"); it != root.end()) {
        reject_unknown(*it, {"dir", "csv", "plots"}, r + ".output");
        if (auto d = it->find("dir"); d != it->end()) {
            if (!d->is_string()) throw ParseError(r + ".output.dir: expected a string");
            cfg.output.dir = d->get<std::string>();
        }
        if (auto c = it->find("csv"); c != it->end()) {
            if (!c->is_boolean()) throw ParseError(r + ".output.csv: expected a boolean");
            cfg.output.csv = c->get<bool>();
        }
        if (auto p = it->find("plots"); p != it->end()) {
            if (!p->is_boolean()) throw ParseError(r + ".output.plots: expected a boolean");
            cfg.output.plots = p->get<bool>();
        }
    }

    validate(cfg);
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    ScenarioConfig cfg = parse_config(buf.str(), path.string());
    // Relative output directories resolve against the config file location.
    if (!cfg.output.dir.empty() && cfg.output.dir.is_relative()) {
        cfg.output.dir = path.parent_path() / cfg.output.dir;
    }
    return cfg;
}

std::string config_to_json(const ScenarioConfig& cfg) {
    json j;
    j["name"] = cfg.name;
    j["algorithm"] = to_string(cfg.params.variant);
    json edges = json::array();
    for (const Edge& e : cfg.edges) edges.push_back({e.i, e.j, e.weight});
    j["graph"] = {{"agents", cfg.agents}, {"edges", edges}};
    json objectives = json::array();
    for (const auto& q : cfg.objectives) {
        std::vector<double> flat;
        for (Eigen::Index r = 0; r < q.q.rows(); ++r)
            for (Eigen::Index c = 0; c < q.q.cols(); ++c) flat.push_back(q.q(r, c));
        objectives.push_back({{"Q", flat},
                              {"center", std::vector<double>(q.center.begin(), q.center.end())},
                              {"offset", q.offset}});
    }
    j["objectives"] = objectives;
    j["params"] = {{"kappa1", cfg.params.kappa1}, {"kappa2", cfg.params.kappa2}, {"c", cfg.params.c}};
    json sched = {{"t0", cfg.t0}, {"T1", cfg.T1}, {"h1", cfg.h1}, {"epsilon_rel", cfg.epsilon_rel}};
    if (cfg.T2) sched["T2"] = *cfg.T2;
    if (cfg.h2) sched["h2"] = *cfg.h2;
    j["schedule"] = sched;
    j["integrator"] = {{"base_step", cfg.integrator.base_step},
                       {"gain_cap_theta", cfg.integrator.gain_cap_theta},
                       {"min_step", cfg.integrator.min_step},
                       {"method", cfg.integrator.method == Method::RK4 ? "rk4" : "euler"},
                       {"max_points", cfg.integrator.max_points}};
    if (cfg.initial_x) {
        json xs = json::array();
        for (const Vector& x : *cfg.initial_x) xs.push_back(std::vector<double>(x.begin(), x.end()));
        j["initial_x"] = xs;
    }
    j["initial_box"] = {cfg.box_lo, cfg.box_hi};
    j["seed"] = cfg.seed;
    json theory = json::object();
    if (cfg.p) theory["p"] = *cfg.p;
    if (cfg.delta) theory["delta"] = *cfg.delta;
    if (!theory.empty()) j["theory"] = theory;
    j["hold_fraction"] = cfg.hold_fraction;
    json out = {{"csv", cfg.output.csv}, {"plots", cfg.output.plots}};
    if (!cfg.output.dir.empty()) out["dir"] = cfg.output.dir.string();
    j["output"] = out;
    return j.dump(2) + "\n";
}

void validate(const ScenarioConfig& cfg) {
    if (cfg.agents < 2) throw ValidationError("graph.agents: at least two agents are required");
    if (cfg.objectives.size() != cfg.agents) {
        throw ValidationError("objectives: expected one objective per agent (" +
                              std::to_string(cfg.agents) + "), got " +
                              std::to_string(cfg.objectives.size()));
    }
    const auto dim = cfg.objectives.front().center.size();
    if (dim < 1) throw ValidationError("objectives: dimension must be at least 1");
    for (std::size_t k = 0; k < cfg.objectives.size(); ++k) {
        if (cfg.objectives[k].center.size() != dim) {
            throw ValidationError("objectives[" + std::to_string(k) + "]: dimension differs");
        }
    }
    if (cfg.params.variant == Variant::MultiStage) {
        if (!cfg.T2 || !cfg.h2) throw ValidationError("schedule: algorithm ms requires T2 and h2");
    } else if (cfg.T2 || cfg.h2) {
        throw ValidationError("schedule: algorithm ss does not accept T2/h2");
    }
    if (cfg.initial_x) {
        if (cfg.initial_x->size() != cfg.agents) {
            throw ValidationError("initial_x: expected one vector per agent");
        }
        for (const Vector& x : *cfg.initial_x) {
            if (x.size() != dim) throw ValidationError("initial_x: vector dimension mismatch");
        }
    } else if (!(cfg.box_lo < cfg.box_hi)) {
        throw ValidationError("initial_box: require lo < hi");
    }
    if (!(cfg.hold_fraction >= 0.0)) throw ValidationError("hold_fraction must be nonnegative");
    cfg.integrator.validate();

    // Module-level checks: SPD objectives, connectivity, stage contiguity, gains.
    const ZgsProblem problem = build_problem(cfg);
    problem.validate();
    theory_constants(problem.graph, problem.models, problem.params, cfg.p, cfg.delta);
}

std::vector<QuadraticSpec> benchmark_quadratics() {
    auto diag = [](double a, double b) {
        Matrix q = Matrix::Zero(2, 2);
        q(0, 0) = a;
        q(1, 1) = b;
        return q;
    };
    auto point = [](double a, double b) { return Vector{{a, b}}; };
    return {
        {diag(1, 1), point(1, 2), 0.0}, {diag(1, 1), point(3, 4), 0.0},
        {diag(1, 1), point(5, 6), 0.0}, {diag(1, 2), point(0, 0), 0.0},
        {diag(2, 1), point(0, 0), 0.0}, {diag(3, 2), point(0, 0), 0.0},
    };
}

ScenarioConfig preset_config(std::string_view name, Variant variant) {
    if (name != "paper-sec4") {
        throw ValidationError("unknown preset \"" + std::string(name) + "\" (available: paper-sec4)");
    }
    ScenarioConfig cfg;
    cfg.name = std::string(name) + "-" + to_string(variant);
    cfg.agents = 6;
    for (std::size_t i = 1; i <= 6; ++i) cfg.edges.push_back({i, i % 6 + 1, 1.0});
    cfg.objectives = benchmark_quadratics();
    cfg.params = AlgorithmParams{2.0, 3.0, 1.0, variant};
    if (variant == Variant::MultiStage) {
        cfg.T1 = 0.1;
        cfg.h1 = 3.0;
        cfg.T2 = 0.2;
        cfg.h2 = 2.5;
    } else {
        cfg.T1 = 0.3;
        cfg.h1 = 2.3;
    }
    cfg.seed = kPresetSeed;
    validate(cfg);
    return cfg;
}

std::vector<ObjectivePtr> make_objectives(std::span<const QuadraticSpec> specs) {
    std::vector<ObjectivePtr> out;
    out.reserve(specs.size());
    for (const auto& s : specs) {
        out.push_back(std::make_shared<const QuadraticObjective>(s.q, s.center, s.offset));
    }
    return out;
}

ZgsProblem build_problem(const ScenarioConfig& cfg) {
    StageSchedule schedule =
        cfg.params.variant == Variant::MultiStage
            ? StageSchedule::multi_stage(cfg.t0, cfg.T1, cfg.h1, cfg.T2.value_or(0.0),
                                         cfg.h2.value_or(0.0), cfg.epsilon_rel)
            : StageSchedule::single_stage(cfg.t0, cfg.T1, cfg.h1, cfg.epsilon_rel);
    return ZgsProblem{Graph::from_edges(cfg.agents, cfg.edges), make_objectives(cfg.objectives),
                      cfg.params, std::move(schedule)};
}

std::vector<Vector> initial_positions(const ScenarioConfig& cfg) {
    if (cfg.initial_x) return *cfg.initial_x;
    const auto dim = cfg.objectives.front().center.size();
    // Raw 64-bit draws mapped by hand so the sequence is identical across
    // standard library implementations.
    std::mt19937_64 gen(cfg.seed);
    std::vector<Vector> xs;
    for (std::size_t i = 0; i < cfg.agents; ++i) {
        Vector x(dim);
        for (Eigen::Index k = 0; k < dim; ++k) {
            const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
            x(k) = cfg.box_lo + (cfg.box_hi - cfg.box_lo) * u;
        }
        xs.push_back(std::move(x));
    }
    return xs;
}

RunResult run(const ScenarioConfig& cfg) {
    const auto started = std::chrono::steady_clock::now();
    validate(cfg);

    RunResult res{cfg, build_problem(cfg), {}, {}, {}, {}, {}};
    const ZgsProblem& problem = res.problem;
    res.xstar = global_minimizer(problem.models);
    res.consts = theory_constants(problem.graph, problem.models, problem.params, cfg.p, cfg.delta);

    const auto x0 = initial_positions(cfg);
    const SystemState state0 = SystemState::from_positions(x0, cfg.t0);
    const double horizon = problem.schedule.final_deadline() - problem.schedule.start();
    const TimeGrid grid = build_time_grid(problem.schedule, cfg.integrator,
                                          cfg.hold_fraction * horizon);

    const VectorField field = [&problem](double t, const Vector& y) {
        return problem.derivative(t, y);
    };
    try {
        res.trajectory = integrate(field, state0.stacked(), grid, cfg.integrator);
    } catch (const NonFiniteState& e) {
        const std::size_t block = e.component() / problem.dim();
        const bool is_phi = block >= problem.agents();
        const std::size_t agent = (is_phi ? block - problem.agents() : block) + 1;
        throw NonFiniteState(e.time(), e.component(),
                             std::string("non-finite ") + (is_phi ? "phi" : "x") + " of agent " +
                                 std::to_string(agent) + " at t = " + format_double(e.time()));
    }

    res.diagnostics = evaluate_diagnostics(problem, res.trajectory, res.xstar, res.consts);
    res.report.envelope = envelope_report(res.trajectory, res.diagnostics, res.consts,
                                          problem.schedule, problem.params.variant);
    res.report.final_er = res.diagnostics.back().er;
    for (std::size_t k = 0; k < res.diagnostics.size(); ++k) {
        const auto& er = res.diagnostics[k].er;
        if (*std::max_element(er.begin(), er.end()) <= 1e-2) {
            res.report.er_threshold_time = res.trajectory.times[k];
            break;
        }
    }

    if (!cfg.output.dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(cfg.output.dir, ec);
        if (ec) throw IoError("cannot create output directory " + cfg.output.dir.string());
        if (cfg.output.csv) write_csv(cfg.output.dir / "trajectory.csv", res);
        if (cfg.output.plots) emit_plots(res, cfg.output.dir);
    }
    res.report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (!cfg.output.dir.empty()) write_report(cfg.output.dir / "report.json", res);
    return res;
}

std::string csv_header(std::size_t agents, std::size_t dim) {
    std::string h = "t";
    for (std::size_t i = 1; i <= agents; ++i) {
        for (std::size_t k = 1; k <= dim; ++k) {
            h += ",x" + std::to_string(i) + "_" + std::to_string(k);
        }
        h += ",s_norm" + std::to_string(i) + ",er" + std::to_string(i);
    }
    h += ",V_M,V_S,grad_sum_norm,f_err,zgs2_norm";
    return h;
}

void write_csv(std::ostream& out, const RunResult& result) {
    const ZgsProblem& p = result.problem;
    out << csv_header(p.agents(), p.dim()) << '\n';
    const Trajectory& traj = result.trajectory;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const DiagnosticsSample& d = result.diagnostics[k];
        std::string row = format_double(traj.times[k]);
        for (std::size_t i = 0; i < p.agents(); ++i) {
            for (std::size_t c = 0; c < p.dim(); ++c) {
                row += ',';
                row += format_double(traj.states[k](static_cast<Eigen::Index>(i * p.dim() + c)));
            }
            row += ',' + format_double(d.s_norm[i]) + ',' + format_double(d.er[i]);
        }
        for (double v : {d.V_M, d.V_S, d.grad_sum_norm, d.f_err, d.zgs2_norm}) {
            row += ',' + format_double(v);
        }
        out << row << '\n';
    }
}

void write_csv(const std::filesystem::path& path, const RunResult& result) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    write_csv(out, result);
    if (!out) throw IoError("error while writing " + path.string());
}

void write_report(const std::filesystem::path& path, const RunResult& result) {
    const RunReport& rep = result.report;
    json j;
    j["name"] = result.config.name;
    j["algorithm"] = to_string(result.problem.params.variant);
    j["xstar"] = std::vector<double>(result.xstar.begin(), result.xstar.end());
    j["final_er"] = rep.final_er;
    j["er_threshold_time"] = rep.er_threshold_time ? json(*rep.er_threshold_time) : json(nullptr);
    j["envelope"] = {{"ok", rep.envelope.ok},
                     {"max_ratio", rep.envelope.max_ratio},
                     {"worst_time", rep.envelope.worst_time},
                     {"anchor_time", rep.envelope.anchor_time},
                     {"checked_samples", rep.envelope.checked}};
    j["constants"] = {{"lambda2", result.consts.lambda2}, {"Gamma_max", result.consts.Gamma_max},
                      {"Psi_max", result.consts.Psi_max}, {"alpha1", result.consts.alpha1},
                      {"p", result.consts.p},             {"delta", result.consts.delta},
                      {"sigma_S", result.consts.sigma_S}, {"alpha2", result.consts.alpha2}};
    j["samples"] = result.trajectory.size();
    j["wall_seconds"] = rep.wall_seconds;
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

}  // namespace ptzgs
