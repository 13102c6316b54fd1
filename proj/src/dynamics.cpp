#include "ptzgs/dynamics.hpp"

#include <string>

#include "ptzgs/errors.hpp"

namespace ptzgs {

const char* to_string(Variant v) {
    return v == Variant::MultiStage ? "ms" : "ss";
}

void AlgorithmParams::validate() const {
    if (!(kappa1 > 0.0) || !(kappa2 > 0.0) || !(c > 0.0)) {
        throw ValidationError("params: kappa1, kappa2 and c must be strictly positive");
    }
}

SystemState::SystemState(std::size_t agents, std::size_t dim, double t0)
    : t(t0),
      agents_(agents),
      dim_(dim),
      stacked_(Vector::Zero(static_cast<Eigen::Index>(2 * agents * dim))) {}

SystemState::SystemState(std::size_t agents, std::size_t dim, double t0, Vector stacked)
    : t(t0), agents_(agents), dim_(dim), stacked_(std::move(stacked)) {
    if (static_cast<std::size_t>(stacked_.size()) != 2 * agents * dim) {
        throw DimensionMismatch("SystemState: stacked vector has length " +
                                std::to_string(stacked_.size()) + ", expected " +
                                std::to_string(2 * agents * dim));
    }
}

SystemState SystemState::from_positions(std::span<const Vector> x, double t0) {
    if (x.empty()) throw DimensionMismatch("SystemState: no agents");
    const auto dim = static_cast<std::size_t>(x.front().size());
    SystemState s(x.size(), dim, t0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (static_cast<std::size_t>(x[i].size()) != dim) {
            throw DimensionMismatch("SystemState: agent " + std::to_string(i + 1) +
                                    " has a different dimension");
        }
        s.x(i) = x[i];
    }
    return s;
}

Vector SystemState::phi_sum() const {
    Vector sum = Vector::Zero(static_cast<Eigen::Index>(dim_));
    for (std::size_t i = 0; i < agents_; ++i) sum += phi(i);
    return sum;
}

namespace {

void check_models(const SystemState& state, std::span<const ObjectivePtr> models) {
    if (models.size() != state.agents()) {
        throw DimensionMismatch("expected " + std::to_string(state.agents()) + " objectives, got " +
                                std::to_string(models.size()));
    }
    for (std::size_t i = 0; i < models.size(); ++i) {
        if (models[i]->dim() != state.dim()) {
            throw DimensionMismatch("objective " + std::to_string(i + 1) + " has dimension " +
                                    std::to_string(models[i]->dim()) + ", state has " +
                                    std::to_string(state.dim()));
        }
    }
}

void check_graph(const SystemState& state, const Graph& g) {
    if (g.size() != state.agents()) {
        throw DimensionMismatch("graph has " + std::to_string(g.size()) + " agents, state has " +
                                std::to_string(state.agents()));
    }
}

// sum_j a_ij (x_i - x_j)
Vector disagreement(const SystemState& state, const Graph& g, std::size_t i) {
    Vector out = Vector::Zero(static_cast<Eigen::Index>(state.dim()));
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double w = g.weight(i, j);
        if (w != 0.0) out += w * (state.x(i) - state.x(j));
    }
    return out;
}

// hess f_i(x_i)^{-1} * v via Cholesky.
Vector hessian_solve(const ObjectiveModel& model, const Vector& x, const Vector& v,
                     std::size_t agent) {
    Eigen::LLT<Matrix> llt(model.hessian(x));
    if (llt.info() != Eigen::Success) {
        throw SingularHessian(agent, "Hessian of agent " + std::to_string(agent + 1) +
                                         " is not positive definite");
    }
    return llt.solve(v);
}

}  // namespace

std::vector<Vector> sliding_surface(const SystemState& state, std::span<const ObjectivePtr> models,
                                    const AlgorithmParams& params) {
    check_models(state, models);
    std::vector<Vector> s;
    s.reserve(state.agents());
    for (std::size_t i = 0; i < state.agents(); ++i) {
        const Vector xi = state.x(i);
        s.emplace_back(models[i]->gradient(xi) + params.c * state.phi(i));
    }
    return s;
}

SystemState ms_rhs(const SystemState& state, const Graph& g, std::span<const ObjectivePtr> models,
                   const AlgorithmParams& params, const StageSchedule& schedule) {
    if (params.variant != Variant::MultiStage) {
        throw PreconditionError("ms_rhs: params.variant is not multi-stage");
    }
    if (schedule.stages.size() != 2) throw PreconditionError("ms_rhs: schedule needs 2 stages");
    check_graph(state, g);
    const auto s = sliding_surface(state, models, params);

    const double surface_gain = params.kappa1 + rho_ratio(schedule.stages[0], state.t);
    const double consensus_gain = params.kappa2 * rho_ratio(schedule.stages[1], state.t);

    SystemState out(state.agents(), state.dim(), state.t);
    for (std::size_t i = 0; i < state.agents(); ++i) {
        const Vector lap = disagreement(state, g, i);
        const Vector bracket = -surface_gain * s[i] - params.c * consensus_gain * lap;
        out.x(i) = hessian_solve(*models[i], state.x(i), bracket, i);
        out.phi(i) = consensus_gain * lap;
    }
    return out;
}

SystemState ss_rhs(const SystemState& state, const Graph& g, std::span<const ObjectivePtr> models,
                   const AlgorithmParams& params, const StageSchedule& schedule) {
    if (params.variant != Variant::SingleStage) {
        throw PreconditionError("ss_rhs: params.variant is not single-stage");
    }
    if (schedule.stages.size() != 1) throw PreconditionError("ss_rhs: schedule needs 1 stage");
    check_graph(state, g);
    const auto s = sliding_surface(state, models, params);

    const double gain = params.kappa1 * rho_ratio(schedule.stages[0], state.t);

    SystemState out(state.agents(), state.dim(), state.t);
    for (std::size_t i = 0; i < state.agents(); ++i) {
        const Vector lap = disagreement(state, g, i);
        const Vector bracket = gain * (-params.kappa2 * s[i] - params.c * lap);
        out.x(i) = hessian_solve(*models[i], state.x(i), bracket, i);
        out.phi(i) = gain * lap;
    }
    return out;
}

SystemState rhs(const SystemState& state, const Graph& g, std::span<const ObjectivePtr> models,
                const AlgorithmParams& params, const StageSchedule& schedule) {
    return params.variant == Variant::MultiStage ? ms_rhs(state, g, models, params, schedule)
                                                 : ss_rhs(state, g, models, params, schedule);
}

Vector gradient_sum(const SystemState& state, std::span<const ObjectivePtr> models) {
    check_models(state, models);
    Vector sum = Vector::Zero(static_cast<Eigen::Index>(state.dim()));
    for (std::size_t i = 0; i < state.agents(); ++i) sum += models[i]->gradient(state.x(i));
    return sum;
}

Vector zgs_weighted_velocity_sum(const SystemState& state, const SystemState& derivative,
                                 std::span<const ObjectivePtr> models) {
    check_models(state, models);
    if (derivative.agents() != state.agents() || derivative.dim() != state.dim()) {
        throw DimensionMismatch("zgs_weighted_velocity_sum: derivative layout differs from state");
    }
    Vector sum = Vector::Zero(static_cast<Eigen::Index>(state.dim()));
    for (std::size_t i = 0; i < state.agents(); ++i) {
        sum += models[i]->hessian(state.x(i)) * derivative.x(i);
    }
    return sum;
}

void ZgsProblem::validate() const {
    params.validate();
    schedule.validate();
    if (models.size() != graph.size()) {
        throw ValidationError("problem: graph has " + std::to_string(graph.size()) +
                              " agents but " + std::to_string(models.size()) +
                              " objectives were given");
    }
    for (const auto& m : models) {
        if (!m) throw ValidationError("problem: null objective");
        if (m->dim() != models.front()->dim()) {
            throw ValidationError("problem: objectives differ in dimension");
        }
    }
    const std::size_t expected = params.variant == Variant::MultiStage ? 2 : 1;
    if (schedule.stages.size() != expected) {
        throw ValidationError(std::string("problem: variant ") + to_string(params.variant) +
                              " requires " + std::to_string(expected) + " scaling stage(s)");
    }
    assert_connected(graph);
}

SystemState ZgsProblem::derivative(const SystemState& state) const {
    return rhs(state, graph, models, params, schedule);
}

SystemState ZgsProblem::state(double t, const Vector& stacked) const {
    return SystemState(agents(), dim(), t, stacked);
}

Vector ZgsProblem::derivative(double t, const Vector& stacked) const {
    return derivative(state(t, stacked)).stacked();
}

}  // namespace ptzgs
