#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ptzgs/graph.hpp"
#include "ptzgs/linalg.hpp"
#include "ptzgs/objective.hpp"
#include "ptzgs/scaling.hpp"

namespace ptzgs {

enum class Variant { MultiStage, SingleStage };

const char* to_string(Variant v);

struct AlgorithmParams {
    double kappa1 = 2.0;
    double kappa2 = 3.0;
    double c = 1.0;
    Variant variant = Variant::SingleStage;

    void validate() const;
};

/// Stacked agent states laid out as (x_1 .. x_N, phi_1 .. phi_N).
class SystemState {
public:
    SystemState() = default;
    SystemState(std::size_t agents, std::size_t dim, double t = 0.0);
    SystemState(std::size_t agents, std::size_t dim, double t, Vector stacked);

    /// phi_i = 0 for every agent.
    static SystemState from_positions(std::span<const Vector> x, double t = 0.0);

    std::size_t agents() const noexcept { return agents_; }
    std::size_t dim() const noexcept { return dim_; }

    auto x(std::size_t i) { return stacked_.segment(static_cast<Eigen::Index>(i * dim_), dim_); }
    auto x(std::size_t i) const {
        return stacked_.segment(static_cast<Eigen::Index>(i * dim_), dim_);
    }
    auto phi(std::size_t i) {
        return stacked_.segment(static_cast<Eigen::Index>((agents_ + i) * dim_), dim_);
    }
    auto phi(std::size_t i) const {
        return stacked_.segment(static_cast<Eigen::Index>((agents_ + i) * dim_), dim_);
    }

    /// Just the x-blocks, length N * dim.
    Vector positions() const { return stacked_.head(static_cast<Eigen::Index>(agents_ * dim_)); }
    Vector phi_sum() const;

    Vector& stacked() noexcept { return stacked_; }
    const Vector& stacked() const noexcept { return stacked_; }

    double t = 0.0;

private:
    std::size_t agents_ = 0;
    std::size_t dim_ = 0;
    Vector stacked_;
};

/// s_i = grad f_i(x_i) + c phi_i for every agent.
std::vector<Vector> sliding_surface(const SystemState& state, std::span<const ObjectivePtr> models,
                                    const AlgorithmParams& params);

/// Multi-stage vector field (two scaling stages). Returns the time derivative
/// in the same layout as the state.
SystemState ms_rhs(const SystemState& state, const Graph& g, std::span<const ObjectivePtr> models,
                   const AlgorithmParams& params, const StageSchedule& schedule);

/// Single-stage vector field (one scaling stage).
SystemState ss_rhs(const SystemState& state, const Graph& g, std::span<const ObjectivePtr> models,
                   const AlgorithmParams& params, const StageSchedule& schedule);

/// Dispatches on params.variant.
SystemState rhs(const SystemState& state, const Graph& g, std::span<const ObjectivePtr> models,
                const AlgorithmParams& params, const StageSchedule& schedule);

Vector gradient_sum(const SystemState& state, std::span<const ObjectivePtr> models);

/// sum_i hess f_i(x_i) * xdot_i.
Vector zgs_weighted_velocity_sum(const SystemState& state, const SystemState& derivative,
                                 std::span<const ObjectivePtr> models);

/// Everything needed to evaluate one algorithm instance.
struct ZgsProblem {
    Graph graph;
    std::vector<ObjectivePtr> models;
    AlgorithmParams params;
    StageSchedule schedule;

    std::size_t agents() const { return graph.size(); }
    std::size_t dim() const { return models.front()->dim(); }

    /// Checks agent counts, dimensions, variant/stage agreement and connectivity.
    void validate() const;

    SystemState derivative(const SystemState& state) const;
    Vector derivative(double t, const Vector& stacked) const;
    SystemState state(double t, const Vector& stacked) const;
};

}  // namespace ptzgs
