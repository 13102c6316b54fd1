#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "ptzgs/linalg.hpp"
#include "ptzgs/scaling.hpp"

namespace ptzgs {

enum class Method { RK4, Euler };

struct IntegratorConfig {
    double base_step = 1e-4;
    // Largest allowed (rho'/rho) * step product.
    double gain_cap_theta = 0.1;
    double min_step = 1e-12;
    Method method = Method::RK4;
    std::size_t max_points = 10'000'000;

    void validate() const;
};

/// Sample times for the integrator. `hold[k]` marks a snap point: the state
/// at times[k] is carried over from times[k-1] without integrating (used to
/// jump from a guard point to the deadline it protects).
struct TimeGrid {
    std::vector<double> times;
    std::vector<std::uint8_t> hold;
    std::vector<double> stage_starts;
    std::vector<double> guards;
    std::vector<double> deadlines;

    std::size_t size() const noexcept { return times.size(); }
};

/// Gain-aware grid over every stage of the schedule followed by uniform
/// post-deadline steps up to final_deadline + hold_duration.
///
/// Inside stage [t_s, t_d) the step is min(base_step, theta (t_d - t) / h),
/// floored at min_step and clipped so the stage ends exactly at its guard.
/// Throws GridTooFine when the point count would exceed cfg.max_points.
TimeGrid build_time_grid(const StageSchedule& schedule, const IntegratorConfig& cfg,
                         double hold_duration);

TimeGrid uniform_grid(double t0, double t1, double step);

using VectorField = std::function<Vector(double, const Vector&)>;

struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> states;
    std::vector<double> stage_starts;
    std::vector<double> guards;
    std::vector<double> deadlines;

    std::size_t size() const noexcept { return times.size(); }
};

/// Fixed-grid integration (classical RK4 or explicit Euler per cfg.method).
/// Deterministic. Throws NonFiniteState naming the first bad component.
Trajectory integrate(const VectorField& rhs, const Vector& y0, const TimeGrid& grid,
                     const IntegratorConfig& cfg);

/// Explicit Euler with every grid interval split into `refinement` substeps.
/// Samples are reported on the original grid. Test oracle for integrate().
Trajectory reference_integrate(const VectorField& rhs, const Vector& y0, const TimeGrid& grid,
                               int refinement = 10);

}  // namespace ptzgs
