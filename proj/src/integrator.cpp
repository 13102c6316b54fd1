#include "ptzgs/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ptzgs/errors.hpp"

namespace ptzgs {

void IntegratorConfig::validate() const {
    if (!(min_step > 0.0) || !(min_step < base_step) || !std::isfinite(base_step)) {
        throw ValidationError("integrator: require 0 < min_step < base_step");
    }
    if (!(gain_cap_theta > 0.0 && gain_cap_theta < 1.0)) {
        throw ValidationError("integrator: gain_cap_theta must lie in (0, 1)");
    }
    if (max_points < 2) throw ValidationError("integrator: max_points must be at least 2");
}

namespace {

class GridBuilder {
public:
    GridBuilder(TimeGrid& grid, std::size_t cap) : grid_(grid), cap_(cap) {}

    void push(double t, bool hold) {
        if (grid_.times.size() >= cap_) {
            throw GridTooFine("time grid exceeds " + std::to_string(cap_) + " points");
        }
        grid_.times.push_back(t);
        grid_.hold.push_back(hold ? 1 : 0);
    }

    // Uniform-ish steps of `step` from the last point to `end` (inclusive).
    void fill_uniform(double end, double step) {
        const double start = grid_.times.back();
        const double span = end - start;
        if (!(span > 0.0)) return;
        const double count = std::ceil(span / step - 1e-9);
        if (count > static_cast<double>(cap_)) {
            throw GridTooFine("time grid exceeds " + std::to_string(cap_) + " points");
        }
        const auto n = static_cast<std::size_t>(std::max(1.0, count));
        for (std::size_t k = 1; k < n; ++k) push(start + span * static_cast<double>(k) / n, false);
        push(end, false);
    }

private:
    TimeGrid& grid_;
    std::size_t cap_;
};

}  // namespace

TimeGrid build_time_grid(const StageSchedule& schedule, const IntegratorConfig& cfg,
                         double hold_duration) {
    schedule.validate();
    cfg.validate();
    if (!(hold_duration >= 0.0)) throw ValidationError("time grid: negative hold duration");

    TimeGrid grid;
    GridBuilder builder(grid, cfg.max_points);
    builder.push(schedule.start(), false);

    for (std::size_t k = 0; k < schedule.stages.size(); ++k) {
        const ScalingSpec& stage = schedule.stages[k];
        const double guard = schedule.guard(k);
        const double deadline = stage.deadline();
        grid.stage_starts.push_back(stage.t_start);

        // Projected count: base-step region plus the geometric approach.
        const double knee = cfg.gain_cap_theta * stage.duration / stage.exponent;
        const double projected = stage.duration / cfg.base_step +
                                 stage.exponent / cfg.gain_cap_theta *
                                     std::log(std::max(1.0, std::min(knee, stage.duration) /
                                                                (deadline - guard)));
        if (projected > static_cast<double>(cfg.max_points)) {
            throw GridTooFine("stage " + std::to_string(k + 1) + " needs about " +
                              std::to_string(static_cast<long long>(projected)) + " points");
        }

        double t = grid.times.back();
        while (t < guard) {
            double step = std::min(cfg.base_step,
                                   cfg.gain_cap_theta * (deadline - t) / stage.exponent);
            step = std::max(step, cfg.min_step);
            double next = t + step;
            if (next >= guard) {
                next = guard;
            } else if (guard - next < 0.25 * step) {
                // Split instead of leaving a sliver before the guard.
                next = t + 0.5 * (guard - t);
            }
            builder.push(next, false);
            t = next;
        }
        grid.guards.push_back(guard);
        grid.deadlines.push_back(deadline);
        // Snap from the guard to the deadline without integrating across it.
        builder.push(deadline, true);
    }

    if (hold_duration > 0.0) {
        builder.fill_uniform(schedule.final_deadline() + hold_duration, cfg.base_step);
    }
    return grid;
}

TimeGrid uniform_grid(double t0, double t1, double step) {
    if (!(t1 > t0) || !(step > 0.0)) throw ValidationError("uniform_grid: need t1 > t0, step > 0");
    TimeGrid grid;
    GridBuilder builder(grid, static_cast<std::size_t>(-1));
    builder.push(t0, false);
    builder.fill_uniform(t1, step);
    return grid;
}

namespace {

void check_finite(const Vector& y, double t) {
    for (Eigen::Index k = 0; k < y.size(); ++k) {
        if (!std::isfinite(y(k))) {
            throw NonFiniteState(t, static_cast<std::size_t>(k),
                                 "non-finite state component " + std::to_string(k) + " at t = " +
                                     std::to_string(t));
        }
    }
}

Vector rk4_step(const VectorField& f, double t, const Vector& y, double h) {
    const Vector k1 = f(t, y);
    const Vector k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
    const Vector k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
    const Vector k4 = f(t + h, y + h * k3);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Vector euler_step(const VectorField& f, double t, const Vector& y, double h) {
    return y + h * f(t, y);
}

template <typename Step>
Trajectory run_grid(const Vector& y0, const TimeGrid& grid, Step&& step) {
    if (grid.times.empty()) throw ValidationError("integrate: empty grid");
    Trajectory traj;
    traj.stage_starts = grid.stage_starts;
    traj.guards = grid.guards;
    traj.deadlines = grid.deadlines;
    traj.times.reserve(grid.size());
    traj.states.reserve(grid.size());

    check_finite(y0, grid.times.front());
    traj.times.push_back(grid.times.front());
    traj.states.push_back(y0);
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const double t0 = grid.times[k - 1];
        const double t1 = grid.times[k];
        Vector y = grid.hold[k] ? traj.states.back() : step(t0, traj.states.back(), t1 - t0);
        check_finite(y, t1);
        traj.times.push_back(t1);
        traj.states.push_back(std::move(y));
    }
    return traj;
}

}  // namespace

Trajectory integrate(const VectorField& rhs, const Vector& y0, const TimeGrid& grid,
                     const IntegratorConfig& cfg) {
    if (cfg.method == Method::Euler) {
        return run_grid(y0, grid, [&](double t, const Vector& y, double h) {
            return euler_step(rhs, t, y, h);
        });
    }
    return run_grid(y0, grid, [&](double t, const Vector& y, double h) {
        return rk4_step(rhs, t, y, h);
    });
}

Trajectory reference_integrate(const VectorField& rhs, const Vector& y0, const TimeGrid& grid,
                               int refinement) {
    if (refinement < 1) throw ValidationError("reference_integrate: refinement must be >= 1");
    return run_grid(y0, grid, [&](double t, const Vector& y, double h) {
        const double sub = h / refinement;
        Vector out = y;
        for (int r = 0; r < refinement; ++r) out = euler_step(rhs, t + r * sub, out, sub);
        return out;
    });
}

}  // namespace ptzgs
