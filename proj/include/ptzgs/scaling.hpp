#pragma once

#include <cstddef>
#include <vector>

namespace ptzgs {

/// One time-varying scaling function
///   rho(t) = T^h / (T + t_start - t)^h  on [t_start, t_start + T), 1 otherwise.
struct ScalingSpec {
    double t_start = 0.0;
    double duration = 1.0;
    double exponent = 1.0;

    double deadline() const noexcept { return t_start + duration; }
    bool active(double t) const noexcept { return t >= t_start && t < deadline(); }
    void validate() const;
};

double rho(const ScalingSpec& spec, double t);

/// rho'(t) / rho(t) = h / (T + t_start - t) on the active interval, 0 otherwise.
double rho_ratio(const ScalingSpec& spec, double t);

/// V0 * rho(t)^(-alpha) * exp(-kappa (t - t_start)).
double envelope(const ScalingSpec& spec, double t, double kappa, double alpha, double v0);

/// Contiguous scaling stages. Integration of stage k stops at its guard point
/// deadline - epsilon_rel * duration.
struct StageSchedule {
    std::vector<ScalingSpec> stages;
    double epsilon_rel = 1e-4;

    static StageSchedule single_stage(double t0, double T1, double h1, double epsilon_rel = 1e-4);
    static StageSchedule multi_stage(double t0, double T1, double h1, double T2, double h2,
                                     double epsilon_rel = 1e-4);

    double start() const { return stages.front().t_start; }
    double final_deadline() const { return stages.back().deadline(); }
    double guard(std::size_t k) const;
    void validate() const;
};

}  // namespace ptzgs
