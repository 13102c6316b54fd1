#include "ptzgs/scaling.hpp"

#include <cmath>
#include <string>

#include "ptzgs/errors.hpp"

namespace ptzgs {

void ScalingSpec::validate() const {
    if (!std::isfinite(t_start)) throw ValidationError("scaling: t_start must be finite");
    if (!(duration > 0.0) || !std::isfinite(duration)) {
        throw ValidationError("scaling: duration must be positive");
    }
    if (!(exponent > 0.0) || !std::isfinite(exponent)) {
        throw ValidationError("scaling: exponent must be positive");
    }
}

double rho(const ScalingSpec& spec, double t) {
    if (!spec.active(t)) return 1.0;
    return std::pow(spec.duration / (spec.deadline() - t), spec.exponent);
}

double rho_ratio(const ScalingSpec& spec, double t) {
    if (!spec.active(t)) return 0.0;
    return spec.exponent / (spec.deadline() - t);
}

double envelope(const ScalingSpec& spec, double t, double kappa, double alpha, double v0) {
    double decay = 1.0;
    if (spec.active(t)) {
        // rho^(-alpha) = ((T + t0 - t) / T)^(alpha h), stays finite right up to the deadline
        decay = std::pow((spec.deadline() - t) / spec.duration, alpha * spec.exponent);
    }
    return v0 * decay * std::exp(-kappa * (t - spec.t_start));
}

StageSchedule StageSchedule::single_stage(double t0, double T1, double h1, double epsilon_rel) {
    StageSchedule s;
    s.stages = {ScalingSpec{t0, T1, h1}};
    s.epsilon_rel = epsilon_rel;
    s.validate();
    return s;
}

StageSchedule StageSchedule::multi_stage(double t0, double T1, double h1, double T2, double h2,
                                         double epsilon_rel) {
    StageSchedule s;
    s.stages = {ScalingSpec{t0, T1, h1}, ScalingSpec{t0 + T1, T2, h2}};
    s.epsilon_rel = epsilon_rel;
    s.validate();
    return s;
}

double StageSchedule::guard(std::size_t k) const {
    const ScalingSpec& s = stages.at(k);
    return s.deadline() - epsilon_rel * s.duration;
}

void StageSchedule::validate() const {
    if (stages.empty()) throw ValidationError("schedule: no stages");
    if (!(epsilon_rel > 0.0 && epsilon_rel < 1.0)) {
        throw ValidationError("schedule: epsilon_rel must lie in (0, 1)");
    }
    for (std::size_t k = 0; k < stages.size(); ++k) {
        stages[k].validate();
        if (k > 0 && stages[k].t_start != stages[k - 1].deadline()) {
            throw ValidationError("schedule: stage " + std::to_string(k + 1) +
                                  " does not start at the previous deadline");
        }
    }
}

}  // namespace ptzgs
