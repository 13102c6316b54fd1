#include "ptzgs/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "ptzgs/errors.hpp"

namespace ptzgs {

namespace {

void check_ordering(const AlgorithmParams& params, double lambda2, double p, double delta) {
    const double lower = params.kappa2 / (4.0 * params.c * lambda2);
    if (!(p > delta && delta > lower)) {
        std::ostringstream msg;
        msg << "theory constants require p > delta > kappa2/(4 c lambda2) = " << lower
            << ", got p = " << p << ", delta = " << delta;
        throw InvalidConstants(msg.str());
    }
}

}  // namespace

TheoryConstants theory_constants(const Graph& g, std::span<const ObjectivePtr> models,
                                 const AlgorithmParams& params, std::optional<double> p_choice,
                                 std::optional<double> delta_choice) {
    params.validate();
    if (models.empty()) throw PreconditionError("theory_constants: no objectives");
    const SpectralInfo spec = spectrum(g);
    assert_connected(spec);

    TheoryConstants k;
    k.lambda2 = spec.lambda2;
    for (const auto& m : models) {
        const ConvexityBounds b = m->bounds();
        k.Gamma_max = std::max(k.Gamma_max, b.Gamma);
        k.Psi_max = std::max(k.Psi_max, b.psi);
    }
    k.alpha1 = k.lambda2 * params.c * params.kappa2 / k.Gamma_max;

    const double lower = params.kappa2 / (4.0 * params.c * k.lambda2);
    k.delta = delta_choice.value_or(2.0 * lower);
    k.p = p_choice.value_or(2.0 * k.delta);
    check_ordering(params, k.lambda2, k.p, k.delta);

    k.sigma_S = std::min(2.0 * params.c * k.lambda2 / k.Psi_max -
                             params.kappa2 / (2.0 * k.delta * k.Psi_max),
                         2.0 * params.kappa2 * (k.p - k.delta) / k.p);
    k.alpha2 = params.kappa1 * k.sigma_S;
    if (!(k.alpha1 > 0.0 && k.sigma_S > 0.0 && k.alpha2 > 0.0)) {
        throw InvalidConstants("theory constants: decay rates must be positive");
    }
    return k;
}

std::vector<double> lyapunov_Vi(const SystemState& state, std::span<const ObjectivePtr> models,
                                const AlgorithmParams& params) {
    std::vector<double> v;
    for (const Vector& s : sliding_surface(state, models, params)) v.push_back(0.5 * s.squaredNorm());
    return v;
}

double lyapunov_VM(const SystemState& state, std::span<const ObjectivePtr> models,
                   const Vector& xstar) {
    if (models.size() != state.agents()) throw DimensionMismatch("lyapunov_VM: objective count");
    double sum = 0.0;
    for (std::size_t i = 0; i < state.agents(); ++i) sum += models[i]->bregman(xstar, state.x(i));
    return sum;
}

double lyapunov_VS(const SystemState& state, std::span<const ObjectivePtr> models,
                   const AlgorithmParams& params, const Vector& xstar,
                   const TheoryConstants& consts) {
    check_ordering(params, consts.lambda2, consts.p, consts.delta);
    double s2 = 0.0;
    for (const Vector& s : sliding_surface(state, models, params)) s2 += s.squaredNorm();
    return 0.5 * consts.p * s2 + lyapunov_VM(state, models, xstar);
}

ResidualEr residual_Er(const SystemState& state, const SystemState& initial, const Vector& xstar) {
    if (state.agents() != initial.agents() || state.dim() != initial.dim()) {
        throw DimensionMismatch("residual_Er: state and initial state differ in layout");
    }
    ResidualEr r;
    for (std::size_t i = 0; i < state.agents(); ++i) {
        const double num = (state.x(i) - xstar).squaredNorm();
        const double den = (initial.x(i) - xstar).squaredNorm();
        r.value.push_back(den > 0.0 ? num / den : num);
        r.absolute.push_back(!(den > 0.0));
    }
    return r;
}

std::vector<DiagnosticsSample> evaluate_diagnostics(const ZgsProblem& problem,
                                                    const Trajectory& traj, const Vector& xstar,
                                                    const TheoryConstants& consts) {
    std::vector<DiagnosticsSample> out;
    if (traj.size() == 0) return out;
    out.reserve(traj.size());

    double f_star = 0.0;
    for (const auto& m : problem.models) f_star += m->value(xstar);
    const SystemState initial = problem.state(traj.times.front(), traj.states.front());

    for (std::size_t k = 0; k < traj.size(); ++k) {
        const SystemState state = problem.state(traj.times[k], traj.states[k]);
        DiagnosticsSample d;
        const auto s = sliding_surface(state, problem.models, problem.params);
        Vector s_sum = Vector::Zero(static_cast<Eigen::Index>(state.dim()));
        double s2 = 0.0;
        for (const Vector& si : s) {
            d.s_norm.push_back(si.norm());
            s_sum += si;
            s2 += si.squaredNorm();
        }
        d.er = residual_Er(state, initial, xstar).value;
        d.V_M = lyapunov_VM(state, problem.models, xstar);
        d.V_S = 0.5 * consts.p * s2 + d.V_M;
        const Vector grad_sum = gradient_sum(state, problem.models);
        d.grad_sum_norm = grad_sum.norm();
        double f = 0.0;
        for (std::size_t i = 0; i < state.agents(); ++i) f += problem.models[i]->value(state.x(i));
        d.f_err = std::abs(f - f_star);
        const SystemState deriv = problem.derivative(state);
        d.zgs2_norm = zgs_weighted_velocity_sum(state, deriv, problem.models).norm();
        d.phi_sum_norm = state.phi_sum().norm();
        d.surface_gap = (s_sum - grad_sum).norm();
        out.push_back(std::move(d));
    }
    return out;
}

EnvelopeReport envelope_report(const Trajectory& traj,
                               std::span<const DiagnosticsSample> diagnostics,
                               const TheoryConstants& consts, const StageSchedule& schedule,
                               Variant variant, double tol) {
    if (diagnostics.size() != traj.size()) {
        throw DimensionMismatch("envelope_report: diagnostics and trajectory differ in length");
    }
    EnvelopeReport rep;
    if (traj.size() == 0) return rep;

    const bool ms = variant == Variant::MultiStage;
    if (ms && schedule.stages.size() != 2) throw PreconditionError("envelope: MS needs 2 stages");
    if (!ms && schedule.stages.size() != 1) throw PreconditionError("envelope: SS needs 1 stage");
    const ScalingSpec& stage = ms ? schedule.stages[1] : schedule.stages[0];
    const double alpha = ms ? consts.alpha1 : consts.alpha2;
    auto lyapunov = [&](std::size_t k) { return ms ? diagnostics[k].V_M : diagnostics[k].V_S; };

    std::size_t anchor = 0;
    if (ms) {
        anchor = traj.size();
        for (std::size_t k = 0; k < traj.size(); ++k) {
            if (traj.times[k] >= stage.t_start) {
                anchor = k;
                break;
            }
        }
        if (anchor == traj.size()) return rep;
    }
    rep.anchor_time = traj.times[anchor];
    rep.anchor_value = lyapunov(anchor);

    for (std::size_t k = anchor; k < traj.size(); ++k) {
        const double t = traj.times[k];
        if (ms && !stage.active(t)) continue;
        const double bound = envelope(stage, t, 0.0, alpha, rep.anchor_value);
        const double v = lyapunov(k);
        double ratio = 0.0;
        if (bound > 0.0) {
            ratio = v / bound;
        } else if (v > 0.0) {
            ratio = std::numeric_limits<double>::infinity();
        }
        ++rep.checked;
        if (ratio > rep.max_ratio) {
            rep.max_ratio = ratio;
            rep.worst_time = t;
        }
    }
    rep.ok = rep.max_ratio <= 1.0 + tol;
    return rep;
}

EnvelopeReport envelope_check(const Trajectory& traj,
                              std::span<const DiagnosticsSample> diagnostics,
                              const TheoryConstants& consts, const StageSchedule& schedule,
                              Variant variant, double tol) {
    EnvelopeReport rep = envelope_report(traj, diagnostics, consts, schedule, variant, tol);
    if (!rep.ok) {
        std::ostringstream msg;
        msg << "envelope violated at t = " << rep.worst_time << " (ratio " << rep.max_ratio << ")";
        throw EnvelopeViolation(rep.worst_time, rep.max_ratio, msg.str());
    }
    return rep;
}

ConsensusBoundChain consensus_bound_chain(const SystemState& state, const Graph& g,
                                          std::span<const ObjectivePtr> models,
                                          const Vector& xstar, const TheoryConstants& consts) {
    const std::size_t n = state.agents();
    ConsensusBoundChain chain;
    chain.mean = Vector::Zero(static_cast<Eigen::Index>(state.dim()));
    for (std::size_t i = 0; i < n; ++i) chain.mean += state.x(i);
    chain.mean /= static_cast<double>(n);

    chain.vm = lyapunov_VM(state, models, xstar);
    double spread = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        chain.bregman_at_mean += models[i]->bregman(chain.mean, state.x(i));
        spread += (state.x(i) - chain.mean).squaredNorm();
    }
    chain.spread = 0.5 * consts.Gamma_max * spread;
    const Vector x = state.positions();
    chain.complete_graph = consts.Gamma_max / static_cast<double>(n) *
                           consensus_quadratic_form(Graph::complete(n), x, state.dim());
    chain.laplacian = consts.Gamma_max / consts.lambda2 * consensus_quadratic_form(g, x, state.dim());
    return chain;
}

}  // namespace ptzgs
