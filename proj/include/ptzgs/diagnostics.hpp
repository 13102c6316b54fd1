#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ptzgs/dynamics.hpp"
#include "ptzgs/integrator.hpp"

namespace ptzgs {

/// Constants of the two convergence proofs.
///   alpha1  = lambda2 c kappa2 / Gamma_max
///   sigma_S = min{2 c lambda2 / Psi_max - kappa2 / (2 delta Psi_max), 2 kappa2 (p - delta) / p}
///   alpha2  = kappa1 sigma_S
/// with p > delta > kappa2 / (4 c lambda2).
struct TheoryConstants {
    double Gamma_max = 0.0;
    double Psi_max = 0.0;
    double lambda2 = 0.0;
    double alpha1 = 0.0;
    double p = 0.0;
    double delta = 0.0;
    double sigma_S = 0.0;
    double alpha2 = 0.0;
};

/// Unset p/delta are auto-selected as delta = 2 kappa2 / (4 c lambda2), p = 2 delta.
/// Throws InvalidConstants if the ordering constraint fails.
TheoryConstants theory_constants(const Graph& g, std::span<const ObjectivePtr> models,
                                 const AlgorithmParams& params,
                                 std::optional<double> p_choice = std::nullopt,
                                 std::optional<double> delta_choice = std::nullopt);

/// V_i = 1/2 |s_i|^2 per agent.
std::vector<double> lyapunov_Vi(const SystemState& state, std::span<const ObjectivePtr> models,
                                const AlgorithmParams& params);

/// sum_i [f_i(x*) - f_i(x_i) - grad f_i(x_i)^T (x* - x_i)].
double lyapunov_VM(const SystemState& state, std::span<const ObjectivePtr> models,
                   const Vector& xstar);

/// p/2 |s|^2 + lyapunov_VM. Throws InvalidConstants if consts violate p > delta > kappa2/(4 c lambda2).
double lyapunov_VS(const SystemState& state, std::span<const ObjectivePtr> models,
                   const AlgorithmParams& params, const Vector& xstar,
                   const TheoryConstants& consts);

/// Normalized residual |x_i(t) - x*|^2 / |x_i(t0) - x*|^2. Agents that start
/// exactly at x* report the absolute squared distance and are flagged.
struct ResidualEr {
    std::vector<double> value;
    std::vector<bool> absolute;
};

ResidualEr residual_Er(const SystemState& state, const SystemState& initial, const Vector& xstar);

struct DiagnosticsSample {
    std::vector<double> er;
    std::vector<double> s_norm;
    double V_M = 0.0;
    double V_S = 0.0;
    double grad_sum_norm = 0.0;
    double f_err = 0.0;
    double zgs2_norm = 0.0;
    double phi_sum_norm = 0.0;
    double surface_gap = 0.0;  // |sum s_i - sum grad f_i(x_i)|
};

std::vector<DiagnosticsSample> evaluate_diagnostics(const ZgsProblem& problem,
                                                    const Trajectory& traj, const Vector& xstar,
                                                    const TheoryConstants& consts);

struct EnvelopeReport {
    bool ok = true;
    double max_ratio = 0.0;  // max over checked samples of V(t) / envelope(t)
    double worst_time = 0.0;
    std::size_t checked = 0;
    double anchor_time = 0.0;
    double anchor_value = 0.0;
};

/// Multiplicative slack applied to the decay envelopes.
inline constexpr double kEnvelopeTolerance = 1e-2;

/// SS: V_S(t) <= (1 + tol) V_S(t0) rho_1(t)^(-alpha2) at every sample.
/// MS: V_M(t) <= (1 + tol) V_M(t1) rho_2(t)^(-alpha1) at every sample in [t1, t1 + T2).
EnvelopeReport envelope_report(const Trajectory& traj,
                               std::span<const DiagnosticsSample> diagnostics,
                               const TheoryConstants& consts, const StageSchedule& schedule,
                               Variant variant, double tol = kEnvelopeTolerance);

/// envelope_report() that throws EnvelopeViolation on failure.
EnvelopeReport envelope_check(const Trajectory& traj,
                              std::span<const DiagnosticsSample> diagnostics,
                              const TheoryConstants& consts, const StageSchedule& schedule,
                              Variant variant, double tol = kEnvelopeTolerance);

// Intermediate bounds between V_M and the Laplacian quadratic form, valid when
// the gradient sum vanishes. Each entry bounds the previous one from above.
struct ConsensusBoundChain {
    Vector mean;
    double vm = 0.0;
    double bregman_at_mean = 0.0;
    double spread = 0.0;          // Gamma_max / 2 sum |x_i - mean|^2
    double complete_graph = 0.0;  // Gamma_max / N x^T (L_K (x) I) x
    double laplacian = 0.0;       // Gamma_max / lambda2 x^T (L (x) I) x
};

ConsensusBoundChain consensus_bound_chain(const SystemState& state, const Graph& g,
                                          std::span<const ObjectivePtr> models,
                                          const Vector& xstar, const TheoryConstants& consts);

}  // namespace ptzgs
