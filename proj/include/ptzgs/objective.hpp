#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "ptzgs/linalg.hpp"

namespace ptzgs {

/// Strong convexity (gamma), Hessian upper bound (Gamma) and gradient
/// Lipschitz constant (psi) of a local objective.
struct ConvexityBounds {
    double gamma = 0.0;
    double Gamma = 0.0;
    double psi = 0.0;
};

struct Evaluation {
    double value = 0.0;
    Vector gradient;
    Matrix hessian;
};

/// Twice differentiable, strongly convex local objective of one agent.
/// Implementations must satisfy gamma I <= hessian(x) <= Gamma I everywhere.
class ObjectiveModel {
public:
    virtual ~ObjectiveModel() = default;

    virtual std::size_t dim() const = 0;
    virtual double value(const Vector& x) const = 0;
    virtual Vector gradient(const Vector& x) const = 0;
    virtual Matrix hessian(const Vector& x) const = 0;
    virtual ConvexityBounds bounds() const = 0;

    /// Bregman divergence f(y) - f(x) - grad f(x)^T (y - x).
    virtual double bregman(const Vector& y, const Vector& x) const;
};

using ObjectivePtr = std::shared_ptr<const ObjectiveModel>;

/// f(x) = (x - a)^T Q (x - a) + offset with Q symmetric positive definite.
class QuadraticObjective final : public ObjectiveModel {
public:
    QuadraticObjective(Matrix q, Vector center, double offset = 0.0);

    std::size_t dim() const override { return static_cast<std::size_t>(center_.size()); }
    double value(const Vector& x) const override;
    Vector gradient(const Vector& x) const override;
    Matrix hessian(const Vector& x) const override;
    ConvexityBounds bounds() const override { return bounds_; }

    // Exact form (y - x)^T Q (y - x); avoids cancellation near the minimizer.
    double bregman(const Vector& y, const Vector& x) const override;

    const Matrix& q() const noexcept { return q_; }
    const Vector& center() const noexcept { return center_; }
    double offset() const noexcept { return offset_; }

private:
    Matrix q_;
    Vector center_;
    double offset_;
    ConvexityBounds bounds_;
};

/// Objective backed by user callbacks; the caller vouches for the bounds.
class FunctionObjective final : public ObjectiveModel {
public:
    using ValueFn = std::function<double(const Vector&)>;
    using GradientFn = std::function<Vector(const Vector&)>;
    using HessianFn = std::function<Matrix(const Vector&)>;

    FunctionObjective(std::size_t dim, ValueFn value, GradientFn gradient, HessianFn hessian,
                      ConvexityBounds bounds);

    std::size_t dim() const override { return dim_; }
    double value(const Vector& x) const override { return value_(x); }
    Vector gradient(const Vector& x) const override { return gradient_(x); }
    Matrix hessian(const Vector& x) const override { return hessian_(x); }
    ConvexityBounds bounds() const override { return bounds_; }

private:
    std::size_t dim_;
    ValueFn value_;
    GradientFn gradient_;
    HessianFn hessian_;
    ConvexityBounds bounds_;
};

/// Value, gradient and Hessian at x. Throws DimensionMismatch or NonFiniteInput.
Evaluation eval(const ObjectiveModel& model, const Vector& x);

ConvexityBounds convexity_bounds(const ObjectiveModel& model);

/// Minimizer of sum_i f_i. Closed-form linear solve when every model is
/// quadratic, damped Newton otherwise. The returned point satisfies
/// |sum_i grad f_i(x*)| <= 1e-10 or ConvergenceFailure is thrown.
Vector global_minimizer(std::span<const ObjectivePtr> models);

/// Slacks of the four gradient/Bregman inequalities for a (gamma, Gamma)
/// strongly convex, Gamma-smooth function. Nonnegative slack means the
/// inequality holds.
struct ConvexityInequalities {
    double bregman_lower = 0.0;   // D(x1, x2) - gamma/2 |d|^2
    double bregman_upper = 0.0;   // Gamma/2 |d|^2 - D(x1, x2)
    double monotone_lower = 0.0;  // (g1 - g2)^T d - gamma |d|^2
    double monotone_upper = 0.0;  // Gamma |d|^2 - (g1 - g2)^T d
    bool all_hold(double slack) const;
};

ConvexityInequalities convexity_inequalities(const ObjectiveModel& model, const Vector& x1,
                                             const Vector& x2);

/// True iff gamma |d|^2 <= (grad f(x1) - grad f(x2))^T d <= Gamma |d|^2 within 1e-9
/// relative slack. Throws PreconditionError when x1 == x2.
bool strong_convexity_property_check(const ObjectiveModel& model, const Vector& x1,
                                     const Vector& x2);

}  // namespace ptzgs
