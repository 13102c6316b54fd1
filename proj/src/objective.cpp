#include "ptzgs/objective.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ptzgs/errors.hpp"

namespace ptzgs {

namespace {

constexpr double kMinimizerTolerance = 1e-10;
constexpr int kNewtonIterations = 100;
constexpr int kStepHalvings = 30;

void check_point(const ObjectiveModel& model, const Vector& x, const char* where) {
    if (static_cast<std::size_t>(x.size()) != model.dim()) {
        throw DimensionMismatch(std::string(where) + ": expected dimension " +
                                std::to_string(model.dim()) + ", got " + std::to_string(x.size()));
    }
    if (!all_finite(x)) throw NonFiniteInput(std::string(where) + ": non-finite input");
}

}  // namespace

double ObjectiveModel::bregman(const Vector& y, const Vector& x) const {
    return value(y) - value(x) - gradient(x).dot(y - x);
}

QuadraticObjective::QuadraticObjective(Matrix q, Vector center, double offset)
    : q_(std::move(q)), center_(std::move(center)), offset_(offset) {
    if (center_.size() == 0) throw DimensionMismatch("QuadraticObjective: empty center");
    if (q_.rows() != center_.size() || q_.cols() != center_.size()) {
        throw DimensionMismatch("QuadraticObjective: Q must be " + std::to_string(center_.size()) +
                                "x" + std::to_string(center_.size()));
    }
    if (!all_finite(center_) || !std::isfinite(offset_) || !q_.allFinite()) {
        throw NonFiniteInput("QuadraticObjective: non-finite coefficient");
    }
    if ((q_ - q_.transpose()).norm() > 1e-12 * std::max(1.0, q_.norm())) {
        throw ValidationError("QuadraticObjective: Q is not symmetric");
    }
    const Vector eig = symmetric_eigenvalues(q_);
    if (!(eig(0) > 0.0)) throw ValidationError("QuadraticObjective: Q is not positive definite");
    bounds_.gamma = 2.0 * eig(0);
    bounds_.Gamma = 2.0 * eig(eig.size() - 1);
    bounds_.psi = bounds_.Gamma;
}

double QuadraticObjective::value(const Vector& x) const {
    const Vector d = x - center_;
    return d.dot(q_ * d) + offset_;
}

Vector QuadraticObjective::gradient(const Vector& x) const { return 2.0 * q_ * (x - center_); }

Matrix QuadraticObjective::hessian(const Vector&) const { return 2.0 * q_; }

double QuadraticObjective::bregman(const Vector& y, const Vector& x) const {
    const Vector d = y - x;
    return d.dot(q_ * d);
}

FunctionObjective::FunctionObjective(std::size_t dim, ValueFn value, GradientFn gradient,
                                     HessianFn hessian, ConvexityBounds bounds)
    : dim_(dim),
      value_(std::move(value)),
      gradient_(std::move(gradient)),
      hessian_(std::move(hessian)),
      bounds_(bounds) {
    if (dim_ == 0) throw DimensionMismatch("FunctionObjective: dimension must be positive");
    if (!value_ || !gradient_ || !hessian_) {
        throw ValidationError("FunctionObjective: missing evaluator");
    }
    if (!(bounds_.gamma > 0.0) || bounds_.Gamma < bounds_.gamma || bounds_.psi < bounds_.gamma) {
        throw ValidationError("FunctionObjective: bounds must satisfy 0 < gamma <= Gamma, psi");
    }
}

Evaluation eval(const ObjectiveModel& model, const Vector& x) {
    check_point(model, x, "eval");
    return Evaluation{model.value(x), model.gradient(x), model.hessian(x)};
}

ConvexityBounds convexity_bounds(const ObjectiveModel& model) { return model.bounds(); }

Vector global_minimizer(std::span<const ObjectivePtr> models) {
    if (models.empty()) throw PreconditionError("global_minimizer: no objectives");
    const std::size_t n = models.front()->dim();
    for (const auto& m : models) {
        if (m->dim() != n) throw DimensionMismatch("global_minimizer: objectives differ in dimension");
    }
    const auto dim = static_cast<Eigen::Index>(n);

    auto gradient_sum = [&](const Vector& x) {
        Vector g = Vector::Zero(dim);
        for (const auto& m : models) g += m->gradient(x);
        return g;
    };
    auto value_sum = [&](const Vector& x) {
        double v = 0.0;
        for (const auto& m : models) v += m->value(x);
        return v;
    };

    bool all_quadratic = true;
    for (const auto& m : models)
        all_quadratic = all_quadratic && dynamic_cast<const QuadraticObjective*>(m.get()) != nullptr;

    Vector x;
    if (all_quadratic) {
        // sum_i 2 Q_i (x - a_i) = 0  <=>  (sum Q_i) x = sum Q_i a_i
        Matrix q_sum = Matrix::Zero(dim, dim);
        Vector rhs = Vector::Zero(dim);
        for (const auto& m : models) {
            const auto& quad = static_cast<const QuadraticObjective&>(*m);
            q_sum += quad.q();
            rhs += quad.q() * quad.center();
        }
        Eigen::LLT<Matrix> llt(q_sum);
        if (llt.info() != Eigen::Success) {
            throw ConvergenceFailure("global_minimizer: summed Hessian is not positive definite");
        }
        x = llt.solve(rhs);
        // One step of iterative refinement.
        x -= llt.solve(0.5 * gradient_sum(x));
    } else {
        x = Vector::Zero(dim);
        for (int iter = 0; iter < kNewtonIterations; ++iter) {
            const Vector g = gradient_sum(x);
            if (g.norm() <= kMinimizerTolerance) break;
            Matrix h = Matrix::Zero(dim, dim);
            for (const auto& m : models) h += m->hessian(x);
            Eigen::LLT<Matrix> llt(h);
            if (llt.info() != Eigen::Success) {
                throw ConvergenceFailure("global_minimizer: Hessian sum is not positive definite");
            }
            const Vector step = llt.solve(g);
            const double f0 = value_sum(x);
            double scale = 1.0;
            Vector candidate = x - step;
            for (int k = 0; k < kStepHalvings && !(value_sum(candidate) <= f0); ++k) {
                scale *= 0.5;
                candidate = x - scale * step;
            }
            x = candidate;
        }
    }

    const double residual = gradient_sum(x).norm();
    if (!(residual <= kMinimizerTolerance)) {
        throw ConvergenceFailure("global_minimizer: gradient-sum residual " +
                                 std::to_string(residual) + " above tolerance");
    }
    return x;
}

bool ConvexityInequalities::all_hold(double slack) const {
    return bregman_lower >= -slack && bregman_upper >= -slack && monotone_lower >= -slack &&
           monotone_upper >= -slack;
}

ConvexityInequalities convexity_inequalities(const ObjectiveModel& model, const Vector& x1,
                                             const Vector& x2) {
    check_point(model, x1, "convexity_inequalities");
    check_point(model, x2, "convexity_inequalities");
    const ConvexityBounds b = model.bounds();
    const Vector d = x1 - x2;
    const double d2 = d.squaredNorm();
    const double breg = model.bregman(x1, x2);
    const double mono = (model.gradient(x1) - model.gradient(x2)).dot(d);
    return ConvexityInequalities{
        breg - 0.5 * b.gamma * d2,
        0.5 * b.Gamma * d2 - breg,
        mono - b.gamma * d2,
        b.Gamma * d2 - mono,
    };
}

bool strong_convexity_property_check(const ObjectiveModel& model, const Vector& x1,
                                     const Vector& x2) {
    check_point(model, x1, "strong_convexity_property_check");
    check_point(model, x2, "strong_convexity_property_check");
    const double d2 = (x1 - x2).squaredNorm();
    if (d2 == 0.0) throw PreconditionError("strong_convexity_property_check: x1 == x2");
    const auto ineq = convexity_inequalities(model, x1, x2);
    const double slack = 1e-9 * std::max(1.0, model.bounds().Gamma * d2);
    return ineq.monotone_lower >= -slack && ineq.monotone_upper >= -slack;
}

}  // namespace ptzgs
