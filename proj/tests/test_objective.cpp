#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <memory>
#include <random>

#include "ptzgs/errors.hpp"
#include "ptzgs/objective.hpp"
#include "test_support.hpp"

using namespace ptzgs;

namespace {

std::shared_ptr<QuadraticObjective> quad(std::initializer_list<double> diag, Vector center) {
    Vector d(static_cast<Eigen::Index>(diag.size()));
    Eigen::Index k = 0;
    for (double v : diag) d(k++) = v;
    return std::make_shared<QuadraticObjective>(d.asDiagonal().toDenseMatrix(), std::move(center));
}

// Pseudo-Huber term sum_k sqrt(1 + (x_k - a_k)^2) plus mu/2 |x|^2.
// Hessian is diag(mu + (1 + u^2)^(-3/2)), so gamma = mu and Gamma = mu + 1.
ObjectivePtr pseudo_huber(double mu, Vector a) {
    const auto n = static_cast<std::size_t>(a.size());
    auto value = [mu, a](const Vector& x) {
        const Vector u = x - a;
        return (1.0 + u.array().square()).sqrt().sum() + 0.5 * mu * x.squaredNorm();
    };
    auto grad = [mu, a](const Vector& x) -> Vector {
        const Vector u = x - a;
        return (u.array() / (1.0 + u.array().square()).sqrt()).matrix() + mu * x;
    };
    auto hess = [mu, a](const Vector& x) -> Matrix {
        const Vector u = x - a;
        const Vector d = (1.0 + u.array().square()).pow(-1.5).matrix();
        return (d.array() + mu).matrix().asDiagonal();
    };
    return std::make_shared<FunctionObjective>(n, value, grad, hess,
                                               ConvexityBounds{mu, mu + 1.0, mu + 1.0});
}

}  // namespace

TEST_CASE("benchmark objective values", "[objective]") {
    const auto models = testing::benchmark_models();
    SECTION("f1 at its center") {
        const auto e = eval(*models[0], Vector{{1.0, 2.0}});
        CHECK(e.value == 0.0);
        CHECK(e.gradient.isZero());
        CHECK(e.hessian == 2.0 * Matrix::Identity(2, 2));
    }
    SECTION("f4 at (1, 1)") {
        const auto e = eval(*models[3], Vector{{1.0, 1.0}});
        CHECK(e.value == 3.0);
        CHECK(e.gradient == Vector{{2.0, 4.0}});
        CHECK(e.hessian == Vector{{2.0, 4.0}}.asDiagonal().toDenseMatrix());
    }
    SECTION("bounds of f6 and f1") {
        const auto b6 = convexity_bounds(*models[5]);
        CHECK(std::abs(b6.gamma - 4.0) <= 1e-12);
        CHECK(std::abs(b6.Gamma - 6.0) <= 1e-12);
        CHECK(std::abs(b6.psi - 6.0) <= 1e-12);
        const auto b1 = convexity_bounds(*models[0]);
        CHECK(std::abs(b1.gamma - 2.0) <= 1e-12);
        CHECK(std::abs(b1.Gamma - 2.0) <= 1e-12);
    }
}

TEST_CASE("global minimizer", "[objective]") {
    SECTION("benchmark sum is minimized at (1, 1.5)") {
        const auto models = testing::benchmark_models();
        const Vector xs = global_minimizer(models);
        CHECK((xs - Vector{{1.0, 1.5}}).norm() <= 1e-12);
        Vector g = Vector::Zero(2);
        for (const auto& m : models) g += m->gradient(xs);
        CHECK(g.norm() <= 1e-10);
    }
    SECTION("single and repeated quadratics return the center") {
        const std::vector<ObjectivePtr> one = {quad({1, 1}, Vector{{1.0, 2.0}})};
        CHECK((global_minimizer(one) - Vector{{1.0, 2.0}}).norm() <= 1e-14);
        const std::vector<ObjectivePtr> twice = {quad({2, 3}, Vector{{-4.0, 7.0}}),
                                                 quad({2, 3}, Vector{{-4.0, 7.0}})};
        CHECK((global_minimizer(twice) - Vector{{-4.0, 7.0}}).norm() <= 1e-13);
    }
    SECTION("damped Newton path on non-quadratic models") {
        const std::vector<ObjectivePtr> models = {pseudo_huber(0.01, Vector{{40.0, -30.0}}),
                                                  pseudo_huber(0.02, Vector{{-25.0, 10.0}}),
                                                  quad({1, 2}, Vector{{0.5, 0.5}})};
        const Vector xs = global_minimizer(models);
        Vector g = Vector::Zero(2);
        for (const auto& m : models) g += m->gradient(xs);
        CHECK(g.norm() <= 1e-10);
        // Strict convexity: every probe point has a larger objective.
        auto total = [&](const Vector& x) {
            double s = 0.0;
            for (const auto& m : models) s += m->value(x);
            return s;
        };
        std::mt19937_64 rng(3);
        for (int k = 0; k < 50; ++k) {
            const Vector probe = xs + testing::random_vector(rng, 2, -1.0, 1.0);
            CHECK(total(probe) > total(xs));
        }
    }
    SECTION("empty and mixed dimensions are rejected") {
        CHECK_THROWS_AS(global_minimizer(std::vector<ObjectivePtr>{}), PreconditionError);
        const std::vector<ObjectivePtr> mixed = {quad({1, 1}, Vector::Zero(2)), quad({1}, Vector::Zero(1))};
        CHECK_THROWS_AS(global_minimizer(mixed), DimensionMismatch);
    }
}

TEST_CASE("gradient and Hessian match finite differences", "[objective]") {
    std::mt19937_64 rng(41);
    std::vector<ObjectivePtr> models = testing::benchmark_models();
    models.push_back(pseudo_huber(0.5, Vector{{1.0, -2.0}}));
    const double h = 1e-5;
    for (const auto& m : models) {
        for (int trial = 0; trial < 50; ++trial) {
            const Vector x = testing::random_vector(rng, 2);
            const Vector g = m->gradient(x);
            const Matrix hess = m->hessian(x);
            Vector fd_g(2);
            Matrix fd_h(2, 2);
            for (Eigen::Index k = 0; k < 2; ++k) {
                Vector e = Vector::Zero(2);
                e(k) = h;
                fd_g(k) = (m->value(x + e) - m->value(x - e)) / (2 * h);
                fd_h.col(k) = (m->gradient(x + e) - m->gradient(x - e)) / (2 * h);
            }
            CHECK((fd_g - g).norm() <= 1e-5 * std::max(1.0, g.norm()));
            CHECK((fd_h - hess).norm() <= 1e-4 * std::max(1.0, hess.norm()));
        }
    }
}

TEST_CASE("strong convexity property check", "[objective]") {
    const auto models = testing::benchmark_models();
    CHECK(strong_convexity_property_check(*models[0], Vector{{0.0, 0.0}}, Vector{{1.0, 1.0}}));
    CHECK(strong_convexity_property_check(*models[3], Vector{{0.0, 0.0}}, Vector{{0.0, 3.0}}));
    const Vector d{{0.0, 3.0}};
    const double ratio = (models[3]->gradient(d) - models[3]->gradient(Vector::Zero(2))).dot(d) /
                         d.squaredNorm();
    CHECK(std::abs(ratio - 4.0) <= 1e-14);
    CHECK_THROWS_AS(strong_convexity_property_check(*models[0], d, d), PreconditionError);
}

TEST_CASE("four convexity inequalities on random pairs", "[objective][property]") {
    std::mt19937_64 rng(7);
    std::vector<ObjectivePtr> models = testing::benchmark_models();
    models.push_back(pseudo_huber(0.3, Vector{{2.0, 1.0}}));
    for (const auto& m : models) {
        const auto b = m->bounds();
        for (int trial = 0; trial < 100; ++trial) {
            const Vector x1 = testing::random_vector(rng, 2);
            const Vector x2 = testing::random_vector(rng, 2);
            const auto ineq = convexity_inequalities(*m, x1, x2);
            const double slack = 1e-9 * std::max(1.0, b.Gamma * (x1 - x2).squaredNorm());
            CHECK(ineq.all_hold(slack));
            CHECK(ineq.bregman_lower >= -slack);
            CHECK(ineq.bregman_upper >= -slack);
            CHECK(ineq.monotone_lower >= -slack);
            CHECK(ineq.monotone_upper >= -slack);
            CHECK(strong_convexity_property_check(*m, x1, x2));
        }
    }
}

TEST_CASE("quadratic Bregman divergence is exact", "[objective]") {
    std::mt19937_64 rng(13);
    const auto models = testing::benchmark_models();
    for (const auto& m : models) {
        const auto* q = dynamic_cast<const QuadraticObjective*>(m.get());
        REQUIRE(q != nullptr);
        for (int trial = 0; trial < 20; ++trial) {
            const Vector y = testing::random_vector(rng, 2);
            const Vector x = testing::random_vector(rng, 2);
            const double generic = m->value(y) - m->value(x) - m->gradient(x).dot(y - x);
            CHECK(std::abs(m->bregman(y, x) - generic) <= 1e-10 * std::max(1.0, std::abs(generic)));
        }
    }
}

TEST_CASE("objective input validation", "[objective]") {
    const auto models = testing::benchmark_models();
    CHECK_THROWS_AS(eval(*models[0], Vector::Zero(3)), DimensionMismatch);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(eval(*models[0], Vector{{nan, 0.0}}), NonFiniteInput);

    Matrix indefinite(2, 2);
    indefinite << 1, 0, 0, -1;
    CHECK_THROWS_AS(QuadraticObjective(indefinite, Vector::Zero(2)), ValidationError);
    Matrix asym(2, 2);
    asym << 1, 0.5, 0, 1;
    CHECK_THROWS_AS(QuadraticObjective(asym, Vector::Zero(2)), ValidationError);
    CHECK_THROWS_AS(QuadraticObjective(Matrix::Identity(2, 2), Vector::Zero(3)), DimensionMismatch);
}
