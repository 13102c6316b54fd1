#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "ptzgs/diagnostics.hpp"
#include "ptzgs/errors.hpp"
#include "ptzgs/scenario.hpp"
#include "test_support.hpp"

using namespace ptzgs;

namespace {

const RunResult& cached_run(Variant v) {
    static const RunResult ms = run(testing::quiet_preset(Variant::MultiStage));
    static const RunResult ss = run(testing::quiet_preset(Variant::SingleStage));
    return v == Variant::MultiStage ? ms : ss;
}

}  // namespace

TEST_CASE("theory constants on the benchmark ring", "[diagnostics]") {
    const auto p = build_problem(testing::quiet_preset(Variant::SingleStage));
    SECTION("explicit delta and p") {
        const auto k = theory_constants(p.graph, p.models, p.params, 3.0, 1.5);
        CHECK(std::abs(k.lambda2 - 1.0) <= 1e-9);
        CHECK(std::abs(k.Gamma_max - 6.0) <= 1e-12);
        CHECK(std::abs(k.Psi_max - 6.0) <= 1e-12);
        // min{2/6 - 3/(2 * 1.5 * 6), 2 * 3 * 1.5 / 3} = min{1/6, 3}
        CHECK(std::abs(k.sigma_S - 1.0 / 6.0) <= 1e-9);
        CHECK(std::abs(k.alpha2 - 1.0 / 3.0) <= 1e-9);
        CHECK(std::abs(k.alpha1 - 0.5) <= 1e-9);
    }
    SECTION("auto-selected delta and p") {
        const auto k = theory_constants(p.graph, p.models, p.params);
        CHECK(std::abs(k.delta - 1.5) <= 1e-9);
        CHECK(std::abs(k.p - 3.0) <= 1e-9);
        CHECK(k.sigma_S > 0.0);
    }
    SECTION("ordering violations") {
        CHECK_THROWS_AS(theory_constants(p.graph, p.models, p.params, 3.0, 0.7), InvalidConstants);
        CHECK_THROWS_AS(theory_constants(p.graph, p.models, p.params, 1.0, 1.5), InvalidConstants);
    }
}

TEST_CASE("per-agent surface Lyapunov function", "[diagnostics]") {
    const auto p = build_problem(testing::quiet_preset(Variant::MultiStage));
    std::vector<Vector> xs;
    for (const auto& q : benchmark_quadratics()) xs.push_back(q.center);
    auto state = SystemState::from_positions(xs);
    for (double v : lyapunov_Vi(state, p.models, p.params)) CHECK(v == 0.0);
    state.phi(0) = Vector{{2.0, 0.0}};
    state.phi(1) = Vector{{-2.0, 0.0}};
    const auto vi = lyapunov_Vi(state, p.models, p.params);
    CHECK(vi[0] == 2.0);
    CHECK(vi[1] == 2.0);
}

TEST_CASE("per-agent surface energy follows its closed form in MS stage 1", "[diagnostics]") {
    // V_i(t) = V_i(0) exp(-2 kappa1 t) rho_1(t)^-2 while stage 1 is active.
    const auto& r = cached_run(Variant::MultiStage);
    const auto& spec = r.problem.schedule.stages[0];
    const auto v0 = lyapunov_Vi(r.problem.state(0.0, r.trajectory.states[0]), r.problem.models, r.problem.params);
    for (std::size_t k = 0; k < r.trajectory.size(); ++k) {
        const double t = r.trajectory.times[k];
        if (t > r.problem.schedule.guard(0)) break;
        const auto vi = lyapunov_Vi(r.problem.state(t, r.trajectory.states[k]), r.problem.models, r.problem.params);
        for (std::size_t i = 0; i < 6; ++i) {
            const double expected = envelope(spec, t, 2.0 * r.problem.params.kappa1, 2.0, v0[i]);
            if (expected < 1e-20 * v0[i]) continue;
            CHECK(std::abs(vi[i] - expected) <= 1e-3 * expected);
        }
    }
}

TEST_CASE("Bregman Lyapunov function", "[diagnostics]") {
    const auto p = build_problem(testing::quiet_preset(Variant::MultiStage));
    const Vector xs = global_minimizer(p.models);
    const std::vector<Vector> at(6, xs);
    CHECK(lyapunov_VM(SystemState::from_positions(at), p.models, xs) == 0.0);

    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const auto state = testing::random_state(rng, 6, 2, 0.0);
        double expected = 0.0;
        for (std::size_t i = 0; i < 6; ++i) {
            const auto* q = dynamic_cast<const QuadraticObjective*>(p.models[i].get());
            const Vector d = xs - state.x(i);
            expected += d.dot(q->q() * d);
        }
        CHECK(std::abs(lyapunov_VM(state, p.models, xs) - expected) <= 1e-10 * expected);
    }
}

TEST_CASE("composite Lyapunov function", "[diagnostics]") {
    const auto p = build_problem(testing::quiet_preset(Variant::SingleStage));
    const auto k = theory_constants(p.graph, p.models, p.params, 3.0, 1.5);
    const Vector xs = global_minimizer(p.models);
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        auto state = testing::random_state(rng, 6, 2, 0.0);
        for (std::size_t i = 0; i < 6; ++i) state.phi(i) = -p.models[i]->gradient(state.x(i));
        CHECK(std::abs(lyapunov_VS(state, p.models, p.params, xs, k) - lyapunov_VM(state, p.models, xs)) <= 1e-9);
    }
    auto bad = k;
    bad.delta = 0.5;
    CHECK_THROWS_AS(lyapunov_VS(SystemState(6, 2), p.models, p.params, xs, bad), InvalidConstants);
}

TEST_CASE("normalized residual", "[diagnostics]") {
    const Vector xs{{1.0, 1.5}};
    const std::vector<Vector> start = {Vector{{3.0, 1.5}}, xs};
    const std::vector<Vector> half = {Vector{{2.0, 1.5}}, Vector{{1.0, 2.5}}};
    const auto init = SystemState::from_positions(start);
    const auto same = residual_Er(init, init, xs);
    CHECK(same.value[0] == 1.0);
    CHECK_FALSE(same.absolute[0]);
    CHECK(same.value[1] == 0.0);
    CHECK(same.absolute[1]);
    const auto r = residual_Er(SystemState::from_positions(half), init, xs);
    CHECK(r.value[0] == 0.25);
    CHECK(r.value[1] == 1.0);
}

TEST_CASE("trajectory diagnostics on the presets", "[diagnostics][property]") {
    for (Variant v : {Variant::MultiStage, Variant::SingleStage}) {
        const auto& r = cached_run(v);
        const auto& d = r.diagnostics;
        REQUIRE(d.size() == r.trajectory.size());
        for (const auto& s : d) {
            CHECK(s.V_M >= 0.0);
            CHECK(s.V_S >= 0.0);
            CHECK(s.surface_gap <= 1e-9);
            CHECK(s.phi_sum_norm <= 1e-9);
        }
        CHECK(r.report.envelope.ok);
        CHECK(r.report.envelope.max_ratio <= 1.0 + kEnvelopeTolerance);
    }
}

TEST_CASE("SS composite function obeys its sandwich bound", "[diagnostics][property]") {
    // min(p/2, gamma_min/2) (|s|^2 + |x - x*|^2) <= V_S <= max(p/2, Gamma_max/2) (|s|^2 + |x - x*|^2)
    const auto& r = cached_run(Variant::SingleStage);
    const auto& p = r.problem;
    double gamma_min = 1e300;
    for (const auto& m : p.models) gamma_min = std::min(gamma_min, m->bounds().gamma);
    const double lo = 0.5 * std::min(r.consts.p, gamma_min);
    const double hi = 0.5 * std::max(r.consts.p, r.consts.Gamma_max);
    for (std::size_t k = 0; k < r.trajectory.size(); ++k) {
        const auto state = p.state(r.trajectory.times[k], r.trajectory.states[k]);
        double q = 0.0;
        for (const auto& s : sliding_surface(state, p.models, p.params)) q += s.squaredNorm();
        for (std::size_t i = 0; i < 6; ++i) q += (state.x(i) - r.xstar).squaredNorm();
        const double vs = r.diagnostics[k].V_S;
        CHECK(vs >= lo * q * (1 - 1e-9) - 1e-14);
        CHECK(vs <= hi * q * (1 + 1e-9) + 1e-14);
    }
}

TEST_CASE("MS Bregman function decreases in stage 2", "[diagnostics][property]") {
    const auto& r = cached_run(Variant::MultiStage);
    const double t1 = r.problem.schedule.stages[0].deadline();
    const double t2 = r.problem.schedule.final_deadline();
    double prev = -1.0;
    for (std::size_t k = 0; k < r.trajectory.size(); ++k) {
        const double t = r.trajectory.times[k];
        if (t < t1 || t >= t2) continue;
        const double vm = r.diagnostics[k].V_M;
        if (prev >= 0.0) CHECK(vm <= prev + 1e-9 * std::max(1.0, prev));
        prev = vm;
    }
    CHECK(prev >= 0.0);
}

TEST_CASE("consensus bound chain", "[diagnostics][property]") {
    const auto& r = cached_run(Variant::MultiStage);
    const double t1 = r.problem.schedule.stages[0].deadline();
    std::size_t checked = 0;
    for (std::size_t k = 0; k < r.trajectory.size(); k += 7) {
        const double t = r.trajectory.times[k];
        if (t < t1) continue;
        const auto state = r.problem.state(t, r.trajectory.states[k]);
        const auto c = consensus_bound_chain(state, r.problem.graph, r.problem.models, r.xstar, r.consts);
        const double scale = 1e-9 * std::max(1e-12, c.laplacian);
        CHECK(c.vm <= c.bregman_at_mean + scale);
        CHECK(c.bregman_at_mean <= c.spread + scale);
        CHECK(c.spread <= c.complete_graph + scale);
        CHECK(c.complete_graph <= c.laplacian + scale);
        ++checked;
    }
    CHECK(checked > 10);
}

TEST_CASE("envelope check", "[diagnostics]") {
    const auto& r = cached_run(Variant::SingleStage);
    const auto rep = envelope_check(r.trajectory, r.diagnostics, r.consts, r.problem.schedule,
                                    Variant::SingleStage);
    CHECK(rep.ok);
    CHECK(rep.anchor_time == 0.0);
    CHECK(rep.anchor_value == r.diagnostics[0].V_S);
    CHECK(rep.checked > 100);

    auto inflated = r.diagnostics;
    inflated[inflated.size() / 2].V_S = 2.0 * inflated[0].V_S;
    CHECK_THROWS_AS(envelope_check(r.trajectory, inflated, r.consts, r.problem.schedule,
                                   Variant::SingleStage),
                    EnvelopeViolation);
    const auto soft = envelope_report(r.trajectory, inflated, r.consts, r.problem.schedule,
                                      Variant::SingleStage);
    CHECK_FALSE(soft.ok);
    CHECK(soft.max_ratio > 1.0 + kEnvelopeTolerance);

    const auto& m = cached_run(Variant::MultiStage);
    const auto mrep = envelope_report(m.trajectory, m.diagnostics, m.consts, m.problem.schedule,
                                      Variant::MultiStage);
    CHECK(mrep.ok);
    CHECK(std::abs(mrep.anchor_time - 0.1) <= 1e-12);
}
