#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "ricciflow/integrate.hpp"

using namespace ricciflow;

namespace {

const FlagSpace kSu3 = make_space(Family::Su3);
const FlagSpace kSo22 = make_space(Family::So, 2, 2);

IntegratorConfig with_t_end(double t_end) {
    IntegratorConfig cfg;
    cfg.t_end = t_end;
    return cfg;
}

// Exact solution on the su3 normal ray: lambda(t) = sqrt(1 - 5t/3) * (1,1,1).
double su3_radial(double t) { return std::sqrt(1.0 - 5.0 * t / 3.0); }

}  // namespace

TEST_CASE("su3 normal-ray run matches the closed-form radial solution") {
    for (double t_end : {0.1, 0.3, 0.5}) {
        Trajectory traj = integrate(kSu3, Vec(1.0, 1.0, 1.0), with_t_end(t_end));
        const Event* term = traj.terminal_event();
        REQUIRE(term != nullptr);
        CHECK(term->kind == EventKind::ReachedTEnd);
        CHECK(traj.samples.back().t == t_end);  // exact landing
        double expect = su3_radial(t_end);
        for (int i = 0; i < 3; ++i)
            CHECK(traj.samples.back().g[i] == Catch::Approx(expect).margin(1e-9));
    }
}

TEST_CASE("so(2,2) stays on the Kaehler ray with linear growth") {
    for (double t_end : {1.0, 7.0, 70.0}) {
        Trajectory traj = integrate(kSo22, Vec(1.0, 2.0), with_t_end(t_end));
        REQUIRE(traj.terminal_event()->kind == EventKind::ReachedTEnd);
        double y = 1.0 + 6.0 / 7.0 * t_end;
        CHECK(traj.samples.back().g[0] == Catch::Approx(y).margin(1e-9));
        CHECK(traj.samples.back().g[1] == Catch::Approx(2.0 * y).margin(1e-9));
        for (const auto& s : traj.samples)  // the ray is invariant
            CHECK(std::abs(s.g[1] - 2.0 * s.g[0]) <= 1e-12 * s.g[1]);
    }
}

TEST_CASE("extinction events") {
    SECTION("normal start, threshold crossing at ext_eps = 1e-6") {
        IntegratorConfig cfg = with_t_end(1.0);
        cfg.ext_eps = 1e-6;
        Trajectory traj = integrate(kSu3, Vec(1.0, 1.0, 1.0), cfg);
        const Event* term = traj.terminal_event();
        REQUIRE(term->kind == EventKind::Extinction);
        CHECK(term->t == Catch::Approx(0.6).margin(1e-6));
        CHECK(term->t == traj.samples.back().t);
        CHECK(traj.samples.back().g.min() >= 0.999e-6);
        auto t_ext = extinction_time(traj);
        REQUIRE(t_ext.has_value());
        CHECK(*t_ext == Catch::Approx(0.6).margin(1e-9));
    }

    SECTION("normal start, default threshold is below what doubles can reach") {
        // Steps underflow with the minimum component near 1e-7; the run must
        // still close as Extinction with the extrapolated time.
        Trajectory traj = integrate(kSu3, Vec(1.0, 1.0, 1.0), with_t_end(1.0));
        const Event* term = traj.terminal_event();
        REQUIRE(term->kind == EventKind::Extinction);
        CHECK(term->t == Catch::Approx(0.6).margin(1e-6));
        CHECK(term->t >= traj.samples.back().t);
        auto t_ext = extinction_time(traj);
        REQUIRE(t_ext.has_value());
        CHECK(*t_ext == Catch::Approx(0.6).margin(1e-8));
    }

    SECTION("off-ray start (1,1,2)") {
        Trajectory traj = integrate(kSu3, Vec(1.0, 1.0, 2.0), with_t_end(2.0));
        REQUIRE(traj.terminal_event()->kind == EventKind::Extinction);
        auto t_ext = extinction_time(traj);
        REQUIRE(t_ext.has_value());
        CHECK(*t_ext == Catch::Approx(0.947172828008).margin(1e-6));

        // The metric dies along the invariant direction (1, 1, 2+2*sqrt(2)).
        Vec dir = direction_limit(traj).direction;
        CHECK(angle_between(dir, Vec(1.0, 1.0, 2.0 + 2.0 * std::sqrt(2.0))) < 1e-6);
    }

    SECTION("expanding systems never go extinct") {
        Trajectory traj = integrate(kSo22, Vec(1.0, 1.0), with_t_end(50.0));
        CHECK(traj.terminal_event()->kind == EventKind::ReachedTEnd);
        CHECK_FALSE(extinction_time(traj).has_value());
    }
}

TEST_CASE("blow-up and step-budget events") {
    SECTION("ratio growth past the Kaehler ray blows up in finite time") {
        IntegratorConfig cfg = with_t_end(100.0);
        cfg.norm_cap = 1e6;
        Trajectory traj = integrate(kSo22, Vec(1.0, 2.5), cfg);
        const Event* term = traj.terminal_event();
        REQUIRE(term->kind == EventKind::BlowUp);
        CHECK(term->t == traj.samples.back().t);
        double nrm = traj.samples.back().g.norm();
        CHECK(nrm <= 1e6 * (1.0 + 1e-9));
        CHECK(nrm >= 0.9e6);
    }

    SECTION("max_steps closes the run where it stands") {
        IntegratorConfig cfg = with_t_end(100.0);
        cfg.max_steps = 10;
        Trajectory traj = integrate(kSo22, Vec(1.0, 1.0), cfg);
        REQUIRE(traj.terminal_event()->kind == EventKind::MaxSteps);
        CHECK(traj.samples.back().t < 100.0);
    }
}

TEST_CASE("positivity is preserved along stored samples") {
    std::mt19937_64 rng(905u);
    std::uniform_real_distribution<double> unif(-1.5, 1.5);
    for (int trial = 0; trial < 15; ++trial) {
        Vec g0(std::exp(unif(rng)), std::exp(unif(rng)), std::exp(unif(rng)));
        Trajectory traj = integrate(kSu3, g0, with_t_end(5.0));
        for (const auto& s : traj.samples) CHECK(s.g.all_positive());
        REQUIRE(traj.terminal_event() != nullptr);

        Vec h0(std::exp(unif(rng)), std::exp(unif(rng)));
        Trajectory traj2 = integrate(kSo22, h0, with_t_end(5.0));
        for (const auto& s : traj2.samples) CHECK(s.g.all_positive());
    }
}

TEST_CASE("time reversal returns to the start") {
    SECTION("expanding two-summand flow") {
        Trajectory fwd = integrate(kSo22, Vec(1.3, 0.9), with_t_end(2.0));
        REQUIRE(fwd.terminal_event()->kind == EventKind::ReachedTEnd);
        IntegratorConfig back = with_t_end(2.0);
        back.orientation = Orientation::Reversed;
        Trajectory rev = integrate(kSo22, fwd.samples.back().g, back);
        for (int i = 0; i < 2; ++i)
            CHECK(rev.samples.back().g[i] == Catch::Approx(Vec(1.3, 0.9)[i]).epsilon(1e-6));
    }
    SECTION("shrinking su3 flow, short of extinction") {
        Vec g0(1.2, 1.0, 0.8);
        Trajectory fwd = integrate(kSu3, g0, with_t_end(0.2));
        REQUIRE(fwd.terminal_event()->kind == EventKind::ReachedTEnd);
        IntegratorConfig back = with_t_end(0.2);
        back.orientation = Orientation::Reversed;
        Trajectory rev = integrate(kSu3, fwd.samples.back().g, back);
        for (int i = 0; i < 3; ++i)
            CHECK(rev.samples.back().g[i] == Catch::Approx(g0[i]).epsilon(1e-6));
    }
}

TEST_CASE("direction limits") {
    SECTION("on-ray trajectory reports its ray, converged") {
        Trajectory traj = integrate(kSo22, Vec(1.0, 2.0), with_t_end(100.0));
        DirectionLimit dl = direction_limit(traj);
        CHECK(dl.converged);
        CHECK(angle_between(dl.direction, Vec(1.0, 2.0)) < 1e-12);
    }

    SECTION("interior so(2,2) start drifts to the non-Kaehler Einstein ray") {
        Trajectory traj = integrate(kSo22, Vec(1.0, 1.0), with_t_end(1e6));
        DirectionLimit dl = direction_limit(traj);
        CHECK(angle_between(dl.direction, Vec(3.0, 1.0)) < 1e-4);
    }

    SECTION("reversed su3 flow near the normal direction") {
        IntegratorConfig cfg = with_t_end(1e4);
        cfg.orientation = Orientation::Reversed;
        Trajectory traj = integrate(kSu3, Vec(2.0, 1.95, 1.95), cfg);
        DirectionLimit dl = direction_limit(traj);
        CHECK(angle_between(dl.direction, Vec(1.0, 1.0, 1.0)) < 1e-3);
    }

    SECTION("too few samples") {
        IntegratorConfig cfg = with_t_end(100.0);
        cfg.max_steps = 1;
        Trajectory traj = integrate(kSo22, Vec(1.0, 1.0), cfg);
        REQUIRE(traj.samples.size() < 3);
        CHECK_THROWS_AS(direction_limit(traj), TooFewSamples);
    }
}

TEST_CASE("dense output") {
    Trajectory traj = integrate(kSu3, Vec(1.0, 1.0, 1.0), with_t_end(0.5));
    for (double t : {0.05, 0.25, 0.49}) {
        Vec g = traj.at(t);
        for (int i = 0; i < 3; ++i) CHECK(g[i] == Catch::Approx(su3_radial(t)).margin(1e-8));
    }
    CHECK_THROWS_AS(traj.at(-0.1), ParameterOutOfRange);
    CHECK_THROWS_AS(traj.at(0.51), ParameterOutOfRange);
}

TEST_CASE("trajectory bookkeeping invariants") {
    Trajectory traj = integrate(kSo22, Vec(1.0, 1.1), with_t_end(3.0));
    for (std::size_t i = 1; i < traj.samples.size(); ++i)
        CHECK(traj.samples[i].t > traj.samples[i - 1].t);
    REQUIRE(traj.samples.size() == traj.derivs.size());
    int terminals = 0;
    for (const auto& e : traj.events) terminals += e.terminal;
    CHECK(terminals == 1);
    CHECK(traj.events.back().terminal);  // terminal event stays last

    SECTION("sample_stride thins storage without changing the endpoint") {
        IntegratorConfig cfg = with_t_end(3.0);
        cfg.sample_stride = 10;
        Trajectory thin = integrate(kSo22, Vec(1.0, 1.1), cfg);
        CHECK(thin.samples.size() < traj.samples.size());
        CHECK(thin.samples.back().t == traj.samples.back().t);
        for (int i = 0; i < 2; ++i)
            CHECK(thin.samples.back().g[i] == traj.samples.back().g[i]);
    }
}

TEST_CASE("two-summand sign invariance (spot check)") {
    std::mt19937_64 rng(906u);
    std::uniform_real_distribution<double> unif(-1.5, 1.5);
    for (int trial = 0; trial < 20; ++trial) {
        Vec g0(std::exp(unif(rng)), std::exp(unif(rng)));
        double sign0 = g0[1] - 2.0 * g0[0];
        Trajectory traj = integrate(kSo22, g0, with_t_end(5.0));
        for (const auto& s : traj.samples) {
            double d = s.g[1] - 2.0 * s.g[0];
            if (sign0 > 0) CHECK(d > 0.0);
            if (sign0 < 0) CHECK(d < 0.0);
        }
    }
}

TEST_CASE("config validation") {
    IntegratorConfig cfg;
    cfg.rtol = 0.0;
    CHECK_THROWS_AS(integrate(kSu3, Vec(1.0, 1.0, 1.0), cfg), ParameterOutOfRange);
    cfg = IntegratorConfig{};
    cfg.ext_eps = 1e-2;
    CHECK_THROWS_AS(integrate(kSu3, Vec(1.0, 1.0, 1.0), cfg), ParameterOutOfRange);
    cfg = IntegratorConfig{};
    cfg.sample_stride = 0;
    CHECK_THROWS_AS(integrate(kSu3, Vec(1.0, 1.0, 1.0), cfg), ParameterOutOfRange);
    CHECK_THROWS_AS(integrate(kSu3, Vec(1.0, 1.0, -1.0), IntegratorConfig{}), NonPositiveMetric);
}

TEST_CASE("fiber pinch during a blow-up race closes as extinction") {
    // Deep in the outer region one summand blows up in finite time while the
    // other pinches off; step sizes underflow long before the norm cap, and
    // the run must still terminate cleanly with the pinch extrapolated.
    double th = 7.5 / 8.0 * 1.5707963267948966;
    Trajectory traj = integrate(kSo22, Vec(std::cos(th), std::sin(th)), with_t_end(1e6));
    const Event* term = traj.terminal_event();
    REQUIRE(term != nullptr);
    CHECK(term->kind == EventKind::Extinction);
    const Sample& last = traj.samples.back();
    CHECK(term->t >= last.t);
    CHECK(term->t <= last.t * (1.0 + 1e-3));
    Vec dir = last.g.normalized();
    CHECK(dir.min() < 1e-3);   // sigma1's share of the norm is gone
    CHECK(last.g.min() > 0.0); // but the state never left the cone
}
