#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <random>

#include "ricciflow/ricci.hpp"

using namespace ricciflow;

namespace {

Vec random_metric(std::mt19937_64& rng, int n, double lo = 0.1, double hi = 10.0) {
    std::uniform_real_distribution<double> unif(std::log(lo), std::log(hi));
    Vec g = Vec::zero(n);
    for (int i = 0; i < n; ++i) g[i] = std::exp(unif(rng));
    return g;
}

}  // namespace

TEST_CASE("flow field values match hand evaluation") {
    SECTION("so(2,2): (x,y) = (2,1) is on the Kaehler ray") {
        FlagSpace so = make_space(Family::So, 2, 2);
        Vec f = flow_field(so, Vec(1.0, 2.0)).value;  // metric order (y, x)
        CHECK(f[0] == Catch::Approx(6.0 / 7.0).margin(1e-15));
        CHECK(f[1] == Catch::Approx(12.0 / 7.0).margin(1e-15));

        // Off-ray point (x, y) = (1, 1): dx = 2/7 + 5/14, dy = 6/7 + 1/14.
        Vec g = flow_field(so, Vec(1.0, 1.0)).value;
        CHECK(g[1] == Catch::Approx(9.0 / 14.0).margin(1e-15));
        CHECK(g[0] == Catch::Approx(13.0 / 14.0).margin(1e-15));
    }

    SECTION("sp(1,1)") {
        FlagSpace sp = make_space(Family::Sp, 1, 1);
        Vec f = flow_field(sp, Vec(1.0, 2.0)).value;
        CHECK(f[0] == Catch::Approx(2.0 / 3.0).margin(1e-15));
        CHECK(f[1] == Catch::Approx(4.0 / 3.0).margin(1e-15));
    }

    SECTION("su3 shrinks the normal metric") {
        FlagSpace su = make_space(Family::Su3);
        Vec f = flow_field(su, Vec(1.0, 1.0, 1.0)).value;
        for (int i = 0; i < 3; ++i) CHECK(f[i] == Catch::Approx(-5.0 / 6.0).margin(1e-15));
    }

    SECTION("reversed orientation negates exactly") {
        FlagSpace su = make_space(Family::Su3);
        std::mt19937_64 rng(11u);
        for (int t = 0; t < 50; ++t) {
            Vec g = random_metric(rng, 3);
            Vec f = flow_field(su, g).value;
            Vec r = flow_field(su, g, Orientation::Reversed).value;
            for (int i = 0; i < 3; ++i) CHECK(r[i] == -f[i]);
        }
    }
}

TEST_CASE("Ricci components") {
    FlagSpace su = make_space(Family::Su3);
    Vec r1 = ricci_components(su, Vec(1.0, 1.0, 1.0));
    for (int i = 0; i < 3; ++i) CHECK(r1[i] == Catch::Approx(5.0 / 12.0).margin(1e-15));
    CHECK(r1.all_positive());  // positivity at the normal metric

    Vec r2 = ricci_components(su, Vec(1.0, 1.0, 2.0));
    for (int i = 0; i < 3; ++i) CHECK(r2[i] == Catch::Approx(1.0 / 3.0).margin(1e-15));

    FlagSpace so = make_space(Family::So, 2, 2);
    Vec r3 = ricci_components(so, Vec(1.0, 2.0));
    CHECK(r3[0] == Catch::Approx(-6.0 / 7.0).margin(1e-15));
    CHECK(r3[1] == Catch::Approx(-12.0 / 7.0).margin(1e-15));
}

TEST_CASE("flow quotients detect Einstein directions") {
    FlagSpace su = make_space(Family::Su3);

    Vec q = flow_quotients(su, Vec(1.0, 1.0, 1.0));
    CHECK(q[0] == Catch::Approx(-5.0 / 6.0).margin(1e-15));
    CHECK(std::abs(q.max() - q.min()) < 1e-15);

    const double c = 2.0 + 2.0 * std::sqrt(2.0);
    for (double s : {0.5, 1.0, 2.0, 10.0}) {
        Vec q2 = flow_quotients(su, s * Vec(1.0, c, 1.0));
        CHECK(std::abs(q2.max() - q2.min()) < 1e-14 / s);
        CHECK(q2[0] == Catch::Approx(-0.19526214587563495 / (s * s)).epsilon(1e-13));
    }

    Vec q3 = flow_quotients(su, Vec(1.0, 1.0, 2.0));
    CHECK(q3[0] == Catch::Approx(-2.0 / 3.0).margin(1e-15));
    CHECK(q3[2] == Catch::Approx(-1.0 / 3.0).margin(1e-15));
    CHECK(q3.max() - q3.min() > 1e-3);

    FlagSpace so = make_space(Family::So, 2, 2);
    Vec q4 = flow_quotients(so, Vec(1.0, 1.0));
    CHECK(q4.max() - q4.min() > 1e-3);  // (1,1) is not an invariant direction
}

TEST_CASE("field homogeneity") {
    std::mt19937_64 rng(22u);
    SECTION("two-summand fields are scale invariant (degree 0)") {
        for (Family fam : {Family::So, Family::Sp}) {
            FlagSpace sp = make_space(fam, 2, 2);
            for (int t = 0; t < 50; ++t) {
                Vec g = random_metric(rng, 2);
                Vec f = flow_field(sp, g).value;
                for (double kappa : {0.5, 2.0, 10.0}) {
                    Vec fk = flow_field(sp, kappa * g).value;
                    for (int i = 0; i < 2; ++i)
                        CHECK(fk[i] == Catch::Approx(f[i]).epsilon(1e-12));
                }
            }
        }
    }
    SECTION("su3 field has degree -1") {
        FlagSpace su = make_space(Family::Su3);
        for (int t = 0; t < 50; ++t) {
            Vec g = random_metric(rng, 3);
            Vec f = flow_field(su, g).value;
            for (double kappa : {0.5, 2.0, 10.0}) {
                Vec fk = flow_field(su, kappa * g).value;
                for (int i = 0; i < 3; ++i)
                    CHECK(fk[i] == Catch::Approx(f[i] / kappa).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("su3 field commutes with coordinate permutations exactly") {
    FlagSpace su = make_space(Family::Su3);
    std::mt19937_64 rng(33u);
    const std::array<std::array<int, 3>, 6> perms = {
        {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
    for (int t = 0; t < 100; ++t) {
        Vec g = random_metric(rng, 3);
        Vec f = flow_field(su, g).value;
        for (const auto& p : perms) {
            Vec gp(g[p[0]], g[p[1]], g[p[2]]);
            Vec fp = flow_field(su, gp).value;
            for (int i = 0; i < 3; ++i) CHECK(fp[i] == f[p[i]]);  // bitwise
        }
    }
}

TEST_CASE("numerical Jacobians") {
    FlagSpace su = make_space(Family::Su3);
    SECTION("analytic check at the normal metric") {
        Mat jac = flow_jacobian(su, Vec(1.0, 1.0, 1.0));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK(jac.at(i, j) == Catch::Approx(i == j ? 0.5 : 1.0 / 6.0).margin(1e-8));
    }

    SECTION("Euler identity per homogeneity degree") {
        std::mt19937_64 rng(44u);
        for (int t = 0; t < 20; ++t) {
            Vec g3 = random_metric(rng, 3, 0.5, 3.0);
            Vec jl = flow_jacobian(su, g3).apply(g3);
            Vec f = flow_field(su, g3).value;
            for (int i = 0; i < 3; ++i)
                CHECK(jl[i] == Catch::Approx(-f[i]).margin(1e-7 * (1.0 + std::abs(f[i]))));

            FlagSpace so = make_space(Family::So, 2, 2);
            Vec g2 = random_metric(rng, 2, 0.5, 3.0);
            Vec jl2 = flow_jacobian(so, g2).apply(g2);
            for (int i = 0; i < 2; ++i) CHECK(jl2[i] == Catch::Approx(0.0).margin(1e-7));
        }
    }

    SECTION("step validation") {
        CHECK_THROWS_AS(flow_jacobian(su, Vec(1.0, 1.0, 1.0), Orientation::AsWritten, 0.0),
                        ParameterOutOfRange);
        CHECK_THROWS_AS(flow_jacobian(su, Vec(1.0, 1.0, 1.0), Orientation::AsWritten, 0.01),
                        ParameterOutOfRange);
    }
}

TEST_CASE("field input validation") {
    FlagSpace su = make_space(Family::Su3);
    CHECK_THROWS_AS(flow_field(su, Vec(1.0, 1.0, -1.0)), NonPositiveMetric);
    CHECK_THROWS_AS(flow_field(su, Vec(1.0, 1.0, 0.0)), NonPositiveMetric);
    CHECK_THROWS_AS(flow_field(su, Vec(1.0, 1.0)), DimensionMismatch);
    FlagSpace so = make_space(Family::So, 2, 2);
    CHECK_THROWS_AS(ricci_components(so, Vec(1.0, 2.0, 3.0)), DimensionMismatch);
}
