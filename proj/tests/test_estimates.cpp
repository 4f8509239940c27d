#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "polytube/estimates.hpp"
#include "test_shapes.hpp"

using namespace ptb;
using namespace ptb::testing;

TEST_CASE("square angle checks, frozen geometry") {
    auto P = make_box({1.0, 1.0});
    auto vert = solve_periodic_orbit(P, {2, 3});
    auto horiz = solve_periodic_orbit(P, {0, 1});
    auto diag = solve_periodic_orbit(P, {0, 2, 1, 3});
    REQUIRE(vert);
    REQUIRE(horiz);
    REQUIRE(diag);
    const double eps = 0.1;

    auto axes = angle_check(P, *vert, *horiz, eps);
    CHECK(axes.alpha == doctest::Approx(std::numbers::pi / 2.0));
    CHECK(axes.sin_alpha == doctest::Approx(1.0));
    CHECK(axes.bound == doctest::Approx(0.04));  // (4*0.1/5)/min(1*2,1*2)
    CHECK(axes.pass);

    auto mixed = angle_check(P, *vert, *diag, eps);
    CHECK(mixed.alpha == doctest::Approx(std::numbers::pi / 4.0));
    CHECK(mixed.sin_alpha == doctest::Approx(std::sqrt(2.0) / 2.0));
    CHECK(mixed.bound == doctest::Approx(0.08 / 2.0));  // min(2, 2*sqrt2) = 2
    CHECK(mixed.pass);

    // parallel tubes are rejected as hypothesis failures
    CHECK_THROWS_AS(angle_check(P, *vert, *vert, eps), NoIntersectionFound);
}

TEST_CASE("cube angle checks pass with margin") {
    auto P = make_box({1.0, 1.0, 1.0});
    TubeSearchBounds bounds;
    bounds.max_word_period = 4;
    auto atlas = enumerate_tubes(P, 0.1, bounds);
    REQUIRE(atlas.tubes.size() >= 6);
    long pairs = 0;
    for (size_t i = 0; i < atlas.tubes.size(); ++i)
        for (size_t j = i + 1; j < atlas.tubes.size(); ++j) {
            try {
                auto ac = angle_check(P, atlas.tubes[i], atlas.tubes[j], 0.1);
                CHECK(ac.pass);
                CHECK(ac.sin_alpha >= ac.bound - 1e-9);
                ++pairs;
            } catch (const NoIntersectionFound&) {
            }
        }
    CHECK(pairs >= 6);
}

TEST_CASE("phase volume closed form for n = 3") {
    auto P = make_box({1.0, 1.0, 1.0});
    auto t = solve_periodic_orbit(P, {4, 5});
    REQUIRE(t);
    const double eps = 0.1;
    auto pv = phase_volume(P, *t, eps);
    CHECK(pv.N == 1);
    const double L = 2.0;
    double theta = (4.0 * eps / 5.0) / (2.0 * L);
    double expect = L * std::pow(eps / 10.0, 2) * std::numbers::pi * 2.0 *
                    std::numbers::pi * (1.0 - std::cos(theta));
    CHECK(pv.exact == doctest::Approx(expect).epsilon(1e-12));
    CHECK(pv.lower_bound <= pv.exact);
}

TEST_CASE("phase volume small-angle behavior") {
    auto P = make_box({1.0, 1.0, 1.0});
    auto t = solve_periodic_orbit(P, {4, 5});
    REQUIRE(t);
    // volume / eps^4 approaches a constant as eps -> 0
    double prev_ratio = 0.0;
    for (double eps : {0.02, 0.01, 0.005, 0.0025}) {
        auto pv = phase_volume(P, *t, eps);
        double ratio = pv.exact / std::pow(eps, 4);
        if (prev_ratio != 0.0)
            CHECK(ratio == doctest::Approx(prev_ratio).epsilon(1e-3));
        prev_ratio = ratio;
        CHECK(pv.lower_bound <= pv.exact);
    }
}

TEST_CASE("phase volume lower bound stays below the cap term") {
    auto P = make_box({1.0, 1.0, 1.0});
    auto t = solve_periodic_orbit(P, {4, 5});
    REQUIRE(t);
    // the sin t >= t/2 step is valid while the cap angle stays below pi/3
    for (double eps : {0.3, 0.2, 0.1, 0.05, 0.01})
        CHECK(phase_volume(P, *t, eps).lower_bound <=
              phase_volume(P, *t, eps).exact);
}

TEST_CASE("doubling the rotation count quarters the cap") {
    // direct evaluation of the n = 3 volume formula at two values of N
    const double eps = 0.01, L = 2.0;
    auto cap = [&](double N) {
        double theta = (4.0 * eps / 5.0) / (2.0 * N * L);
        return 2.0 * std::numbers::pi * (1.0 - std::cos(theta));
    };
    CHECK(cap(2.0) / cap(1.0) == doctest::Approx(0.25).epsilon(1e-4));
}

TEST_CASE("sum check on the square grid") {
    auto P = make_box({1.0, 1.0});
    TubeSearchBounds bounds;
    bounds.max_word_period = 12;
    auto checks = sum_check(P, {0.4, 0.2, 0.1, 0.05}, bounds);
    REQUIRE(checks.size() == 4);
    // frozen from the slope census: axis pairs plus coprime (p, q) classes
    // with clearance 1/(2 sqrt(p^2+q^2)) >= eps and word length <= 12
    CHECK(checks[0].M == 2);
    CHECK(checks[1].M == 5);
    CHECK(checks[2].M == 11);
    CHECK(checks[3].M == 13);
    long prev_M = 0;
    for (const auto& c : checks) {
        CHECK(c.complete);
        CHECK(c.M >= prev_M);  // eps decreasing along the grid: M grows
        prev_M = c.M;
    }
    // n = 2: every term is 1, so lhs = M and the ratio is M * eps^2 / vol
    for (const auto& c : checks) {
        CHECK(c.lhs == doctest::Approx(static_cast<double>(c.M)));
        CHECK(c.ratio ==
              doctest::Approx(c.M * c.eps * c.eps).epsilon(1e-12));
    }
    // ratio bounded along the grid within one order of magnitude
    double lo = 1e18, hi = 0.0;
    for (const auto& c : checks) {
        if (c.M == 0) continue;
        lo = std::min(lo, c.ratio);
        hi = std::max(hi, c.ratio);
    }
    CHECK(hi / lo < 10.0);
}

TEST_CASE("sum check: eps above the inradius gives the empty sum") {
    auto P = make_box({1.0, 1.0});
    TubeSearchBounds bounds;
    bounds.max_word_period = 6;
    auto checks = sum_check(P, {0.6}, bounds);
    REQUIRE(checks.size() == 1);
    CHECK(checks[0].M == 0);
    CHECK(checks[0].lhs == 0.0);
    CHECK(checks[0].lhs <= checks[0].rhs_scale);
}

TEST_CASE("cube sum check bounded") {
    auto P = make_box({1.0, 1.0, 1.0});
    TubeSearchBounds bounds;
    bounds.max_word_period = 6;
    auto checks = sum_check(P, {0.4, 0.3, 0.2}, bounds);
    double lo = 1e18, hi = 0.0;
    for (const auto& c : checks) {
        if (c.M == 0) continue;
        lo = std::min(lo, c.ratio);
        hi = std::max(hi, c.ratio);
        for (double term : c.terms) CHECK(term > 0.0);
    }
    CHECK(hi / lo < 10.0);
}

TEST_CASE("disjoint phase-space cones") {
    // sampled phase points belong to at most one V_i
    auto P = make_box({1.0, 1.0, 1.0});
    TubeSearchBounds bounds;
    bounds.max_word_period = 4;
    const double eps = 0.1;
    auto atlas = enumerate_tubes(P, eps, bounds);
    REQUIRE(atlas.tubes.size() >= 6);
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> g;
    for (int s = 0; s < 2000; ++s) {
        Vec x = vec3(u(rng), u(rng), u(rng));
        Vec th = vec3(g(rng), g(rng), g(rng)).normalized();
        int members = 0;
        for (const auto& t : atlas.tubes) {
            long N = tube_rotation_density(P, t, eps / 5.0);
            double half_angle = (4.0 * eps / 5.0) / (2.0 * N * t.L);
            double ang = std::acos(std::clamp(std::abs(th.dot(t.v)), 0.0, 1.0));
            if (ang > half_angle) continue;
            // within the tube body of radius eps/10 around the central orbit
            double dist = 1e18;
            Vec prev = t.x0;
            for (const auto& im : t.impacts) {
                Vec d = im - prev;
                double tt = std::clamp((x - prev).dot(d) / d.squaredNorm(),
                                       0.0, 1.0);
                dist = std::min(dist, (x - (prev + tt * d)).norm());
                prev = im;
            }
            if (dist < eps / 10.0) ++members;
        }
        CHECK(members <= 1);
    }
}
