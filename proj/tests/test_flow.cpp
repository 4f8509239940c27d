#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "polytube/unfold.hpp"
#include "test_shapes.hpp"

using namespace ptb;
using namespace ptb::testing;

TEST_CASE("reflect basics") {
    Vec d = vec3(0, 0, 1), n = vec3(0, 0, 1);
    CHECK((reflect(d, n) - vec3(0, 0, -1)).norm() < 1e-14);

    Vec d2 = vec3(1, 0, 1) / std::sqrt(2.0);
    CHECK((reflect(d2, n) - vec3(1, 0, -1) / std::sqrt(2.0)).norm() < 1e-14);

    double th = 0.3;
    Vec d3 = vec2(std::cos(th), std::sin(th));
    CHECK((reflect(d3, vec2(0, 1)) - vec2(std::cos(th), -std::sin(th))).norm() <
          1e-14);

    CHECK_THROWS_AS(reflect(vec2(2, 0), vec2(0, 1)), NonUnitInput);
}

TEST_CASE("reflect is an involution and preserves norm") {
    std::mt19937 rng(3);
    std::normal_distribution<double> g;
    for (int i = 0; i < 100; ++i) {
        Vec d = vec3(g(rng), g(rng), g(rng)).normalized();
        Vec n = vec3(g(rng), g(rng), g(rng)).normalized();
        Vec r = reflect(d, n);
        CHECK(r.norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK((reflect(r, n) - d).norm() < 1e-12);
    }
}

TEST_CASE("vertical bouncing in the square") {
    auto P = make_box({1.0, 1.0});
    auto res = trace(P, {vec2(0.5, 0.0), vec2(0, 1), std::nullopt},
                     {.max_events = 10}, 0.0);
    REQUIRE(res.trajectory.events.size() == 10);
    // facets: 0:x=1, 1:x=0, 2:y=1, 3:y=0 after construction; letters alternate
    for (size_t i = 0; i < res.word.letters.size(); ++i) {
        const auto& e = res.trajectory.events[i];
        CHECK(e.arc_length == doctest::Approx(i + 1.0));
        CHECK((i % 2 == 0 ? e.point[1] == doctest::Approx(1.0)
                          : e.point[1] == doctest::Approx(0.0)));
    }
    REQUIRE(res.word.periodic_core.has_value());
    CHECK(res.word.periodic_core->period == 2);
}

TEST_CASE("aimed at a corner stops as singular") {
    auto P = make_box({1.0, 1.0});
    Vec dir = vec2(0.5, 1.0).normalized();
    auto res = trace(P, {vec2(0.5, 0.0), dir, std::nullopt},
                     {.max_events = 10}, 0.0);
    CHECK(res.trajectory.terminated == Termination::SingularHit);
    CHECK(res.trajectory.events.empty());
    CHECK((res.trajectory.end_pos - vec2(1.0, 1.0)).norm() < 1e-9);
}

TEST_CASE("diagonal family impacts, frozen") {
    auto P = make_box({1.0, 1.0});
    Vec dir = vec2(1, 1).normalized();
    auto res = trace(P, {vec2(0.25, 0.0), dir, std::nullopt},
                     {.max_events = 8}, 0.0);
    REQUIRE(res.trajectory.events.size() == 8);
    CHECK((res.trajectory.events[0].point - vec2(1.0, 0.75)).norm() < 1e-10);
    CHECK((res.trajectory.events[1].point - vec2(0.75, 1.0)).norm() < 1e-10);
    CHECK((res.trajectory.events[2].point - vec2(0.0, 0.25)).norm() < 1e-10);
    CHECK((res.trajectory.events[3].point - vec2(0.25, 0.0)).norm() < 1e-10);
    REQUIRE(res.word.periodic_core.has_value());
    CHECK(res.word.periodic_core->period == 4);
    CHECK(res.word.periodic_core->offset == 0);
}

TEST_CASE("eps_stop terminates near-singular passes") {
    auto P = make_box({1.0, 1.0});
    Vec dir = vec2(1.0, 0.92).normalized();  // passes near (1,1) but not through
    auto wide = trace(P, {vec2(0.0, 0.0), dir, std::nullopt},
                      {.max_events = 50}, 0.2);
    CHECK(wide.trajectory.terminated == Termination::SingularHit);
    auto tight = trace(P, {vec2(0.0, 0.0), dir, std::nullopt},
                       {.max_events = 5}, 0.0);
    CHECK(tight.trajectory.terminated == Termination::Ran);
}

TEST_CASE("interior consistency of impacts") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 20; ++trial) {
        auto P = random_polyhedron(rng);
        Vec pos = P.interior_point();
        Vec dir = vec3(g(rng), g(rng), g(rng)).normalized();
        auto res = trace(P, {pos, dir, std::nullopt}, {.max_events = 200}, 0.0);
        Vec prev = pos;
        double prev_len = 0.0;
        for (const auto& e : res.trajectory.events) {
            CHECK(P.contains(e.point, 1e-7));
            double flight = e.arc_length - prev_len;
            CHECK(flight > 0);
            CHECK((e.point - prev).norm() == doctest::Approx(flight));
            prev = e.point;
            prev_len = e.arc_length;
        }
    }
}

TEST_CASE("unfold square words") {
    auto P = make_box({1.0, 1.0});
    // facet order: 0: x=1, 1: x=0, 2: y=1, 3: y=0
    auto top_bottom = unfold(P, {2, 3});
    CHECK((top_bottom.linear_part() - Mat::Identity(2, 2)).norm() < 1e-12);
    CHECK((top_bottom.translation() - vec2(0, 2)).norm() < 1e-12);

    // derived: multiply the two affine reflection matrices directly
    auto right_top = unfold(P, {0, 2});
    Mat refl_right = Mat::Identity(2, 2);
    refl_right(0, 0) = -1;
    Vec t_right = vec2(2, 0);
    // image of y=1 under reflection in x=1 is y=1 again
    Mat refl_top = Mat::Identity(2, 2);
    refl_top(1, 1) = -1;
    Vec t_top = vec2(0, 2);
    Mat expect_lin = refl_top * refl_right;
    Vec expect_tr = refl_top * t_right + t_top;
    CHECK((right_top.linear_part() - expect_lin).norm() < 1e-12);
    CHECK((right_top.translation() - expect_tr).norm() < 1e-12);
    // orthogonal with determinant +1 (two reflections)
    CHECK(std::abs(right_top.linear_part().determinant() - 1.0) < 1e-12);
    Mat should_be_id = right_top.linear_part().transpose() *
                       right_top.linear_part();
    CHECK((should_be_id - Mat::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("unfold cube top bottom") {
    auto P = make_box({1.0, 1.0, 1.0});
    // facets 4: z=1, 5: z=0
    auto ch = unfold(P, {4, 5});
    CHECK((ch.linear_part() - Mat::Identity(3, 3)).norm() < 1e-12);
    CHECK((ch.translation() - vec3(0, 0, 2)).norm() < 1e-12);
}

TEST_CASE("unfolding straightens the trajectory") {
    std::mt19937 rng(23);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0.2, 0.8);
    for (int trial = 0; trial < 10; ++trial) {
        auto P = (trial % 2) ? random_polygon(rng, 5)
                             : ConvexPolytope(make_box({1.0, 1.0}));
        Vec pos = P.interior_point();
        Vec dir = vec2(g(rng), g(rng));
        if (dir.norm() < 1e-6) continue;
        dir.normalize();
        auto res = trace(P, {pos, dir, std::nullopt}, {.max_events = 30}, 0.0);
        if (res.word.letters.size() < 5) continue;
        // quasi-tangent bounces amplify rounding by 1/|n.dir|; the regular
        // set excludes tangencies, so require well-transversal impacts
        bool transversal = true;
        Vec d_run = dir;
        for (const auto& e : res.trajectory.events) {
            const Vec& n = P.halfspaces[e.facet].normal;
            if (std::abs(n.dot(d_run)) < 5e-2) transversal = false;
            d_run = e.out_dir;
        }
        if (!transversal) continue;
        auto chain = unfold(P, res.word.letters);
        // the straight ray in the corridor folds back onto the trajectory
        for (int s = 0; s < 100; ++s) {
            double t = res.trajectory.total_length * (s + 0.5) / 100.0;
            Vec folded = fold_ray_point(P, chain, pos, dir, t);
            // folded point must sit on the traced path at arc length t
            double prev_len = 0.0;
            Vec seg_start = pos;
            Vec seg_dir = dir;
            Vec expected = pos;
            for (const auto& e : res.trajectory.events) {
                if (t <= e.arc_length) break;
                prev_len = e.arc_length;
                seg_start = e.point;
                seg_dir = e.out_dir;
            }
            expected = seg_start + (t - prev_len) * seg_dir;
            CHECK((folded - expected).norm() < 1e-8);
        }
    }
}

TEST_CASE("equal words force parallel directions") {
    auto P = make_box({1.0, 1.0});
    // parallel vertical starts
    CHECK(symbol_determines_direction_check(
        P, {vec2(0.3, 0.0), vec2(0, 1), std::nullopt},
        {vec2(0.6, 0.0), vec2(0, 1), std::nullopt}, 10));
    // vertical vs diagonal: words differ, implication vacuous
    CHECK(symbol_determines_direction_check(
        P, {vec2(0.3, 0.0), vec2(0, 1), std::nullopt},
        {vec2(0.3, 0.0), vec2(1, 1).normalized(), std::nullopt}, 10));
}

TEST_CASE("lemma-style property on random tables") {
    std::mt19937 rng(5);
    std::normal_distribution<double> g;
    int tested = 0;
    for (int trial = 0; trial < 400 && tested < 40; ++trial) {
        auto P = random_polygon(rng, 6);
        Vec dir = vec2(g(rng), g(rng));
        if (dir.norm() < 1e-6) continue;
        dir.normalized();
        dir.normalize();
        Vec base = P.interior_point();
        Vec off = vec2(g(rng), g(rng)) * 0.02;
        BilliardState s1{base, dir, std::nullopt};
        BilliardState s2{base + off, dir, std::nullopt};
        try {
            CHECK(symbol_determines_direction_check(P, s1, s2, 50));
            ++tested;
        } catch (const Error&) {
            // one of the two hit the skeleton before the horizon; skip
        }
    }
    CHECK(tested >= 40);
}

TEST_CASE("word convexity across a shared-word segment") {
    auto P = make_box({1.0, 1.0});
    Vec dir = vec2(1.0, 0.37).normalized();
    const long h = 12;
    auto left = trace(P, {vec2(0.0, 0.2), dir, std::nullopt},
                      {.max_events = h}, 0.0);
    auto right = trace(P, {vec2(0.0, 0.23), dir, std::nullopt},
                       {.max_events = h}, 0.0);
    if (left.word.letters == right.word.letters) {
        for (double lam : {0.25, 0.5, 0.75}) {
            Vec start = vec2(0.0, 0.2 + lam * 0.03);
            auto mid = trace(P, {start, dir, std::nullopt}, {.max_events = h},
                             0.0);
            CHECK(mid.word.letters == left.word.letters);
        }
    }
}
