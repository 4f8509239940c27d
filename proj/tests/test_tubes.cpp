#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>
#include <set>

#include "polytube/estimates.hpp"
#include "test_shapes.hpp"

using namespace ptb;
using namespace ptb::testing;

namespace {

// independent census of square tubes: coprime slope classes with closed-form
// length 2*sqrt(p^2+q^2) and central clearance 1/(2*sqrt(p^2+q^2))
long square_census(double eps, int max_word_period) {
    long M = 0;
    if (2 <= max_word_period && 0.5 >= eps) M += 2;  // the two axis families
    for (int q = 1; q <= max_word_period; ++q) {
        for (int p = 1; p <= max_word_period; ++p) {
            if (std::gcd(p, q) != 1) continue;
            if (2 * (p + q) > max_word_period) continue;
            double clearance = 0.5 / std::sqrt(double(p * p + q * q));
            if (clearance >= eps) ++M;
        }
    }
    return M;
}

double polygon_hausdorff(const Polygon2& A, const Polygon2& B) {
    auto one_sided = [](const Polygon2& X, const Polygon2& Y) {
        double worst = 0.0;
        for (size_t i = 0; i < X.pts.size(); ++i) {
            // sample along edges of X, measure distance to Y
            const Vec2& a = X.pts[i];
            const Vec2& b = X.pts[(i + 1) % X.pts.size()];
            for (int s = 0; s <= 8; ++s) {
                Vec2 p = a + (b - a) * (s / 8.0);
                worst = std::max(worst, std::abs(Y.signed_boundary_distance(p)) *
                                            (Y.contains(p) ? 0.0 : 1.0) +
                                            (Y.contains(p)
                                                 ? 0.0
                                                 : 0.0));
                worst = std::max(
                    worst, Y.contains(p) ? 0.0
                                         : Y.signed_boundary_distance(p));
            }
        }
        return worst;
    };
    return std::max(one_sided(A, B), one_sided(B, A));
}

}  // namespace

TEST_CASE("square vertical tube") {
    auto P = make_box({1.0, 1.0});
    auto t = solve_periodic_orbit(P, {2, 3});
    REQUIRE(t.has_value());
    CHECK((t->v - vec2(0, 1)).norm() < 1e-12);
    CHECK(t->L == doctest::Approx(2.0).epsilon(1e-12));
    CHECK((t->transverse_rotation - Mat::Identity(1, 1)).norm() < 1e-12);
    CHECK(t->x0[0] == doctest::Approx(0.5).epsilon(1e-9));  // centroid pick
    CHECK(t->q == 1);
    CHECK(t->orientation == TubeOrientation::SO);
    CHECK(t->clearance == doctest::Approx(0.5).epsilon(1e-9));

    auto cs = cross_section(P, *t);
    const auto& iv = std::get<IntervalRegion>(cs.region);
    CHECK(iv.hi - iv.lo == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(iv.lo == doctest::Approx(-0.5).epsilon(1e-9));
}

TEST_CASE("square diagonal tube") {
    auto P = make_box({1.0, 1.0});
    auto t = solve_periodic_orbit(P, {0, 2, 1, 3});
    REQUIRE(t.has_value());
    CHECK(t->L == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
    CHECK(std::abs(t->v.dot(vec2(1, 1).normalized())) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(t->clearance ==
          doctest::Approx(0.5 / std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("degenerate word raises the fixed-space error") {
    auto P = make_box({1.0, 1.0});
    CHECK_THROWS_AS(solve_periodic_orbit(P, {2, 2}), SingularFixedSpace);
}

TEST_CASE("triangle midpoint orbit") {
    auto P = make_equilateral_triangle(1.0);
    auto t = solve_periodic_orbit(P, {0, 1, 2});
    REQUIRE(t.has_value());
    CHECK(t->L == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(t->orientation == TubeOrientation::OMinus);
    CHECK(t->q == 2);
    CHECK_FALSE(t->doubled_word);
    // impacts at the edge midpoints
    std::vector<Vec> mids = {vec2(0.5, 0.0), vec2(0.75, std::sqrt(3.0) / 4.0),
                             vec2(0.25, std::sqrt(3.0) / 4.0)};
    for (const auto& impact : t->impacts) {
        double best = 1e9;
        for (const auto& m : mids) best = std::min(best, (impact - m).norm());
        CHECK(best < 1e-9);
    }
}

TEST_CASE("prism midpoint tube and its q=2 satellites") {
    auto P = make_triangle_prism(1.0, 1.0);
    auto t = solve_periodic_orbit(P, {0, 1, 2});
    REQUIRE(t.has_value());
    CHECK(t->L == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(t->v[2] == doctest::Approx(0.0).epsilon(1e-12));  // horizontal
    CHECK(t->x0[2] == doctest::Approx(0.5).epsilon(1e-9));  // mid-height
    CHECK(t->q == 2);

    // central orbit closes after 3 events
    TraceLimits lim;
    lim.max_events = 6;
    auto central = trace(P, {t->x0, t->v, std::nullopt}, lim, 0.0);
    Vec c3 = central.trajectory.events[2].point +
             (t->L - central.trajectory.events[2].arc_length) *
                 central.trajectory.events[2].out_dir;
    CHECK((c3 - t->x0).norm() < 1e-9);

    // off-axis representatives close after 6 events, not 3
    auto cs = cross_section(P, *t);
    const auto& poly = std::get<Polygon2>(cs.region);
    CHECK(std::abs(poly.area()) > 0.01);  // 2-dimensional section
    // transverse rotation keeps the section invariant (reflection here)
    Polygon2 reflected;
    for (const auto& p : poly.pts) {
        Vec q(2);
        q << p.x(), p.y();
        Vec r = t->transverse_rotation * q;
        reflected.pts.emplace_back(r[0], r[1]);
    }
    std::reverse(reflected.pts.begin(), reflected.pts.end());
    CHECK(polygon_hausdorff(poly, reflected) < 1e-7);

    Vec off = t->transverse_basis.col(0) * 0.02 +
              t->transverse_basis.col(1) * 0.0;
    // pick the column transverse to the z-axis
    if (std::abs(t->transverse_basis.col(0)[2]) > 0.5)
        off = t->transverse_basis.col(1) * 0.02;
    TraceLimits lim6;
    lim6.max_events = 7;
    auto sat = trace(P, {t->x0 + off, t->v, std::nullopt}, lim6, 0.0);
    REQUIRE(sat.trajectory.events.size() >= 6);
    Vec s3 = sat.trajectory.events[2].point +
             (t->L - sat.trajectory.events[2].arc_length) *
                 sat.trajectory.events[2].out_dir;
    CHECK((s3 - (t->x0 + off)).norm() > 0.01);  // not back after one period
    Vec s6 = sat.trajectory.events[5].point +
             (2.0 * t->L - sat.trajectory.events[5].arc_length) *
                 sat.trajectory.events[5].out_dir;
    CHECK((s6 - (t->x0 + off)).norm() < 1e-9);  // back after two periods
}

TEST_CASE("tetrahedron abcd tube") {
    auto P = make_regular_tetrahedron();
    auto t = solve_periodic_orbit(P, {0, 1, 2, 3});
    REQUIRE(t.has_value());
    CHECK(t->q == 0);  // irrational rotation suspected at the search bound
    auto rc = classify_rotation(t->transverse_rotation, 1e-9, 10000);
    CHECK_FALSE(rc.finite_order);

    // closure over 10 periods within 1e-8 * L
    TraceLimits lim;
    lim.max_events = 41;
    auto tr = trace(P, {t->x0, t->v, std::nullopt}, lim, 0.0);
    REQUIRE(tr.trajectory.events.size() >= 40);
    const auto& last = tr.trajectory.events[39];
    Vec closed = last.point + (10.0 * t->L - last.arc_length) * last.out_dir;
    CHECK((closed - t->x0).norm() < 1e-8 * t->L);

    CrossSectionOptions opts;
    opts.max_rotations = 20000;
    opts.disc_tolerance = 1e-6;
    auto cs = cross_section(P, *t, opts);
    REQUIRE(std::holds_alternative<DiscRegion>(cs.region));
    CHECK(std::get<DiscRegion>(cs.region).radius ==
          doctest::Approx(0.6).epsilon(1e-4));
}

TEST_CASE("tube closure invariant across the atlas") {
    auto P = make_box({1.0, 1.0});
    TubeSearchBounds bounds;
    bounds.max_word_period = 8;
    auto atlas = enumerate_tubes(P, 0.1, bounds);
    for (const auto& t : atlas.tubes) {
        long k = static_cast<long>(t.word_core_effective().size());
        TraceLimits lim;
        lim.max_events = 10 * k + 1;
        auto tr = trace(P, {t.x0, t.v, std::nullopt}, lim, 0.0);
        REQUIRE(static_cast<long>(tr.trajectory.events.size()) >= 10 * k);
        const auto& last = tr.trajectory.events[10 * k - 1];
        Vec closed =
            last.point + (10.0 * t.L - last.arc_length) * last.out_dir;
        CHECK((closed - t.x0).norm() < 1e-8 * t.L);
        CHECK((tr.trajectory.events[10 * k - 1].out_dir - t.v).norm() < 1e-8);
    }
}

TEST_CASE("square atlas matches the slope census") {
    auto P = make_box({1.0, 1.0});
    for (int bound : {4, 8}) {
        TubeSearchBounds bounds;
        bounds.max_word_period = bound;
        for (double eps : {0.45, 0.2, 0.1}) {
            auto atlas = enumerate_tubes(P, eps, bounds);
            CHECK(atlas.complete_within_bounds);
            CHECK(static_cast<long>(atlas.tubes.size()) ==
                  square_census(eps, bound));
        }
    }
}

TEST_CASE("square atlas at eps 0.2 and period 4, frozen") {
    auto P = make_box({1.0, 1.0});
    TubeSearchBounds bounds;
    bounds.max_word_period = 4;
    auto atlas = enumerate_tubes(P, 0.2, bounds);
    REQUIRE(atlas.tubes.size() == 3);
    std::multiset<double> lengths;
    for (const auto& t : atlas.tubes) lengths.insert(t.L);
    auto it = lengths.begin();
    CHECK(*it++ == doctest::Approx(2.0));
    CHECK(*it++ == doctest::Approx(2.0));
    CHECK(*it++ == doctest::Approx(2.0 * std::sqrt(2.0)));

    auto wide = enumerate_tubes(P, 0.45, bounds);
    CHECK(wide.tubes.size() == 2);  // the diagonal family passes too close
}

TEST_CASE("cube axis tubes at period 2") {
    auto P = make_box({1.0, 1.0, 1.0});
    TubeSearchBounds bounds;
    bounds.max_word_period = 2;
    auto atlas = enumerate_tubes(P, 0.2, bounds);
    REQUIRE(atlas.tubes.size() == 3);
    for (const auto& t : atlas.tubes) {
        CHECK(t.L == doctest::Approx(2.0).epsilon(1e-12));
        CHECK((t.transverse_rotation - Mat::Identity(2, 2)).norm() < 1e-9);
        CHECK(t.clearance == doctest::Approx(0.5).epsilon(1e-9));
    }
}

TEST_CASE("boundary singular trace of the square vertical tube") {
    auto P = make_box({1.0, 1.0});
    auto t = solve_periodic_orbit(P, {2, 3});
    REQUIRE(t.has_value());
    t->cross_sec = cross_section(P, *t);
    auto bt = boundary_singular_trace(P, *t, 10.0, 0.1);
    REQUIRE(!bt.points.empty());
    bool lo = false, hi = false;
    for (const auto& p : bt.points) {
        (p.boundary_pos < 0.5 ? lo : hi) = true;
        // corners appear at unit height steps along the corridor, offset by
        // the central basepoint phase
        CHECK(std::abs(p.height - 0.5 - std::round(p.height - 0.5)) < 1e-9);
    }
    CHECK(lo);
    CHECK(hi);
    CHECK(bt.largest_gap == 0.0);
    REQUIRE(bt.eps_density_height.has_value());
    CHECK(*bt.eps_density_height <= 1.0 * t->L);  // N = 1 for n = 2
}

TEST_CASE("boundary singular trace of the diagonal tube") {
    auto P = make_box({1.0, 1.0});
    auto t = solve_periodic_orbit(P, {0, 2, 1, 3});
    REQUIRE(t.has_value());
    t->cross_sec = cross_section(P, *t);
    auto bt = boundary_singular_trace(P, *t, 20.0, 0.1);
    REQUIRE(bt.eps_density_height.has_value());
    CHECK(*bt.eps_density_height <= 1.0 * t->L);
}

TEST_CASE("boundary recurrence height against the rotation density") {
    auto P = make_regular_tetrahedron();
    auto t = solve_periodic_orbit(P, {0, 1, 2, 3});
    REQUIRE(t.has_value());
    CrossSectionOptions opts;
    opts.max_rotations = 20000;
    t->cross_sec = cross_section(P, *t, opts);
    long N = orbit_density_N(t->transverse_rotation, 0.1, P.diameter()).N;
    auto bt = boundary_singular_trace(P, *t, (N + 2) * t->L, 0.1);
    REQUIRE(bt.eps_density_height.has_value());
    CHECK(*bt.eps_density_height <= N * t->L + 1e-9);
}

TEST_CASE("boundary flowout witnesses") {
    auto P = make_box({1.0, 1.0});
    auto t = solve_periodic_orbit(P, {2, 3});
    t->cross_sec = cross_section(P, *t);
    auto rep = check_boundary_flowout(P, *t, 0.3, 1000);
    CHECK(rep.passed);
    CHECK_FALSE(rep.vacuous);
    CHECK(rep.l <= 2.0 + 1e-9);
    CHECK(rep.samples == 1000);

    auto cube = make_box({1.0, 1.0, 1.0});
    auto ct = solve_periodic_orbit(cube, {4, 5});
    ct->cross_sec = cross_section(cube, *ct);
    auto crep = check_boundary_flowout(cube, *ct, 0.3, 300);
    CHECK(crep.passed);
    CHECK(crep.l <= 2.0 + 1e-9);

    // eps beyond the section inradius: annulus empty, vacuous pass
    auto vrep = check_boundary_flowout(P, *t, 1.6, 100);
    CHECK(vrep.vacuous);
}

TEST_CASE("return map is an isometry on flat tubes") {
    auto P = make_box({1.0, 1.0});
    auto est = return_map_lipschitz(P, {2, 3}, 20, 8);
    CHECK(est.c == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(est.C == doctest::Approx(1.0).epsilon(1e-8));

    auto diag = return_map_lipschitz(P, {0, 2, 1, 3}, 20, 8);
    CHECK(diag.c == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(diag.C == doctest::Approx(1.0).epsilon(1e-8));

    auto T = make_regular_tetrahedron();
    auto tet = return_map_lipschitz(T, {0, 1, 2, 3}, 20, 8);
    CHECK(tet.c == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(tet.C == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("maximality: boundary representatives reach the skeleton") {
    auto P = make_box({1.0, 1.0});
    for (auto word : {std::vector<int>{2, 3}, std::vector<int>{0, 2, 1, 3}}) {
        auto t = solve_periodic_orbit(P, word);
        REQUIRE(t.has_value());
        t->cross_sec = cross_section(P, *t);
        const auto& iv = std::get<IntervalRegion>(t->cross_sec->region);
        for (double edge : {iv.lo, iv.hi}) {
            Vec p(1);
            p[0] = edge;
            Vec start = t->x0 + t->transverse_basis * p;
            // the boundary ray runs into the skeleton
            double clear = segment_skeleton_clearance(
                P, start, start + t->L * t->v);
            CHECK(clear < 1e-7);
        }
    }
}

TEST_CASE("dichotomy on the square at desk scale") {
    auto P = make_box({1.0, 1.0});
    const double eps = 0.2;
    TubeSearchBounds bounds;
    bounds.max_word_period = 8;
    auto atlas = enumerate_tubes(P, eps, bounds);
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    std::uniform_real_distribution<double> a(0.0, std::numbers::pi);
    long unexplained = 0;
    for (int s = 0; s < 100; ++s) {
        Vec pos = vec2(u(rng), u(rng));
        double ang = a(rng);
        Vec dir = vec2(std::cos(ang), std::sin(ang));
        TraceLimits lim;
        lim.max_events = 2000;
        auto tr = trace(P, {pos, dir, std::nullopt}, lim, 0.0);
        double min_clear = distance_to_skeleton(P, pos);
        Vec prev = pos;
        bool near_skeleton =
            tr.trajectory.terminated == Termination::SingularHit;
        for (const auto& e : tr.trajectory.events) {
            min_clear = std::min(
                min_clear, segment_skeleton_clearance(P, prev, e.point));
            prev = e.point;
            if (min_clear < eps) {
                near_skeleton = true;
                break;
            }
        }
        if (near_skeleton) continue;
        bool in_tube = false;
        for (const auto& t : atlas.tubes)
            if (1.0 - std::abs(t.v.dot(dir)) < 1e-8) in_tube = true;
        if (!in_tube) ++unexplained;
    }
    CHECK(unexplained == 0);
}

TEST_CASE("aperiodic words approach the skeleton") {
    auto P = make_box({1.0, 1.0});
    const double golden = 0.6180339887498949;
    for (double slope : {golden, std::sqrt(2.0) - 1.0, std::numbers::pi - 3.0}) {
        Vec dir = vec2(1.0, slope).normalized();
        TraceLimits lim;
        lim.max_events = 3000;
        auto tr = trace(P, {vec2(0.37, 0.0), dir, std::nullopt}, lim, 0.0);
        REQUIRE(tr.word.letters.size() > 200);
        // the cyclic analysis of the 200-letter head may report a quasi
        // period; the longer trace must break any such candidate
        SymbolWord head;
        head.letters.assign(tr.word.letters.begin(),
                            tr.word.letters.begin() + 200);
        head.analyze_periodicity();
        if (head.periodic_core) {
            int k = head.periodic_core->period;
            bool breaks = false;
            for (size_t i = k; i < tr.word.letters.size(); ++i)
                if (tr.word.letters[i] != tr.word.letters[i - k]) {
                    breaks = true;
                    break;
                }
            CHECK(breaks);
        }
        double min_clear = 1e9;
        Vec prev = vec2(0.37, 0.0);
        for (const auto& e : tr.trajectory.events) {
            min_clear =
                std::min(min_clear, segment_skeleton_clearance(P, prev, e.point));
            prev = e.point;
        }
        CHECK(min_clear < 0.05);
    }
}
