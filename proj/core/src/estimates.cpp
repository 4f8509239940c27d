#include "polytube/estimates.hpp"

#include <cmath>
#include <numbers>

namespace ptb {

namespace {

// polyline of the parallel representative at transverse offset `shift`,
// produced by tracing one closing period
std::vector<std::pair<Vec, Vec>> offset_orbit_segments(const ConvexPolytope& P,
                                                       const PeriodicTube& t,
                                                       const Vec& shift) {
    const long k = static_cast<long>(t.word_core_effective().size());
    Vec start = t.x0 + shift;
    TraceLimits lim;
    lim.max_events = k + 1;
    auto tr = trace(P, {start, t.v, std::nullopt}, lim, 0.0);
    std::vector<std::pair<Vec, Vec>> segs;
    Vec prev = start;
    for (long i = 0; i < std::min<long>(k, tr.trajectory.events.size()); ++i) {
        segs.emplace_back(prev, tr.trajectory.events[i].point);
        prev = tr.trajectory.events[i].point;
    }
    return segs;
}

// transversal crossing of two segments in R^n within the table interior
std::optional<Vec> segment_crossing(const ConvexPolytope& P, const Vec& a0,
                                    const Vec& a1, const Vec& b0,
                                    const Vec& b1) {
    Vec da = a1 - a0, db = b1 - b0;
    // closest points of the two lines
    double daa = da.squaredNorm(), dbb = db.squaredNorm(), dab = da.dot(db);
    double denom = daa * dbb - dab * dab;
    if (denom < 1e-14 * daa * dbb) return std::nullopt;  // near parallel
    Vec w = b0 - a0;
    double s = (dbb * da.dot(w) - dab * db.dot(w)) / denom;
    double t = (dab * da.dot(w) - daa * db.dot(w)) / denom;
    if (s < 1e-9 || s > 1 - 1e-9 || t < 1e-9 || t > 1 - 1e-9)
        return std::nullopt;
    Vec pa = a0 + s * da, pb = b0 + t * db;
    if ((pa - pb).norm() > 1e-9) return std::nullopt;  // skew
    if (P.inradius_at(pa) < 1e-9) return std::nullopt; // want interior points
    return pa;
}

}  // namespace

long tube_rotation_density(const ConvexPolytope& P, const PeriodicTube& tube,
                           double eps) {
    return orbit_density_N(tube.transverse_rotation, eps, P.diameter()).N;
}

AngleCheck angle_check(const ConvexPolytope& P, const PeriodicTube& t1,
                       const PeriodicTube& t2, double eps) {
    double cosang = std::abs(t1.v.dot(t2.v));
    if (cosang > 1.0 - 1e-12)
        throw NoIntersectionFound("tubes are parallel");

    // offsets of parallel representatives within radius eps/10
    std::vector<double> offsets{0.0,       eps / 20.0,  -eps / 20.0,
                                eps / 10.0, -eps / 10.0, eps / 40.0,
                                -eps / 40.0};
    std::optional<Vec> crossing;
    const int td = P.dim - 1;
    for (int ax1 = 0; ax1 < td && !crossing; ++ax1) {
        for (int ax2 = 0; ax2 < td && !crossing; ++ax2) {
            for (double o1 : offsets) {
                for (double o2 : offsets) {
                    auto segs1 = offset_orbit_segments(
                        P, t1, Vec(o1 * t1.transverse_basis.col(ax1)));
                    auto segs2 = offset_orbit_segments(
                        P, t2, Vec(o2 * t2.transverse_basis.col(ax2)));
                    for (auto& [a0, a1] : segs1) {
                        for (auto& [b0, b1] : segs2) {
                            auto hit = segment_crossing(P, a0, a1, b0, b1);
                            if (hit) {
                                crossing = hit;
                                break;
                            }
                        }
                        if (crossing) break;
                    }
                    if (crossing) break;
                }
                if (crossing) break;
            }
        }
    }
    if (!crossing)
        throw NoIntersectionFound("no interior crossing among sampled "
                                  "parallel representatives");

    AngleCheck out;
    out.meeting_point = *crossing;
    out.alpha = std::acos(std::clamp(cosang, 0.0, 1.0));
    out.sin_alpha = std::sin(out.alpha);
    out.N1 = tube_rotation_density(P, t1, eps / 5.0);
    out.N2 = tube_rotation_density(P, t2, eps / 5.0);
    double denom = std::min(static_cast<double>(out.N1) * t1.L,
                            static_cast<double>(out.N2) * t2.L);
    out.bound = (4.0 * eps / 5.0) / denom;
    if (t1.q >= 1 && t2.q >= 1) {
        double denom_o = std::min(static_cast<double>(t1.q) * t1.L,
                                  static_cast<double>(t2.q) * t2.L);
        out.bound_rational = (4.0 * eps / 5.0) / denom_o;
    }
    out.pass = out.sin_alpha >= out.bound - 1e-9;
    return out;
}

PhaseVolume phase_volume(const ConvexPolytope& P, const PeriodicTube& tube,
                         double eps) {
    PhaseVolume out;
    out.N = tube_rotation_density(P, tube, eps / 5.0);
    const double L = tube.L;
    const double theta = (4.0 * eps / 5.0) / (2.0 * out.N * L);
    const int n = P.dim;
    const double pi = std::numbers::pi;

    if (n == 3) {
        out.exact = L * std::pow(eps / 10.0, 2) * pi * 2.0 * pi *
                    (1.0 - std::cos(theta));
        // 1 - cos(theta) >= theta^2 / 8 from sin t >= t/2 on [0, pi/3]
        out.lower_bound = (pi * pi / 2500.0) * std::pow(eps, 4) /
                          (static_cast<double>(out.N) * out.N * L);
        return out;
    }

    // general n: (n-1)-ball section times the spherical cap on S^(n-1)
    auto ball_vol = [&](int d, double r) {
        return std::pow(pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0) *
               std::pow(r, d);
    };
    auto sphere_area = [&](int d) {  // area of S^d
        return 2.0 * std::pow(pi, (d + 1) / 2.0) / std::tgamma((d + 1) / 2.0);
    };
    // cap area: A(S^{n-2}) * int_0^theta sin^{n-2}
    const int m = 256;
    double cap = 0.0;
    for (int i = 0; i < m; ++i) {
        double t = theta * (i + 0.5) / m;
        cap += std::pow(std::sin(t), n - 2);
    }
    cap *= theta / m * sphere_area(n - 2);
    out.exact = L * ball_vol(n - 1, eps / 10.0) * cap;
    out.lower_bound = (pi * pi / 2500.0) * std::pow(eps, 2 * n - 2) /
                      (std::pow(static_cast<double>(out.N), n - 1) *
                       std::pow(L, n - 2));
    return out;
}

std::vector<SumCheck> sum_check(const ConvexPolytope& P,
                                const std::vector<double>& eps_grid,
                                const TubeSearchBounds& bounds) {
    std::vector<SumCheck> out;
    const int n = P.dim;
    const double vol = P.volume();
    for (double eps : eps_grid) {
        SumCheck sc;
        sc.eps = eps;
        TubeAtlas atlas = enumerate_tubes(P, eps, bounds);
        sc.complete = atlas.complete_within_bounds;
        sc.M = static_cast<long>(atlas.tubes.size());
        for (const auto& t : atlas.tubes) {
            long N = tube_rotation_density(P, t, eps / 5.0);
            double term = 1.0 / (std::pow(static_cast<double>(N), n - 1) *
                                 std::pow(t.L, n - 2));
            sc.terms.push_back(term);
            sc.lhs += term;
        }
        sc.rhs_scale = vol / std::pow(eps, 2 * n - 2);
        sc.ratio = sc.lhs / sc.rhs_scale;
        out.push_back(std::move(sc));
    }
    return out;
}

}  // namespace ptb
