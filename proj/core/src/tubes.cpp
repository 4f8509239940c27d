#include "polytube/tubes.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "polytube/flow.hpp"

namespace ptb {

namespace {

Mat transverse_basis_for(const Vec& v) {
    const int n = static_cast<int>(v.size());
    Mat col(n, 1);
    col.col(0) = v;
    Eigen::HouseholderQR<Mat> qr(col);
    Mat Q = qr.householderQ() * Mat::Identity(n, n);
    if (Q.col(0).dot(v) < 0) Q = -Q;
    return Q.rightCols(n - 1);
}

// constraint region for one unfolded facet, in transverse coordinates around
// the ray through `anchor`
struct TransverseRegion {
    std::vector<Vec> points;  // projected facet vertices ((n-1)-dim coords)
};

TransverseRegion facet_region(const ConvexPolytope& P, const AffineMap& copy,
                              int facet, const Mat& B, const Vec& anchor) {
    TransverseRegion reg;
    for (int id : P.facets[facet].vertex_ids) {
        Vec y = copy.apply(P.vertices[id]);
        reg.points.push_back(B.transpose() * (y - anchor));
    }
    return reg;
}

struct SectionBuild {
    // 1-dim: interval; 2-dim: polygon clipped incrementally
    int dim = 0;
    double lo = 0, hi = 0;
    Polygon2 poly;
    bool empty = false;

    void init_full() {
        lo = -1e18;
        hi = 1e18;
    }
    void clip_region(const TransverseRegion& reg, const Mat* rot) {
        if (empty) return;
        if (dim == 1) {
            double a = std::numeric_limits<double>::infinity();
            double b = -a;
            for (const auto& p : reg.points) {
                double x = p[0];
                if (rot) x *= (*rot)(0, 0);
                a = std::min(a, x);
                b = std::max(b, x);
            }
            lo = std::max(lo, a);
            hi = std::min(hi, b);
            if (hi - lo <= 0) empty = true;
        } else {
            std::vector<Vec2> pts;
            for (const auto& p : reg.points) {
                Vec q = rot ? Vec((*rot) * p) : p;
                pts.emplace_back(q[0], q[1]);
            }
            Polygon2 hull = convex_hull(pts);
            if (hull.empty()) {
                empty = true;
                return;
            }
            poly = poly.pts.empty() ? hull : intersect(poly, hull);
            if (poly.empty()) empty = true;
        }
    }
};

double region_min_extent(const SectionBuild& s) {
    if (s.empty) return 0.0;
    if (s.dim == 1) return s.hi - s.lo;
    return s.poly.empty() ? 0.0 : std::sqrt(std::abs(s.poly.area()));
}

Vec section_centroid(const SectionBuild& s) {
    if (s.dim == 1) {
        Vec c(1);
        c[0] = 0.5 * (s.lo + s.hi);
        return c;
    }
    Vec2 c = s.poly.centroid();
    Vec out(2);
    out << c.x(), c.y();
    return out;
}

SectionBuild one_period_section(const ConvexPolytope& P,
                                const UnfoldingChain& chain, const Mat& B,
                                const Vec& anchor) {
    SectionBuild s;
    s.dim = P.dim - 1;
    s.init_full();
    for (size_t j = 0; j < chain.word.size(); ++j) {
        auto reg = facet_region(P, chain.copies[j], chain.word[j], B, anchor);
        s.clip_region(reg, nullptr);
        if (s.empty) break;
    }
    return s;
}

SectionBuild accumulate_section(const ConvexPolytope& P,
                                const UnfoldingChain& chain, const Mat& B,
                                const Vec& anchor, const Mat& Rt, long rounds) {
    SectionBuild s;
    s.dim = P.dim - 1;
    s.init_full();
    std::vector<TransverseRegion> base;
    for (size_t j = 0; j < chain.word.size(); ++j)
        base.push_back(facet_region(P, chain.copies[j], chain.word[j], B, anchor));
    Mat rot = Mat::Identity(s.dim, s.dim);
    for (long i = 0; i < rounds && !s.empty; ++i) {
        for (const auto& reg : base) s.clip_region(reg, &rot);
        rot = Rt * rot;
    }
    return s;
}

}  // namespace

TubeMapper::TubeMapper(const ConvexPolytope& P, const PeriodicTube& tube)
    : table_(P), tube_(tube), chain_(unfold(P, tube.word_core_effective())) {}

Vec TubeMapper::point(const Vec& transverse, double t) const {
    const Mat& Rt = tube_.transverse_rotation;
    Vec q = transverse;
    double s = t;
    long guard = 0;
    while (s >= tube_.L && guard++ < 100000) {
        s -= tube_.L;
        q = Rt.transpose() * q;  // inverse rotation
    }
    while (s < 0 && guard++ < 100000) {
        s += tube_.L;
        q = Rt * q;
    }
    Vec origin = tube_.x0 + tube_.transverse_basis * q;
    return fold_ray_point(table_, chain_, origin, tube_.v, s);
}

Vec tube_point(const ConvexPolytope& P, const PeriodicTube& tube, const Vec& p,
               double t) {
    return TubeMapper(P, tube).point(p, t);
}

std::optional<PeriodicTube> solve_periodic_orbit(
    const ConvexPolytope& P, const std::vector<int>& word_core) {
    const int n = P.dim;
    bool no_fixed_direction = false;
    auto attempt = [&](const std::vector<int>& word,
                       bool doubled) -> std::optional<PeriodicTube> {
        no_fixed_direction = false;
        UnfoldingChain chain = unfold(P, word);
        const Mat& R0 = chain.linear_part();
        const Vec& tau = chain.translation();

        // fixed space of the linear part
        Eigen::JacobiSVD<Mat> svd(R0 - Mat::Identity(n, n),
                                  Eigen::ComputeFullV);
        std::vector<int> null_cols;
        for (int i = 0; i < n; ++i)
            if (svd.singularValues()[i] < 1e-9) null_cols.push_back(i);
        if (null_cols.empty()) {
            no_fixed_direction = true;  // doubling can still close the word
            return std::nullopt;
        }

        Mat E(n, null_cols.size());
        for (size_t i = 0; i < null_cols.size(); ++i)
            E.col(i) = svd.matrixV().col(null_cols[i]);
        Vec tau_E = E * (E.transpose() * tau);
        double L = tau_E.norm();
        if (L < 1e-9) throw SingularFixedSpace(
            "closing translation vanishes on the fixed space");
        Vec v = tau_E / L;

        // transverse offset of the central ray: (I - R0) x = tau - L v
        Vec rhs = tau - L * v;
        Vec x_pin = (Mat::Identity(n, n) - R0)
                        .completeOrthogonalDecomposition()
                        .solve(rhs);
        if (((Mat::Identity(n, n) - R0) * x_pin - rhs).norm() > 1e-7)
            return std::nullopt;

        Mat B = transverse_basis_for(v);
        Mat Rt = B.transpose() * R0 * B;

        // quick cross-section for centring the free components; 64 rounds
        // cover every finite transverse order seen at desk scale and
        // approximate the irrational closure well enough for a centroid
        SectionBuild quick;
        {
            long rounds = 64;
            Mat Rk = Mat::Identity(n - 1, n - 1);
            for (long i = 1; i <= 64; ++i) {
                Rk = Rt * Rk;
                if ((Rk - Mat::Identity(n - 1, n - 1)).norm() < 1e-9) {
                    rounds = i;
                    break;
                }
            }
            quick = accumulate_section(P, chain, B, x_pin, Rt, rounds);
        }
        if (quick.empty || region_min_extent(quick) < 1e-9) return std::nullopt;
        Vec c = section_centroid(quick);
        // shift only along the fixed directions of the transverse rotation
        Eigen::JacobiSVD<Mat> svdt(Rt - Mat::Identity(n - 1, n - 1),
                                   Eigen::ComputeFullV);
        Vec c_free = Vec::Zero(n - 1);
        for (int i = 0; i < n - 1; ++i)
            if (svdt.singularValues()[i] < 1e-9) {
                Vec dir = svdt.matrixV().col(i);
                c_free += dir * dir.dot(c);
            }
        Vec x0 = x_pin + B * c_free;

        // central ray segment inside the table
        double t_in = -1e18, t_out = 1e18;
        for (const auto& h : P.halfspaces) {
            double vn = h.normal.dot(v);
            double rem = h.offset - h.normal.dot(x0);
            if (std::abs(vn) < 1e-14) {
                if (rem < 0) return std::nullopt;
                continue;
            }
            double t = rem / vn;
            if (vn > 0)
                t_out = std::min(t_out, t);
            else
                t_in = std::max(t_in, t);
        }
        if (t_out - t_in < 1e-9) return std::nullopt;
        Vec m = x0 + 0.5 * (t_in + t_out) * v;

        // validate by tracing one closing length
        const long k = static_cast<long>(word.size());
        TraceLimits lim;
        lim.max_events = k + 1;
        lim.max_length = 2.0 * L + 1.0;
        TraceResult tr;
        try {
            tr = trace(P, {m, v, std::nullopt}, lim, 0.0);
        } catch (const StuckState&) {
            return std::nullopt;
        }
        if (static_cast<long>(tr.word.letters.size()) < k) return std::nullopt;
        for (long i = 0; i < k; ++i)
            if (tr.word.letters[i] != word[i]) return std::nullopt;
        const auto& last = tr.trajectory.events[k - 1];
        if (last.arc_length >= L + 1e-9) return std::nullopt;
        Vec pos_close = last.point + (L - last.arc_length) * last.out_dir;
        if ((pos_close - m).norm() > 1e-8 * std::max(1.0, L))
            return std::nullopt;
        if ((last.out_dir - v).norm() > 1e-8) return std::nullopt;

        PeriodicTube tube;
        tube.word_core = word_core;
        tube.doubled_word = doubled;
        tube.x0 = m;
        tube.v = v;
        tube.L = L;
        tube.rotation = R0;
        tube.transverse_basis = B;
        tube.transverse_rotation = Rt;
        tube.orientation = (Rt.determinant() > 0) ? TubeOrientation::SO
                                                  : TubeOrientation::OMinus;
        RotationClass rc = classify_rotation(Rt, 1e-9, 10000);
        tube.q = rc.finite_order ? rc.order : 0;
        for (long i = 0; i < k; ++i)
            tube.impacts.push_back(tr.trajectory.events[i].point);

        // clearance of the closed central geodesic
        double clear = std::numeric_limits<double>::infinity();
        Vec prev = m;
        for (long i = 0; i < k; ++i) {
            clear = std::min(clear, segment_skeleton_clearance(
                                        P, prev, tr.trajectory.events[i].point));
            prev = tr.trajectory.events[i].point;
        }
        clear = std::min(clear, segment_skeleton_clearance(P, prev, pos_close));
        tube.clearance = clear;
        tube.maximal = true;
        return tube;
    };

    auto direct = attempt(word_core, false);
    if (direct) return direct;
    if (!no_fixed_direction) return std::nullopt;

    // orientation-reversing closings may need two periods
    std::vector<int> twice = word_core;
    twice.insert(twice.end(), word_core.begin(), word_core.end());
    return attempt(twice, true);
}

CrossSection cross_section(const ConvexPolytope& P, const PeriodicTube& tube,
                           const CrossSectionOptions& opts) {
    UnfoldingChain chain = unfold(P, tube.word_core_effective());
    const Mat& B = tube.transverse_basis;
    const Mat& Rt = tube.transverse_rotation;

    if (P.dim == 2) {
        long rounds = (tube.q >= 1) ? tube.q : 2;
        SectionBuild s = accumulate_section(P, chain, B, tube.x0, Rt, rounds);
        if (s.empty) throw EmptyCrossSection("cross-section has no interior");
        CrossSection cs;
        cs.region = IntervalRegion{s.lo, s.hi};
        return cs;
    }
    if (P.dim != 3)
        throw UnsupportedCrossSection("cross-sections implemented for dim <= 3");

    if (tube.q >= 1) {
        SectionBuild s = accumulate_section(P, chain, B, tube.x0, Rt, tube.q);
        if (s.empty || s.poly.empty())
            throw EmptyCrossSection("cross-section has no interior");
        CrossSection cs;
        cs.region = s.poly;
        return cs;
    }

    // irrational transverse rotation: accumulate the constraint orbit closure
    std::vector<TransverseRegion> base;
    for (size_t j = 0; j < chain.word.size(); ++j)
        base.push_back(
            facet_region(P, chain.copies[j], chain.word[j], B, tube.x0));

    // limit radius: closest tangent line over all constraints and rotations
    double r_lim = std::numeric_limits<double>::infinity();
    Polygon2 acc;
    Mat rot = Mat::Identity(2, 2);
    for (long i = 0; i < opts.max_rotations; ++i) {
        for (const auto& reg : base) {
            std::vector<Vec2> pts;
            for (const auto& p : reg.points) {
                Vec q = rot * p;
                pts.emplace_back(q[0], q[1]);
            }
            Polygon2 hull = convex_hull(pts);
            if (hull.empty()) throw EmptyCrossSection("degenerate constraint");
            if (i == 0)
                r_lim = std::min(r_lim,
                                 -hull.signed_boundary_distance(Vec2::Zero()));
            acc = acc.pts.empty() ? hull : intersect(acc, hull);
            if (acc.empty()) throw EmptyCrossSection("cross-section has no interior");
        }
        rot = Rt * rot;
        if (i >= 512 && (i & (i - 1)) == 0) {  // powers of two: convergence test
            if (hausdorff_to_disc(acc, r_lim) < opts.disc_tolerance) break;
        }
    }
    CrossSection cs;
    if (hausdorff_to_disc(acc, r_lim) < opts.disc_tolerance)
        cs.region = DiscRegion{r_lim};
    else
        cs.region = acc;
    return cs;
}

// --- enumeration ---------------------------------------------------------------

namespace {

// canonical under reversal: no cyclic rotation of the reversed word is
// lexicographically smaller
bool reversal_canonical(const std::vector<int>& w) {
    const size_t p = w.size();
    for (size_t s = 0; s < p; ++s) {
        for (size_t i = 0; i < p; ++i) {
            int a = w[i];
            int b = w[(2 * p - 1 - i - s) % p];
            if (a < b) break;
            if (a > b) return false;
        }
    }
    return true;
}

// Lyndon words of length <= nmax over {0..k-1} (Duval), filtered to cyclically
// proper words that are canonical under reversal.
template <typename Visit>
void primitive_words(int k, int nmax, long max_candidates, bool* truncated,
                     Visit visit) {
    std::vector<int> w;
    w.reserve(nmax);
    w.push_back(0);
    long count = 0;
    while (true) {
        if (w.size() >= 2) {
            bool proper = w.front() != w.back();
            for (size_t i = 0; i + 1 < w.size() && proper; ++i)
                proper = w[i] != w[i + 1];
            if (proper && reversal_canonical(w)) {
                if (++count > max_candidates) {
                    *truncated = true;
                    return;
                }
                visit(w);
            }
        }
        // Duval successor in place
        size_t len = w.size();
        w.resize(nmax);
        for (int i = static_cast<int>(len); i < nmax; ++i) w[i] = w[i % len];
        while (!w.empty() && w.back() == k - 1) w.pop_back();
        if (w.empty()) return;
        ++w.back();
    }
}

std::string tube_key(const PeriodicTube& t) {
    auto rnd = [](double x) { return std::llround(x * 1e6); };
    std::vector<std::vector<long long>> pts;
    for (const auto& p : t.impacts) {
        std::vector<long long> q;
        for (int i = 0; i < p.size(); ++i) q.push_back(rnd(p[i]));
        pts.push_back(q);
    }
    std::sort(pts.begin(), pts.end());
    std::ostringstream os;
    os << rnd(t.L) << '#';
    for (auto& q : pts) {
        for (long long c : q) os << c << ',';
        os << ';';
    }
    return os.str();
}

}  // namespace

TubeAtlas enumerate_tubes(const ConvexPolytope& P, double eps,
                          const TubeSearchBounds& bounds) {
    TubeAtlas atlas;
    atlas.eps = eps;
    atlas.search_bounds = bounds;

    std::vector<std::vector<int>> candidates;
    bool truncated = false;
    primitive_words(static_cast<int>(P.halfspaces.size()),
                    bounds.max_word_period, bounds.max_candidates, &truncated,
                    [&](const std::vector<int>& w) { candidates.push_back(w); });
    atlas.complete_within_bounds = !truncated;

    const int nthreads = std::max(1, bounds.threads);
    std::vector<std::vector<PeriodicTube>> found(nthreads);
    auto work = [&](int tid) {
        for (size_t i = tid; i < candidates.size(); i += nthreads) {
            std::optional<PeriodicTube> tube;
            try {
                tube = solve_periodic_orbit(P, candidates[i]);
            } catch (const Error&) {
                continue;
            }
            if (!tube) continue;
            if (tube->L > bounds.max_length) continue;
            if (tube->clearance < eps) continue;
            found[tid].push_back(std::move(*tube));
        }
    };
    if (nthreads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(work, t);
        for (auto& th : pool) th.join();
    }

    std::vector<PeriodicTube> merged;
    for (auto& part : found)
        for (auto& t : part) merged.push_back(std::move(t));
    std::sort(merged.begin(), merged.end(),
              [](const PeriodicTube& a, const PeriodicTube& b) {
                  if (a.L != b.L) return a.L < b.L;
                  return a.word_core < b.word_core;
              });
    std::map<std::string, bool> seen;
    for (auto& t : merged) {
        std::string key = tube_key(t);
        if (seen.count(key)) continue;
        seen[key] = true;
        try {
            CrossSectionOptions opts;
            opts.max_rotations = 4096;
            t.cross_sec = cross_section(P, t, opts);
        } catch (const Error&) {
            t.cross_sec.reset();
        }
        atlas.tubes.push_back(std::move(t));
    }
    return atlas;
}

// --- boundary traces -------------------------------------------------------------

BoundaryTrace boundary_singular_trace(const ConvexPolytope& P,
                                      const PeriodicTube& tube, double height,
                                      double eps_density) {
    if (!tube.cross_sec)
        throw Error("tube needs a computed cross-section");
    const CrossSection& cs = *tube.cross_sec;
    UnfoldingChain chain = unfold(P, tube.word_core_effective());
    const Mat& B = tube.transverse_basis;
    const double tol = 1e-7;

    BoundaryTrace out;
    std::vector<BoundaryTracePoint> items;

    const long periods =
        static_cast<long>(std::ceil(height / tube.L)) + 1;

    if (P.dim == 2) {
        const auto& iv = std::get<IntervalRegion>(cs.region);
        out.boundary_length = 0.0;
        AffineMap Rm = AffineMap::identity(2);
        for (long m = 0; m < periods; ++m) {
            for (size_t j = 0; j < chain.word.size(); ++j) {
                for (size_t s = 0; s < P.skeleton.size(); ++s) {
                    Vec y = Rm.apply(chain.copies[j].apply(
                        P.vertices[P.skeleton[s].vertex_ids[0]]));
                    double h = tube.v.dot(y - tube.x0);
                    if (h < -tol || h > height) continue;
                    double xi = (B.transpose() * (y - tube.x0))(0);
                    if (std::abs(xi - iv.lo) < tol)
                        items.push_back({0.0, h, false, 0.0});
                    else if (std::abs(xi - iv.hi) < tol)
                        items.push_back({1.0, h, false, 0.0});
                }
            }
            Rm = chain.composed.compose(Rm);
        }
        std::sort(items.begin(), items.end(),
                  [](const auto& a, const auto& b) { return a.height < b.height; });
        bool lo_hit = false, hi_hit = false;
        out.largest_gap = std::numeric_limits<double>::infinity();
        for (const auto& it : items) {
            if (it.boundary_pos < 0.5)
                lo_hit = true;
            else
                hi_hit = true;
            if (lo_hit && hi_hit && !out.eps_density_height) {
                out.eps_density_height = it.height;
                out.largest_gap = 0.0;
            }
        }
        out.points = std::move(items);
        return out;
    }

    if (P.dim != 3)
        throw UnsupportedCrossSection("boundary trace implemented for dim <= 3");

    const Polygon2* poly = std::get_if<Polygon2>(&cs.region);
    const DiscRegion* disc = std::get_if<DiscRegion>(&cs.region);
    double perimeter = poly ? poly->perimeter()
                            : 2.0 * std::numbers::pi * disc->radius;
    out.boundary_length = perimeter;

    AffineMap Rm = AffineMap::identity(3);
    for (long m = 0; m < periods; ++m) {
        for (size_t j = 0; j < chain.word.size(); ++j) {
            const AffineMap copy = Rm.compose(chain.copies[j]);
            for (size_t s = 0; s < P.skeleton.size(); ++s) {
                auto ids = P.skeleton[s].vertex_ids;
                Vec a3 = copy.apply(P.vertices[ids.front()]);
                Vec b3 = copy.apply(P.vertices[ids.back()]);
                Vec2 pa((B.transpose() * (a3 - tube.x0))(0),
                        (B.transpose() * (a3 - tube.x0))(1));
                Vec2 pb((B.transpose() * (b3 - tube.x0))(0),
                        (B.transpose() * (b3 - tube.x0))(1));
                double ha = tube.v.dot(a3 - tube.x0);
                double hb = tube.v.dot(b3 - tube.x0);

                auto push_point = [&](double u) {
                    Vec2 p = pa + u * (pb - pa);
                    double h = ha + u * (hb - ha);
                    if (h < -tol || h > height) return;
                    double pos = poly ? poly->boundary_parameter(p)
                                      : std::fmod(std::atan2(p.y(), p.x()) +
                                                      2.0 * std::numbers::pi,
                                                  2.0 * std::numbers::pi) *
                                            disc->radius;
                    items.push_back({pos, h, false, 0.0});
                };

                if (poly) {
                    // collinear overlap with an edge -> arc item
                    bool overlapped = false;
                    const auto& pts = poly->pts;
                    for (size_t e = 0; e < pts.size() && !overlapped; ++e) {
                        const Vec2& q0 = pts[e];
                        const Vec2& q1 = pts[(e + 1) % pts.size()];
                        Vec2 d = q1 - q0;
                        double len = d.norm();
                        Vec2 nrm(d.y() / len, -d.x() / len);
                        double da = nrm.dot(pa - q0), db = nrm.dot(pb - q0);
                        if (std::abs(da) < tol && std::abs(db) < tol) {
                            // project both ends onto the edge parameter
                            double ta = d.dot(pa - q0) / (len * len);
                            double tb = d.dot(pb - q0) / (len * len);
                            double lo_t = std::clamp(std::min(ta, tb), 0.0, 1.0);
                            double hi_t = std::clamp(std::max(ta, tb), 0.0, 1.0);
                            if (hi_t - lo_t > 1e-12) {
                                double base = poly->boundary_parameter(q0);
                                double h = std::min(ha, hb);
                                if (h <= height) {
                                    items.push_back({base + lo_t * len, h, true,
                                                     base + hi_t * len});
                                }
                                overlapped = true;
                            }
                        }
                    }
                    if (!overlapped) {
                        // transversal crossings of the boundary
                        for (size_t e = 0; e < pts.size(); ++e) {
                            const Vec2& q0 = pts[e];
                            const Vec2& q1 = pts[(e + 1) % pts.size()];
                            Vec2 r = pb - pa, sdir = q1 - q0;
                            double denom = r.x() * sdir.y() - r.y() * sdir.x();
                            if (std::abs(denom) < 1e-14) continue;
                            Vec2 qp = q0 - pa;
                            double u = (qp.x() * sdir.y() - qp.y() * sdir.x()) / denom;
                            double w = (qp.x() * r.y() - qp.y() * r.x()) / -denom;
                            if (u < -1e-12 || u > 1 + 1e-12) continue;
                            if (w < -1e-12 || w > 1 + 1e-12) continue;
                            push_point(std::clamp(u, 0.0, 1.0));
                        }
                    }
                } else {
                    // segment against the circle |p| = radius
                    Vec2 d = pb - pa;
                    double A = d.squaredNorm();
                    double Bc = 2.0 * pa.dot(d);
                    double C = pa.squaredNorm() - disc->radius * disc->radius;
                    double discr = Bc * Bc - 4 * A * C;
                    if (A > 1e-16 && discr >= 0) {
                        double sq = std::sqrt(discr);
                        for (double u : {(-Bc - sq) / (2 * A), (-Bc + sq) / (2 * A)})
                            if (u >= -1e-12 && u <= 1 + 1e-12)
                                push_point(std::clamp(u, 0.0, 1.0));
                    }
                }
            }
        }
        Rm = chain.composed.compose(Rm);
    }

    std::sort(items.begin(), items.end(),
              [](const auto& a, const auto& b) { return a.height < b.height; });

    // gap of the union of points and arcs on the boundary circle
    auto coverage_gap = [&](size_t upto) {
        std::vector<std::pair<double, double>> segs;
        for (size_t i = 0; i < upto; ++i) {
            const auto& it = items[i];
            if (it.is_arc)
                segs.emplace_back(it.boundary_pos, it.arc_end);
            else
                segs.emplace_back(it.boundary_pos, it.boundary_pos);
        }
        if (segs.empty()) return perimeter;
        std::sort(segs.begin(), segs.end());
        double gap = 0.0;
        double reach = segs[0].second;
        for (size_t i = 1; i < segs.size(); ++i) {
            if (segs[i].first > reach) gap = std::max(gap, segs[i].first - reach);
            reach = std::max(reach, segs[i].second);
        }
        // wrap-around gap
        gap = std::max(gap, segs[0].first + perimeter - reach);
        return gap;
    };

    out.largest_gap = coverage_gap(items.size());
    for (size_t i = 1; i <= items.size(); ++i) {
        if (coverage_gap(i) <= 2.0 * eps_density) {
            out.eps_density_height = items[i - 1].height;
            break;
        }
    }
    out.points = std::move(items);
    return out;
}

BoundaryFlowoutReport check_boundary_flowout(const ConvexPolytope& P,
                                             const PeriodicTube& tube,
                                             double eps, long samples,
                                             unsigned seed) {
    BoundaryFlowoutReport rep;
    const double eta = eps / 6.0, delta = eps / 6.0;
    rep.eta = eta;
    rep.delta = delta;
    if (!tube.cross_sec) throw Error("tube needs a computed cross-section");
    const CrossSection& cs = *tube.cross_sec;
    const int td = cs.dim();

    // recurrence height for eps/6 density on the boundary
    double height = 4.0 * tube.L;
    BoundaryTrace trace;
    for (int grow = 0; grow < 12; ++grow) {
        trace = boundary_singular_trace(P, tube, height, eps / 6.0);
        if (trace.eps_density_height) break;
        height *= 2.0;
    }
    if (!trace.eps_density_height) {
        rep.passed = false;
        rep.failing_sample = Vec::Zero(td + 1);
        return rep;
    }
    rep.l = std::max(*trace.eps_density_height, tube.L);

    const double inr = cs.inradius();
    const double depth_lo = eps / 2.0 - eta, depth_hi = eps / 2.0 + eta;
    if (depth_lo >= inr) {
        rep.vacuous = true;
        return rep;
    }

    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    auto sample_annulus = [&]() -> std::optional<Vec> {
        for (int tries = 0; tries < 4000; ++tries) {
            Vec p(td);
            if (td == 1) {
                const auto& iv = std::get<IntervalRegion>(cs.region);
                p[0] = iv.lo + uni(rng) * (iv.hi - iv.lo);
            } else {
                double R = 2.0 * cs.inradius() + eps;
                p[0] = (2.0 * uni(rng) - 1.0) * R;
                p[1] = (2.0 * uni(rng) - 1.0) * R;
                if (!cs.contains(p)) continue;
            }
            double depth = cs.boundary_clearance(p);
            if (depth >= depth_lo && depth <= depth_hi) return p;
        }
        return std::nullopt;
    };

    // deterministic ball probe: centre, axis points, mid-radius shell
    std::vector<Vec> ball_dirs;
    {
        int dim = td + 1;
        for (int i = 0; i < dim; ++i) {
            Vec e = Vec::Zero(dim);
            e[i] = 1.0;
            ball_dirs.push_back(e);
            ball_dirs.push_back(-e);
        }
        std::mt19937 drng(7);
        std::normal_distribution<double> g;
        for (int i = 0; i < 16; ++i) {
            Vec d(dim);
            for (int j = 0; j < dim; ++j) d[j] = g(drng);
            ball_dirs.push_back(d.normalized());
        }
    }

    TubeMapper mapper(P, tube);
    auto ball_inside_pocket = [&](const Vec& p, double z) {
        for (double radius : {0.0, 0.5 * delta, 0.95 * delta}) {
            for (const auto& d : ball_dirs) {
                Vec q = p + radius * d.head(td);
                double zz = z + radius * d[td];
                if (!cs.contains(q, 1e-9)) return false;
                Vec y = mapper.point(q, zz);
                if (distance_to_skeleton(P, y) >= eps) return false;
                if (radius == 0.0) break;  // centre needs one probe
            }
        }
        return true;
    };

    for (long s = 0; s < samples; ++s) {
        auto p0 = sample_annulus();
        if (!p0) {
            if (s == 0) rep.vacuous = true;
            break;
        }
        double z0 = uni(rng) * tube.L;
        bool ok = false;
        const double step = delta / 2.0;
        for (double dz = 0.0; dz <= rep.l + 1e-12 && !ok; dz += step) {
            for (double sign : {1.0, -1.0}) {
                if (ball_inside_pocket(*p0, z0 + sign * dz)) {
                    ok = true;
                    break;
                }
                if (dz == 0.0) break;
            }
        }
        ++rep.samples;
        if (!ok) {
            rep.passed = false;
            rep.failing_sample = Vec(td + 1);
            rep.failing_sample.head(td) = *p0;
            rep.failing_sample[td] = z0;
            return rep;
        }
    }
    return rep;
}

LipschitzEstimate return_map_lipschitz(const ConvexPolytope& P,
                                       const std::vector<int>& word,
                                       long sample_pairs, long m_max,
                                       unsigned seed) {
    auto tube = solve_periodic_orbit(P, word);
    if (!tube) throw Error("word is not realizable as a periodic tube");
    if (!tube->cross_sec) tube->cross_sec = cross_section(P, *tube);
    const CrossSection& cs = *tube->cross_sec;
    const int td = cs.dim();
    const long k = static_cast<long>(tube->word_core_effective().size());

    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    auto sample_inside = [&]() {
        for (;;) {
            Vec p(td);
            double scale = cs.inradius() * 0.8;
            for (int i = 0; i < td; ++i) p[i] = uni(rng) * scale;
            if (cs.contains(p) && cs.boundary_clearance(p) > 0.1 * scale)
                return p;
        }
    };

    LipschitzEstimate est;
    est.c = std::numeric_limits<double>::infinity();
    est.C = 0.0;
    TraceLimits lim;
    lim.max_events = m_max * k + 1;
    const Mat Bt = tube->transverse_basis.transpose();
    for (long s = 0; s < sample_pairs; ++s) {
        Vec p1 = sample_inside(), p2 = sample_inside();
        if ((p1 - p2).norm() < 1e-9) continue;
        Vec y1 = tube->x0 + tube->transverse_basis * p1;
        Vec y2 = tube->x0 + tube->transverse_basis * p2;
        auto t1 = trace(P, {y1, tube->v, std::nullopt}, lim, 0.0);
        auto t2 = trace(P, {y2, tube->v, std::nullopt}, lim, 0.0);
        long periods = std::min(t1.trajectory.events.size(),
                                t2.trajectory.events.size()) /
                       k;
        double d0 = (p1 - p2).norm();
        for (long m = 1; m <= std::min(periods, m_max); ++m) {
            // section distance: transverse offsets of the two orbits
            const Vec& a = t1.trajectory.events[m * k - 1].point;
            const Vec& b = t2.trajectory.events[m * k - 1].point;
            double dm = (Bt * (a - b)).norm();
            est.c = std::min(est.c, dm / d0);
            est.C = std::max(est.C, dm / d0);
        }
    }
    if (!std::isfinite(est.c)) est.c = est.C = 1.0;
    return est;
}

}  // namespace ptb
