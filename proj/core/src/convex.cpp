#include "polytube/convex.hpp"

#include <algorithm>
#include <cmath>

namespace ptb {

namespace {

// Projection of x onto the affine hull of the given vertex subset, returned
// together with its barycentric coordinates.
struct AffineProj {
    Vec point;
    Vec weights;
};

std::optional<AffineProj> project_affine(const Vec& x,
                                         const std::vector<const Vec*>& sub) {
    const int m = static_cast<int>(sub.size());
    const auto n = x.size();
    if (m == 1) {
        AffineProj p{*sub[0], Vec::Ones(1)};
        return p;
    }
    Mat B(n, m - 1);
    for (int j = 1; j < m; ++j) B.col(j - 1) = *sub[j] - *sub[0];
    Eigen::JacobiSVD<Mat> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.rank() < m - 1) return std::nullopt;  // degenerate subset
    Vec t = svd.solve(x - *sub[0]);
    AffineProj p;
    p.point = *sub[0] + B * t;
    p.weights = Vec(m);
    p.weights[0] = 1.0 - t.sum();
    for (int j = 1; j < m; ++j) p.weights[j] = t[j - 1];
    return p;
}

void subsets_rec(const std::vector<Vec>& verts, std::vector<int>& idx,
                 size_t start, int want, const Vec& x, double tol,
                 double& best) {
    if (want == 0) {
        std::vector<const Vec*> sub;
        sub.reserve(idx.size());
        for (int i : idx) sub.push_back(&verts[i]);
        auto proj = project_affine(x, sub);
        if (!proj) return;
        if (proj->weights.minCoeff() < -tol) return;  // outside the face
        best = std::min(best, (x - proj->point).norm());
        return;
    }
    for (size_t i = start; i + want <= verts.size(); ++i) {
        idx.push_back(static_cast<int>(i));
        subsets_rec(verts, idx, i + 1, want - 1, x, tol, best);
        idx.pop_back();
    }
}

}  // namespace

double point_to_hull_distance(const Vec& x, const std::vector<Vec>& vertices,
                              double tol) {
    if (vertices.empty()) return std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    const int maxk = std::min<int>(static_cast<int>(x.size()) + 1,
                                   static_cast<int>(vertices.size()));
    std::vector<int> idx;
    for (int k = 1; k <= maxk; ++k)
        subsets_rec(vertices, idx, 0, k, x, tol, best);
    return best;
}

double segment_to_hull_distance(const Vec& a, const Vec& b,
                                const std::vector<Vec>& vertices, double tol) {
    auto f = [&](double t) {
        return point_to_hull_distance(a + t * (b - a), vertices, tol);
    };
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 90; ++it) {
        double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (f(m1) <= f(m2))
            hi = m2;
        else
            lo = m1;
        if (hi - lo < 1e-13) break;
    }
    return std::min({f(lo), f(0.5 * (lo + hi)), f(hi), f(0.0), f(1.0)});
}

// --- Polygon2 ---------------------------------------------------------------

double Polygon2::area() const {
    double s = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) {
        const Vec2& p = pts[i];
        const Vec2& q = pts[(i + 1) % pts.size()];
        s += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * s;
}

Vec2 Polygon2::centroid() const {
    double a = 0.0;
    Vec2 c = Vec2::Zero();
    for (size_t i = 0; i < pts.size(); ++i) {
        const Vec2& p = pts[i];
        const Vec2& q = pts[(i + 1) % pts.size()];
        double w = p.x() * q.y() - q.x() * p.y();
        a += w;
        c += w * (p + q);
    }
    if (std::abs(a) < 1e-300) return pts.empty() ? Vec2::Zero() : pts[0];
    return c / (3.0 * a);
}

double Polygon2::perimeter() const {
    double s = 0.0;
    for (size_t i = 0; i < pts.size(); ++i)
        s += (pts[(i + 1) % pts.size()] - pts[i]).norm();
    return s;
}

bool Polygon2::contains(const Vec2& p, double tol) const {
    for (size_t i = 0; i < pts.size(); ++i) {
        const Vec2& a = pts[i];
        const Vec2& b = pts[(i + 1) % pts.size()];
        Vec2 e = b - a;
        double cross = e.x() * (p.y() - a.y()) - e.y() * (p.x() - a.x());
        if (cross < -tol) return false;
    }
    return true;
}

double Polygon2::signed_boundary_distance(const Vec2& p) const {
    double d = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < pts.size(); ++i) {
        const Vec2& a = pts[i];
        const Vec2& b = pts[(i + 1) % pts.size()];
        Vec2 e = b - a;
        double t = std::clamp(e.dot(p - a) / e.squaredNorm(), 0.0, 1.0);
        d = std::min(d, (p - (a + t * e)).norm());
    }
    return contains(p) ? -d : d;
}

double Polygon2::boundary_parameter(const Vec2& p) const {
    double best = std::numeric_limits<double>::infinity();
    double param = 0.0, walked = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) {
        const Vec2& a = pts[i];
        const Vec2& b = pts[(i + 1) % pts.size()];
        Vec2 e = b - a;
        double len = e.norm();
        double t = std::clamp(e.dot(p - a) / e.squaredNorm(), 0.0, 1.0);
        double d = (p - (a + t * e)).norm();
        if (d < best) {
            best = d;
            param = walked + t * len;
        }
        walked += len;
    }
    return param;
}

Polygon2 convex_hull(std::vector<Vec2> pts) {
    if (pts.size() < 3) return {};
    std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    auto cross = [](const Vec2& o, const Vec2& a, const Vec2& b) {
        return (a.x() - o.x()) * (b.y() - o.y()) -
               (a.y() - o.y()) * (b.x() - o.x());
    };
    std::vector<Vec2> h(2 * pts.size());
    size_t k = 0;
    for (size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 1e-14) --k;
        h[k++] = pts[i];
    }
    for (size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 1e-14) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    Polygon2 poly;
    poly.pts = std::move(h);
    if (poly.pts.size() < 3) poly.pts.clear();
    return poly;
}

Polygon2 clip_halfplane(const Polygon2& poly, const Vec2& n, double c) {
    Polygon2 out;
    const size_t m = poly.pts.size();
    if (m == 0) return out;
    for (size_t i = 0; i < m; ++i) {
        const Vec2& p = poly.pts[i];
        const Vec2& q = poly.pts[(i + 1) % m];
        double dp = n.dot(p) - c, dq = n.dot(q) - c;
        if (dp <= 0) out.pts.push_back(p);
        if ((dp < 0 && dq > 0) || (dp > 0 && dq < 0)) {
            double t = dp / (dp - dq);
            out.pts.push_back(p + t * (q - p));
        }
    }
    if (out.pts.size() < 3) out.pts.clear();
    return out;
}

Polygon2 intersect(const Polygon2& a, const Polygon2& b) {
    Polygon2 out = a;
    const size_t m = b.pts.size();
    for (size_t i = 0; i < m && !out.empty(); ++i) {
        const Vec2& p = b.pts[i];
        const Vec2& q = b.pts[(i + 1) % m];
        Vec2 e = q - p;
        Vec2 n(e.y(), -e.x());  // outward for CCW
        out = clip_halfplane(out, n, n.dot(p));
    }
    return out;
}

double hausdorff_to_disc(const Polygon2& poly, double r) {
    if (poly.empty()) return r;
    // sup over polygon of (|p| - r): attained at a vertex
    double out = 0.0;
    for (const auto& p : poly.pts) out = std::max(out, p.norm() - r);
    // sup over disc of dist to polygon: attained on the boundary circle,
    // worst either at an inward edge or beyond a vertex. For convex polygons
    // containing 0, r - min edge distance bounds it.
    double dmin = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < poly.pts.size(); ++i) {
        const Vec2& a = poly.pts[i];
        const Vec2& b = poly.pts[(i + 1) % poly.pts.size()];
        Vec2 e = b - a;
        Vec2 n(e.y(), -e.x());
        n.normalize();
        dmin = std::min(dmin, n.dot(a));
    }
    double in = std::max(0.0, r - dmin);
    return std::max(out, in);
}

// --- CrossSection -------------------------------------------------------------

int CrossSection::dim() const {
    if (std::holds_alternative<IntervalRegion>(region)) return 1;
    return 2;
}

bool CrossSection::contains(const Vec& p, double tol) const {
    if (const auto* iv = std::get_if<IntervalRegion>(&region))
        return p[0] >= iv->lo - tol && p[0] <= iv->hi + tol;
    if (const auto* poly = std::get_if<Polygon2>(&region))
        return poly->contains(Vec2(p[0], p[1]), tol);
    const auto& d = std::get<DiscRegion>(region);
    return p.norm() <= d.radius + tol;
}

double CrossSection::inradius() const {
    if (const auto* iv = std::get_if<IntervalRegion>(&region))
        return std::min(-iv->lo, iv->hi);
    if (const auto* poly = std::get_if<Polygon2>(&region))
        return -poly->signed_boundary_distance(Vec2::Zero());
    return std::get<DiscRegion>(region).radius;
}

Vec CrossSection::centroid() const {
    if (const auto* iv = std::get_if<IntervalRegion>(&region)) {
        Vec c(1);
        c[0] = 0.5 * (iv->lo + iv->hi);
        return c;
    }
    if (const auto* poly = std::get_if<Polygon2>(&region)) {
        Vec2 c = poly->centroid();
        Vec v(2);
        v << c.x(), c.y();
        return v;
    }
    return Vec::Zero(2);
}

double CrossSection::boundary_clearance(const Vec& p) const {
    if (const auto* iv = std::get_if<IntervalRegion>(&region))
        return std::min(p[0] - iv->lo, iv->hi - p[0]);
    if (const auto* poly = std::get_if<Polygon2>(&region))
        return -poly->signed_boundary_distance(Vec2(p[0], p[1]));
    return std::get<DiscRegion>(region).radius - p.norm();
}

}  // namespace ptb
