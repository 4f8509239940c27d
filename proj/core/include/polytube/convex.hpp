#ifndef POLYTUBE_CONVEX_HPP
#define POLYTUBE_CONVEX_HPP

#include <optional>
#include <variant>
#include <vector>

#include "polytube/common.hpp"

namespace ptb {

// Euclidean distance from x to conv(vertices). Exact: the projection onto a
// polytope lies in the affine hull of one vertex subset of size <= dim+1, so
// we enumerate subsets and keep feasible affine projections.
double point_to_hull_distance(const Vec& x, const std::vector<Vec>& vertices,
                              double tol = kDefaultTol);

// Minimum of t -> point_to_hull_distance(a + t*(b-a), vertices) over [0,1].
// The objective is convex in t, so ternary search converges globally.
double segment_to_hull_distance(const Vec& a, const Vec& b,
                                const std::vector<Vec>& vertices,
                                double tol = kDefaultTol);

// --- planar convex polygons (CCW vertex loops) ------------------------------

using Vec2 = Eigen::Vector2d;

struct Polygon2 {
    std::vector<Vec2> pts;  // CCW, no repeated closing vertex

    bool empty() const { return pts.size() < 3; }
    double area() const;
    Vec2 centroid() const;
    double perimeter() const;
    bool contains(const Vec2& p, double tol = kDefaultTol) const;
    // signed distance of p to the boundary (negative inside)
    double signed_boundary_distance(const Vec2& p) const;
    // arc-length position of p along the boundary loop (p assumed near it)
    double boundary_parameter(const Vec2& p) const;
};

Polygon2 convex_hull(std::vector<Vec2> pts);
// Intersect with halfplane {p : n.dot(p) <= c}.
Polygon2 clip_halfplane(const Polygon2& poly, const Vec2& n, double c);
Polygon2 intersect(const Polygon2& a, const Polygon2& b);

// Hausdorff distance between a convex polygon containing the origin and the
// disc of radius r centred at the origin.
double hausdorff_to_disc(const Polygon2& poly, double r);

// --- tube cross-sections -----------------------------------------------------

struct IntervalRegion {            // 1-dim cross-section (n = 2 tables)
    double lo = 0.0, hi = 0.0;
    double length() const { return hi - lo; }
};
struct DiscRegion {                // irrational rotation limit (n = 3)
    double radius = 0.0;
};

// Region in the hyperplane transverse to a tube, in coordinates where the
// central geodesic sits at the origin.
struct CrossSection {
    std::variant<IntervalRegion, Polygon2, DiscRegion> region;

    int dim() const;
    bool contains(const Vec& p, double tol = kDefaultTol) const;
    double inradius() const;       // distance from 0 to the boundary
    Vec centroid() const;
    // distance from interior point p to the boundary of the region
    double boundary_clearance(const Vec& p) const;
};

}  // namespace ptb

#endif
