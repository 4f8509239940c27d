#ifndef POLYTUBE_GEOMETRY_HPP
#define POLYTUBE_GEOMETRY_HPP

#include <optional>
#include <string>
#include <vector>

#include "polytube/common.hpp"

namespace ptb {

struct Halfspace {
    Vec normal;   // unit outward
    double offset; // interior = { x : normal.dot(x) < offset }
};

struct Facet {
    int halfspace = -1;
    std::vector<int> vertex_ids;
};

// Face of dimension <= n-2; part of the singular set.
struct SkeletonFace {
    int dim = 0;
    std::vector<int> vertex_ids;
};

class ConvexPolytope {
  public:
    int dim = 0;
    std::string name;
    double tol = kDefaultTol;
    std::vector<Halfspace> halfspaces;
    std::vector<Vec> vertices;
    std::vector<Facet> facets;
    std::vector<SkeletonFace> skeleton;

    bool contains(const Vec& x, double slack = 0.0) const;
    double diameter() const;
    double inradius_at(const Vec& x) const;  // min facet slack at x
    Vec interior_point() const;              // vertex centroid
    double volume() const;                   // n <= 3

    std::vector<Vec> facet_vertices(int f) const;
    std::vector<Vec> skeleton_vertices(int s) const;
};

// Enumerates vertices by intersecting all n-subsets of the bounding
// hyperplanes, builds facets and the (n-2)-skeleton, and drops redundant
// halfspaces. Throws UnboundedPolytope / DegeneratePolytope / NonUnitNormal.
ConvexPolytope build_polytope(const std::vector<Halfspace>& halfspaces,
                              double tol = kDefaultTol,
                              const std::string& name = "");

// Distance from x (in the closure of P) to the (n-2)-skeleton.
double distance_to_skeleton(const ConvexPolytope& P, const Vec& x);

// Minimum skeleton distance along the segment [a, b].
double segment_skeleton_clearance(const ConvexPolytope& P, const Vec& a,
                                  const Vec& b);

struct SkeletonNeighborhood {
    double eps;
    const ConvexPolytope* parent;
    bool contains(const Vec& x) const {
        return distance_to_skeleton(*parent, x) < eps;
    }
};

struct RationalityResult {
    bool rational = false;
    long order = 0;       // group order when rational
    long bound = 0;       // search bound when irrational is suspected
};

// Closes the group generated by the linear reflections in the facet normals.
// Finiteness is only semi-decidable numerically, so a failure to close within
// max_group elements reports "irrational suspected at this bound".
RationalityResult classify_rationality(const ConvexPolytope& P, long max_group,
                                       double tol = 1e-8);

// --- ready-made tables used across tests and the CLI ------------------------

ConvexPolytope make_box(const std::vector<double>& sides);   // [0,s1]x...x[0,sn]
ConvexPolytope make_regular_tetrahedron();                   // vertices (±1,±1,±1), even sign
ConvexPolytope make_equilateral_triangle(double side = 1.0); // n = 2
ConvexPolytope make_triangle_prism(double side = 1.0, double height = 1.0);
// triangle with angle arccos(1/3) at the origin
ConvexPolytope make_irrational_triangle();

}  // namespace ptb

#endif
