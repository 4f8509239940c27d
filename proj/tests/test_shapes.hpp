#ifndef POLYTUBE_TESTS_SHAPES_HPP
#define POLYTUBE_TESTS_SHAPES_HPP

#include <random>

#include "polytube/geometry.hpp"

namespace ptb::testing {

inline Vec vec2(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
}

inline Vec vec3(double x, double y, double z) {
    Vec v(3);
    v << x, y, z;
    return v;
}

// random bounded convex polygon: jittered tangent lines around a circle
inline ConvexPolytope random_polygon(std::mt19937& rng, int sides = 6) {
    std::uniform_real_distribution<double> jitter(-0.2, 0.2);
    std::uniform_real_distribution<double> radius(0.8, 1.4);
    std::vector<Halfspace> hs;
    for (int i = 0; i < sides; ++i) {
        double ang = 2.0 * std::numbers::pi * i / sides + jitter(rng);
        Vec n = vec2(std::cos(ang), std::sin(ang));
        hs.push_back({n, radius(rng)});
    }
    return build_polytope(hs);
}

// random bounded convex polyhedron: jittered facet normals over the sphere
inline ConvexPolytope random_polyhedron(std::mt19937& rng, int extra = 4) {
    std::uniform_real_distribution<double> radius(0.9, 1.3);
    std::normal_distribution<double> g;
    std::vector<Halfspace> hs;
    for (int s = 0; s < 3; ++s)
        for (double sign : {1.0, -1.0}) {
            Vec n = Vec::Zero(3);
            n[s] = sign;
            Vec p = vec3(g(rng), g(rng), g(rng)) * 0.08;
            n = (n + p).normalized();
            hs.push_back({n, radius(rng)});
        }
    for (int i = 0; i < extra; ++i) {
        Vec n = vec3(g(rng), g(rng), g(rng));
        if (n.norm() < 1e-6) continue;
        hs.push_back({n.normalized(), radius(rng)});
    }
    return build_polytope(hs);
}

}  // namespace ptb::testing

#endif
