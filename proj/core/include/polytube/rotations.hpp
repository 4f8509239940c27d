#ifndef POLYTUBE_ROTATIONS_HPP
#define POLYTUBE_ROTATIONS_HPP

#include <optional>
#include <vector>

#include "polytube/common.hpp"

namespace ptb {

// Canonical form of an orthogonal map: planar rotation blocks plus ±1 axes.
struct RotationClass {
    Mat matrix;
    std::vector<double> canonical_angles;  // one angle per rotation block
    std::vector<int> fixed_signs;          // +1 / -1 real eigenvalues
    bool finite_order = false;
    long order = 0;        // valid when finite_order
    long order_bound = 0;  // search bound when infinite is suspected

    // orthonormal basis adapted to the canonical form: rotation-plane pairs
    // first, then +1 axes, then -1 axes
    Mat basis;
    int num_blocks() const { return static_cast<int>(canonical_angles.size()); }
};

RotationClass classify_rotation(const Mat& R, double tol = 1e-9,
                                long max_order = 10000);

struct OrbitDensitySampling {
    int allocation_samples = 33;   // radius allocations across blocks
    long iteration_cap = 1000000;  // hard cap on the density search
    int seeds_per_type = 4;        // used by >=2-block orbits only
};

struct OrbitDensityResult {
    long N = 1;
    double eps = 0.0;
    double r = 0.0;
    Vec worst_orbit_seed;
    double gap_before = 0.0;  // covering radius with N-1 iterates
    double gap_after = 0.0;   // covering radius with N iterates
};

// Least m such that every orbit of R inside the closed ball of radius r is
// eps-dense in its minimal closed orbit (intrinsic metric). Exact for finite
// orders and for single rotation blocks (+ optional sign flip); sampled over
// radius allocations when two or more irrational blocks are active.
OrbitDensityResult orbit_density_N(const Mat& R, double eps, double r,
                                   const OrbitDensitySampling& sampling = {});

struct AdmissibilitySet {
    std::vector<long> indices;  // k with dist(phi^k, id) < eps
    long max_gap = 0;           // largest gap between consecutive hits
};

// Isometry given either as an orthogonal matrix acting on the unit ball or as
// a torus translation (angles mod 1).
struct IsometryDescriptor {
    enum class Kind { Orthogonal, TorusTranslation } kind;
    Mat matrix;   // Orthogonal
    Vec shift;    // TorusTranslation
};

// S(phi, eps) over [k_lo, k_hi]; sup-distance to the identity is evaluated in
// closed form (canonical angles for orthogonal maps, wrapped shift for torus
// translations).
AdmissibilitySet admissibility_set(const IsometryDescriptor& phi, double eps,
                                   long k_lo, long k_hi);

// sup |R^k x - x| over the unit ball, in closed form: the test-side oracle is
// the max over an explicit point set.
double power_distance_to_identity(const RotationClass& cls, long k);

}  // namespace ptb

#endif
