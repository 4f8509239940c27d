#ifndef POLYTUBE_ESTIMATES_HPP
#define POLYTUBE_ESTIMATES_HPP

#include "polytube/tubes.hpp"

namespace ptb {

struct AngleCheck {
    double alpha = 0.0;        // intersection angle of the two tubes
    double sin_alpha = 0.0;
    double bound = 0.0;        // (4 eps / 5) / min(N_i L_i)
    double bound_rational = 0.0;  // order-based variant (0 when inapplicable)
    long N1 = 1, N2 = 1;
    bool pass = false;
    Vec meeting_point;
};

// Lower bound on the intersection angle of two periodic tubes whose central
// geodesics clear the skeleton by eps. Representatives parallel to the
// central geodesics are sampled within radius eps/10 until a transversal
// interior crossing is found; throws NoIntersectionFound otherwise.
AngleCheck angle_check(const ConvexPolytope& P, const PeriodicTube& t1,
                       const PeriodicTube& t2, double eps);

struct PhaseVolume {
    double exact = 0.0;        // tube volume times the spherical cap
    double lower_bound = 0.0;  // C' eps^4 / (N^2 L) with C' from sin t >= t/2
    long N = 1;
};

// Phase-space volume of the direction-cone neighborhood of a tube; closed
// form for n = 3, generalized cap formula otherwise.
PhaseVolume phase_volume(const ConvexPolytope& P, const PeriodicTube& tube,
                         double eps);

struct SumCheck {
    double eps = 0.0;
    long M = 0;                 // tubes in the atlas
    std::vector<double> terms;  // 1 / (N^(n-1) L^(n-2))
    double lhs = 0.0;
    double rhs_scale = 0.0;     // vol(P) / eps^(2n-2)
    double ratio = 0.0;
    bool complete = true;
};

// Tube-length sum over a decreasing grid of eps values, with the enumeration
// bounds held fixed across the grid.
std::vector<SumCheck> sum_check(const ConvexPolytope& P,
                                const std::vector<double>& eps_grid,
                                const TubeSearchBounds& bounds);

// N(R, eps) with the ball radius pinned to diam P.
long tube_rotation_density(const ConvexPolytope& P, const PeriodicTube& tube,
                           double eps);

}  // namespace ptb

#endif
