#ifndef POLYTUBE_TUBES_HPP
#define POLYTUBE_TUBES_HPP

#include <optional>
#include <vector>

#include "polytube/convex.hpp"
#include "polytube/rotations.hpp"
#include "polytube/unfold.hpp"

namespace ptb {

enum class TubeOrientation { SO, OMinus };

struct PeriodicTube {
    std::vector<int> word_core;     // one period of the symbol word
    Vec x0;                         // interior point on the central geodesic
    Vec v;                          // unit tube direction
    double L = 0.0;                 // closing length of the central geodesic
    Mat rotation;                   // linear part of the closing isometry (on R^n)
    Mat transverse_basis;           // columns span v-perp
    Mat transverse_rotation;        // rotation restricted to v-perp coordinates
    TubeOrientation orientation = TubeOrientation::SO;
    long q = 1;                     // order of the transverse rotation (0 = infinite suspected)
    std::optional<CrossSection> cross_sec;
    bool maximal = false;
    bool doubled_word = false;      // the closing isometry needed two word periods
    double clearance = 0.0;         // min skeleton distance of the central geodesic

    // impact points of the central geodesic over one period
    std::vector<Vec> impacts;

    // word actually used by the closing isometry (doubled when needed)
    std::vector<int> word_core_effective() const {
        if (!doubled_word) return word_core;
        std::vector<int> w = word_core;
        w.insert(w.end(), word_core.begin(), word_core.end());
        return w;
    }
};

struct TubeSearchBounds {
    int max_word_period = 6;
    double max_length = std::numeric_limits<double>::infinity();
    long max_candidates = 50'000'000;
    int threads = 1;
};

struct TubeAtlas {
    double eps = 0.0;
    std::vector<PeriodicTube> tubes;
    TubeSearchBounds search_bounds;
    bool complete_within_bounds = true;
};

// Appendix-style closing solve: unfolds one period, splits the closing
// isometry into linear part and translation, reads the direction off the
// fixed space, and validates by re-tracing. Words whose closing isometry is
// orientation-reversing with no invariant direction are doubled internally.
std::optional<PeriodicTube> solve_periodic_orbit(const ConvexPolytope& P,
                                                 const std::vector<int>& word_core);

struct CrossSectionOptions {
    long max_rotations = 20000;      // orbit-closure constraints to accumulate
    double disc_tolerance = 1e-6;    // Hausdorff gate for the disc representation
};

// Cross-section of the maximal tube: intersection over the rotation orbit of
// the one-period facet projections, in transverse coordinates centred on the
// central geodesic.
CrossSection cross_section(const ConvexPolytope& P, const PeriodicTube& tube,
                           const CrossSectionOptions& opts = {});

// Enumerates primitive words up to the bounds, solves each candidate, keeps
// tubes whose central geodesic clears the skeleton by eps, and deduplicates
// by geometric coincidence (cyclic shift and time reversal collapse first).
TubeAtlas enumerate_tubes(const ConvexPolytope& P, double eps,
                          const TubeSearchBounds& bounds);

struct BoundaryTracePoint {
    double boundary_pos;   // arc-length position on the cross-section boundary
    double height;         // corridor height of the singular point
    bool is_arc = false;   // a whole boundary stretch, [boundary_pos, arc_end]
    double arc_end = 0.0;
};

struct BoundaryTrace {
    std::vector<BoundaryTracePoint> points;
    double boundary_length = 0.0;     // perimeter of the cross-section
    double largest_gap = 0.0;         // empty stretch using all points <= height
    // least height whose collected points are already eps-dense (if reached)
    std::optional<double> eps_density_height;
};

// Singular points landing on the tube boundary up to the given corridor
// height, projected to boundary coordinates.
BoundaryTrace boundary_singular_trace(const ConvexPolytope& P,
                                      const PeriodicTube& tube, double height,
                                      double eps_density);

struct BoundaryFlowoutReport {
    bool vacuous = false;        // sampling annulus was empty
    bool passed = true;
    double delta = 0.0, eta = 0.0, l = 0.0;
    long samples = 0;
    Vec failing_sample;          // transverse coords + height, when failed
};

// Verifies that every point in the annular shell around the cross-section
// boundary has, within axial distance l, a delta-ball that the tube map sends
// into the eps-neighborhood of the skeleton.
BoundaryFlowoutReport check_boundary_flowout(const ConvexPolytope& P,
                                             const PeriodicTube& tube,
                                             double eps, long samples = 1000,
                                             unsigned seed = 1);

struct LipschitzEstimate {
    double c = 1.0;  // best lower ratio observed
    double C = 1.0;  // best upper ratio observed
};

// Empirical two-sided Lipschitz constants of the word's return map on the
// cross-section, over sampled pairs and iterate counts up to m_max.
LipschitzEstimate return_map_lipschitz(const ConvexPolytope& P,
                                       const std::vector<int>& word,
                                       long sample_pairs, long m_max,
                                       unsigned seed = 1);

// Evaluates the tube map F(p, t) -> table point; caches the unfolding and
// owns copies of its inputs so it can outlive them.
class TubeMapper {
  public:
    TubeMapper(const ConvexPolytope& P, const PeriodicTube& tube);
    Vec point(const Vec& transverse, double t) const;

  private:
    ConvexPolytope table_;
    PeriodicTube tube_;
    UnfoldingChain chain_;
};

// Point of the immersed tube at transverse coordinates p and height t,
// folded back to the table.
Vec tube_point(const ConvexPolytope& P, const PeriodicTube& tube, const Vec& p,
               double t);

}  // namespace ptb

#endif
