#ifndef POLYTUBE_FLOW_HPP
#define POLYTUBE_FLOW_HPP

#include <optional>
#include <vector>

#include "polytube/geometry.hpp"

namespace ptb {

struct BilliardState {
    Vec pos;
    Vec dir;                       // unit, pointing into P
    std::optional<int> facet;      // facet of pos when on the boundary
};

enum class Termination { Ran, SingularHit, TangentHit };

struct BounceEvent {
    double arc_length;   // cumulative length at impact
    Vec point;
    int facet;
    Vec out_dir;         // post-reflection direction
    int parity;          // copy of the double reached after this bounce
};

struct Trajectory {
    std::vector<BounceEvent> events;
    double total_length = 0.0;
    Termination terminated = Termination::Ran;
    Vec end_pos, end_dir;
};

struct SymbolWord {
    std::vector<int> letters;

    struct PeriodicCore {
        int offset = 0;
        int period = 0;
    };
    std::optional<PeriodicCore> periodic_core;

    // smallest (offset, minimal period) consistent with the observed letters
    void analyze_periodicity();
};

struct TraceLimits {
    long max_events = 1000;
    double max_length = std::numeric_limits<double>::infinity();
};

// Specular reflection: dir - 2 (dir.n) n. Caller orients so dir.n > 0
// (outgoing component against the outward normal).
Vec reflect(const Vec& dir, const Vec& normal, double tol = 1e-9);

struct TraceResult {
    Trajectory trajectory;
    SymbolWord word;
};

// Advances to successive facet impacts, recording the symbol word. Stops with
// SingularHit when an impact lies within eps_stop of the skeleton (ties in the
// minimal ray parameter count as skeleton hits), TangentHit when the impact is
// tangential, Ran at the limits.
TraceResult trace(const ConvexPolytope& P, const BilliardState& start,
                  const TraceLimits& limits, double eps_stop,
                  double tangency_tol = 1e-9);

// Lemma-style oracle: words equal over the horizon must force parallel
// directions. Returns the truth value of that implication.
bool symbol_determines_direction_check(const ConvexPolytope& P,
                                       const BilliardState& s1,
                                       const BilliardState& s2, long horizon,
                                       double tol = 1e-8);

}  // namespace ptb

#endif
