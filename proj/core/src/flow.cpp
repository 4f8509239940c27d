#include "polytube/flow.hpp"

#include <cmath>

namespace ptb {

Vec reflect(const Vec& dir, const Vec& normal, double tol) {
    if (std::abs(dir.norm() - 1.0) > tol || std::abs(normal.norm() - 1.0) > tol)
        throw NonUnitInput("reflect expects unit vectors");
    return dir - 2.0 * dir.dot(normal) * normal;
}

void SymbolWord::analyze_periodicity() {
    periodic_core.reset();
    const int n = static_cast<int>(letters.size());
    for (int off = 0; off < n; ++off) {
        int len = n - off;
        for (int k = 1; 2 * k <= len; ++k) {
            bool ok = true;
            for (int i = off + k; i < n && ok; ++i)
                ok = letters[i] == letters[i - k];
            if (ok) {
                periodic_core = PeriodicCore{off, k};
                return;
            }
        }
    }
}

TraceResult trace(const ConvexPolytope& P, const BilliardState& start,
                  const TraceLimits& limits, double eps_stop,
                  double tangency_tol) {
    const double tol = P.tol;
    TraceResult out;
    Trajectory& traj = out.trajectory;
    Vec pos = start.pos;
    Vec dir = start.dir;
    if (std::abs(dir.norm() - 1.0) > 1e-8)
        throw NonUnitInput("trace start direction must be unit length");
    int parity = 0;
    const double stop_radius = std::max(eps_stop, 10.0 * tol);

    while (static_cast<long>(traj.events.size()) < limits.max_events &&
           traj.total_length < limits.max_length) {
        // next facet: minimal positive ray parameter among planes we approach
        double best_t = std::numeric_limits<double>::infinity();
        double second_t = std::numeric_limits<double>::infinity();
        int best_f = -1;
        for (size_t f = 0; f < P.halfspaces.size(); ++f) {
            const auto& h = P.halfspaces[f];
            double vn = h.normal.dot(dir);
            if (vn <= tol) continue;
            double t = (h.offset - h.normal.dot(pos)) / vn;
            if (t <= 1e-12) continue;
            if (t < best_t) {
                second_t = best_t;
                best_t = t;
                best_f = static_cast<int>(f);
            } else if (t < second_t) {
                second_t = t;
            }
        }
        if (best_f < 0) throw StuckState("no forward facet intersection");

        Vec hit = pos + best_t * dir;
        traj.total_length += best_t;

        // tie between two facets means the ray runs into the skeleton
        if (second_t - best_t < tol * std::max(1.0, best_t)) {
            traj.terminated = Termination::SingularHit;
            traj.end_pos = hit;
            traj.end_dir = dir;
            return out;
        }
        if (distance_to_skeleton(P, hit) < stop_radius) {
            traj.terminated = Termination::SingularHit;
            traj.end_pos = hit;
            traj.end_dir = dir;
            return out;
        }
        const Vec& n = P.halfspaces[best_f].normal;
        if (std::abs(n.dot(dir)) < tangency_tol) {
            traj.terminated = Termination::TangentHit;
            traj.end_pos = hit;
            traj.end_dir = dir;
            return out;
        }

        dir = dir - 2.0 * dir.dot(n) * n;
        dir.normalize();
        parity ^= 1;
        traj.events.push_back({traj.total_length, hit, best_f, dir, parity});
        out.word.letters.push_back(best_f);
        pos = hit;
    }
    traj.terminated = Termination::Ran;
    traj.end_pos = pos;
    traj.end_dir = dir;
    out.word.analyze_periodicity();
    return out;
}

bool symbol_determines_direction_check(const ConvexPolytope& P,
                                       const BilliardState& s1,
                                       const BilliardState& s2, long horizon,
                                       double tol) {
    TraceLimits lim;
    lim.max_events = horizon;
    auto r1 = trace(P, s1, lim, 0.0);
    auto r2 = trace(P, s2, lim, 0.0);
    if (static_cast<long>(r1.word.letters.size()) < horizon ||
        static_cast<long>(r2.word.letters.size()) < horizon)
        throw Error("states do not survive the requested horizon");
    if (r1.word.letters != r2.word.letters) return true;  // vacuous
    double cross = 1.0 - std::abs(s1.dir.dot(s2.dir));
    return cross < tol;
}

}  // namespace ptb
