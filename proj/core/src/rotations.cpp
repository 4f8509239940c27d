#include "polytube/rotations.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include <Eigen/Eigenvalues>

namespace ptb {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
    a = std::fmod(a, kTwoPi);
    if (a > std::numbers::pi) a -= kTwoPi;
    if (a < -std::numbers::pi) a += kTwoPi;
    return a;
}

}  // namespace

RotationClass classify_rotation(const Mat& R, double tol, long max_order) {
    const int n = static_cast<int>(R.rows());
    if ((R.transpose() * R - Mat::Identity(n, n)).norm() > 1e-7)
        throw NotOrthogonal("matrix is not orthogonal");

    RotationClass cls;
    cls.matrix = R;

    Eigen::RealSchur<Mat> schur(R);
    const Mat& T = schur.matrixT();
    const Mat& U = schur.matrixU();

    std::vector<int> plus_cols, minus_cols;
    std::vector<std::pair<int, double>> blocks;  // (first column, angle)
    int i = 0;
    while (i < n) {
        bool two = (i + 1 < n) && std::abs(T(i + 1, i)) > 1e-10;
        if (two) {
            double c = 0.5 * (T(i, i) + T(i + 1, i + 1));
            double s = 0.5 * (T(i + 1, i) - T(i, i + 1));
            blocks.emplace_back(i, std::atan2(s, c));
            i += 2;
        } else {
            if (T(i, i) > 0)
                plus_cols.push_back(i);
            else
                minus_cols.push_back(i);
            ++i;
        }
    }

    cls.basis = Mat(n, n);
    int col = 0;
    for (auto& [first, angle] : blocks) {
        cls.basis.col(col++) = U.col(first);
        cls.basis.col(col++) = U.col(first + 1);
        cls.canonical_angles.push_back(angle);
    }
    for (int c : plus_cols) {
        cls.basis.col(col++) = U.col(c);
        cls.fixed_signs.push_back(+1);
    }
    for (int c : minus_cols) {
        cls.basis.col(col++) = U.col(c);
        cls.fixed_signs.push_back(-1);
    }

    cls.order_bound = max_order;
    for (long k = 1; k <= max_order; ++k) {
        if (power_distance_to_identity(cls, k) < tol) {
            cls.finite_order = true;
            cls.order = k;
            break;
        }
    }
    return cls;
}

double power_distance_to_identity(const RotationClass& cls, long k) {
    double d = 0.0;
    for (double a : cls.canonical_angles)
        d = std::max(d, 2.0 * std::abs(std::sin(0.5 * wrap_angle(k * a))));
    for (int s : cls.fixed_signs)
        if (s < 0 && (k % 2 != 0)) d = std::max(d, 2.0);
    return d;
}

namespace {

// intrinsic distance on the closure of the orbit, as a function of the
// iterate difference
struct OrbitMetric {
    std::vector<double> angles;  // active rotation blocks
    std::vector<double> radii;
    double flip_amp = 0.0;       // distance 2*flip_amp between the two sheets

    double dist(long delta) const {
        double s = 0.0;
        for (size_t j = 0; j < angles.size(); ++j) {
            double arc = radii[j] * std::abs(wrap_angle(delta * angles[j]));
            s += arc * arc;
        }
        if (flip_amp > 0.0 && (delta % 2 != 0))
            s += 4.0 * flip_amp * flip_amp;
        return std::sqrt(s);
    }
};

// N via the longest run of iterate differences that stay eps-far, checked
// against a reference stretch of the orbit. Exact when the reference covers
// the whole (finite) orbit.
long run_length_N(const OrbitMetric& m, double eps, long k_ref,
                  double* cov_before = nullptr, double* cov_after = nullptr) {
    long run = 0, best = 0;
    for (long d = 1; d <= k_ref; ++d) {
        if (m.dist(d) > eps)
            ++run;
        else
            run = 0;
        best = std::max(best, run);
    }
    long N = best + 1;
    if (cov_before || cov_after) {
        // covering radius of the reference stretch by the first mm points
        auto cov = [&](long mm) {
            double worst = 0.0;
            for (long k = 0; k <= k_ref; ++k) {
                double mn = std::numeric_limits<double>::infinity();
                for (long j = 0; j < mm; ++j)
                    mn = std::min(mn, m.dist(std::abs(k - j)));
                worst = std::max(worst, mn);
            }
            return worst;
        };
        if (cov_before) *cov_before = (N > 1) ? cov(N - 1) : 0.0;
        if (cov_after) *cov_after = cov(N);
    }
    return N;
}

// exact covering count on a single circle of radius rho under an irrational
// angle, optionally with a sign-flip factor
struct ArcCover {
    double angle;
    double rho;
    double flip_amp;

    bool covered(long m, double eps) const {
        double a_same = eps / rho;  // arc radius from same-parity points
        if (a_same >= std::numbers::pi) a_same = std::numbers::pi;
        double a_cross = -1.0;
        if (flip_amp > 0.0) {
            double rem = eps * eps - 4.0 * flip_amp * flip_amp;
            if (rem >= 0.0) a_cross = std::min(std::sqrt(rem) / rho,
                                               std::numbers::pi);
        } else {
            a_cross = a_same;  // no flip: parity irrelevant
        }
        for (int parity = 0; parity < (flip_amp > 0.0 ? 2 : 1); ++parity) {
            bool full = false;
            std::vector<std::pair<double, double>> flat;
            for (long j = 0; j < m; ++j) {
                double rad = (j % 2 == parity) ? a_same : a_cross;
                if (rad < 0.0) continue;
                if (rad >= std::numbers::pi) {
                    full = true;
                    break;
                }
                double c = std::fmod(j * angle, kTwoPi);
                if (c < 0) c += kTwoPi;
                double start = c - rad, end = c + rad;
                if (start < 0) {
                    flat.emplace_back(start + kTwoPi, kTwoPi);
                    flat.emplace_back(0.0, end);
                } else if (end > kTwoPi) {
                    flat.emplace_back(start, kTwoPi);
                    flat.emplace_back(0.0, end - kTwoPi);
                } else {
                    flat.emplace_back(start, end);
                }
            }
            if (full) continue;
            if (flat.empty()) return false;
            std::sort(flat.begin(), flat.end());
            if (flat.front().first > 1e-15) return false;
            double reach = 0.0;
            for (auto& [lo, hi] : flat) {
                if (lo > reach + 1e-15) return false;
                reach = std::max(reach, hi);
            }
            if (reach < kTwoPi - 1e-15) return false;
        }
        return true;
    }
};

struct Allocation {
    std::vector<double> radii;  // per rotation block
    double flip = 0.0;
};

void sphere_grid(int dims, int samples, std::vector<std::vector<double>>& out) {
    // deterministic grid on the positive orthant of the unit sphere
    if (dims == 1) {
        out.push_back({1.0});
        return;
    }
    std::vector<int> steps(dims - 1, samples);
    std::vector<int> iter(dims - 1, 0);
    while (true) {
        std::vector<double> u(dims, 1.0);
        // hyperspherical: u_i = prod_{a<i} sin(t_a) * cos(t_i), last = prod sin
        std::vector<double> t(dims - 1);
        for (int a = 0; a < dims - 1; ++a)
            t[a] = (0.5 * std::numbers::pi) * iter[a] / (steps[a] - 1);
        for (int i2 = 0; i2 < dims; ++i2) {
            double v = 1.0;
            for (int a = 0; a < i2; ++a) v *= std::sin(t[a]);
            if (i2 < dims - 1) v *= std::cos(t[i2]);
            u[i2] = v;
        }
        out.push_back(u);
        int a = 0;
        for (; a < dims - 1; ++a) {
            if (++iter[a] < steps[a]) break;
            iter[a] = 0;
        }
        if (a == dims - 1) break;
    }
}

}  // namespace

OrbitDensityResult orbit_density_N(const Mat& R, double eps, double r,
                                   const OrbitDensitySampling& sampling) {
    if (eps <= 0.0) throw Error("orbit_density_N needs eps > 0");
    OrbitDensityResult res;
    res.eps = eps;
    res.r = r;
    res.worst_orbit_seed = Vec::Zero(R.rows());
    if (r <= 0.0) {
        res.N = 1;  // the origin is a fixed orbit
        return res;
    }

    RotationClass cls = classify_rotation(R, 1e-9, 20000);
    const int nb = cls.num_blocks();
    const bool has_flip =
        std::any_of(cls.fixed_signs.begin(), cls.fixed_signs.end(),
                    [](int s) { return s < 0; });
    const int dims = nb + (has_flip ? 1 : 0);
    if (dims == 0) {
        res.N = 1;
        return res;
    }

    std::vector<std::vector<double>> grid;
    sphere_grid(dims, std::max(2, sampling.allocation_samples), grid);

    long bestN = 1;
    Allocation bestAlloc;
    for (const auto& u : grid) {
        Allocation alloc;
        alloc.radii.assign(nb, 0.0);
        for (int j = 0; j < nb; ++j) alloc.radii[j] = r * u[j];
        if (has_flip) alloc.flip = r * u[dims - 1];

        OrbitMetric metric;
        for (int j = 0; j < nb; ++j) {
            if (alloc.radii[j] <= 1e-14) continue;
            metric.angles.push_back(cls.canonical_angles[j]);
            metric.radii.push_back(alloc.radii[j]);
        }
        metric.flip_amp = (alloc.flip > 1e-14) ? alloc.flip : 0.0;

        long N = 1;
        if (metric.angles.empty()) {
            // orbit is at most a two-point set
            N = (metric.flip_amp > 0.0 && 2.0 * metric.flip_amp > eps) ? 2 : 1;
        } else if (cls.finite_order) {
            N = run_length_N(metric, eps, 2 * cls.order);
        } else if (metric.angles.size() == 1) {
            ArcCover cover{metric.angles[0], metric.radii[0], metric.flip_amp};
            long lo = 1, hi = 1;
            while (!cover.covered(hi, eps)) {
                lo = hi;
                hi *= 2;
                if (hi > sampling.iteration_cap)
                    throw SamplingBudgetExceeded(
                        "orbit density search exceeded the iteration cap", lo);
            }
            while (lo < hi) {
                long mid = lo + (hi - lo) / 2;
                if (cover.covered(mid, eps))
                    hi = mid;
                else
                    lo = mid + 1;
            }
            N = lo;
        } else {
            // sampled reference orbit for multi-block types
            long k_ref = 1 << 14;
            for (;;) {
                N = run_length_N(metric, eps, k_ref);
                if (8 * N <= k_ref || k_ref >= sampling.iteration_cap) break;
                k_ref = std::min(sampling.iteration_cap, 4 * k_ref);
            }
            if (8 * N > k_ref)
                throw SamplingBudgetExceeded(
                    "orbit density search exceeded the iteration cap", N);
        }
        if (N > bestN) {
            bestN = N;
            bestAlloc = alloc;
        } else if (bestAlloc.radii.empty()) {
            bestAlloc = alloc;
        }
    }

    res.N = bestN;
    // certificate on the worst allocation
    OrbitMetric metric;
    for (int j = 0; j < nb; ++j) {
        if (j < static_cast<int>(bestAlloc.radii.size()) &&
            bestAlloc.radii[j] > 1e-14) {
            metric.angles.push_back(cls.canonical_angles[j]);
            metric.radii.push_back(bestAlloc.radii[j]);
        }
    }
    metric.flip_amp = bestAlloc.flip > 1e-14 ? bestAlloc.flip : 0.0;
    if (!cls.finite_order && metric.angles.size() == 1) {
        // dense angular grid over the closure circle (and both sheets)
        auto cover = [&](long m) {
            if (m <= 0) return 2.0 * (metric.radii[0] + metric.flip_amp);
            const int grid = 8192;
            double worst = 0.0;
            int sheets = metric.flip_amp > 0.0 ? 2 : 1;
            for (int sheet = 0; sheet < sheets; ++sheet) {
                for (int i = 0; i < grid; ++i) {
                    double phi = kTwoPi * i / grid;
                    double mn = std::numeric_limits<double>::infinity();
                    for (long kk = 0; kk < m; ++kk) {
                        double arc = metric.radii[0] *
                                     std::abs(wrap_angle(phi - kk * metric.angles[0]));
                        double d2 = arc * arc;
                        if (sheets == 2 && (kk % 2) != sheet)
                            d2 += 4.0 * metric.flip_amp * metric.flip_amp;
                        mn = std::min(mn, std::sqrt(d2));
                    }
                    worst = std::max(worst, mn);
                }
            }
            return worst;
        };
        res.gap_before = cover(bestN - 1);
        res.gap_after = cover(bestN);
    } else {
        long k_cert = cls.finite_order
                          ? 2 * cls.order
                          : std::min<long>(8 * bestN + 64, sampling.iteration_cap);
        run_length_N(metric, eps, k_cert, &res.gap_before, &res.gap_after);
    }

    // embed the worst seed via the adapted basis
    Vec seed = Vec::Zero(R.rows());
    {
        int col = 0;
        for (int j = 0; j < nb; ++j) {
            double rho = j < static_cast<int>(bestAlloc.radii.size())
                             ? bestAlloc.radii[j]
                             : 0.0;
            seed += rho * cls.basis.col(col);
            col += 2;
        }
        for (size_t s = 0; s < cls.fixed_signs.size(); ++s) {
            if (cls.fixed_signs[s] < 0 && bestAlloc.flip > 1e-14) {
                seed += bestAlloc.flip * cls.basis.col(col);
                break;  // one flip coordinate carries the whole amplitude
            }
            ++col;
        }
    }
    res.worst_orbit_seed = seed;
    return res;
}

AdmissibilitySet admissibility_set(const IsometryDescriptor& phi, double eps,
                                   long k_lo, long k_hi) {
    AdmissibilitySet out;
    std::optional<RotationClass> cls;
    if (phi.kind == IsometryDescriptor::Kind::Orthogonal)
        cls = classify_rotation(phi.matrix, 1e-9, 1);

    auto dist = [&](long k) {
        if (cls) return power_distance_to_identity(*cls, k);
        Vec w = static_cast<double>(k) * phi.shift;
        double s = 0.0;
        for (int i = 0; i < w.size(); ++i) {
            double f = w[i] - std::round(w[i]);
            s += f * f;
        }
        return std::sqrt(s);
    };

    long prev = k_lo - 1;
    bool have_prev = false;
    for (long k = k_lo; k <= k_hi; ++k) {
        if (dist(k) < eps) {
            out.indices.push_back(k);
            if (have_prev) out.max_gap = std::max(out.max_gap, k - prev);
            prev = k;
            have_prev = true;
        }
    }
    if (out.indices.empty()) out.max_gap = k_hi - k_lo + 1;
    return out;
}

}  // namespace ptb
