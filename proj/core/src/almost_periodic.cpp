#include "polytube/almost_periodic.hpp"

#include <cmath>
#include <memory>
#include <numbers>

namespace ptb {

APSignal make_scalar_signal(std::function<std::complex<double>(double)> f,
                            double sample_step, double window) {
    APSignal s;
    s.evaluate = [f](double t) {
        CVec v(1);
        v[0] = f(t);
        return v;
    };
    s.range_dim = 1;
    s.sample_step = sample_step;
    s.window = window;
    return s;
}

AlmostPeriodReport almost_periods(const APSignal& f, double eps,
                                  double tau_max) {
    AlmostPeriodReport rep;
    rep.eps = eps;
    const double h = f.sample_step;

    auto run = [&](double window) {
        const long n_window = static_cast<long>(window / h);
        const long n_total = n_window + static_cast<long>(tau_max / h) + 1;
        std::vector<CVec> samples(n_total);
        for (long i = 0; i < n_total; ++i) samples[i] = f.evaluate(i * h);

        std::vector<double> passes;
        const long tau_steps = static_cast<long>(tau_max / h);
        for (long k = 1; k <= tau_steps; ++k) {
            double sup = 0.0;
            for (long i = 0; i < n_window; ++i) {
                sup = std::max(sup, (samples[i + k] - samples[i]).norm());
                if (sup > eps) break;
            }
            if (sup <= eps) passes.push_back(k * h);
        }
        double gap = std::numeric_limits<double>::infinity();
        if (!passes.empty()) {
            gap = passes.front();
            for (size_t i = 1; i < passes.size(); ++i)
                gap = std::max(gap, passes[i] - passes[i - 1]);
            // a trailing stretch longer than every observed gap means the
            // scan found no relatively dense set at this scale
            if (tau_max - passes.back() > gap)
                gap = std::numeric_limits<double>::infinity();
        }
        return std::make_pair(passes, gap);
    };

    auto [passes, gap] = run(f.window);
    rep.periods = std::move(passes);
    rep.inclusion_length = gap;
    rep.inclusion_length_2w = run(2.0 * f.window).second;
    return rep;
}

BohrResult bohr_coefficient(const APSignal& f, double lambda,
                            const std::vector<double>& T_list) {
    BohrResult out;
    out.T_values = T_list;
    const double h = f.sample_step;
    const std::complex<double> I(0.0, 1.0);

    for (double T : T_list) {
        const long n = static_cast<long>(T / h);
        CVec acc = CVec::Zero(f.range_dim);
        // trapezoid over [-T, T]
        for (long i = -n; i <= n; ++i) {
            double t = i * h;
            double w = (i == -n || i == n) ? 0.5 : 1.0;
            acc += w * f.evaluate(t) * std::exp(-I * lambda * t);
        }
        acc *= h / (2.0 * T);
        out.estimates.push_back(acc);
    }
    out.value = out.estimates.back();
    for (size_t i = 1; i < out.estimates.size(); ++i)
        out.successive_differences.push_back(
            (out.estimates[i] - out.estimates[i - 1]).norm());
    for (size_t i = 1; i < out.successive_differences.size(); ++i)
        if (out.successive_differences[i] >
            out.successive_differences[i - 1] + 1e-12)
            out.convergent = false;
    return out;
}

ParsevalReport parseval_check(const APSignal& f,
                              const std::vector<double>& frequencies,
                              double T) {
    ParsevalReport rep;
    const double h = f.sample_step;
    const long n = static_cast<long>(T / h);
    double acc = 0.0;
    for (long i = -n; i <= n; ++i) {
        double w = (i == -n || i == n) ? 0.5 : 1.0;
        acc += w * f.evaluate(i * h).squaredNorm();
    }
    rep.mean_square = acc * h / (2.0 * T);
    for (double lambda : frequencies) {
        auto bohr = bohr_coefficient(f, lambda, {T});
        rep.coeff_sum += bohr.value.squaredNorm();
    }
    rep.defect = rep.mean_square - rep.coeff_sum;
    return rep;
}

APSignal tube_pullback_signal(const ConvexPolytope& P, const PeriodicTube& tube,
                              std::function<double(const Vec&)> g,
                              int grid_points, double sample_step,
                              double window) {
    if (!tube.cross_sec) throw Error("tube needs a computed cross-section");
    const CrossSection& cs = *tube.cross_sec;
    const int td = cs.dim();

    // fixed deterministic grid inside the cross-section
    std::vector<Vec> grid;
    if (td == 1) {
        const auto& iv = std::get<IntervalRegion>(cs.region);
        for (int i = 0; i < grid_points; ++i) {
            Vec p(1);
            p[0] = iv.lo + (iv.hi - iv.lo) * (i + 0.5) / grid_points;
            grid.push_back(p);
        }
    } else {
        double r = cs.inradius() * 0.9;
        int placed = 0;
        for (int ring = 1; placed < grid_points; ++ring) {
            int on_ring = std::min(grid_points - placed, 4 * ring);
            for (int i = 0; i < on_ring; ++i) {
                double ang = 2.0 * std::numbers::pi * i / on_ring + 0.3 * ring;
                Vec p(2);
                p << r * ring / 4.0 * std::cos(ang), r * ring / 4.0 * std::sin(ang);
                if (ring <= 4 && cs.contains(p)) {
                    grid.push_back(p);
                    ++placed;
                }
            }
            if (ring > 4) break;
        }
        if (grid.empty()) grid.push_back(Vec::Zero(2));
    }

    auto mapper = std::make_shared<TubeMapper>(P, tube);
    APSignal s;
    s.range_dim = static_cast<int>(grid.size());
    s.sample_step = sample_step;
    s.window = window;
    s.evaluate = [mapper, grid, g](double t) {
        CVec v(grid.size());
        for (size_t i = 0; i < grid.size(); ++i)
            v[static_cast<long>(i)] = g(mapper->point(grid[i], t));
        return v;
    };
    return s;
}

}  // namespace ptb
