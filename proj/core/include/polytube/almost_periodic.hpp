#ifndef POLYTUBE_ALMOST_PERIODIC_HPP
#define POLYTUBE_ALMOST_PERIODIC_HPP

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "polytube/tubes.hpp"

namespace ptb {

using CVec = Eigen::VectorXcd;

// Sampled map from time into a finite-dimensional inner-product space.
struct APSignal {
    std::function<CVec(double)> evaluate;
    int range_dim = 1;
    double sample_step = 0.01;
    double window = 200.0;  // numerics window [-window, window] or [0, window]
    std::vector<std::pair<double, CVec>> known_spectrum;
};

APSignal make_scalar_signal(std::function<std::complex<double>(double)> f,
                            double sample_step = 0.01, double window = 200.0);

struct AlmostPeriodReport {
    double eps = 0.0;
    std::vector<double> periods;  // passing shifts, ascending
    // max gap between consecutive passes; infinity when none found
    double inclusion_length = std::numeric_limits<double>::infinity();
    // the same report computed on a doubled window, for stability checks
    double inclusion_length_2w = std::numeric_limits<double>::infinity();
};

// Scans shifts tau over [grid step, tau_max] and keeps those with
// sup_{t in window} |f(t+tau) - f(t)| <= eps.
AlmostPeriodReport almost_periods(const APSignal& f, double eps,
                                  double tau_max);

struct BohrResult {
    std::vector<double> T_values;
    std::vector<CVec> estimates;    // (1/2T) int_{-T}^{T} f e^{-i lambda t}
    CVec value;                     // estimate at the largest T
    std::vector<double> successive_differences;
    bool convergent = true;         // differences decreasing
};

BohrResult bohr_coefficient(const APSignal& f, double lambda,
                            const std::vector<double>& T_list);

struct ParsevalReport {
    double mean_square = 0.0;  // mean of |f|^2 over [-T, T]
    double coeff_sum = 0.0;    // sum of |a_k|^2 over the given frequencies
    double defect = 0.0;       // mean_square - coeff_sum (tail mass)
};

ParsevalReport parseval_check(const APSignal& f,
                              const std::vector<double>& frequencies, double T);

// Pullback of a test function through the tube map, sampled on a fixed grid
// of cross-section points: t -> (g(F(p_i, t)))_i.
APSignal tube_pullback_signal(const ConvexPolytope& P, const PeriodicTube& tube,
                              std::function<double(const Vec&)> g,
                              int grid_points = 16, double sample_step = 0.02,
                              double window = 100.0);

}  // namespace ptb

#endif
