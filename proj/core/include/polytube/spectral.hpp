#ifndef POLYTUBE_SPECTRAL_HPP
#define POLYTUBE_SPECTRAL_HPP

#include <variant>
#include <vector>

#include "polytube/common.hpp"

namespace ptb {

// --- Dirichlet box modes ------------------------------------------------------

struct BoxMode {
    std::vector<double> dims;
    std::vector<int> indices;
    double eigenvalue() const;
    double value(const Vec& x) const;  // L2-normalized product of sines
};

// Mass of |u|^2 over the eps-neighborhood of the (n-2)-skeleton of the box.
// Decomposition quadrature (corner sectors in 2D; edge cylinders with
// inclusion-exclusion in 3D), Gauss rules on smooth pieces.
double box_mode_mass(const std::vector<double>& dims,
                     const std::vector<int>& indices, double eps);

// Independent check: slice-stacked midpoint quadrature on a different
// decomposition of the same region.
double box_mode_mass_oracle(const std::vector<double>& dims,
                            const std::vector<int>& indices, double eps);

struct BoxMassInfimum {
    double min_mass = 0.0;
    std::vector<int> argmin;
};

BoxMassInfimum box_mass_infimum(const std::vector<double>& dims,
                                int index_bound, double eps);

// --- hemisphere boundary concentration ----------------------------------------

struct HemisphereMass {
    double band_mass = 0.0;           // share of |u|^2 within the band
    double normalization = 0.0;       // L2-normalizing constant
    double normalization_ratio = 0.0; // normalization / l^{3/4}
};

HemisphereMass hemisphere_mode_mass(int l, double band_halfwidth);

// --- mapping torus spectra ------------------------------------------------------

struct IntervalSection {
    double a = 1.0;   // interval [0, a]
    bool flip = false; // gluing map x -> a - x instead of the identity
};
struct DiscSection {
    double rho = 1.0;  // disc radius; gluing map = rotation by alpha
};
using TorusSection = std::variant<IntervalSection, DiscSection>;

struct TorusEigen {
    double mu = 0.0;      // cross-section eigenvalue
    double nu = 0.0;      // gluing phase, in [0, 2 pi / L)
    long k = 0;
    long m = 0, j = 0;    // mode labels (angular, radial) or (m, 0)
    double eigenvalue = 0.0;  // mu + (nu + 2 k pi / L)^2
};

struct MappingTorusSpectrum {
    TorusSection section;
    double alpha = 0.0;
    double L = 1.0;
    std::vector<TorusEigen> eigendata;  // ascending
};

MappingTorusSpectrum mapping_torus_spectrum(const TorusSection& section,
                                            double alpha, double L, int count);

// j-th positive zero of the Bessel function J_m, to ~1e-12.
double bessel_zero(int m, int j);

struct TorusQuadratureReport {
    double max_norm_deviation = 0.0;   // | ||e||^2 - L | over sampled modes
    double max_cross_product = 0.0;    // |<e, e'>| over sampled pairs
};

// Quadrature verification of the orthogonality and squared norm L of the
// mapping-torus eigenbasis (disc sections).
TorusQuadratureReport verify_torus_eigenbasis(const MappingTorusSpectrum& spec,
                                              int pairs, unsigned seed = 1);

// --- discrete observability -----------------------------------------------------

// Interior nodes of [0,1] with the first and last `fraction` marked as the
// control region.
std::vector<int> boundary_omega(long N, double fraction);

// C(s) from the quadratic form |A^{-1/2}(A-s)v|^2 + |v restricted to omega|^2
// relative to |v|^2, with A the Dirichlet finite-difference Laplacian.
double observability_constant(long N, const std::vector<int>& omega, double s);

// Fourier reduction over a list of cross-section eigenvalues: the worst
// shifted single-domain constant.
double product_observability(long N, const std::vector<int>& omega, double s,
                             const std::vector<double>& cross_modes);

}  // namespace ptb

#endif
