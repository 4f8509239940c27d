#include "polytube/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

namespace ptb {

namespace {

constexpr double kPi = std::numbers::pi;

// nodes/weights for Gauss-Legendre on [-1, 1], Newton on Legendre polynomials
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) {
        double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        double p0 = 1.0, p1 = t;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double dp = n * (t * p1 - p0) / (t * t - 1.0);
        x[i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
}

struct GaussRule {
    std::vector<double> x, w;
    explicit GaussRule(int n) { gauss_legendre(n, x, w); }
    template <typename F>
    double integrate(double a, double b, F f) const {
        double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        double s = 0.0;
        for (size_t i = 0; i < x.size(); ++i)
            s += w[i] * f(mid + half * x[i]);
        return s * half;
    }
};

// int_0^T sin^2(alpha t) dt
double sin2_integral(double alpha, double T) {
    if (std::abs(alpha) < 1e-14) return 0.0;
    return 0.5 * T - std::sin(2.0 * alpha * T) / (4.0 * alpha);
}

// quarter-disc integral Q = int_{r<eps, x,y>0} sin^2(ax) sin^2(by)
double quarter_disc_gauss(double a, double b, double eps, int n = 64) {
    GaussRule g(n);
    return g.integrate(0.0, 0.5 * kPi, [&](double th) {
        double cx = std::cos(th), sy = std::sin(th);
        return g.integrate(0.0, eps, [&](double r) {
            double sx = std::sin(a * r * cx);
            double syv = std::sin(b * r * sy);
            return sx * sx * syv * syv * r;
        });
    });
}

double quarter_disc_midpoint(double a, double b, double eps, int n = 512) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        double th = 0.5 * kPi * (i + 0.5) / n;
        double cx = std::cos(th), sy = std::sin(th);
        for (int j = 0; j < n; ++j) {
            double r = eps * (j + 0.5) / n;
            double sx = std::sin(a * r * cx);
            double syv = std::sin(b * r * sy);
            acc += sx * sx * syv * syv * r;
        }
    }
    return acc * (0.5 * kPi / n) * (eps / n);
}

// lens overlap of two corner discs on one side of a 2D box: shared axis s
// (side length a), transverse factor integrated in closed form
double corner_lens_overlap(double alpha_s, double alpha_o, double a,
                           double eps, const GaussRule& g) {
    if (2.0 * eps <= a) return 0.0;
    // x in [a - eps, a/2]: radius sqrt(eps^2 - (x-a)^2); mirrored branch after
    double lo_phi = std::asin(a / (2.0 * eps));
    double left = g.integrate(lo_phi, 0.5 * kPi, [&](double phi) {
        double x = a - eps * std::sin(phi);
        double s = std::sin(alpha_s * x);
        return s * s * sin2_integral(alpha_o, eps * std::cos(phi)) * eps *
               std::cos(phi);
    });
    double right = g.integrate(lo_phi, 0.5 * kPi, [&](double phi) {
        double x = eps * std::sin(phi);
        double s = std::sin(alpha_s * x);
        return s * s * sin2_integral(alpha_o, eps * std::cos(phi)) * eps *
               std::cos(phi);
    });
    return left + right;
}

// pair overlap of two edge cylinders sharing coordinate xi:
// int_0^eps sin^2(a_s xi) S_u(sqrt(eps^2-xi^2)) S_w(sqrt(eps^2-xi^2)) dxi
double cylinder_pair_overlap(double a_s, double a_u, double a_w, double eps,
                             const GaussRule& g) {
    return g.integrate(0.0, 0.5 * kPi, [&](double phi) {
        double xi = eps * std::sin(phi);
        double T = eps * std::cos(phi);
        double s = std::sin(a_s * xi);
        return s * s * sin2_integral(a_u, T) * sin2_integral(a_w, T) * eps *
               std::cos(phi);
    });
}

// triple overlap of the three cylinders at a vertex
double cylinder_triple_overlap(double a1, double a2, double a3, double eps,
                               const GaussRule& g) {
    auto slab = [&](double z) {
        double aa = std::sqrt(std::max(0.0, eps * eps - z * z));
        if (2.0 * aa * aa <= eps * eps)
            return sin2_integral(a1, aa) * sin2_integral(a2, aa);
        double b = std::sqrt(eps * eps - aa * aa);
        double part1 = sin2_integral(a1, b) * sin2_integral(a2, aa);
        double part2 = g.integrate(b, aa, [&](double x) {
            double sx = std::sin(a1 * x);
            return sx * sx *
                   sin2_integral(a2, std::sqrt(eps * eps - x * x));
        });
        return part1 + part2;
    };
    return g.integrate(0.0, 0.5 * kPi, [&](double phi) {
        double z = eps * std::sin(phi);
        double s = std::sin(a3 * z);
        return s * s * slab(z) * eps * std::cos(phi);
    });
}

}  // namespace

double BoxMode::eigenvalue() const {
    double s = 0.0;
    for (size_t i = 0; i < dims.size(); ++i) {
        double a = indices[i] * kPi / dims[i];
        s += a * a;
    }
    return s;
}

double BoxMode::value(const Vec& x) const {
    double v = 1.0;
    for (size_t i = 0; i < dims.size(); ++i)
        v *= std::sqrt(2.0 / dims[i]) *
             std::sin(indices[i] * kPi * x[static_cast<long>(i)] / dims[i]);
    return v;
}

double box_mode_mass(const std::vector<double>& dims,
                     const std::vector<int>& indices, double eps) {
    const int n = static_cast<int>(dims.size());
    std::vector<double> alpha(n);
    for (int i = 0; i < n; ++i) alpha[i] = indices[i] * kPi / dims[i];
    double norm = 1.0;
    for (int i = 0; i < n; ++i) norm *= 2.0 / dims[i];

    if (n == 2) {
        // valid until the skeleton neighborhood covers the centre
        double limit = std::min(
            *std::min_element(dims.begin(), dims.end()),
            std::hypot(dims[0], dims[1]) / 2.0);
        if (eps >= limit)
            throw Error("box_mode_mass needs eps below the vertex inradius");
        double q = quarter_disc_gauss(alpha[0], alpha[1], eps, 48);
        double q_fine = quarter_disc_gauss(alpha[0], alpha[1], eps, 80);
        if (std::abs(q - q_fine) > 1e-8 * std::max(1.0, std::abs(q_fine)))
            throw QuadratureBudget("corner quadrature did not settle");
        GaussRule g(64);
        double lens_x = corner_lens_overlap(alpha[0], alpha[1], dims[0], eps, g);
        double lens_y = corner_lens_overlap(alpha[1], alpha[0], dims[1], eps, g);
        return norm * (4.0 * q_fine - 2.0 * lens_x - 2.0 * lens_y);
    }
    if (n != 3) throw Error("box_mode_mass implemented for n = 2, 3");
    double inr = *std::min_element(dims.begin(), dims.end()) / 2.0;
    if (eps >= inr) throw Error("box_mode_mass needs eps below half the side");

    GaussRule g(64);
    // 4 parallel edges per direction; the edge integral separates
    double singles = 0.0;
    int other[3][2] = {{1, 2}, {0, 2}, {0, 1}};
    for (int d = 0; d < 3; ++d) {
        int u = other[d][0], w = other[d][1];
        double q = quarter_disc_gauss(alpha[u], alpha[w], eps, 48);
        singles += 4.0 * q * sin2_integral(alpha[d], dims[d]);
    }
    // per vertex: subtract pairwise overlaps, add the triple
    double pairs = 0.0;
    for (int shared = 0; shared < 3; ++shared) {
        int u = other[shared][0], w = other[shared][1];
        pairs += cylinder_pair_overlap(alpha[shared], alpha[u], alpha[w], eps, g);
    }
    double triple = cylinder_triple_overlap(alpha[0], alpha[1], alpha[2], eps, g);
    return norm * (singles - 8.0 * pairs + 8.0 * triple);
}

double box_mode_mass_oracle(const std::vector<double>& dims,
                            const std::vector<int>& indices, double eps) {
    const int n = static_cast<int>(dims.size());
    if (eps > *std::min_element(dims.begin(), dims.end()) / 2.0)
        throw Error("oracle decomposition needs eps at most half the side");
    std::vector<double> alpha(n);
    for (int i = 0; i < n; ++i) alpha[i] = indices[i] * kPi / dims[i];
    double norm = 1.0;
    for (int i = 0; i < n; ++i) norm *= 2.0 / dims[i];

    if (n == 2)
        return 4.0 * norm * quarter_disc_midpoint(alpha[0], alpha[1], eps);
    if (n != 3) throw Error("box_mode_mass_oracle implemented for n = 2, 3");

    // slice stack in z: frame strips plus corner discs per slice
    const double a1 = dims[0], a2 = dims[1], a3 = dims[2];
    double qd = quarter_disc_midpoint(alpha[0], alpha[1], eps, 400);

    auto frame_integral = [&](double w) {
        double full = sin2_integral(alpha[0], a1) * sin2_integral(alpha[1], a2);
        double ix = sin2_integral(alpha[0], a1 - w) - sin2_integral(alpha[0], w);
        double iy = sin2_integral(alpha[1], a2 - w) - sin2_integral(alpha[1], w);
        return full - ix * iy;
    };
    auto corner_beyond = [&](double w) {
        // {r < eps, x > w, y > w}, midpoint over theta and r
        if (w * std::sqrt(2.0) >= eps) return 0.0;
        double th_lo = std::asin(w / eps), th_hi = std::acos(w / eps);
        const int nt = 200, nr = 200;
        double acc = 0.0;
        for (int i = 0; i < nt; ++i) {
            double th = th_lo + (th_hi - th_lo) * (i + 0.5) / nt;
            double rmin = std::max(w / std::cos(th), w / std::sin(th));
            if (rmin >= eps) continue;
            for (int j = 0; j < nr; ++j) {
                double r = rmin + (eps - rmin) * (j + 0.5) / nr;
                double sx = std::sin(alpha[0] * r * std::cos(th));
                double sy = std::sin(alpha[1] * r * std::sin(th));
                acc += sx * sx * sy * sy * r * (eps - rmin) / nr;
            }
        }
        return acc * (th_hi - th_lo) / nt;
    };
    auto slice = [&](double z) {
        double zmin = std::min(z, a3 - z);
        if (zmin >= eps) return 4.0 * qd;
        double w = std::sqrt(eps * eps - zmin * zmin);
        return frame_integral(w) + 4.0 * corner_beyond(w);
    };

    // z in [0, eps] with substitution z = eps sin(phi), middle band closed form
    const int nz = 400;
    double acc = 0.0;
    for (int i = 0; i < nz; ++i) {
        double phi = 0.5 * kPi * (i + 0.5) / nz;
        double z = eps * std::sin(phi);
        double s = std::sin(alpha[2] * z);
        acc += s * s * slice(z) * eps * std::cos(phi) * (0.5 * kPi / nz);
        double z2 = a3 - z;  // mirrored top band
        double s2 = std::sin(alpha[2] * z2);
        acc += s2 * s2 * slice(z2) * eps * std::cos(phi) * (0.5 * kPi / nz);
    }
    double mid = (sin2_integral(alpha[2], a3 - eps) - sin2_integral(alpha[2], eps)) *
                 4.0 * qd;
    return norm * (acc + mid);
}

BoxMassInfimum box_mass_infimum(const std::vector<double>& dims,
                                int index_bound, double eps) {
    const int n = static_cast<int>(dims.size());
    BoxMassInfimum out;
    out.min_mass = std::numeric_limits<double>::infinity();
    std::vector<int> idx(n, 1);
    for (;;) {
        double m = box_mode_mass(dims, idx, eps);
        if (m < out.min_mass) {
            out.min_mass = m;
            out.argmin = idx;
        }
        int d = 0;
        for (; d < n; ++d) {
            if (++idx[d] <= index_bound) break;
            idx[d] = 1;
        }
        if (d == n) break;
    }
    return out;
}

HemisphereMass hemisphere_mode_mass(int l, double band_halfwidth) {
    if (l < 2) throw Error("hemisphere mode needs l >= 2");
    GaussRule g(512);
    auto density = [&](double th) {
        // |u|^2 sin(theta) with u = (sin th)^(l-1) cos th, phase dropped
        return std::pow(std::sin(th), 2 * l - 1) * std::cos(th) * std::cos(th);
    };
    double total = g.integrate(0.0, 0.5 * kPi, density) * 2.0 * kPi;
    double band = g.integrate(0.5 * kPi - band_halfwidth, 0.5 * kPi, density) *
                  2.0 * kPi;
    HemisphereMass out;
    out.band_mass = band / total;
    out.normalization = 1.0 / std::sqrt(total);
    out.normalization_ratio = out.normalization / std::pow(l, 0.75);
    return out;
}

// --- Bessel ---------------------------------------------------------------------

double bessel_zero(int m, int j) {
    static std::map<std::pair<int, int>, double> cache;
    auto it = cache.find({m, j});
    if (it != cache.end()) return it->second;
    auto f = [&](double x) { return std::cyl_bessel_j(m, x); };
    // scan for sign changes past the turning point x ~ m
    double x = std::max(1.0, static_cast<double>(m));
    double prev = f(x);
    int found = 0;
    double step = 0.05;
    for (long it = 0; it < 4000000; ++it) {
        double xn = x + step;
        double cur = f(xn);
        if (prev == 0.0) prev = 1e-300;
        if ((prev < 0) != (cur < 0)) {
            ++found;
            if (found == j) {
                double lo = x, hi = xn;
                for (int b = 0; b < 200; ++b) {
                    double mid = 0.5 * (lo + hi);
                    if ((f(lo) < 0) != (f(mid) < 0))
                        hi = mid;
                    else
                        lo = mid;
                    if (hi - lo < 1e-14) break;
                }
                double z = 0.5 * (lo + hi);
                cache[{m, j}] = z;
                return z;
            }
        }
        prev = cur;
        x = xn;
    }
    throw Error("bessel zero search exhausted");
}

MappingTorusSpectrum mapping_torus_spectrum(const TorusSection& section,
                                            double alpha, double L, int count) {
    MappingTorusSpectrum out;
    out.section = section;
    out.alpha = alpha;
    out.L = L;
    const double two_pi_over_L = 2.0 * kPi / L;

    auto wrap_nu = [&](double nu) {
        nu = std::fmod(nu, two_pi_over_L);
        if (nu < 0) nu += two_pi_over_L;
        return nu;
    };

    std::vector<TorusEigen> all;
    if (const auto* iv = std::get_if<IntervalSection>(&section)) {
        int mmax = 8, kmax = 8;
        for (;;) {
            all.clear();
            for (int m = 1; m <= mmax; ++m) {
                double mu = std::pow(m * kPi / iv->a, 2);
                double nu = 0.0;
                if (iv->flip && m % 2 == 0) nu = wrap_nu(kPi / L);
                for (long k = -kmax; k <= kmax; ++k) {
                    double freq = nu + two_pi_over_L * k;
                    all.push_back({mu, nu, k, m, 0, mu + freq * freq});
                }
            }
            std::sort(all.begin(), all.end(),
                      [](const TorusEigen& a, const TorusEigen& b) {
                          return a.eigenvalue < b.eigenvalue;
                      });
            double guard = std::min(std::pow((mmax + 1) * kPi / iv->a, 2),
                                    std::pow(two_pi_over_L * kmax, 2));
            if (static_cast<int>(all.size()) >= count &&
                all[count - 1].eigenvalue < guard)
                break;
            mmax *= 2;
            kmax *= 2;
        }
    } else {
        const auto& disc = std::get<DiscSection>(section);
        int mmax = 8, jmax = 8, kmax = 8;
        for (;;) {
            all.clear();
            for (int m = -mmax; m <= mmax; ++m) {
                for (int j = 1; j <= jmax; ++j) {
                    double z = bessel_zero(std::abs(m), j);
                    double mu = std::pow(z / disc.rho, 2);
                    double nu = wrap_nu(m * alpha / L);
                    for (long k = -kmax; k <= kmax; ++k) {
                        double freq = nu + two_pi_over_L * k;
                        all.push_back({mu, nu, k, m, j, mu + freq * freq});
                    }
                }
            }
            std::sort(all.begin(), all.end(),
                      [](const TorusEigen& a, const TorusEigen& b) {
                          return a.eigenvalue < b.eigenvalue;
                      });
            double mu_guard = std::min(
                std::pow(bessel_zero(mmax + 1, 1) / disc.rho, 2),
                std::pow(bessel_zero(0, jmax + 1) / disc.rho, 2));
            double guard =
                std::min(mu_guard, std::pow(two_pi_over_L * (kmax - 1), 2));
            if (static_cast<int>(all.size()) >= count &&
                all[count - 1].eigenvalue < guard)
                break;
            mmax = static_cast<int>(mmax * 1.5) + 1;
            jmax = static_cast<int>(jmax * 1.5) + 1;
            kmax = static_cast<int>(kmax * 1.5) + 1;
        }
    }
    all.resize(count);
    out.eigendata = std::move(all);
    return out;
}

TorusQuadratureReport verify_torus_eigenbasis(const MappingTorusSpectrum& spec,
                                              int pairs, unsigned seed) {
    const auto* disc = std::get_if<DiscSection>(&spec.section);
    if (!disc) throw UnsupportedCrossSection("verification works on discs");
    TorusQuadratureReport rep;
    GaussRule gr(128);
    const double L = spec.L;
    const double two_pi_over_L = 2.0 * kPi / L;

    auto radial_norm = [&](long m, long j) {
        double z = bessel_zero(static_cast<int>(std::abs(m)),
                               static_cast<int>(j));
        return gr.integrate(0.0, disc->rho, [&](double r) {
            double v = std::cyl_bessel_j(std::abs(m), z * r / disc->rho);
            return v * v * r;
        });
    };
    auto radial_cross = [&](long m, long j1, long j2) {
        double z1 = bessel_zero(static_cast<int>(std::abs(m)),
                                static_cast<int>(j1));
        double z2 = bessel_zero(static_cast<int>(std::abs(m)),
                                static_cast<int>(j2));
        return gr.integrate(0.0, disc->rho, [&](double r) {
            return std::cyl_bessel_j(std::abs(m), z1 * r / disc->rho) *
                   std::cyl_bessel_j(std::abs(m), z2 * r / disc->rho) * r;
        });
    };

    // closed-form L2 normalization of a disc mode: |J_m(z r/rho)|^2 integrates
    // to rho^2 J_{m+1}(z)^2 / 2
    auto closed_norm = [&](long m, long j) {
        double z = bessel_zero(static_cast<int>(std::abs(m)),
                               static_cast<int>(j));
        double jn = std::cyl_bessel_j(static_cast<int>(std::abs(m)) + 1, z);
        return 1.0 / (disc->rho * std::sqrt(kPi) * std::abs(jn));
    };

    std::mt19937 rng(seed);
    std::uniform_int_distribution<size_t> pick(0, spec.eigendata.size() - 1);
    for (int p = 0; p < pairs; ++p) {
        const auto& e1 = spec.eigendata[pick(rng)];
        const auto& e2 = spec.eigendata[pick(rng)];
        // quadrature norm of the closed-form-normalized mode against L
        double c1 = closed_norm(e1.m, e1.j);
        double norm_sq = c1 * c1 * 2.0 * kPi * radial_norm(e1.m, e1.j) * L;
        rep.max_norm_deviation =
            std::max(rep.max_norm_deviation, std::abs(norm_sq - L));

        if (e1.m == e2.m && e1.j == e2.j && e1.k == e2.k) continue;
        double theta_part = (e1.m == e2.m) ? 2.0 * kPi : 0.0;
        double radial_part = (e1.m == e2.m)
                                 ? ((e1.j == e2.j) ? radial_norm(e1.m, e1.j)
                                                   : radial_cross(e1.m, e1.j,
                                                                  e2.j))
                                 : 0.0;
        double dfreq = (e1.nu + two_pi_over_L * e1.k) -
                       (e2.nu + two_pi_over_L * e2.k);
        std::complex<double> tpart;
        if (std::abs(dfreq) < 1e-14)
            tpart = L;
        else
            tpart = (std::exp(std::complex<double>(0, dfreq * L)) - 1.0) /
                    std::complex<double>(0, dfreq);
        double normalize1 = 1.0 / std::sqrt(2.0 * kPi * radial_norm(e1.m, e1.j));
        double normalize2 = 1.0 / std::sqrt(2.0 * kPi * radial_norm(e2.m, e2.j));
        double inner = std::abs(theta_part * radial_part * tpart) * normalize1 *
                       normalize2;
        rep.max_cross_product = std::max(rep.max_cross_product, inner);
    }
    return rep;
}

// --- discrete observability -------------------------------------------------------

std::vector<int> boundary_omega(long N, double fraction) {
    std::vector<int> omega;
    long cut = std::max<long>(1, static_cast<long>(fraction * N));
    for (long i = 0; i < N; ++i)
        if (i < cut || i >= N - cut) omega.push_back(static_cast<int>(i));
    return omega;
}

double observability_constant(long N, const std::vector<int>& omega, double s) {
    if (N < 3) throw SingularGrid("grid too small");
    if (omega.empty()) throw SingularGrid("empty control region");
    const double h = 1.0 / (N + 1);

    // analytic eigenpairs of the Dirichlet FD Laplacian on (0,1)
    Vec lambda(N);
    Mat V(N, N);
    for (long k = 1; k <= N; ++k) {
        lambda[k - 1] = (4.0 / (h * h)) * std::pow(std::sin(0.5 * k * kPi * h), 2);
        for (long i = 1; i <= N; ++i)
            V(i - 1, k - 1) = std::sin(k * kPi * i * h);
        V.col(k - 1).normalize();
    }

    Mat M = Mat::Zero(N, N);
    for (long k = 0; k < N; ++k)
        M(k, k) = std::pow(lambda[k] - s, 2) / lambda[k];
    // contribution of the control region in the eigenbasis
    Mat Vo(omega.size(), N);
    for (size_t r = 0; r < omega.size(); ++r) Vo.row(r) = V.row(omega[r]);
    M += Vo.transpose() * Vo;

    Eigen::SelfAdjointEigenSolver<Mat> es(M, Eigen::EigenvaluesOnly);
    double lam_min = es.eigenvalues()[0];
    if (lam_min <= 0) throw SingularGrid("quadratic form not positive");
    return 1.0 / std::sqrt(lam_min);
}

double product_observability(long N, const std::vector<int>& omega, double s,
                             const std::vector<double>& cross_modes) {
    double worst = 0.0;
    for (double lam : cross_modes)
        worst = std::max(worst, observability_constant(N, omega, s - lam));
    return worst;
}

}  // namespace ptb
