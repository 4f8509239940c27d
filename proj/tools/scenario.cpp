#include "scenario.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "polytube/almost_periodic.hpp"
#include "polytube/estimates.hpp"
#include "polytube/polytope_io.hpp"
#include "polytube/spectral.hpp"

namespace ptb::cli {

using nlohmann::json;

namespace {

struct CheckFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MissingInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct FieldError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require_fields(const json& j, const std::set<std::string>& allowed) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw FieldError("unknown field '" + it.key() + "'");
}

std::string resolve_output(const std::string& path, const RunOptions& opts) {
    if (opts.out_dir.empty()) return path;
    return (std::filesystem::path(opts.out_dir) /
            std::filesystem::path(path).filename())
        .string();
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw MissingInput("cannot open output path: " + path);
    out.precision(17);
    return out;
}

ConvexPolytope load_table(const json& j, double tol) {
    if (j.is_string()) {
        std::string path = j.get<std::string>();
        if (!std::filesystem::exists(path))
            throw MissingInput("polytope file not found: " + path);
        return load_polytope_file(path, tol);
    }
    return load_polytope_json(j.dump(), tol);
}

Vec parse_vec(const json& j) {
    auto v = j.get<std::vector<double>>();
    Vec out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[static_cast<long>(i)] = v[i];
    return out;
}

Mat parse_mat(const json& j) {
    auto rows = j.get<std::vector<std::vector<double>>>();
    Mat out(rows.size(), rows[0].size());
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t k = 0; k < rows[i].size(); ++k)
            out(static_cast<long>(i), static_cast<long>(k)) = rows[i][k];
    return out;
}

TubeSearchBounds parse_bounds(const json& j, int threads) {
    TubeSearchBounds b;
    b.threads = threads;
    if (j.contains("max_word_period"))
        b.max_word_period = j.at("max_word_period").get<int>();
    if (j.contains("max_length"))
        b.max_length = j.at("max_length").get<double>();
    return b;
}

APSignal named_signal(const std::string& name, double step, double window) {
    const std::complex<double> I(0.0, 1.0);
    if (name == "sin")
        return make_scalar_signal(
            [](double t) { return std::complex<double>(std::sin(t), 0.0); },
            step, window);
    if (name == "sin_plus_sin_sqrt2")
        return make_scalar_signal(
            [](double t) {
                return std::complex<double>(
                    std::sin(t) + std::sin(std::sqrt(2.0) * t), 0.0);
            },
            step, window);
    if (name == "exp_i")
        return make_scalar_signal([I](double t) { return std::exp(I * t); },
                                  step, window);
    if (name == "linear_drift")
        return make_scalar_signal(
            [](double t) { return std::complex<double>(t, 0.0); }, step,
            window);
    throw MissingInput("unknown signal name: " + name);
}

json tube_to_json(const PeriodicTube& t) {
    json out;
    out["word"] = t.word_core;
    out["x0"] = std::vector<double>(t.x0.data(), t.x0.data() + t.x0.size());
    out["v"] = std::vector<double>(t.v.data(), t.v.data() + t.v.size());
    out["L"] = t.L;
    RotationClass rc = classify_rotation(t.transverse_rotation, 1e-9, 10000);
    out["rotation_angles"] = rc.canonical_angles;
    out["orientation"] = t.orientation == TubeOrientation::SO ? "SO" : "O-";
    out["q"] = t.q;
    out["maximal"] = t.maximal;
    out["clearance"] = t.clearance;
    if (t.cross_sec) {
        const auto& cs = *t.cross_sec;
        if (const auto* iv = std::get_if<IntervalRegion>(&cs.region))
            out["cross_section"] = {{"type", "interval"},
                                    {"lo", iv->lo},
                                    {"hi", iv->hi}};
        else if (const auto* d = std::get_if<DiscRegion>(&cs.region))
            out["cross_section"] = {{"type", "disc"}, {"radius", d->radius}};
        else {
            const auto& poly = std::get<Polygon2>(cs.region);
            json pts = json::array();
            for (const auto& p : poly.pts) pts.push_back({p.x(), p.y()});
            out["cross_section"] = {{"type", "polygon"}, {"points", pts}};
        }
    }
    return out;
}

int run_parsed(const json& sc, const RunOptions& opts) {
    const std::string kind = sc.at("kind").get<std::string>();
    const double tol = opts.tol_override > 0 ? opts.tol_override : kDefaultTol;

    if (kind == "trace") {
        require_fields(sc, {"kind", "polytope", "start", "limits", "eps_stop",
                            "output", "seed"});
        auto P = load_table(sc.at("polytope"), tol);
        const auto& st = sc.at("start");
        BilliardState start{parse_vec(st.at("pos")),
                            parse_vec(st.at("dir")).normalized(), std::nullopt};
        TraceLimits lim;
        if (sc.at("limits").contains("max_events"))
            lim.max_events = sc.at("limits").at("max_events").get<long>();
        if (sc.at("limits").contains("max_length"))
            lim.max_length = sc.at("limits").at("max_length").get<double>();
        double eps_stop = sc.value("eps_stop", 0.0);
        auto res = trace(P, start, lim, eps_stop);
        for (const auto& e : res.trajectory.events)
            if (std::abs(e.out_dir.norm() - 1.0) > 1e-9)
                throw CheckFailed("direction norm drifted during trace");
        auto out = open_output(resolve_output(sc.at("output"), opts));
        out << "event";
        for (int i = 0; i < P.dim; ++i) out << ",x" << i;
        out << ",facet,length\n";
        for (size_t i = 0; i < res.trajectory.events.size(); ++i) {
            const auto& e = res.trajectory.events[i];
            out << i;
            for (int c = 0; c < P.dim; ++c) out << ',' << e.point[c];
            out << ',' << e.facet << ',' << e.arc_length << "\n";
        }
        std::cout << "trace: " << res.trajectory.events.size() << " events, "
                  << "terminated="
                  << (res.trajectory.terminated == Termination::Ran
                          ? "ran"
                          : res.trajectory.terminated ==
                                    Termination::SingularHit
                                ? "singular"
                                : "tangent")
                  << "\n";
        return 0;
    }

    if (kind == "enumerate") {
        require_fields(sc, {"kind", "polytope", "eps", "bounds", "output",
                            "summary_output", "expect_count", "seed"});
        auto P = load_table(sc.at("polytope"), tol);
        double eps = sc.at("eps").get<double>();
        auto bounds = parse_bounds(sc.value("bounds", json::object()),
                                   opts.threads);
        TubeAtlas atlas = enumerate_tubes(P, eps, bounds);
        // closure invariant: re-trace each central orbit for 10 periods
        for (const auto& t : atlas.tubes) {
            TraceLimits lim;
            lim.max_events = 10 * static_cast<long>(
                                      t.word_core_effective().size()) + 1;
            auto tr = trace(P, {t.x0, t.v, std::nullopt}, lim, 0.0);
            if (tr.trajectory.terminated != Termination::Ran)
                throw CheckFailed("central orbit terminated while re-tracing");
        }
        json out_json;
        out_json["eps"] = eps;
        out_json["complete_within_bounds"] = atlas.complete_within_bounds;
        out_json["tubes"] = json::array();
        for (const auto& t : atlas.tubes) out_json["tubes"].push_back(tube_to_json(t));
        auto out = open_output(resolve_output(sc.at("output"), opts));
        out << out_json.dump(2) << "\n";
        if (sc.contains("summary_output")) {
            auto s = open_output(resolve_output(sc.at("summary_output"), opts));
            s << "eps,M,tube,L\n";
            for (size_t i = 0; i < atlas.tubes.size(); ++i)
                s << eps << ',' << atlas.tubes.size() << ',' << i << ','
                  << atlas.tubes[i].L << "\n";
        }
        if (sc.contains("expect_count") &&
            sc.at("expect_count").get<long>() !=
                static_cast<long>(atlas.tubes.size()))
            throw CheckFailed("atlas size differs from expect_count");
        std::cout << "enumerate: M(" << eps << ") = " << atlas.tubes.size()
                  << (atlas.complete_within_bounds ? "" : " (truncated)")
                  << "\n";
        return 0;
    }

    if (kind == "angle_check") {
        require_fields(sc, {"kind", "polytope", "eps", "bounds", "output",
                            "seed"});
        auto P = load_table(sc.at("polytope"), tol);
        double eps = sc.at("eps").get<double>();
        auto bounds = parse_bounds(sc.value("bounds", json::object()),
                                   opts.threads);
        TubeAtlas atlas = enumerate_tubes(P, eps, bounds);
        auto out = open_output(resolve_output(sc.at("output"), opts));
        out << "tube1,tube2,alpha,sin_alpha,bound,pass\n";
        long violations = 0, pairs = 0;
        for (size_t i = 0; i < atlas.tubes.size(); ++i) {
            for (size_t j = i + 1; j < atlas.tubes.size(); ++j) {
                try {
                    auto ac = angle_check(P, atlas.tubes[i], atlas.tubes[j], eps);
                    ++pairs;
                    if (!ac.pass) ++violations;
                    out << i << ',' << j << ',' << ac.alpha << ','
                        << ac.sin_alpha << ',' << ac.bound << ','
                        << (ac.pass ? 1 : 0) << "\n";
                } catch (const NoIntersectionFound&) {
                }
            }
        }
        std::cout << "angle_check: " << pairs << " intersecting pairs, "
                  << violations << " violations\n";
        if (violations > 0) throw CheckFailed("angle bound violated");
        return 0;
    }

    if (kind == "sum_check") {
        require_fields(sc, {"kind", "polytope", "eps_grid", "bounds", "output",
                            "seed"});
        auto P = load_table(sc.at("polytope"), tol);
        auto grid = sc.at("eps_grid").get<std::vector<double>>();
        auto bounds = parse_bounds(sc.value("bounds", json::object()),
                                   opts.threads);
        auto checks = sum_check(P, grid, bounds);
        auto out = open_output(resolve_output(sc.at("output"), opts));
        out << "eps,M,lhs,rhs_scale,ratio\n";
        for (const auto& c : checks)
            out << c.eps << ',' << c.M << ',' << c.lhs << ',' << c.rhs_scale
                << ',' << c.ratio << "\n";
        std::cout << "sum_check: " << checks.size() << " grid points\n";
        return 0;
    }

    if (kind == "density_N") {
        require_fields(sc, {"kind", "matrix", "eps_grid", "r", "output",
                            "seed"});
        Mat R = parse_mat(sc.at("matrix"));
        auto grid = sc.at("eps_grid").get<std::vector<double>>();
        double r = sc.at("r").get<double>();
        auto out = open_output(resolve_output(sc.at("output"), opts));
        out << "eps,N\n";
        for (double eps : grid) {
            auto res = orbit_density_N(R, eps, r);
            out << eps << ',' << res.N << "\n";
        }
        std::cout << "density_N: " << grid.size() << " eps values\n";
        return 0;
    }

    if (kind == "admissibility") {
        require_fields(sc, {"kind", "matrix", "torus_shift", "eps", "k_max",
                            "output", "seed"});
        IsometryDescriptor phi;
        if (sc.contains("matrix")) {
            phi.kind = IsometryDescriptor::Kind::Orthogonal;
            phi.matrix = parse_mat(sc.at("matrix"));
        } else if (sc.contains("torus_shift")) {
            phi.kind = IsometryDescriptor::Kind::TorusTranslation;
            phi.shift = parse_vec(sc.at("torus_shift"));
        } else {
            throw MissingInput("admissibility needs matrix or torus_shift");
        }
        double eps = sc.at("eps").get<double>();
        long k_max = sc.at("k_max").get<long>();
        auto set = admissibility_set(phi, eps, 0, k_max);
        auto out = open_output(resolve_output(sc.at("output"), opts));
        out << "k\n";
        for (long k : set.indices) out << k << "\n";
        std::cout << "admissibility: " << set.indices.size()
                  << " hits, max_gap = " << set.max_gap << "\n";
        return 0;
    }

    if (kind == "almost_period") {
        require_fields(sc, {"kind", "signal", "eps", "tau_max", "window",
                            "step", "output", "seed"});
        auto f = named_signal(sc.at("signal").get<std::string>(),
                              sc.value("step", 0.01), sc.value("window", 200.0));
        double eps = sc.at("eps").get<double>();
        double tau_max = sc.at("tau_max").get<double>();
        auto rep = almost_periods(f, eps, tau_max);
        auto out = open_output(resolve_output(sc.at("output"), opts));
        out << "tau\n";
        for (double t : rep.periods) out << t << "\n";
        std::cout << "almost_period: " << rep.periods.size()
                  << " periods, inclusion_length = " << rep.inclusion_length
                  << "\n";
        return 0;
    }

    if (kind == "bohr") {
        require_fields(sc, {"kind", "signal", "lambdas", "T", "window", "step",
                            "output", "seed"});
        double T = sc.at("T").get<double>();
        auto f = named_signal(sc.at("signal").get<std::string>(),
                              sc.value("step", 0.01), T);
        auto lambdas = sc.at("lambdas").get<std::vector<double>>();
        auto out = open_output(resolve_output(sc.at("output"), opts));
        out << "lambda,abs,re,im\n";
        for (double lam : lambdas) {
            auto b = bohr_coefficient(f, lam, {T});
            out << lam << ',' << b.value.norm() << ',' << b.value[0].real()
                << ',' << b.value[0].imag() << "\n";
        }
        std::cout << "bohr: " << lambdas.size() << " frequencies\n";
        return 0;
    }

    if (kind == "parseval") {
        require_fields(sc, {"kind", "signal", "frequencies", "T", "step",
                            "output", "seed"});
        double T = sc.at("T").get<double>();
        auto f = named_signal(sc.at("signal").get<std::string>(),
                              sc.value("step", 0.01), T);
        auto freqs = sc.at("frequencies").get<std::vector<double>>();
        auto rep = parseval_check(f, freqs, T);
        if (rep.defect < -1e-3)
            throw CheckFailed("Parseval defect is negative beyond tolerance");
        auto out = open_output(resolve_output(sc.at("output"), opts));
        out << "mean_square,coeff_sum,defect\n";
        out << rep.mean_square << ',' << rep.coeff_sum << ',' << rep.defect
            << "\n";
        std::cout << "parseval: defect = " << rep.defect << "\n";
        return 0;
    }

    if (kind == "box_mass") {
        require_fields(sc, {"kind", "dims", "eps", "indices", "index_bound",
                            "output", "seed"});
        auto dims = sc.at("dims").get<std::vector<double>>();
        double eps = sc.at("eps").get<double>();
        auto out = open_output(resolve_output(sc.at("output"), opts));
        if (sc.contains("indices")) {
            auto idx = sc.at("indices").get<std::vector<int>>();
            double m = box_mode_mass(dims, idx, eps);
            out << "eps,mass\n" << eps << ',' << m << "\n";
            std::cout << "box_mass: mass = " << m << "\n";
        } else {
            int bound = sc.at("index_bound").get<int>();
            auto inf = box_mass_infimum(dims, bound, eps);
            out << "eps,min_mass\n" << eps << ',' << inf.min_mass << "\n";
            if (inf.min_mass <= 0) throw CheckFailed("box mass not positive");
            std::cout << "box_mass: min = " << inf.min_mass << " at mode (";
            for (size_t i = 0; i < inf.argmin.size(); ++i)
                std::cout << (i ? "," : "") << inf.argmin[i];
            std::cout << ")\n";
        }
        return 0;
    }

    if (kind == "hemisphere") {
        require_fields(sc, {"kind", "l_values", "delta", "output", "seed"});
        auto ls = sc.at("l_values").get<std::vector<int>>();
        double delta = sc.at("delta").get<double>();
        auto out = open_output(resolve_output(sc.at("output"), opts));
        out << "l,band_mass,normalization_ratio\n";
        for (int l : ls) {
            auto h = hemisphere_mode_mass(l, delta);
            out << l << ',' << h.band_mass << ',' << h.normalization_ratio
                << "\n";
        }
        std::cout << "hemisphere: " << ls.size() << " modes\n";
        return 0;
    }

    if (kind == "torus_spectrum") {
        require_fields(sc, {"kind", "section", "alpha", "L", "count", "output",
                            "seed"});
        const auto& sec = sc.at("section");
        TorusSection section;
        if (sec.at("type") == "interval")
            section = IntervalSection{sec.at("a").get<double>(),
                                      sec.value("flip", false)};
        else
            section = DiscSection{sec.at("rho").get<double>()};
        auto spec = mapping_torus_spectrum(section, sc.at("alpha").get<double>(),
                                           sc.at("L").get<double>(),
                                           sc.at("count").get<int>());
        auto out = open_output(resolve_output(sc.at("output"), opts));
        out << "idx,mu,nu,k,eigenvalue\n";
        for (size_t i = 0; i < spec.eigendata.size(); ++i) {
            const auto& e = spec.eigendata[i];
            out << i << ',' << e.mu << ',' << e.nu << ',' << e.k << ','
                << e.eigenvalue << "\n";
        }
        std::cout << "torus_spectrum: " << spec.eigendata.size()
                  << " eigenvalues\n";
        return 0;
    }

    if (kind == "observability") {
        require_fields(sc, {"kind", "N", "omega_fraction", "s_values",
                            "cross_modes", "output", "seed"});
        long N = sc.at("N").get<long>();
        double frac = sc.value("omega_fraction", 0.1);
        auto omega = boundary_omega(N, frac);
        auto svals = sc.at("s_values").get<std::vector<double>>();
        std::vector<double> cross =
            sc.value("cross_modes", std::vector<double>{});
        auto out = open_output(resolve_output(sc.at("output"), opts));
        out << "s,C\n";
        for (double s : svals) {
            double C = cross.empty()
                           ? observability_constant(N, omega, s)
                           : product_observability(N, omega, s, cross);
            out << s << ',' << C << "\n";
        }
        std::cout << "observability: " << svals.size() << " values of s\n";
        return 0;
    }

    throw MissingInput("unknown scenario kind: " + kind);
}

}  // namespace

int run_scenario_file(const std::string& path, const RunOptions& opts) {
    if (!std::filesystem::exists(path)) {
        std::cerr << "missing input: " << path << "\n";
        return 3;
    }
    json sc;
    try {
        std::ifstream in(path);
        sc = json::parse(in);
    } catch (const std::exception& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    }
    try {
        return run_parsed(sc, opts);
    } catch (const json::exception& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const FieldError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const CheckFailed& e) {
        std::cerr << "check failed: " << e.what() << "\n";
        return 4;
    } catch (const MissingInput& e) {
        std::cerr << "missing input: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "check failed: " << e.what() << "\n";
        return 4;
    }
}

int validate_polytope_file(const std::string& path, double tol) {
    if (!std::filesystem::exists(path)) {
        std::cerr << "missing input: " << path << "\n";
        return 3;
    }
    try {
        auto P = load_polytope_file(path, tol);
        std::cout << "ok: dim " << P.dim << ", " << P.halfspaces.size()
                  << " facets, " << P.vertices.size() << " vertices, "
                  << P.skeleton.size() << " skeleton faces\n";
        return 0;
    } catch (const Error& e) {
        std::cerr << "invalid polytope: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace ptb::cli
