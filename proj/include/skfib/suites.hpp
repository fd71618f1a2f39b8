// Verification suites over loaded models: each suite is a pure function of
// (model, sweep parameters, seed) producing a Report.
#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "skfib/io.hpp"
#include "skfib/rotation.hpp"
#include "skfib/syz.hpp"

namespace skfib::io {

// Deterministic sampling independent of the standard library's distribution
// implementations (reports must be byte-identical run to run).
struct SplitMix {
    std::uint64_t state;
    explicit SplitMix(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

struct SweepSpec {
    std::vector<double> t_sweep = {1.0, 0.25, 1e-4};
    std::vector<double> rho_sweep = {0.1, 0.03, 0.01, 0.003, 0.001};
    int resolution = 64;
    int samples = 100;
    double tolerance = 0.0; // 0 = per-check defaults
    std::uint64_t seed = 1;
};

namespace detail {

inline Eigen::VectorXcd sample_domain(const DomainBox& box, SplitMix& rng, double margin_frac = 0.15) {
    Eigen::VectorXcd w(box.n());
    for (int i = 0; i < box.n(); ++i) {
        double mr = margin_frac * (box.re_max[i] - box.re_min[i]);
        double mi = margin_frac * (box.im_max[i] - box.im_min[i]);
        w(i) = cd(rng.uniform(box.re_min[i] + mr, box.re_max[i] - mr),
                  rng.uniform(box.im_min[i] + mi, box.im_max[i] - mi));
    }
    return w;
}

} // namespace detail

// --------------------------------------------------------------------------
inline Report run_special_kahler_suite(const LoadedModel& model, const SweepSpec& spec) {
    if (!model.prepotential) throw io_error("suite 'special-kahler' requires a prepotential model");
    const Prepotential& F = *model.prepotential;
    const PolarizationType& d = *model.polarization;
    SplitMix rng(spec.seed);

    Report rep;
    rep.suite = "special-kahler";
    rep.model_hash = model.hash;
    rep.seed = spec.seed;

    double min_eig = std::numeric_limits<double>::infinity();
    double sym_residual = 0.0;
    std::vector<Eigen::VectorXcd> pts;
    for (int s = 0; s < spec.samples; ++s) pts.push_back(detail::sample_domain(F.domain(), rng));
    for (const auto& w : pts) {
        auto sc = siegel_check(F.hessian(w));
        min_eig = std::min(min_eig, sc.min_im_eigenvalue);
        sym_residual = std::max(sym_residual, sc.symmetry_residual);
    }
    rep.add("siegel_min_eigenvalue", min_eig, 0.0, ">=", 0.0, "symplectic-core.siegel_check");
    rep.add("hessian_symmetry", sym_residual, 0.0, "<=", 0.0, "special-kahler.evaluate_chart");

    auto ma = monge_ampere_residual(F, pts, 1e-4);
    rep.add("monge_ampere_residual", ma.max_residual, spec.tolerance > 0 ? spec.tolerance : 1e-6, "<=", 1e-6,
            "special-kahler.monge_ampere_residual", {{"step", 1e-4}, {"samples", ma.samples}});

    Eigen::VectorXcd w0 = F.domain().center();
    auto rw = ricci_vs_weil_petersson(F, d, w0, 1e-3);
    rep.add("ricci_wp_residual", rw.residual, 1e-8, "<=", 1e-8, "special-kahler.ricci_vs_weil_petersson");
    rep.add("ricci_richardson", rw.richardson, 1e-5, "<=", 1e-5, "special-kahler.ricci_vs_weil_petersson");

    double legendre_err = 0.0, inverse_err = 0.0;
    for (int s = 0; s < std::min(10, spec.samples); ++s) {
        Eigen::VectorXcd w = pts[s];
        Eigen::VectorXd y = darboux_coords(F, w);
        auto ld = legendre_dual(F, y, w);
        legendre_err = std::max(legendre_err, (legendre_primal(F, ld.dual, w) - y).cwiseAbs().maxCoeff());
        Eigen::MatrixXd primal = affine_hessian(F, w);
        inverse_err = std::max(
            inverse_err,
            (ld.dual_hessian * primal - Eigen::MatrixXd::Identity(primal.rows(), primal.cols())).cwiseAbs().maxCoeff());
    }
    rep.add("legendre_involution", legendre_err, 1e-8, "<=", 1e-8, "special-kahler.legendre_dual");
    rep.add("legendre_inverse_hessian", inverse_err, 1e-8, "<=", 1e-8, "special-kahler.legendre_dual");
    return rep;
}

// --------------------------------------------------------------------------
inline Report run_semiflat_suite(const LoadedModel& model, const SweepSpec& spec) {
    std::optional<FibrationModel> fib;
    if (model.prepotential) fib.emplace(*model.prepotential, *model.polarization);
    else if (model.period_model) fib.emplace(*model.period_model, *model.polarization);
    else throw io_error("suite 'semiflat' requires a prepotential or period model");
    SplitMix rng(spec.seed);

    Report rep;
    rep.suite = "semiflat";
    rep.model_hash = model.hash;
    rep.seed = spec.seed;

    const int n = fib->n();
    std::vector<std::pair<Eigen::VectorXcd, Eigen::VectorXcd>> samples;
    for (int s = 0; s < spec.samples; ++s) {
        Eigen::VectorXcd w = detail::sample_domain(fib->domain(), rng);
        Eigen::VectorXcd z(n);
        for (int i = 0; i < n; ++i) z(i) = cd(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        samples.emplace_back(w, z);
    }

    double eta_min = std::numeric_limits<double>::infinity();
    for (const auto& [w, z] : samples) eta_min = std::min(eta_min, semiflat_potential(fib->period(w), z));
    rep.add("eta_nonnegative", eta_min, 0.0, ">=", 0.0, "semiflat-family.semiflat_potential");

    // Fiber block against the finite-difference Hessian of eta at one point.
    {
        const auto& [w, z] = samples.front();
        Eigen::MatrixXcd H = semiflat_total_form(*fib, w, z);
        auto eta_joint = [&](const Eigen::VectorXcd& wz) {
            return semiflat_potential(fib->period(wz.head(n)), wz.tail(n));
        };
        Eigen::VectorXcd wz(2 * n);
        wz.head(n) = w;
        wz.tail(n) = z;
        Eigen::MatrixXcd Hfd = skfib::detail::complex_hessian_fd(eta_joint, wz, 1e-4);
        rep.add("form_matches_fd_hessian", (H - Hfd).cwiseAbs().maxCoeff(), 1e-7, "<=", 1e-7,
                "semiflat-family.semiflat_form");
    }

    Series dil{"dilation", {"t", "scaling_residual", "family_residual"}, {}};
    double worst = 0.0;
    for (double t : spec.t_sweep) {
        auto r = dilation_identity_residual(*fib, t, samples);
        worst = std::max(worst, std::max(r.scaling_identity, r.family_identity));
        dil.rows.push_back({t, r.scaling_identity, r.family_identity});
    }
    rep.series.push_back(dil);
    rep.add("dilation_identities", worst, 1e-12, "<=", 1e-12, "semiflat-family.dilation_identity_residual");

    // Collapse rate of the fiber diameter.
    {
        Eigen::VectorXcd w = fib->domain().center();
        int grid = n == 1 ? spec.resolution : 12;
        double t0 = 0.9;
        auto a = fiber_geometry(*fib, w, t0, grid);
        auto b = fiber_geometry(*fib, w, t0 / 16.0, grid);
        rep.add("diameter_collapse_ratio", b.diameter / a.diameter, 0.5, "~", 0.005,
                "semiflat-family.fiber_geometry", {{"t", t0}});
        Eigen::MatrixXcd Z = fib->period(w);
        double vol_route = std::abs(fiber_lattice_basis(Z, fib->d).determinant());
        rep.add("volume_determinant_route", std::abs(a.volume - std::pow(t0, 0.5 * n) * vol_route), 1e-10, "<=",
                1e-10, "semiflat-family.fiber_geometry");
    }
    return rep;
}

// --------------------------------------------------------------------------
inline Report run_rotation_suite(const LoadedModel& model, const SweepSpec& spec) {
    if (!model.prepotential) throw io_error("suite 'rotation' requires a prepotential model");
    const Prepotential& F = *model.prepotential;
    SplitMix rng(spec.seed);

    Report rep;
    rep.suite = "rotation";
    rep.model_hash = model.hash;
    rep.seed = spec.seed;

    const int n = F.n();
    std::vector<std::pair<Eigen::VectorXcd, Eigen::VectorXd>> samples;
    for (int s = 0; s < spec.samples; ++s) {
        Eigen::VectorXcd w = detail::sample_domain(F.domain(), rng);
        Eigen::VectorXd x(2 * n);
        for (int i = 0; i < 2 * n; ++i) x(i) = rng.uniform(-1.0, 1.0);
        samples.emplace_back(w, x);
    }

    Series res{"residuals", {"t", "canonical", "holomorphy", "chi_modulus"}, {}};
    double worst_canon = 0.0, worst_holo = 0.0, worst_chi = 0.0;
    for (double t : spec.t_sweep) {
        const auto& [w, x] = samples.front();
        auto r = verify_darboux(F, w, x, t);
        auto p = build_rotation_point(F, w, x, t);
        double chi_err = 0.0;
        for (int i = 0; i < 2 * n; ++i) {
            double expect = std::exp(-2.0 * std::numbers::pi * std::pow(t, -0.5) * p.phi(i));
            double got = std::abs(chi_value(p, i));
            chi_err = std::max(chi_err, expect == 0.0 ? got : std::abs(got - expect) / std::max(1e-300, expect));
        }
        worst_canon = std::max(worst_canon, r.canonical_residual);
        worst_holo = std::max(worst_holo, r.holomorphy_residual);
        worst_chi = std::max(worst_chi, chi_err);
        res.rows.push_back({t, r.canonical_residual, r.holomorphy_residual, chi_err});
    }
    rep.series.push_back(res);
    rep.add("canonical_symplectic_residual", worst_canon, 1e-6, "<=", 1e-6, "hk-rotation.verify_darboux");
    rep.add("chi_holomorphy_residual", worst_holo, 1e-6, "<=", 1e-6, "hk-rotation.verify_darboux");
    rep.add("chi_modulus_identity", worst_chi, 1e-12, "<=", 1e-12, "hk-rotation.rotate");

    // Top-form ratio constancy across all samples and sweep values.
    double expected = n == 1 ? 0.5 : (n == 2 ? 3.0 / 8.0 : 0.0);
    double spread = 0.0, calib_err = 0.0;
    for (double t : spec.t_sweep) {
        auto stats = volume_identity_ratio(F, samples, t);
        spread = std::max(spread, stats.max_rel_deviation);
        if (expected > 0.0) calib_err = std::max(calib_err, std::abs(stats.calibration - cd(expected)));
    }
    rep.add("volume_ratio_spread", spread, 1e-8, "<=", 1e-8, "hk-rotation.volume_identity_ratio");
    if (expected > 0.0)
        rep.add("volume_ratio_calibration", calib_err, 1e-8, "<=", 1e-8, "hk-rotation.volume_identity_ratio",
                {{"expected", expected}});
    return rep;
}

// --------------------------------------------------------------------------
inline Report run_degeneration_suite(const LoadedModel& model, const SweepSpec& spec) {
    Report rep;
    rep.suite = "degeneration";
    rep.model_hash = model.hash;
    rep.seed = spec.seed;

    if (model.monodromy) {
        auto a = analyze_monodromy(*model.monodromy);
        double max_order = 0.0;
        for (int m : a.reduction.orders) max_order = std::max(max_order, static_cast<double>(m));
        rep.add("quasi_unipotency_orders_max", max_order, 60.0, "<=", 0.0, "degeneration.reduce_to_unipotent");
        bool unipotent = true;
        for (const auto& T : a.reduction.reduced.generators)
            unipotent = unipotent && squared_difference_vanishes(T);
        rep.add("unipotent_square_zero", unipotent ? 0.0 : 1.0, 0.0, "<=", 0.0, "degeneration.reduce_to_unipotent");
        rep.add("weight_filtration_orthogonal",
                a.filtration.W0.cols() + a.filtration.W1.cols() == model.monodromy->dim() ? 0.0 : 1.0, 0.0, "<=",
                0.0, "degeneration.weight_filtration");
        return rep;
    }

    if (!model.orbit) throw io_error("suite 'degeneration' requires a nilpotent_orbit or monodromy model");
    const NilpotentOrbitModel& orbit = *model.orbit;

    Eigen::VectorXcd tail(orbit.n - orbit.k);
    for (int q = 0; q < tail.size(); ++q) tail(q) = cd(0.3, 0.1);
    std::vector<double> thetas(orbit.k, 0.4);
    auto ray = divisor_ray(orbit, thetas, tail, std::exp(-1.0), std::exp(-8.0), 24);

    // Branch equivariance: incrementing a branch index shifts Z by exactly
    // Delta_d eta.
    double equivariance = 0.0;
    if (orbit.k > 0) {
        std::vector<int> b1(orbit.k, 0);
        b1[0] = 1;
        Eigen::MatrixXcd De = (orbit.d.delta() * orbit.residues[0]).to_double().cast<cd>();
        for (const auto& t : ray) {
            Eigen::MatrixXcd Z0 = period_map_eval(orbit, t);
            Eigen::MatrixXcd Z1 = period_map_eval(orbit, t, b1);
            equivariance = std::max(equivariance, (Z1 - Z0 - De).cwiseAbs().maxCoeff());
        }
    }
    rep.add("branch_equivariance", equivariance, 1e-12, "<=", 1e-12, "degeneration.period_map_eval");

    double min_lambda = std::numeric_limits<double>::infinity();
    for (const auto& t : ray) min_lambda = std::min(min_lambda, siegel_check(period_map_eval(orbit, t)).min_im_eigenvalue);
    rep.add("im_z_lower_bound", min_lambda, 0.0, ">=", 0.0, "degeneration.period_map_eval");

    auto fit = log_bound_fit(orbit, ray);
    rep.add("log_bound_feasible_C", fit.C, std::numeric_limits<double>::infinity(), "<=", 0.0,
            "degeneration.log_bound_fit");
    rep.add("branch_independence_of_g", fit.branch_residual, 1e-12, "<=", 1e-12, "degeneration.log_bound_fit");
    rep.fitted["log_bound_C"] = pinned(fit.C);
    rep.fitted["log_bound_exponent"] = pinned(fit.d_exponent);

    Series gs{"g_growth", {"minus_log_t", "g_max"}, {}};
    for (const auto& t : ray) {
        Eigen::MatrixXcd g = base_metric_coeffs(orbit, t);
        gs.rows.push_back({-std::log(std::abs(t(0))), g.cwiseAbs().maxCoeff()});
    }
    rep.series.push_back(gs);

    // Continuity of the free-direction coefficients across the divisor,
    // approached along a non-real angle.
    if (orbit.k < orbit.n) {
        Eigen::VectorXcd t(orbit.n);
        for (int q = orbit.k; q < orbit.n; ++q) t(q) = tail(q - orbit.k);
        for (int p = 0; p < orbit.k; ++p) t(p) = std::polar(1e-12, 0.7);
        Eigen::MatrixXcd g_limit = base_metric_coeffs(orbit, t);
        for (int p = 0; p < orbit.k; ++p) t(p) = std::polar(1e-8, 0.7);
        Eigen::MatrixXcd g_near = base_metric_coeffs(orbit, t);
        double dev = 0.0;
        for (int i = orbit.k; i < orbit.n; ++i)
            for (int j = orbit.k; j < orbit.n; ++j) dev = std::max(dev, std::abs(g_near(i, j) - g_limit(i, j)));
        rep.add("free_block_continuity", dev, 1e-6, "<=", 1e-6, "degeneration.base_metric_coeffs");
    }
    (void)spec;
    return rep;
}

// --------------------------------------------------------------------------
inline Report run_collapse_suite(const LoadedModel& model, const SweepSpec& spec) {
    if (!model.metric) throw io_error("suite 'collapse' requires a metric_model");
    const MetricModelSpec& ms = *model.metric;
    ModelMetric metric = ms.build();

    Report rep;
    rep.suite = "collapse";
    rep.model_hash = model.hash;
    rep.seed = spec.seed;

    if (metric.n == 1) {
        // Radial path length against dyadically refined quadrature.
        const double rho = spec.rho_sweep.front();
        auto curve = [&](double s) {
            Eigen::VectorXcd w(1);
            w(0) = cd(1e-12 + (rho - 1e-12) * s * s * s, 0.0);
            return w;
        };
        double len = path_length_converged(metric, curve, 4096, 1e-9);
        double len2 = path_length(metric, curve, 1 << 16);
        rep.add("radial_length_quadrature", std::abs(len - len2), 1e-6, "<=", 1e-6, "collapse-metric.path_length",
                {{"rho", rho}});

        Series bd{"boundary", {"rho", "diameter"}, {}};
        std::vector<double> rhos, diams;
        for (double r : spec.rho_sweep) {
            double ddd = boundary_diameter(metric, r, spec.resolution * 4);
            bd.rows.push_back({r, ddd});
            rhos.push_back(r);
            diams.push_back(ddd);
        }
        rep.series.push_back(bd);
        auto fit = fit_log_length(rhos, diams);
        rep.add("boundary_diameter_exponent", fit.exponent, 1.0, "<=", 0.0, "collapse-metric.boundary_diameter");
        rep.fitted["boundary_C"] = pinned(fit.C);
        rep.fitted["boundary_exponent"] = pinned(fit.exponent);

        // Mesh diameter stability under one refinement.
        int nr = std::max(9, spec.resolution / 2), nt = spec.resolution;
        auto coarse = polar_annulus_mesh(metric, 1e-5, 0.5, nr, nt);
        auto fine = polar_annulus_mesh(metric, 1e-5, 0.5, 2 * nr - 1, 2 * nt);
        std::vector<int> src_c, src_f;
        for (int j = 0; j < nt; ++j) src_c.push_back((nr - 1) * nt + j);
        for (int j = 0; j < 2 * nt; ++j) src_f.push_back((2 * nr - 2) * 2 * nt + j);
        double dc = coarse.diameter_from_sources(src_c);
        double df = fine.diameter_from_sources(src_f);
        rep.add("mesh_diameter_stability", std::abs(dc - df) / dc, 0.01, "<=", 0.01,
                "collapse-metric.mesh_distance", {{"coarse", pinned(dc)}, {"fine", pinned(df)}});
    }

    if (!ms.divisor.empty()) {
        auto sweep = covering_sweep(metric.n, ms.divisor, spec.rho_sweep);
        Series cov{"covering", {"rho", "N", "product_beta0.1", "product_beta0.5"}, {}};
        for (const auto& r : sweep.reports)
            cov.rows.push_back({r.rho, static_cast<double>(r.count), r.products[0], r.products[1]});
        rep.series.push_back(cov);
        rep.add("covering_products_decreasing", sweep.products_decreasing ? 0.0 : 1.0, 0.0, "<=", 0.0,
                "collapse-metric.covering_report");
        rep.add("covering_dimension_estimate", sweep.fitted_dimension, 2.0 * metric.n - 2.0 + 0.1, "<=", 0.0,
                "collapse-metric.covering_report");
        rep.fitted["covering_dimension"] = pinned(sweep.fitted_dimension);
    }
    return rep;
}

// --------------------------------------------------------------------------
inline Report run_syz_suite(const LoadedModel& model, const SweepSpec& spec) {
    if (!model.prepotential) throw io_error("suite 'syz' requires a prepotential model");
    const Prepotential& F = *model.prepotential;
    SplitMix rng(spec.seed);

    Report rep;
    rep.suite = "syz";
    rep.model_hash = model.hash;
    rep.seed = spec.seed;

    std::vector<Eigen::VectorXcd> pts;
    for (int s = 0; s < std::min(spec.samples, 20); ++s) pts.push_back(detail::sample_domain(F.domain(), rng));

    Series ser{"duality", {"t", "residual", "det_identity"}, {}};
    double worst = 0.0, worst_det = 0.0, worst_vol = 0.0;
    for (double t : spec.t_sweep) {
        double res = 0.0, det_err = 0.0;
        for (const auto& w : pts) {
            res = std::max(res, t_duality_residual(F, w, t));
            auto p = dual_fibration_point(F, w, t);
            det_err = std::max(det_err, std::abs(dual_form_block(p).determinant() * std::pow(t, F.n()) - 1.0));
            auto v = dual_fiber_volumes(F, w, t);
            worst_vol = std::max(worst_vol, std::abs(v.primal * v.dual - 1.0));
        }
        worst = std::max(worst, res);
        worst_det = std::max(worst_det, det_err);
        ser.rows.push_back({t, res, det_err});
    }
    rep.series.push_back(ser);
    rep.add("t_duality_residual", worst, 1e-8, "<=", 1e-8, "syz-dual.t_duality_residual");
    rep.add("dual_det_identity", worst_det, 1e-8, "<=", 1e-8, "syz-dual.dual_form");
    rep.add("fiber_volume_product", worst_vol, 1e-8, "<=", 1e-8, "syz-dual.dual_form");
    rep.add("dual_form_closedness", dual_form_closedness_fd(F, pts.front(), spec.t_sweep.front()), 1e-6, "<=",
            1e-6, "syz-dual.dual_form");
    return rep;
}

// --------------------------------------------------------------------------
inline Report run_suite(const std::string& name, const LoadedModel& model, const SweepSpec& spec) {
    if (name == "special-kahler") return run_special_kahler_suite(model, spec);
    if (name == "semiflat") return run_semiflat_suite(model, spec);
    if (name == "rotation") return run_rotation_suite(model, spec);
    if (name == "degeneration") return run_degeneration_suite(model, spec);
    if (name == "collapse") return run_collapse_suite(model, spec);
    if (name == "syz") return run_syz_suite(model, spec);
    throw io_error("unknown suite '" + name +
                   "' (expected special-kahler | semiflat | rotation | degeneration | collapse | syz)");
}

} // namespace skfib::io
