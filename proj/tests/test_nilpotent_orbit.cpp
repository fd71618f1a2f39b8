#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "skfib/nilpotent_orbit.hpp"

using namespace skfib;
using Catch::Approx;

namespace {

// n = 1, k = 1: Z(t) = i + log t / (2 pi i), identity frame.
NilpotentOrbitModel log_model_1d() {
    PolyMatrix Q(1, 1, 1);
    Q(0, 0) = Poly::constant(1, cd(0.0, 1.0));
    RatMat eta(1, 1);
    eta(0, 0) = Rat(1);
    return NilpotentOrbitModel(1, 1, std::move(Q), {eta}, PolarizationType({1}));
}

// n = 2, k = 1: eta supported in the (1,1) block, Q with mild t-dependence.
NilpotentOrbitModel log_model_2d() {
    PolyMatrix Q(2, 2, 2);
    Q(0, 0) = Poly::constant(2, cd(0.0, 1.0));
    Q(1, 1) = Poly::constant(2, cd(0.0, 1.0)) + Poly::variable(2, 0) * cd(0.2, 0.0);
    Q(0, 1) = Poly::variable(2, 1) * cd(0.1, 0.0);
    Q(1, 0) = Q(0, 1);
    RatMat eta(2, 2);
    eta(0, 0) = Rat(1);
    return NilpotentOrbitModel(2, 1, std::move(Q), {eta}, PolarizationType({1, 1}));
}

Eigen::VectorXcd pt1(cd t) {
    Eigen::VectorXcd v(1);
    v(0) = t;
    return v;
}

} // namespace

TEST_CASE("period map of the 1-d log model") {
    auto model = log_model_1d();
    // t = e^{-2 pi}: Z = i + (-2 pi)/(2 pi i) = 2i.
    auto Z = period_map_eval(model, pt1(cd(std::exp(-2.0 * std::numbers::pi), 0.0)));
    CHECK(std::abs(Z(0, 0) - cd(0.0, 2.0)) < 1e-12);
}

TEST_CASE("branch shift adds exactly Delta_d eta") {
    auto model = log_model_1d();
    auto t = pt1(cd(0.1, 0.07));
    auto Z0 = period_map_eval(model, t, {0});
    auto Z1 = period_map_eval(model, t, {1});
    CHECK((Z1 - Z0 - Eigen::MatrixXcd::Identity(1, 1)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Im Z eigenvalue grows monotonically toward the divisor (constant Q)") {
    auto model = log_model_1d();
    double prev = 0.0;
    for (int s = 0; s < 12; ++s) {
        double r = std::pow(10.0, -0.5 * (s + 1));
        auto Z = period_map_eval(model, pt1(cd(r, 0.0)));
        double lam = siegel_check(Z).min_im_eigenvalue;
        CHECK(lam >= prev);
        prev = lam;
    }
    CHECK(prev > 1.0); // bounded below by the constant part of Im Z
}

TEST_CASE("degenerate models are reported") {
    // Negative residue block fails validation.
    PolyMatrix Q(1, 1, 1);
    Q(0, 0) = Poly::constant(1, cd(0.0, 1.0));
    RatMat eta(1, 1);
    eta(0, 0) = Rat(-1);
    CHECK_THROWS_AS(NilpotentOrbitModel(1, 1, std::move(Q), {eta}, PolarizationType({1})), model_error);

    // A Q with negative imaginary part fails siegel_check at evaluation.
    PolyMatrix Q2(1, 1, 1);
    Q2(0, 0) = Poly::constant(1, cd(0.0, -5.0));
    RatMat eta2(1, 1);
    eta2(0, 0) = Rat(1);
    NilpotentOrbitModel bad(1, 1, std::move(Q2), {eta2}, PolarizationType({1}));
    CHECK_THROWS_AS(period_map_eval(bad, pt1(cd(0.5, 0.0))), domain_error);
}

TEST_CASE("base metric of the 1-d log model: hand values") {
    auto model = log_model_1d();
    // g = Im Z / 2 = (1 - log|t| / 2 pi) / 2.
    auto g1 = base_metric_coeffs(model, pt1(cd(std::exp(-2.0 * std::numbers::pi), 0.0)));
    CHECK(std::abs(g1(0, 0) - cd(1.0, 0.0)) < 1e-10);
    auto g2 = base_metric_coeffs(model, pt1(std::polar(std::exp(-4.0 * std::numbers::pi), 1.1)));
    CHECK(std::abs(g2(0, 0) - cd(1.5, 0.0)) < 1e-10);
}

TEST_CASE("constant model: g = Im Q / 2, no degeneration") {
    PolyMatrix Q(1, 1, 1);
    Q(0, 0) = Poly::constant(1, cd(0.3, 2.0));
    RatMat eta(1, 1); // zero residue
    NilpotentOrbitModel model(1, 1, std::move(Q), {eta}, PolarizationType({1}));
    for (double r : {0.5, 0.01, 1e-6}) {
        auto g = base_metric_coeffs(model, pt1(cd(r, 0.0)));
        CHECK(std::abs(g(0, 0) - cd(1.0, 0.0)) < 1e-14);
    }
}

TEST_CASE("nontrivial polynomial frame rescales the metric") {
    // w = t + t^2/2: dw/dt = 1 + t, so g = |1 + t|^2 Im Z / 2.
    PolyMatrix Q(1, 1, 1);
    Q(0, 0) = Poly::constant(1, cd(0.0, 1.0));
    RatMat eta(1, 1);
    eta(0, 0) = Rat(1);
    PolyMatrix frame(1, 1, 1);
    frame(0, 0) = Poly::constant(1, cd(1.0)) + Poly::variable(1, 0);
    NilpotentOrbitModel model(1, 1, std::move(Q), {eta}, PolarizationType({1}), {1}, std::move(frame));
    cd t(0.2, 0.1);
    auto g = base_metric_coeffs(model, pt1(t));
    auto Z = period_map_eval(model, pt1(t));
    double expect = std::norm(cd(1.0) + t) * Z(0, 0).imag() / 2.0;
    CHECK(std::abs(g(0, 0) - cd(expect, 0.0)) < 1e-12);
}

TEST_CASE("log bound fit on the 1-d model") {
    auto model = log_model_1d();
    auto ray = divisor_ray(model, {0.4}, Eigen::VectorXcd(0), std::exp(-1.0), std::exp(-8.0), 24);
    auto fit = log_bound_fit(model, ray);
    CHECK(fit.pass);
    CHECK(fit.branch_residual <= 1e-12);
    // Independent oracle: g = (1 + x/2pi)/2 against denominator 1 + 2x,
    // maximized at the smallest x = 1 on this ray.
    double expect_C = 0.5 * (1.0 + 1.0 / (2.0 * std::numbers::pi)) / 3.0;
    CHECK(fit.C == Approx(expect_C).epsilon(1e-10));
    // Regression oracle (log g against log(1 - log|t|) over this exact ray,
    // computed independently): slope 0.46067570293277.
    CHECK(fit.d_exponent == Approx(0.46067570293277).epsilon(1e-9));
    CHECK(fit.d_exponent <= 1.05); // at most linear growth in -log|t|
}

TEST_CASE("constant model passes the bound with C = max |g|") {
    PolyMatrix Q(1, 1, 1);
    Q(0, 0) = Poly::constant(1, cd(0.0, 2.0));
    RatMat eta(1, 1);
    NilpotentOrbitModel model(1, 1, std::move(Q), {eta}, PolarizationType({1}));
    auto ray = divisor_ray(model, {0.0}, Eigen::VectorXcd(0), 0.3, 1e-6, 12);
    auto fit = log_bound_fit(model, ray);
    CHECK(fit.pass);
    // |g| = 1 everywhere; the smallest feasible constant is attained where
    // the denominator is smallest.
    CHECK(fit.C == Approx(1.0 / (1.0 - 2.0 * std::log(0.3))).epsilon(1e-10));
}

TEST_CASE("g_{22} extends continuously across t1 = 0 in the 2-d fixture") {
    auto model = log_model_2d();
    Eigen::VectorXcd t(2);
    t(1) = cd(0.3, 0.1);
    t(0) = cd(1e-12, 0.0);
    double limit = base_metric_coeffs(model, t)(1, 1).real();
    t(0) = cd(1e-8, 0.0);
    auto g = base_metric_coeffs(model, t);
    CHECK(std::abs(g(1, 1).real() - limit) <= 1e-6);
    // While g_{11} blows up logarithmically on the same approach.
    CHECK(g(0, 0).real() > 1.5);
}

TEST_CASE("branch independence of g is exact for symmetric residues") {
    auto model = log_model_2d();
    Eigen::VectorXcd t(2);
    t << cd(0.05, 0.02), cd(0.3, -0.1);
    auto g0 = base_metric_coeffs(model, t, {0});
    auto g2 = base_metric_coeffs(model, t, {2});
    CHECK((g0 - g2).cwiseAbs().maxCoeff() <= 1e-12);
}
