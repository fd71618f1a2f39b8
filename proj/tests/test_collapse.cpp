#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>

#include "skfib/collapse.hpp"

using namespace skfib;
using Catch::Approx;

namespace {

// The 1-d log-degeneration comparison metric G = 1 - log|w| / (2 pi).
ModelMetric log_metric_1d() {
    ModelMetric m;
    m.n = 1;
    m.divisor = {0};
    m.eval = [](const Eigen::VectorXcd& w) {
        double r = std::abs(w(0));
        if (r <= 0.0) throw domain_error("on the divisor");
        Eigen::MatrixXcd G(1, 1);
        G(0, 0) = 1.0 - std::log(r) / (2.0 * std::numbers::pi);
        return G;
    };
    return m;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol, int depth = 0) {
    double m = 0.5 * (a + b);
    double fa = f(a), fb = f(b), fm = f(m);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double left = (m - a) / 6.0 * (fa + 4.0 * f(lm) + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * f(rm) + fb);
    if (depth > 40 || std::abs(left + right - whole) < 15.0 * tol) return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, tol / 2.0, depth + 1) + adaptive_simpson(f, m, b, tol / 2.0, depth + 1);
}

} // namespace

TEST_CASE("uniformizing map") {
    Eigen::VectorXcd w(2);
    w << cd(0.5, 0.0), cd(0.3, 0.1);
    auto q1 = uniformize({1, 1}, w);
    CHECK((q1 - w).cwiseAbs().maxCoeff() == 0.0);
    auto q2 = uniformize({2}, w);
    CHECK(std::abs(q2(0) - cd(0.25, 0.0)) < 1e-15);
    CHECK(q2(1) == w(1));
}

TEST_CASE("pullback of the Euclidean metric by w -> w^2") {
    auto pulled = pullback_by_uniformizing(euclidean_metric(1), {2});
    Eigen::VectorXcd w(1);
    w << cd(0.3, 0.4); // |w| = 0.5
    auto G = pulled.eval(w);
    CHECK(std::abs(G(0, 0) - cd(4.0 * 0.25, 0.0)) < 1e-14); // |2w|^2 = 4 |w|^2
}

TEST_CASE("orbifold pullback extends continuously across the divisor") {
    auto orb = orbifold_model_metric(1, {3});
    auto pulled = pullback_by_uniformizing(orb, {3});
    for (double r : {1e-2, 1e-5, 1e-9}) {
        Eigen::VectorXcd w(1);
        w << cd(r, 0.0);
        auto G = pulled.eval(w);
        CHECK(std::abs(G(0, 0) - cd(9.0, 0.0)) < 1e-9); // m^2, bounded near 0
    }
}

TEST_CASE("path length: Euclidean straight segment") {
    auto metric = euclidean_metric(1);
    cd a(0.1, -0.2), b(0.7, 0.5);
    auto curve = [&](double s) {
        Eigen::VectorXcd w(1);
        w(0) = a + s * (b - a);
        return w;
    };
    CHECK(path_length(metric, curve, 100) == Approx(std::abs(b - a)).epsilon(1e-12));
}

TEST_CASE("radial path length in the log metric matches adaptive quadrature") {
    auto metric = log_metric_1d();
    const double rho = 0.1, eps = 1e-12;
    // Parameterize with a cubic clustering toward the singular endpoint.
    auto curve = [&](double s) {
        Eigen::VectorXcd w(1);
        w(0) = cd(eps + (rho - eps) * s * s * s, 0.0);
        return w;
    };
    double len = path_length_converged(metric, curve, 4096, 1e-9);
    double oracle =
        adaptive_simpson([&](double r) { return std::sqrt(1.0 - std::log(r) / (2.0 * std::numbers::pi)); }, eps,
                         rho, 1e-12);
    CHECK(std::abs(len - oracle) < 1e-6);
}

TEST_CASE("orbifold radial integral has the closed form 2 sqrt(rho)") {
    auto metric = orbifold_model_metric(1, {2});
    const double rho = 0.25, eps = 1e-14;
    auto curve = [&](double s) {
        Eigen::VectorXcd w(1);
        w(0) = cd(eps + (rho - eps) * s * s * s, 0.0);
        return w;
    };
    double len = path_length_converged(metric, curve, 8192, 1e-9);
    CHECK(len == Approx(2.0 * std::sqrt(rho)).epsilon(1e-5));
}

TEST_CASE("path length is invariant under reparameterization and additive") {
    auto metric = log_metric_1d();
    auto arc = [&](double theta) {
        Eigen::VectorXcd w(1);
        w(0) = std::polar(0.2, theta);
        return w;
    };
    auto p1 = [&](double s) { return arc(s * 1.3); };
    auto p2 = [&](double s) { return arc(1.3 * s * s); }; // same image, different speed
    double l1 = path_length(metric, p1, 1 << 15);
    double l2 = path_length(metric, p2, 1 << 15);
    CHECK(std::abs(l1 - l2) / l1 < 1e-8);

    auto left = [&](double s) { return p1(0.5 * s); };
    auto right = [&](double s) { return p1(0.5 + 0.5 * s); };
    double sum = path_length(metric, left, 1 << 14) + path_length(metric, right, 1 << 14);
    CHECK(std::abs(sum - path_length(metric, p1, 1 << 15)) / l1 < 1e-12);
}

TEST_CASE("non-integrable singularities are detected") {
    // G = |w|^{-2} has length element 1/r: divergent radial integral.
    ModelMetric bad;
    bad.n = 1;
    bad.eval = [](const Eigen::VectorXcd& w) {
        Eigen::MatrixXcd G(1, 1);
        G(0, 0) = 1.0 / std::norm(w(0));
        return G;
    };
    auto curve = [&](double s) {
        Eigen::VectorXcd w(1);
        w(0) = cd(1e-15 + s * 0.1, 0.0);
        return w;
    };
    CHECK_THROWS_AS(path_length_converged(bad, curve, 64, 1e-10, 18), resolution_error);
}

TEST_CASE("boundary diameter: Euclidean circle") {
    auto metric = euclidean_metric(1);
    double rho = 0.2;
    double d = boundary_diameter(metric, rho, 512);
    CHECK(d == Approx(std::numbers::pi * rho / 2.0).epsilon(0.02));
}

TEST_CASE("boundary diameter: log model closed form") {
    auto metric = log_metric_1d();
    double rho = 0.05;
    double expect = std::numbers::pi * (rho / 2.0) * std::sqrt(1.0 - std::log(rho / 2.0) / (2.0 * std::numbers::pi));
    CHECK(boundary_diameter(metric, rho, 512) == Approx(expect).epsilon(0.03));
}

TEST_CASE("boundary diameter sweep fits exponent at most 1") {
    auto metric = log_metric_1d();
    std::vector<double> rhos = {0.1, 0.01, 0.001};
    std::vector<double> diams;
    for (double rho : rhos) diams.push_back(boundary_diameter(metric, rho, 256));
    auto fit = fit_log_length(rhos, diams);
    CHECK(fit.exponent <= 1.0);
    CHECK(fit.exponent >= 0.05); // the log factor is genuinely present
    CHECK(std::isfinite(fit.C));
}

TEST_CASE("covering counts: point divisor in dimension 1") {
    std::vector<DivisorComponent> comps = {{0, 1}};
    auto sweep = covering_sweep(1, comps, {0.1, 0.03, 0.01, 0.003, 0.001});
    for (const auto& r : sweep.reports) CHECK(r.count == 1);
    CHECK(sweep.products_decreasing);
    CHECK(sweep.fitted_dimension == Approx(0.0).margin(1e-12));
}

TEST_CASE("covering counts: one divisor hyperplane in dimension 2") {
    std::vector<DivisorComponent> comps = {{0, 1}};
    auto sweep = covering_sweep(2, comps, {0.1, 0.03, 0.01, 0.003, 0.001});
    CHECK(sweep.products_decreasing);
    // N(rho) ~ c / rho^2: fitted box dimension close to 2 = 2n - 2.
    CHECK(sweep.fitted_dimension == Approx(2.0).margin(0.1));
    // rho^{2n-2+beta} N(rho) stays bounded (spot value).
    CHECK(sweep.reports.back().products[0] < 10.0);
}

TEST_CASE("covering counts: two transverse divisors in dimension 2") {
    std::vector<DivisorComponent> comps = {{0, 1}, {1, 1}};
    auto rep = covering_report(2, comps, 0.01);
    REQUIRE(rep.strata.size() == 3);
    long deep = 0, shallow = 0;
    for (const auto& s : rep.strata) {
        if (s.component_indices.size() == 2) deep = s.boxes;
        else shallow += s.boxes;
    }
    CHECK(deep == 1);                    // E'_2 is a point: O(1) boxes
    CHECK(shallow > 10000);              // E'_1 needs O(rho^{-2})
    auto sweep = covering_sweep(2, comps, {0.1, 0.03, 0.01, 0.003, 0.001});
    CHECK(sweep.products_decreasing);
}

TEST_CASE("mesh distances: flat unit square corners") {
    auto metric = euclidean_metric(1);
    auto mesh = rect_mesh(metric, 0.0, 1.0, 0.0, 1.0, 65, 65);
    double d = mesh.distance(0, mesh.size() - 1);
    CHECK(d == Approx(std::sqrt(2.0)).epsilon(0.02));
}

TEST_CASE("mesh distance is symmetric and satisfies the triangle inequality") {
    auto metric = log_metric_1d();
    auto mesh = polar_annulus_mesh(metric, 1e-4, 0.5, 24, 32);
    int a = 10, b = mesh.size() - 5, c = mesh.size() / 2;
    double dab = mesh.distance(a, b), dba = mesh.distance(b, a);
    CHECK(dab == Approx(dba).epsilon(1e-12));
    CHECK(dab <= mesh.distance(a, c) + mesh.distance(c, b) + 1e-12);
}

TEST_CASE("punctured disc diameter is stable under one refinement") {
    auto metric = log_metric_1d();
    int nr = 33, nt = 48;
    auto coarse = polar_annulus_mesh(metric, 1e-5, 0.5, nr, nt);
    auto fine = polar_annulus_mesh(metric, 1e-5, 0.5, 2 * nr - 1, 2 * nt);
    // Diameter from outer-ring sources (the extremal pairs sit on the rim).
    std::vector<int> src_c, src_f;
    for (int j = 0; j < nt; ++j) src_c.push_back((nr - 1) * nt + j);
    for (int j = 0; j < 2 * nt; ++j) src_f.push_back((2 * nr - 2) * 2 * nt + j);
    double dc = coarse.diameter_from_sources(src_c);
    double df = fine.diameter_from_sources(src_f);
    CHECK(std::abs(dc - df) / dc < 0.01);
}

TEST_CASE("distances converge under refinement") {
    // Doubling the resolution may lengthen a path slightly (grid polylines
    // cut chords into shorter chords), but successive refinements must be a
    // Cauchy sequence at the quadrature-error scale.
    auto metric = log_metric_1d();
    int nr = 17, nt = 24;
    auto m0 = polar_annulus_mesh(metric, 1e-3, 0.5, nr, nt);
    auto m1 = polar_annulus_mesh(metric, 1e-3, 0.5, 2 * nr - 1, 2 * nt);
    auto m2 = polar_annulus_mesh(metric, 1e-3, 0.5, 4 * nr - 3, 4 * nt);
    auto id = [&](int scale, int i, int j) { return (scale * i) * (scale * nt) + scale * j; };
    double d0 = m0.distance(id(1, 0, 0), id(1, nr - 1, nt / 2));
    double d1 = m1.distance(id(2, 0, 0), id(2, nr - 1, nt / 2));
    double d2 = m2.distance(id(4, 0, 0), id(4, nr - 1, nt / 2));
    CHECK(std::abs(d1 - d0) / d0 < 5e-3);
    CHECK(std::abs(d2 - d1) / d1 < std::abs(d1 - d0) / d0);
}

TEST_CASE("distance across the puncture is at most two radial legs plus the inner arc") {
    auto metric = log_metric_1d();
    double r_min = 1e-6, R = 0.3;
    int nr = 41, nt = 48;
    auto mesh = polar_annulus_mesh(metric, r_min, R, nr, nt);
    // Opposite outer points.
    int a = (nr - 1) * nt + 0, b = (nr - 1) * nt + nt / 2;
    double through = mesh.distance(a, b);
    // Competitor: radially in, around the inner circle, radially out.
    auto radial = [&](double s) {
        Eigen::VectorXcd w(1);
        w(0) = cd(r_min + (R - r_min) * s * s, 0.0);
        return w;
    };
    double leg = path_length_converged(metric, radial, 2048, 1e-8);
    double inner_arc =
        std::numbers::pi * r_min * std::sqrt(1.0 - std::log(r_min) / (2.0 * std::numbers::pi));
    CHECK(through <= 2.0 * leg + inner_arc + 0.05 * through);
}
