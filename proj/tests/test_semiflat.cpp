#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fixtures.hpp"
#include "skfib/semiflat.hpp"

using namespace skfib;
using namespace fixtures;
using Catch::Approx;

namespace {

FibrationModel cubic_model() { return FibrationModel(cubic_n1(), PolarizationType({1})); }

FibrationModel quadratic_model() { return FibrationModel(quadratic_n1(), PolarizationType({1})); }

// Z(y) = i + 0.05 y as a bare period model.
FibrationModel mixed_period_model() {
    PolyMatrix Z(1, 1, 1);
    Z(0, 0) = Poly::variable(1, 0) * cd(0.05, 0.0) + Poly::constant(1, cd(0.0, 1.0));
    return FibrationModel(PeriodPolyModel(std::move(Z), DomainBox::cube(1, -1.0, 1.0, -1.0, 1.0)),
                          PolarizationType({1}));
}

} // namespace

TEST_CASE("semiflat potential hand values") {
    Eigen::MatrixXcd Z(1, 1);
    Eigen::VectorXcd z(1);

    Z(0, 0) = cd(0.7, 1.0); // any Siegel point
    z(0) = cd(0.4, 0.0);    // real fiber point
    CHECK(semiflat_potential(Z, z) == Approx(0.0).margin(1e-15));

    Z(0, 0) = cd(0, 1);
    z(0) = cd(0, 1);
    CHECK(semiflat_potential(Z, z) == Approx(1.0));

    Z(0, 0) = cd(0, 2);
    CHECK(semiflat_potential(Z, z) == Approx(0.5));
}

TEST_CASE("semiflat potential is nonnegative, zero only on real points") {
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXcd Z(2, 2);
    Z << cd(0.3, 1.2), cd(0.1, 0.2), cd(0.1, 0.2), cd(-0.2, 0.9);
    REQUIRE(siegel_check(Z).valid);
    for (int k = 0; k < 50; ++k) {
        Eigen::VectorXcd z(2);
        z << cd(u(rng), u(rng)), cd(u(rng), u(rng));
        double eta = semiflat_potential(Z, z);
        CHECK(eta >= 0.0);
        if (z.imag().cwiseAbs().maxCoeff() > 1e-3) CHECK(eta > 0.0);
    }
}

TEST_CASE("fiber block diagonal inverses") {
    Eigen::MatrixXcd Z = cd(0, 1) * Eigen::MatrixXcd::Identity(3, 3);
    CHECK((semiflat_fiber_block(Z) - 0.5 * Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-15);

    Eigen::MatrixXcd Z2 = Eigen::MatrixXcd::Zero(2, 2);
    Z2(0, 0) = cd(0, 1);
    Z2(1, 1) = cd(0, 2);
    Eigen::MatrixXd expect(2, 2);
    expect << 0.5, 0.0, 0.0, 0.25;
    CHECK((semiflat_fiber_block(Z2) - expect).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("total form agrees with the finite-difference Hessian of eta") {
    auto model = cubic_model();
    Eigen::VectorXcd w(1), z(1);
    w << cd(0.1, 2.0);
    z << cd(0.3, 0.7);
    Eigen::MatrixXcd H = semiflat_total_form(model, w, z);

    // FD oracle on the joint variable (w, z).
    auto eta_joint = [&](const Eigen::VectorXcd& wz) {
        Eigen::VectorXcd ww = wz.head(1), zz = wz.tail(1);
        return semiflat_potential(model.period(ww), zz);
    };
    Eigen::VectorXcd wz(2);
    wz << w(0), z(0);
    Eigen::MatrixXcd Hfd = detail::complex_hessian_fd(eta_joint, wz, 1e-4);
    CHECK((H - Hfd).cwiseAbs().maxCoeff() < 1e-8);

    // Hermitian and positive semidefinite.
    CHECK((H - H.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
}

TEST_CASE("total form is invariant under real fiber translations") {
    auto model = cubic_model();
    Eigen::VectorXcd w(1), z(1);
    w << cd(-0.2, 1.9);
    z << cd(0.17, 0.42);
    Eigen::MatrixXcd H = semiflat_total_form(model, w, z);
    for (double lam : {1.0, -2.0, 0.37}) {
        Eigen::VectorXcd zt = z;
        zt(0) += cd(lam, 0.0);
        CHECK((semiflat_total_form(model, w, zt) - H).cwiseAbs().maxCoeff() < 1e-13);
    }
    // Fiber metric block does not depend on z at all.
    Eigen::VectorXcd z2(1);
    z2 << cd(-0.9, 1.3);
    Eigen::MatrixXcd H2 = semiflat_total_form(model, w, z2);
    CHECK((H2.bottomRightCorner(1, 1) - H.bottomRightCorner(1, 1)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dilation identities") {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(-0.5, 0.5);

    SECTION("t = 1 is the identity, residual exactly zero") {
        auto model = quadratic_model();
        std::vector<std::pair<Eigen::VectorXcd, Eigen::VectorXcd>> samples;
        for (int k = 0; k < 10; ++k) {
            Eigen::VectorXcd w(1), z(1);
            w << cd(u(rng), u(rng));
            z << cd(u(rng), u(rng));
            samples.emplace_back(w, z);
        }
        auto r = dilation_identity_residual(model, 1.0, samples);
        CHECK(r.scaling_identity == 0.0);
        CHECK(r.family_identity == 0.0);
    }

    SECTION("t = 0.25 on the constant-period model") {
        auto model = quadratic_model();
        std::vector<std::pair<Eigen::VectorXcd, Eigen::VectorXcd>> samples;
        for (double a : {-0.4, 0.0, 0.3})
            for (double b : {-0.2, 0.5}) {
                Eigen::VectorXcd w(1), z(1);
                w << cd(0.1, -0.2);
                z << cd(a, b);
                samples.emplace_back(w, z);
            }
        auto r = dilation_identity_residual(model, 0.25, samples);
        CHECK(r.scaling_identity <= 1e-14);
        CHECK(r.family_identity <= 1e-14);
    }

    SECTION("t = 1e-4 on the mixed period model") {
        auto model = mixed_period_model();
        std::vector<std::pair<Eigen::VectorXcd, Eigen::VectorXcd>> samples;
        for (int k = 0; k < 20; ++k) {
            Eigen::VectorXcd w(1), z(1);
            w << cd(u(rng), u(rng));
            z << cd(u(rng), u(rng));
            samples.emplace_back(w, z);
        }
        auto r = dilation_identity_residual(model, 1e-4, samples);
        CHECK(r.scaling_identity <= 1e-12);
        CHECK(r.family_identity <= 1e-12);
    }
}

TEST_CASE("fiber geometry of the square torus") {
    auto model = quadratic_model(); // Z = i
    Eigen::VectorXcd w(1);
    w << cd(0.0, 0.0);

    auto g1 = fiber_geometry(model, w, 1.0);
    CHECK(g1.volume == Approx(1.0));                     // det(Im Z) * prod d = 1
    CHECK(g1.diameter == Approx(std::sqrt(2.0) / 2.0));  // deep point of the unit square

    auto gt = fiber_geometry(model, w, 1.0 / 16.0);
    CHECK(gt.diameter / g1.diameter == Approx(0.5).epsilon(1e-12)); // t^{1/4}
    CHECK(gt.volume == Approx(std::pow(1.0 / 16.0, 0.5)));          // t^{n/2}
}

TEST_CASE("fiber volume: polarization and the real-determinant route") {
    auto F = cubic_n1();
    Eigen::VectorXcd w(1);
    w << cd(0.2, 2.1);

    FibrationModel m1(F, PolarizationType({1}));
    FibrationModel m2(F, PolarizationType({2}));
    auto g1 = fiber_geometry(m1, w, 1.0, 32);
    auto g2 = fiber_geometry(m2, w, 1.0, 32);
    CHECK(g2.volume == Approx(2.0 * g1.volume)); // linear in prod d_k

    // Independent route: the Euclidean cell volume is |det| of the real
    // 2n x 2n period basis.
    Eigen::MatrixXcd Z = m1.period(w);
    Eigen::MatrixXd B = fiber_lattice_basis(Z, m1.d);
    CHECK(g1.volume == Approx(std::abs(B.determinant())));
}

TEST_CASE("diameter scaling law holds on a skew lattice") {
    auto model = cubic_model(); // Z = w, nonsquare lattice away from i
    Eigen::VectorXcd w(1);
    w << cd(0.3, 1.7);
    auto ga = fiber_geometry(model, w, 0.8, 48);
    auto gb = fiber_geometry(model, w, 0.05, 48);
    CHECK(gb.diameter / ga.diameter == Approx(std::pow(0.05 / 0.8, 0.25)).epsilon(1e-10));
}
