#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "skfib/poly.hpp"
#include "skfib/symplectic.hpp"

using namespace skfib;
using Catch::Approx;

TEST_CASE("symplectic_check on the standard form") {
    auto form = PolarizedSymplecticForm::standard(1);
    CHECK(symplectic_check(RatMat::identity(2), form));
    CHECK(symplectic_check(RatMat::from_int_rows({{1, 1}, {0, 1}}), form)); // shear
    CHECK_FALSE(symplectic_check(RatMat::from_int_rows({{2, 0}, {0, 1}}), form));
    CHECK_THROWS_AS(symplectic_check(RatMat::from_int_rows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}), form), shape_error);
}

TEST_CASE("symplectic_check closed under products") {
    // Random words in integer symplectic generators of Sp(4, Z).
    auto form = PolarizedSymplecticForm::standard(2);
    std::vector<RatMat> gens;
    gens.push_back(RatMat::from_int_rows({{1, 0, 1, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}));
    gens.push_back(RatMat::from_int_rows({{1, 0, 0, 0}, {0, 1, 0, 1}, {0, 0, 1, 0}, {0, 0, 0, 1}}));
    gens.push_back(RatMat::from_int_rows({{0, 0, 1, 0}, {0, 1, 0, 0}, {-1, 0, 0, 0}, {0, 0, 0, 1}}));
    for (const auto& g : gens) REQUIRE(symplectic_check(g, form));
    std::mt19937 rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        RatMat a = RatMat::identity(4), b = RatMat::identity(4);
        for (int k = 0; k < 4; ++k) a = a * gens[rng() % gens.size()];
        for (int k = 0; k < 4; ++k) b = b * gens[rng() % gens.size()];
        CHECK(symplectic_check(a * b, form));
    }
}

TEST_CASE("siegel_check examples") {
    Eigen::MatrixXcd Z(2, 2);
    Z << cd(0, 1), cd(0, 0), cd(0, 0), cd(0, 1);
    auto r = siegel_check(Z);
    CHECK(r.valid);
    CHECK(r.min_im_eigenvalue == Approx(1.0));

    // Symmetric with indefinite imaginary part.
    Z << cd(0, 1), cd(0, 2), cd(0, 2), cd(0, 1);
    r = siegel_check(Z);
    CHECK_FALSE(r.valid);
    CHECK(r.min_im_eigenvalue == Approx(-1.0));

    // Symmetric off-diagonal real entries stay valid.
    Z << cd(0, 1), cd(1, 0), cd(1, 0), cd(0, 1);
    r = siegel_check(Z);
    CHECK(r.valid);
    CHECK(r.min_im_eigenvalue == Approx(1.0));

    // Asymmetric.
    Z << cd(0, 1), cd(1, 0), cd(0, 0), cd(0, 1);
    r = siegel_check(Z);
    CHECK_FALSE(r.valid);
    CHECK(r.symmetry_residual == Approx(1.0));

    CHECK_THROWS_AS(siegel_check(Eigen::MatrixXcd::Zero(2, 3)), shape_error);
}

TEST_CASE("siegel_check symmetric under transpose") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::MatrixXcd Z(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) Z(i, j) = cd(u(rng), u(rng));
        auto a = siegel_check(Z);
        auto b = siegel_check(Z.transpose().eval());
        CHECK(a.valid == b.valid);
        CHECK(a.min_im_eigenvalue == Approx(b.min_im_eigenvalue));
    }
}

TEST_CASE("symplectic_reduction without constraint returns the standard basis") {
    PolarizationType d({1});
    auto form = PolarizedSymplecticForm::darboux_polarized(d);
    RatMat none(2, 0);
    RatMat all = RatMat::identity(2);
    RatMat basis = symplectic_reduction(form, d, none, all);
    CHECK(basis == RatMat::identity(2));
}

TEST_CASE("symplectic_reduction with W0 = W1 = span(e1)") {
    PolarizationType d({1});
    auto form = PolarizedSymplecticForm::darboux_polarized(d);
    RatMat w0 = RatMat::from_int_rows({{1}, {0}});
    RatMat basis = symplectic_reduction(form, d, w0, w0);
    // v_2 spans e1 (up to sign/scale in Q); pairing fixed by construction.
    RatMat v2 = basis.col(1);
    CHECK(v2(1, 0) == Rat(0));
    CHECK(v2(0, 0) != Rat(0));
    CHECK(form.pairing(basis.col(0), basis.col(1)) == Rat(-1));
}

TEST_CASE("symplectic_reduction pairing for d = (2)") {
    PolarizationType d({2});
    auto form = PolarizedSymplecticForm::darboux_polarized(d);
    RatMat none(2, 0);
    RatMat basis = symplectic_reduction(form, d, none, RatMat::identity(2));
    CHECK(form.pairing(basis.col(0), basis.col(1)) == Rat(-1, 2));
}

TEST_CASE("symplectic_reduction rejects non-isotropic W0") {
    PolarizationType d({1, 1});
    auto form = PolarizedSymplecticForm::darboux_polarized(d);
    // span(e1, e3) pairs nontrivially under the form.
    RatMat w0 = RatMat::from_int_rows({{1, 0}, {0, 0}, {0, 1}, {0, 0}});
    RatMat w1 = (w0.transpose() * form.omega).kernel();
    CHECK_THROWS_AS(symplectic_reduction(form, d, w0, w1), constraint_error);
}

TEST_CASE("symplectic_reduction exact pairings on a 4-dimensional example") {
    PolarizationType d({1, 3});
    auto form = PolarizedSymplecticForm::darboux_polarized(d);
    RatMat w0 = RatMat::from_int_rows({{0}, {0}, {1}, {0}});
    RatMat w1 = (w0.transpose() * form.omega).kernel();
    RatMat basis = symplectic_reduction(form, d, w0, w1);
    // Lagrangian half contains W0.
    RatMat lag(4, 2);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 2; ++j) lag(i, j) = basis(i, 2 + j);
    CHECK(subspace_contained(w0, lag));
}
