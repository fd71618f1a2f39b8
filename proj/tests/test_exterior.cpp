#include <catch2/catch_amalgamated.hpp>

#include "skfib/exterior.hpp"

using namespace skfib;
using Catch::Approx;

namespace {
Eigen::VectorXcd basis_covector(int g, int a) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(g);
    v(a) = cd(1.0);
    return v;
}
} // namespace

TEST_CASE("wedge anticommutes on 1-forms") {
    auto e0 = ExtForm::one_form(3, basis_covector(3, 0));
    auto e1 = ExtForm::one_form(3, basis_covector(3, 1));
    auto a = e0.wedge(e1);
    auto b = e1.wedge(e0);
    CHECK(a.coefficient(0b011) == cd(1.0));
    CHECK(b.coefficient(0b011) == cd(-1.0));
    CHECK(e0.wedge(e0).coefficient(0b001) == cd(0.0));
}

TEST_CASE("triple products pick up the right permutation sign") {
    const int g = 4;
    auto e = [&](int a) { return ExtForm::one_form(g, basis_covector(g, a)); };
    // (2,0,3,1) has inversions (2,0),(2,1),(3,1): sign -1.
    auto f = e(2).wedge(e(0)).wedge(e(3)).wedge(e(1));
    CHECK(f.top() == cd(-1.0));
}

TEST_CASE("two-form from matrix squares to twice the Pfaffian in dim 4") {
    // A = dy1^dy2 + dx1^dx2 over (y1, y2, x1, x2): A^2 = 2 vol.
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(4, 4);
    A(0, 1) = 1.0;
    A(1, 0) = -1.0;
    A(2, 3) = 1.0;
    A(3, 2) = -1.0;
    auto f = ExtForm::two_form(A);
    CHECK(f.pow_wedge(2).top() == cd(2.0));
}

TEST_CASE("n=1 volume ratio constant reproduced by hand") {
    // omega = t^{-1/2} dy1^dy2 - t^{1/2} dx1^dx2; Omega = dw ^ dz with
    // dw = dy1 + i dy2, dz = dx1 - i dx2.  omega^2 / (Omega ^ conj Omega) = 1/2.
    const int g = 4;
    const double t = 0.37;
    Eigen::MatrixXcd W = Eigen::MatrixXcd::Zero(g, g);
    W(0, 1) = std::pow(t, -0.5);
    W(1, 0) = -W(0, 1);
    W(2, 3) = -std::pow(t, 0.5);
    W(3, 2) = -W(2, 3);
    auto omega = ExtForm::two_form(W);

    Eigen::VectorXcd dw = Eigen::VectorXcd::Zero(g), dz = Eigen::VectorXcd::Zero(g);
    dw(0) = 1.0;
    dw(1) = cd(0, 1);
    dz(2) = 1.0;
    dz(3) = cd(0, -1);
    auto Omega = ExtForm::one_form(g, dw).wedge(ExtForm::one_form(g, dz));

    cd num = omega.pow_wedge(2).top();
    cd den = Omega.wedge(Omega.conj()).top();
    CHECK(std::abs(num / den - cd(0.5)) < 1e-14);
}
