// Shared prepotential fixtures for the test suites.
#pragma once

#include "skfib/special_kahler.hpp"

namespace fixtures {

using namespace skfib;

// F = (i/2) w^2:  Z = i, constant Hessian, flat chart.
inline Prepotential quadratic_n1() {
    Poly f = Poly::monomial(1, {2}, cd(0.0, 0.5));
    return Prepotential(f, DomainBox::cube(1, -2.0, 2.0, -2.0, 2.0));
}

// F = tau/2 w^2 for tau in the upper half plane.
inline Prepotential quadratic_tau(cd tau) {
    Poly f = Poly::monomial(1, {2}, tau * 0.5);
    return Prepotential(f, DomainBox::cube(1, -2.0, 2.0, -2.0, 2.0));
}

// F = w^3/6 on a box around 2i (Z = w, so Im Z ~ 2 there).
inline Prepotential cubic_n1() {
    Poly f = Poly::monomial(1, {3}, cd(1.0 / 6.0));
    return Prepotential(f, DomainBox::cube(1, -0.5, 0.5, 1.5, 2.5));
}

// F = (i/2)(w1^2 + w2^2):  Z = i I.
inline Prepotential quadratic_n2() {
    Poly f = Poly::monomial(2, {2, 0}, cd(0.0, 0.5)) + Poly::monomial(2, {0, 2}, cd(0.0, 0.5));
    return Prepotential(f, DomainBox::cube(2, -2.0, 2.0, -2.0, 2.0));
}

// F = (i/2)(w1^2 + w2^2) + eps w1^2 w2 near (1, 1).
inline Prepotential cubic_n2(double eps = 0.01) {
    Poly f = Poly::monomial(2, {2, 0}, cd(0.0, 0.5)) + Poly::monomial(2, {0, 2}, cd(0.0, 0.5)) +
             Poly::monomial(2, {2, 1}, cd(eps, 0.0));
    return Prepotential(f, DomainBox::cube(2, 0.5, 1.5, -0.3, 0.3));
}

// F = w^4/24 near 1 + i:  Z = w^2/2, nonconstant with quartic potential.
inline Prepotential quartic_n1() {
    Poly f = Poly::monomial(1, {4}, cd(1.0 / 24.0));
    return Prepotential(f, DomainBox::cube(1, 0.7, 1.3, 0.7, 1.3));
}

inline Eigen::VectorXcd point1(cd w) {
    Eigen::VectorXcd v(1);
    v(0) = w;
    return v;
}

inline Eigen::VectorXcd point2(cd a, cd b) {
    Eigen::VectorXcd v(2);
    v(0) = a;
    v(1) = b;
    return v;
}

} // namespace fixtures
