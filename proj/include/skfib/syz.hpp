// The dual torus fibration over a special Kahler chart: dual holomorphic
// coordinates, the dual Kahler form and fiberwise T-duality.  B-fields are
// ignored throughout.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

#include "skfib/errors.hpp"
#include "skfib/rational.hpp"
#include "skfib/special_kahler.hpp"

namespace skfib {

// xi_i = exp 2 pi i (x̌_i + i y_i): |xi_i| = exp(-2 pi y_i), period 1 in x̌.
inline Eigen::VectorXcd dual_holo_coords(const Eigen::VectorXd& y, const Eigen::VectorXd& x_check) {
    if (y.size() != x_check.size()) throw shape_error("dual_holo_coords: dimension mismatch");
    const double two_pi = 2.0 * std::numbers::pi;
    Eigen::VectorXcd xi(y.size());
    for (int i = 0; i < y.size(); ++i) xi(i) = std::exp(cd(-two_pi * y(i), two_pi * x_check(i)));
    return xi;
}

struct DualFibrationPoint {
    Eigen::VectorXd y;
    Eigen::MatrixXd hessian; // phi_ij(y), positive definite, det = 1
    double t = 1.0;
};

inline DualFibrationPoint dual_fibration_point(const Prepotential& F, const Eigen::VectorXcd& w, double t) {
    DualFibrationPoint p;
    p.y = darboux_coords(F, w);
    p.hessian = affine_hessian(F, w);
    p.t = t;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p.hessian);
    if (es.eigenvalues().minCoeff() <= 0.0) throw chart_error("dual_fibration_point: Hessian not positive definite");
    return p;
}

// Mixed block of the dual Kahler form: omegǎ_t = t^{-1/2} sum phi_ij dy_i ^ dx̌_j.
inline Eigen::MatrixXd dual_form_block(const DualFibrationPoint& p) {
    if (!(p.t > 0.0)) throw domain_error("dual_form_block: t must be positive", p.t);
    return std::pow(p.t, -0.5) * p.hessian;
}

// Fiberwise T-duality: the primal fiber metric t^{1/2} (phi_ij)^{-1} times
// the dual fiber metric t^{-1/2} phi_ij is the identity.
inline double t_duality_residual(const Prepotential& F, const Eigen::VectorXcd& w, double t) {
    DualFibrationPoint p = dual_fibration_point(F, w, t);
    Eigen::MatrixXd primal = std::pow(t, 0.5) * p.hessian.inverse();
    Eigen::MatrixXd dual = std::pow(t, -0.5) * p.hessian;
    return (primal * dual - Eigen::MatrixXd::Identity(p.hessian.rows(), p.hessian.cols())).cwiseAbs().maxCoeff();
}

// Primal and dual fiber volumes in the flat x / x̌ coordinates (both lattices
// are the standard Z^2n there); the product is a model constant.
struct FiberVolumePair {
    double primal = 0.0;
    double dual = 0.0;
};

inline FiberVolumePair dual_fiber_volumes(const Prepotential& F, const Eigen::VectorXcd& w, double t) {
    DualFibrationPoint p = dual_fibration_point(F, w, t);
    const int m = static_cast<int>(p.hessian.rows());
    FiberVolumePair v;
    v.primal = std::sqrt((std::pow(t, 0.5) * p.hessian.inverse()).determinant());
    v.dual = std::sqrt((std::pow(t, -0.5) * p.hessian).determinant());
    (void)m;
    return v;
}

// Finite-difference exterior derivative of omegǎ_t in the model frame:
// d omegǎ has (dy_k ^ dy_i ^ dx̌_j)-coefficients  t^{-1/2} (d_k phi_ij - d_i phi_kj),
// which vanish because phi_ij is a Hessian.  Returns the worst antisymmetrized
// finite-difference coefficient.
inline double dual_form_closedness_fd(const Prepotential& F, const Eigen::VectorXcd& w, double t,
                                      double step = 1e-5, double newton_tol = 1e-12) {
    const int n2 = 2 * F.n();
    Eigen::VectorXd y = darboux_coords(F, w);
    std::vector<Eigen::MatrixXd> dH(n2);
    for (int k = 0; k < n2; ++k) {
        Eigen::VectorXd yp = y, ym = y;
        yp(k) += step;
        ym(k) -= step;
        Eigen::MatrixXd Hp = affine_hessian(F, invert_darboux(F, yp, w, newton_tol));
        Eigen::MatrixXd Hm = affine_hessian(F, invert_darboux(F, ym, w, newton_tol));
        dH[k] = (Hp - Hm) / (2.0 * step);
    }
    double worst = 0.0;
    for (int k = 0; k < n2; ++k)
        for (int i = 0; i < n2; ++i)
            for (int j = 0; j < n2; ++j) worst = std::max(worst, std::abs(dH[k](i, j) - dH[i](k, j)));
    return worst * std::pow(t, -0.5);
}

// Dual polarization type (d_n/d_n, ..., d_1/d_n), recorded as metadata only;
// no divisibility is assumed or enforced.
inline std::vector<Rat> dual_polarization(const PolarizationType& d) {
    std::vector<Rat> out;
    const auto& v = d.d;
    for (auto it = v.rbegin(); it != v.rend(); ++it) out.emplace_back(*it, v.back());
    return out;
}

} // namespace skfib
