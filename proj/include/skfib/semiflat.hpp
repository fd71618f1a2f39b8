// The semi-flat form on a polarized torus fibration and its t-scaled family.
//
// Over a base chart with period map Z(.) the fiberwise potential is
//   eta(., z) = -(1/4) sum_ij (Im Z)^{-1}_ij (z_i - cz_i)(z_j - cz_j)
//             =  (Im z)^T (Im Z)^{-1} (Im z)  >= 0,
// and the family is  omega_{SF,t} = t^{-1/2} (base form) + t^{1/2} (i ddbar eta),
// pulled around by the fiber dilations lambda_t(., z) = (., t^{-1/2} z).
//
// All coefficient matrices here are Hermitian matrices in the holomorphic
// coordinate coframe (dw_1..dw_n, dz_1..dz_n) of the chart covering
// (base) x C^n; a form i sum h_ab dzeta_a ^ d(conj zeta_b) is stored as h.
#pragma once

#include <Eigen/Dense>

#include <variant>
#include <vector>

#include "skfib/errors.hpp"
#include "skfib/lattice.hpp"
#include "skfib/poly.hpp"
#include "skfib/special_kahler.hpp"
#include "skfib/symplectic.hpp"

namespace skfib {

// Period map given directly as a symmetric polynomial matrix in the base
// coordinates (no prepotential behind it).
struct PeriodPolyModel {
    int n = 0;
    PolyMatrix Z; // n x n, entries polynomial in n complex base variables
    DomainBox domain;

    PeriodPolyModel() = default;
    PeriodPolyModel(PolyMatrix z, DomainBox box) : n(z.rows()), Z(std::move(z)), domain(std::move(box)) {
        if (Z.rows() != Z.cols()) throw shape_error("PeriodPolyModel: Z must be square");
        if (!Z.symmetric_exact()) throw model_error("PeriodPolyModel: Z(y) must be symmetric");
    }
};

// A polarized torus fibration over one chart: base model (prepotential or
// bare period map) plus polarization; the fiber lattice at a base point is
// spanned by the columns of Delta_d and of Z.
struct FibrationModel {
    std::variant<Prepotential, PeriodPolyModel> base;
    PolarizationType d;

    FibrationModel(Prepotential f, PolarizationType dd) : base(std::move(f)), d(std::move(dd)) { check(); }
    FibrationModel(PeriodPolyModel m, PolarizationType dd) : base(std::move(m)), d(std::move(dd)) { check(); }

    int n() const {
        if (auto* f = std::get_if<Prepotential>(&base)) return f->n();
        return std::get<PeriodPolyModel>(base).n;
    }

    const DomainBox& domain() const {
        if (auto* f = std::get_if<Prepotential>(&base)) return f->domain();
        return std::get<PeriodPolyModel>(base).domain;
    }

    bool has_prepotential() const { return std::holds_alternative<Prepotential>(base); }
    const Prepotential& prepotential() const { return std::get<Prepotential>(base); }

    Eigen::MatrixXcd period(const Eigen::VectorXcd& w) const {
        if (auto* f = std::get_if<Prepotential>(&base)) return f->hessian(w);
        const auto& m = std::get<PeriodPolyModel>(base);
        std::vector<cd> x(w.data(), w.data() + w.size());
        Eigen::MatrixXcd Z(m.n, m.n);
        for (int i = 0; i < m.n; ++i)
            for (int j = 0; j < m.n; ++j) Z(i, j) = m.Z(i, j).eval(x);
        return Z;
    }

    // dZ/dw_k, exact.
    Eigen::MatrixXcd period_derivative(const Eigen::VectorXcd& w, int k) const {
        if (auto* f = std::get_if<Prepotential>(&base)) return f->hessian_derivative(w, k);
        const auto& m = std::get<PeriodPolyModel>(base);
        std::vector<cd> x(w.data(), w.data() + w.size());
        Eigen::MatrixXcd C(m.n, m.n);
        for (int i = 0; i < m.n; ++i)
            for (int j = 0; j < m.n; ++j) C(i, j) = m.Z(i, j).derivative(k).eval(x);
        return C;
    }

  private:
    void check() const {
        if (d.n() != n()) throw shape_error("FibrationModel: polarization size mismatch");
    }
};

// eta(Z, z) >= 0, vanishing exactly on real fiber points.
inline double semiflat_potential(const Eigen::MatrixXcd& Z, const Eigen::VectorXcd& z) {
    if (Z.rows() != z.size()) throw shape_error("semiflat_potential: dimension mismatch");
    Eigen::MatrixXd imZ = Z.imag();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(imZ);
    if (!lu.isInvertible()) throw domain_error("semiflat_potential: Im Z singular");
    Eigen::VectorXd m = z.imag();
    return m.dot(lu.solve(m));
}

// Fiber metric block (1/2) (Im Z)^{-1} in the holomorphic fiber coframe.
inline Eigen::MatrixXd semiflat_fiber_block(const Eigen::MatrixXcd& Z) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(Eigen::MatrixXd(Z.imag()));
    if (!lu.isInvertible()) throw domain_error("semiflat_fiber_block: Im Z singular");
    return 0.5 * lu.inverse();
}

// Full Hermitian coefficient matrix of i ddbar eta on (base, fiber), size
// 2n x 2n, blocks ordered (w_1..w_n, z_1..z_n).  With S = (Im Z)^{-1},
// m = Im z and M_k = (d_k Z)/(2i):
//   H_{z_i, cz_j}  = (1/2) S_ij
//   H_{w_i, cz_j}  = -i (S M_i S m)_j
//   H_{w_i, cw_j}  = + m^T (S M_i S conj(M_j) S + S conj(M_j) S M_i S) m
inline Eigen::MatrixXcd semiflat_total_form_at(const Eigen::MatrixXcd& Z, const std::vector<Eigen::MatrixXcd>& dZ,
                                               const Eigen::VectorXcd& z) {
    const int n = static_cast<int>(Z.rows());
    if (z.size() != n || static_cast<int>(dZ.size()) != n)
        throw shape_error("semiflat_total_form_at: dimension mismatch");
    auto sc = siegel_check(Z);
    if (!sc.valid) throw domain_error("semiflat_total_form_at: invalid period matrix", sc.min_im_eigenvalue);

    Eigen::MatrixXd S = Eigen::MatrixXd(Z.imag()).inverse();
    Eigen::VectorXd m = z.imag();
    const cd I(0.0, 1.0);

    std::vector<Eigen::MatrixXcd> M(n);
    for (int k = 0; k < n; ++k) M[k] = dZ[k] / (2.0 * I);

    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    H.bottomRightCorner(n, n) = 0.5 * S.cast<cd>();

    Eigen::VectorXcd Sm = (S * m).cast<cd>();
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXcd row = -I * (S.cast<cd>() * (M[i] * Sm));
        for (int j = 0; j < n; ++j) {
            H(i, n + j) = row(j);
            H(n + j, i) = std::conj(row(j));
        }
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Eigen::MatrixXcd A = S.cast<cd>() * M[i] * S.cast<cd>() * M[j].conjugate() * S.cast<cd>();
            Eigen::MatrixXcd B = S.cast<cd>() * M[j].conjugate() * S.cast<cd>() * M[i] * S.cast<cd>();
            cd acc(0.0);
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) acc += m(a) * (A(a, b) + B(a, b)) * m(b);
            H(i, j) = acc;
        }
    return H;
}

inline Eigen::MatrixXcd semiflat_total_form(const FibrationModel& model, const Eigen::VectorXcd& w,
                                            const Eigen::VectorXcd& z) {
    const int n = model.n();
    if (w.size() != n || z.size() != n) throw shape_error("semiflat_total_form: dimension mismatch");
    std::vector<Eigen::MatrixXcd> dZ(n);
    for (int k = 0; k < n; ++k) dZ[k] = model.period_derivative(w, k);
    return semiflat_total_form_at(model.period(w), dZ, z);
}

// Base Kahler block (1/2) Im Z in the w-coframe, embedded into the 2n frame.
inline Eigen::MatrixXcd semiflat_base_form(const FibrationModel& model, const Eigen::VectorXcd& w) {
    const int n = model.n();
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    H.topLeftCorner(n, n) = (0.5 * model.period(w).imag()).cast<cd>();
    return H;
}

// omega_{SF,t} = t^{-1/2} base + t^{1/2} fiber family, as one matrix.
inline Eigen::MatrixXcd semiflat_family_form(const FibrationModel& model, const Eigen::VectorXcd& w,
                                             const Eigen::VectorXcd& z, double t) {
    if (!(t > 0.0)) throw domain_error("semiflat_family_form: t must be positive", t);
    return std::pow(t, -0.5) * semiflat_base_form(model, w) + std::pow(t, 0.5) * semiflat_total_form(model, w, z);
}

struct SemiflatFamilyPoint {
    double t = 1.0;
    Eigen::MatrixXcd form; // semiflat_family_form at the point
};

struct DilationResidual {
    double scaling_identity = 0.0; // t lambda_t^* omega_SF  vs  omega_SF
    double family_identity = 0.0;  // lambda_t^* (t^{1/2} omega_{SF,t})  vs  omega_{SF,1}
};

// Pull back a Hermitian coefficient matrix by lambda_t (fiber scaling by
// t^{-1/2}): coefficients move to the scaled point and fiber slots pick up
// one factor of t^{-1/2} each.
inline Eigen::MatrixXcd dilation_pullback(const Eigen::MatrixXcd& H_at_scaled, int n, double t) {
    Eigen::MatrixXcd P = H_at_scaled;
    const double s = std::pow(t, -0.5);
    P.topRightCorner(n, n) *= s;
    P.bottomLeftCorner(n, n) *= s;
    P.bottomRightCorner(n, n) *= s * s;
    return P;
}

inline DilationResidual dilation_identity_residual(const FibrationModel& model, double t,
                                                   const std::vector<std::pair<Eigen::VectorXcd, Eigen::VectorXcd>>& samples) {
    if (!(t > 0.0 && t <= 1.0)) throw domain_error("dilation_identity_residual: t must lie in (0,1]", t);
    const int n = model.n();
    DilationResidual r;
    for (const auto& [w, z] : samples) {
        Eigen::VectorXcd z_scaled = std::pow(t, -0.5) * z;

        Eigen::MatrixXcd sf = semiflat_total_form(model, w, z);
        Eigen::MatrixXcd sf_pulled = t * dilation_pullback(semiflat_total_form(model, w, z_scaled), n, t);
        r.scaling_identity = std::max(r.scaling_identity, (sf_pulled - sf).cwiseAbs().maxCoeff());

        Eigen::MatrixXcd fam1 = semiflat_family_form(model, w, z, 1.0);
        Eigen::MatrixXcd famt =
            dilation_pullback(std::pow(t, 0.5) * semiflat_family_form(model, w, z_scaled, t), n, t);
        r.family_identity = std::max(r.family_identity, (famt - fam1).cwiseAbs().maxCoeff());
    }
    return r;
}

struct FiberGeometry {
    double volume = 0.0;   // t^{n/2} det(Im Z) prod d_k  (Euclidean cell volume, family-scaled)
    double diameter = 0.0; // flat torus diameter under the t-scaled fiber metric
};

// Real 2n x 2n lattice basis of the fiber torus: columns d_i e_i and the
// real/imaginary parts of the Z columns.
inline Eigen::MatrixXd fiber_lattice_basis(const Eigen::MatrixXcd& Z, const PolarizationType& d) {
    const int n = static_cast<int>(Z.rows());
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) B(i, i) = static_cast<double>(d.d[i]);
    for (int j = 0; j < n; ++j) {
        B.block(0, n + j, n, 1) = Z.real().col(j);
        B.block(n, n + j, n, 1) = Z.imag().col(j);
    }
    return B;
}

inline FiberGeometry fiber_geometry(const FibrationModel& model, const Eigen::VectorXcd& w, double t,
                                    int grid_per_dim = 64) {
    if (!(t > 0.0)) throw domain_error("fiber_geometry: t must be positive", t);
    const int n = model.n();
    Eigen::MatrixXcd Z = model.period(w);
    auto sc = siegel_check(Z);
    if (!sc.valid) throw domain_error("fiber_geometry: invalid period matrix", sc.min_im_eigenvalue);

    FiberGeometry g;
    g.volume = std::pow(t, 0.5 * n) * Z.imag().determinant() * model.d.product();

    // Fiber metric in the real frame (Re z, Im z): squared length of a real
    // tangent xi is t^{1/2} zeta^dag S zeta with S = (Im Z)^{-1}; S is real
    // symmetric, so the realification is block diagonal.
    Eigen::MatrixXd S = Eigen::MatrixXd(Z.imag()).inverse();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    M.topLeftCorner(n, n) = S;
    M.bottomRightCorner(n, n) = S;
    M *= std::pow(t, 0.5);

    Eigen::MatrixXd B = fiber_lattice_basis(Z, model.d);
    if (std::abs(B.determinant()) < 1e-14) throw domain_error("fiber_geometry: degenerate fiber lattice");
    g.diameter = flat_torus_diameter(B, M, grid_per_dim);
    return g;
}

} // namespace skfib
