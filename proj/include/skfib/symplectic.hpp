// Polarized symplectic lattices and the Siegel upper half space.
//
// Lattice-level computations (symplectic checks, basis reduction) run in
// exact rational arithmetic; only Siegel eigenvalue bounds use doubles.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cstdint>
#include <sstream>
#include <vector>

#include "skfib/errors.hpp"
#include "skfib/rational.hpp"

namespace skfib {

inline constexpr double kDefaultSymTol = 1e-10; // symmetry residual for floating-point Hessians

struct PolarizationType {
    std::vector<std::int64_t> d;

    PolarizationType() = default;
    explicit PolarizationType(std::vector<std::int64_t> dd) : d(std::move(dd)) {
        for (auto v : d)
            if (v < 1) throw constraint_error("polarization type entries must be >= 1");
    }

    int n() const { return static_cast<int>(d.size()); }

    RatMat delta() const {
        RatMat m(n(), n());
        for (int i = 0; i < n(); ++i) m(i, i) = Rat(d[i]);
        return m;
    }

    Eigen::MatrixXd delta_double() const {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n(), n());
        for (int i = 0; i < n(); ++i) m(i, i) = static_cast<double>(d[i]);
        return m;
    }

    double product() const {
        double p = 1.0;
        for (auto v : d) p *= static_cast<double>(v);
        return p;
    }
};

struct PolarizedSymplecticForm {
    RatMat omega; // 2n x 2n, antisymmetric, nondegenerate

    PolarizedSymplecticForm() = default;
    explicit PolarizedSymplecticForm(RatMat m) : omega(std::move(m)) {
        if (omega.rows() != omega.cols() || omega.rows() % 2 != 0)
            throw shape_error("symplectic form must be square of even dimension");
        if ((omega + omega.transpose()).is_zero() == false)
            throw constraint_error("symplectic form must be antisymmetric");
        if (omega.det() == Rat(0)) throw constraint_error("symplectic form must be nondegenerate");
    }

    int dim() const { return omega.rows(); }
    int n() const { return omega.rows() / 2; }

    // omega(e_i, e_{j+n}) = delta_ij:  the integral form Sum dy_i ^ dy_{i+n}.
    static PolarizedSymplecticForm standard(int n) {
        RatMat m(2 * n, 2 * n);
        for (int i = 0; i < n; ++i) {
            m(i, n + i) = Rat(1);
            m(n + i, i) = Rat(-1);
        }
        return PolarizedSymplecticForm(std::move(m));
    }

    // omega(v_i, v_{j+n}) = -d_i^{-1} delta_ij:  the convention used when
    // reducing a monodromy-adapted basis.  (The dual lattice convention
    // omega(v_i, v_{j+n}) = +d_i delta_ij is PolarizedSymplecticForm of
    // standard(n) scaled per call site; both appear in the literature and we
    // fix one per use.)
    static PolarizedSymplecticForm darboux_polarized(const PolarizationType& d) {
        int n = d.n();
        RatMat m(2 * n, 2 * n);
        for (int i = 0; i < n; ++i) {
            m(i, n + i) = Rat(-1, d.d[i]);
            m(n + i, i) = Rat(1, d.d[i]);
        }
        return PolarizedSymplecticForm(std::move(m));
    }

    Rat pairing(const RatMat& u, const RatMat& v) const {
        if (u.rows() != dim() || v.rows() != dim() || u.cols() != 1 || v.cols() != 1)
            throw shape_error("pairing expects column vectors of the form's dimension");
        Rat s(0);
        for (int i = 0; i < dim(); ++i)
            for (int j = 0; j < dim(); ++j) s += u(i, 0) * omega(i, j) * v(j, 0);
        return s;
    }
};

// A^T Omega A == Omega, exactly.
inline bool symplectic_check(const RatMat& A, const PolarizedSymplecticForm& form) {
    if (A.rows() != A.cols()) throw shape_error("symplectic_check: matrix must be square");
    if (A.rows() != form.dim()) throw shape_error("symplectic_check: dimension does not match form");
    return A.transpose() * form.omega * A == form.omega;
}

struct SiegelCheckResult {
    bool valid = false;
    double min_im_eigenvalue = 0.0;
    double symmetry_residual = 0.0;
};

// Z belongs to the Siegel upper half space: symmetric within tol and
// Im Z positive definite.  Returns the smallest eigenvalue of the
// symmetrized imaginary part either way.
inline SiegelCheckResult siegel_check(const Eigen::MatrixXcd& Z, double tol = kDefaultSymTol) {
    if (Z.rows() != Z.cols()) throw shape_error("siegel_check: matrix must be square");
    SiegelCheckResult r;
    r.symmetry_residual = (Z - Z.transpose()).cwiseAbs().maxCoeff();
    Eigen::MatrixXd S = 0.5 * (Z.imag() + Z.imag().transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    r.min_im_eigenvalue = es.eigenvalues().minCoeff();
    r.valid = (r.symmetry_residual <= tol) && (r.min_im_eigenvalue > 0.0);
    return r;
}

struct SiegelPoint {
    Eigen::MatrixXcd Z;

    SiegelPoint() = default;
    explicit SiegelPoint(Eigen::MatrixXcd z, double tol = kDefaultSymTol) : Z(std::move(z)) {
        auto r = siegel_check(Z, tol);
        if (!r.valid) {
            std::ostringstream os;
            os << "matrix is not a Siegel point (symmetry residual " << r.symmetry_residual
               << ", min Im eigenvalue " << r.min_im_eigenvalue << ")";
            throw domain_error(os.str(), r.min_im_eigenvalue);
        }
    }

    int n() const { return static_cast<int>(Z.rows()); }
};

namespace detail {

// Greedy extension of W0 to a Lagrangian inside W1, scanning candidate
// columns of W1 (last first, so an unconstrained call settles on the
// standard Lagrangian) and keeping those that stay isotropic and independent.
inline RatMat extend_to_lagrangian(const PolarizedSymplecticForm& form, const RatMat& W0, const RatMat& W1) {
    int n = form.n();
    RatMat L = W0.column_space();
    for (int jj = 0; jj < W1.cols() && L.cols() < n; ++jj) {
        int j = W1.cols() - 1 - jj;
        RatMat cand = W1.col(j);
        RatMat trial = L.hcat(cand);
        if (trial.rank() != L.cols() + 1) continue;
        bool isotropic = true;
        for (int c = 0; c < L.cols() && isotropic; ++c)
            if (form.pairing(L.col(c), cand) != Rat(0)) isotropic = false;
        if (isotropic) L = trial;
    }
    if (L.cols() != n) throw constraint_error("no Lagrangian extension of W0 inside W1 exists");
    return L;
}

} // namespace detail

// Symplectic basis v_1..v_2n adapted to an isotropic/coisotropic pair
// W0 subset W1 = W0^perp, with pairings
//   omega(v_i, v_j) = 0, omega(v_{i+n}, v_{j+n}) = 0,
//   omega(v_i, v_{j+n}) = -d_i^{-1} delta_ij,
// and span(v_{n+1}..v_{2n}) a Lagrangian containing W0.
// Returns the basis as columns.
inline RatMat symplectic_reduction(const PolarizedSymplecticForm& form, const PolarizationType& d,
                                   const RatMat& W0, const RatMat& W1) {
    const int n = form.n();
    const int dim = form.dim();
    if (d.n() != n) throw shape_error("symplectic_reduction: polarization size mismatch");
    if (W0.cols() > 0 && W0.rows() != dim) throw shape_error("symplectic_reduction: W0 dimension mismatch");
    if (W1.cols() > 0 && W1.rows() != dim) throw shape_error("symplectic_reduction: W1 dimension mismatch");

    // W0 isotropic, exactly.
    for (int a = 0; a < W0.cols(); ++a)
        for (int b = 0; b < W0.cols(); ++b)
            if (form.pairing(W0.col(a), W0.col(b)) != Rat(0))
                throw constraint_error("symplectic_reduction: W0 is not isotropic");

    // W1 must be the symplectic orthogonal of W0.
    RatMat W0perp = (W0.transpose() * form.omega).kernel();
    if (!subspace_equal(W1.cols() ? W1 : RatMat(dim, 0), W0perp))
        throw constraint_error("symplectic_reduction: W1 is not the symplectic orthogonal of W0");

    RatMat L = detail::extend_to_lagrangian(form, W0, W0perp);

    // Complement basis u_1..u_n: extend L by standard vectors, ordered so an
    // unconstrained call returns the standard basis.
    RatMat ext = L;
    std::vector<int> order;
    for (int i = n; i < dim; ++i) order.push_back(i);
    for (int i = 0; i < n; ++i) order.push_back(i);
    RatMat U(dim, 0);
    for (int i : order) {
        if (ext.cols() == dim) break;
        RatMat e(dim, 1);
        e(i, 0) = Rat(1);
        RatMat trial = ext.hcat(e);
        if (trial.rank() == ext.cols() + 1) {
            ext = trial;
            U = U.hcat(e);
        }
    }
    if (U.cols() != n) throw constraint_error("symplectic_reduction: failed to complete complement basis");

    // Normalize pairings against L:   v = A U with A = -Delta^{-1} P^{-1},
    // P_ij = omega(u_i, l_j).
    RatMat P(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) P(i, j) = form.pairing(U.col(i), L.col(j));
    RatMat A = d.delta().inverse() * P.inverse() * Rat(-1);
    RatMat V = U * A.transpose();

    // Kill residual pairings among the v_i by shearing along L:
    //   v_i += sum_j c_ij l_j with c_ij = -(d_j/ ... ) chosen so that
    //   S_ij - d_i^{-1} c_ji + d_j^{-1} c_ij = 0; c_ij = -(1/2) d_j S_ij works.
    RatMat S(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) S(i, j) = form.pairing(V.col(i), V.col(j));
    RatMat C(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) C(i, j) = Rat(-1, 2) * Rat(d.d[j]) * S(i, j);
    V = V + L * C.transpose();

    RatMat basis = V.hcat(L);

    // Exact postconditions.
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (form.pairing(basis.col(i), basis.col(j)) != Rat(0))
                throw constraint_error("symplectic_reduction: v-block pairing not zero");
            if (form.pairing(basis.col(n + i), basis.col(n + j)) != Rat(0))
                throw constraint_error("symplectic_reduction: L-block pairing not zero");
            Rat expect = (i == j) ? Rat(-1, d.d[i]) : Rat(0);
            if (form.pairing(basis.col(i), basis.col(n + j)) != expect)
                throw constraint_error("symplectic_reduction: cross pairing not -1/d_i");
        }
    return basis;
}

} // namespace skfib
