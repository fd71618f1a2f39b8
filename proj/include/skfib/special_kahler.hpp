// Special Kahler charts generated by a holomorphic prepotential.
//
// Conventions (fixed across the library):
//   w_i          special holomorphic coordinates
//   w*_i         conjugate coordinates, w*_i = dF/dw_i
//   Z_ij         period matrix, Z = Hess F, a Siegel point on the domain
//   y            flat Darboux coordinates, y_i = Re w_i, y_{i+n} = -Re w*_i
//   phi_K        Kahler potential, (1/2) Im(sum w*_i conj(w_i))
//   metric       Hermitian coefficient matrix (1/2) Im Z of the form
//                omega = (i/2) sum Im Z_ij dw_i ^ d(conj w_j)
//
// The potential whose flat-coordinate Hessian is the metric has gradient
//   dphi/dy_i = Im w*_i,  dphi/dy_{i+n} = Im w_i            (i = 1..n)
// which is what the Legendre/dual machinery below uses.  Its Hessian in y
// has determinant 1 identically (the Monge-Ampere property).
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include "skfib/errors.hpp"
#include "skfib/poly.hpp"
#include "skfib/symplectic.hpp"

namespace skfib {

// Product of axis-aligned rectangles in C^n.
struct DomainBox {
    std::vector<double> re_min, re_max, im_min, im_max;

    int n() const { return static_cast<int>(re_min.size()); }

    static DomainBox cube(int n, double re0, double re1, double im0, double im1) {
        DomainBox b;
        b.re_min.assign(n, re0);
        b.re_max.assign(n, re1);
        b.im_min.assign(n, im0);
        b.im_max.assign(n, im1);
        return b;
    }

    bool contains(const Eigen::VectorXcd& w, double margin = 0.0) const {
        if (w.size() != n()) return false;
        for (int i = 0; i < n(); ++i) {
            if (w(i).real() < re_min[i] + margin || w(i).real() > re_max[i] - margin) return false;
            if (w(i).imag() < im_min[i] + margin || w(i).imag() > im_max[i] - margin) return false;
        }
        return true;
    }

    Eigen::VectorXcd center() const {
        Eigen::VectorXcd c(n());
        for (int i = 0; i < n(); ++i)
            c(i) = cd(0.5 * (re_min[i] + re_max[i]), 0.5 * (im_min[i] + im_max[i]));
        return c;
    }

    // per_dim^n grid including the box corners (per_dim >= 2).
    std::vector<Eigen::VectorXcd> grid(int per_dim) const {
        std::vector<Eigen::VectorXcd> pts;
        int total = 1;
        for (int i = 0; i < n(); ++i) total *= per_dim * per_dim;
        pts.reserve(total);
        std::vector<int> c(2 * n(), 0);
        for (int k = 0; k < total; ++k) {
            Eigen::VectorXcd w(n());
            int rem = k;
            for (int i = 0; i < n(); ++i) {
                int a = rem % per_dim;
                rem /= per_dim;
                int b = rem % per_dim;
                rem /= per_dim;
                double fr = per_dim == 1 ? 0.5 : static_cast<double>(a) / (per_dim - 1);
                double fi = per_dim == 1 ? 0.5 : static_cast<double>(b) / (per_dim - 1);
                w(i) = cd(re_min[i] + fr * (re_max[i] - re_min[i]), im_min[i] + fi * (im_max[i] - im_min[i]));
            }
            pts.push_back(w);
        }
        return pts;
    }
};

class Prepotential {
  public:
    Prepotential() = default;
    Prepotential(Poly f, DomainBox domain) : n_(f.nvars()), f_(std::move(f)), domain_(std::move(domain)) {
        if (domain_.n() != n_) throw shape_error("Prepotential: domain dimension mismatch");
        grad_.reserve(n_);
        for (int i = 0; i < n_; ++i) grad_.push_back(f_.derivative(i));
        hess_.assign(static_cast<size_t>(n_) * n_, Poly(n_));
        for (int i = 0; i < n_; ++i)
            for (int j = i; j < n_; ++j) {
                Poly h = grad_[i].derivative(j);
                hess_[i * n_ + j] = h;
                hess_[j * n_ + i] = h; // mixed partials of a polynomial agree exactly
            }
        third_.assign(static_cast<size_t>(n_) * n_ * n_, Poly(n_));
        for (int k = 0; k < n_; ++k)
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < n_; ++j) third_[(k * n_ + i) * n_ + j] = hess_[i * n_ + j].derivative(k);
    }

    int n() const { return n_; }
    const Poly& poly() const { return f_; }
    const DomainBox& domain() const { return domain_; }

    cd value(const Eigen::VectorXcd& w) const { return f_.eval(to_vec(w)); }

    // w*_i = dF/dw_i, exact differentiation.
    Eigen::VectorXcd gradient(const Eigen::VectorXcd& w) const {
        auto x = to_vec(w);
        Eigen::VectorXcd g(n_);
        for (int i = 0; i < n_; ++i) g(i) = grad_[i].eval(x);
        return g;
    }

    // Z_ij = d^2 F / dw_i dw_j, symmetric by construction.
    Eigen::MatrixXcd hessian(const Eigen::VectorXcd& w) const {
        auto x = to_vec(w);
        Eigen::MatrixXcd Z(n_, n_);
        for (int i = 0; i < n_; ++i)
            for (int j = i; j < n_; ++j) {
                cd v = hess_[i * n_ + j].eval(x);
                Z(i, j) = v;
                Z(j, i) = v;
            }
        return Z;
    }

    // dZ_ij / dw_k.
    Eigen::MatrixXcd hessian_derivative(const Eigen::VectorXcd& w, int k) const {
        auto x = to_vec(w);
        Eigen::MatrixXcd C(n_, n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) C(i, j) = third_[(k * n_ + i) * n_ + j].eval(x);
        return C;
    }

    // Sample-based domain certificate: Im Z positive definite on a
    // per_dim^(2n) grid over the box.  Throws naming the failing point.
    void certify_domain(int per_dim = 5, double tol = kDefaultSymTol) const {
        for (const auto& w : domain_.grid(per_dim)) {
            auto r = siegel_check(hessian(w), tol);
            if (!r.valid) {
                std::ostringstream os;
                os << "Im(Hess F) not positive definite at domain sample (";
                for (int i = 0; i < n_; ++i) os << (i ? ", " : "") << w(i).real() << (w(i).imag() < 0 ? "-" : "+")
                                                << std::abs(w(i).imag()) << "i";
                os << "), min eigenvalue " << r.min_im_eigenvalue;
                throw domain_error(os.str(), r.min_im_eigenvalue);
            }
        }
    }

  private:
    static std::vector<cd> to_vec(const Eigen::VectorXcd& w) {
        return std::vector<cd>(w.data(), w.data() + w.size());
    }

    int n_ = 0;
    Poly f_;
    DomainBox domain_;
    std::vector<Poly> grad_;
    std::vector<Poly> hess_;
    std::vector<Poly> third_;
};

struct SpecialChart {
    Eigen::VectorXcd w;      // base point
    Eigen::VectorXcd w_star; // conjugate coordinates
    Eigen::MatrixXcd Z;      // period matrix
    double phi = 0.0;        // Kahler potential (1/2) Im(sum w* conj w)
    Eigen::MatrixXd metric;  // (1/2) Im Z
    Eigen::VectorXd darboux; // y in R^2n
};

inline SpecialChart evaluate_chart(const Prepotential& F, const Eigen::VectorXcd& w) {
    const int n = F.n();
    if (w.size() != n) throw shape_error("evaluate_chart: point dimension mismatch");
    SpecialChart c;
    c.w = w;
    c.w_star = F.gradient(w);
    c.Z = F.hessian(w);
    auto sc = siegel_check(c.Z);
    if (!sc.valid)
        throw domain_error("evaluate_chart: Im Z not positive definite at point", sc.min_im_eigenvalue);
    cd acc(0.0);
    for (int i = 0; i < n; ++i) acc += c.w_star(i) * std::conj(w(i));
    c.phi = 0.5 * acc.imag();
    c.metric = 0.5 * c.Z.imag();
    c.darboux.resize(2 * n);
    for (int i = 0; i < n; ++i) {
        c.darboux(i) = w(i).real();
        c.darboux(n + i) = -c.w_star(i).real();
    }
    return c;
}

// Flat Darboux coordinates of the point: (Re w, -Re w*).
inline Eigen::VectorXd darboux_coords(const Prepotential& F, const Eigen::VectorXcd& w) {
    const int n = F.n();
    Eigen::VectorXcd ws = F.gradient(w);
    Eigen::VectorXd y(2 * n);
    for (int i = 0; i < n; ++i) {
        y(i) = w(i).real();
        y(n + i) = -ws(i).real();
    }
    return y;
}

// Gradient of the flat-coordinate potential: (Im w*, Im w).  These are the
// dual affine coordinates of the Legendre transform.
inline Eigen::VectorXd dual_coords(const Prepotential& F, const Eigen::VectorXcd& w) {
    const int n = F.n();
    Eigen::VectorXcd ws = F.gradient(w);
    Eigen::VectorXd p(2 * n);
    for (int i = 0; i < n; ++i) {
        p(i) = ws(i).imag();
        p(n + i) = w(i).imag();
    }
    return p;
}

namespace detail {

// d(y)/d(Re w, Im w) as a real 2n x 2n matrix.
inline Eigen::MatrixXd darboux_jacobian(const Eigen::MatrixXcd& Z) {
    const int n = static_cast<int>(Z.rows());
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    J.topLeftCorner(n, n).setIdentity();
    J.bottomLeftCorner(n, n) = -Z.real();
    J.bottomRightCorner(n, n) = Z.imag();
    return J;
}

// d(Im w*, Im w)/d(Re w, Im w).
inline Eigen::MatrixXd dual_jacobian(const Eigen::MatrixXcd& Z) {
    const int n = static_cast<int>(Z.rows());
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    J.topLeftCorner(n, n) = Z.imag();
    J.topRightCorner(n, n) = Z.real();
    J.bottomRightCorner(n, n).setIdentity();
    return J;
}

inline Eigen::VectorXcd newton_invert(const Prepotential& F, const Eigen::VectorXd& target,
                                      const std::function<Eigen::VectorXd(const Eigen::VectorXcd&)>& map,
                                      const std::function<Eigen::MatrixXd(const Eigen::MatrixXcd&)>& jac,
                                      Eigen::VectorXcd w, double tol, int max_iter) {
    const int n = F.n();
    double res = (map(w) - target).cwiseAbs().maxCoeff();
    for (int it = 0; it < max_iter; ++it) {
        if (res <= tol) return w;
        Eigen::MatrixXcd Z = F.hessian(w);
        Eigen::MatrixXd J = jac(Z);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
        if (!lu.isInvertible()) throw chart_error("chart inversion: singular Jacobian");
        Eigen::VectorXd r = map(w) - target;
        Eigen::VectorXd step = lu.solve(r);
        // Damping: halve until the residual decreases.
        double s = 1.0;
        for (int back = 0; back < 30; ++back) {
            Eigen::VectorXcd w_new = w;
            for (int i = 0; i < n; ++i) w_new(i) -= s * cd(step(i), step(n + i));
            double res_new = (map(w_new) - target).cwiseAbs().maxCoeff();
            if (res_new < res || res_new <= tol) {
                w = w_new;
                res = res_new;
                break;
            }
            s *= 0.5;
            if (back == 29) throw chart_error("chart inversion: damped Newton stalled");
        }
    }
    if (res > tol) throw chart_error("chart inversion: Newton did not converge");
    return w;
}

} // namespace detail

// Invert y(w) = (Re w, -Re w*) by damped Newton, seeded at w_seed.
inline Eigen::VectorXcd invert_darboux(const Prepotential& F, const Eigen::VectorXd& y,
                                       const Eigen::VectorXcd& w_seed, double tol = 1e-10, int max_iter = 50) {
    if (y.size() != 2 * F.n()) throw shape_error("invert_darboux: target dimension mismatch");
    return detail::newton_invert(
        F, y, [&](const Eigen::VectorXcd& w) { return darboux_coords(F, w); },
        [&](const Eigen::MatrixXcd& Z) { return detail::darboux_jacobian(Z); }, w_seed, tol, max_iter);
}

// Invert p(w) = (Im w*, Im w).
inline Eigen::VectorXcd invert_dual(const Prepotential& F, const Eigen::VectorXd& p,
                                    const Eigen::VectorXcd& w_seed, double tol = 1e-10, int max_iter = 50) {
    if (p.size() != 2 * F.n()) throw shape_error("invert_dual: target dimension mismatch");
    return detail::newton_invert(
        F, p, [&](const Eigen::VectorXcd& w) { return dual_coords(F, w); },
        [&](const Eigen::MatrixXcd& Z) { return detail::dual_jacobian(Z); }, w_seed, tol, max_iter);
}

// Closed form for the flat-coordinate Hessian phi_ij(y): chain rule through
// the chart gives  Hess = Phi * Y^{-1}  with Phi = d(dual)/d(w-real),
// Y = d(y)/d(w-real).  det Phi = det Y = det Im Z, so det Hess = 1 exactly.
inline Eigen::MatrixXd affine_hessian(const Prepotential& F, const Eigen::VectorXcd& w) {
    Eigen::MatrixXcd Z = F.hessian(w);
    Eigen::MatrixXd Y = detail::darboux_jacobian(Z);
    Eigen::MatrixXd Phi = detail::dual_jacobian(Z);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(Y);
    if (!lu.isInvertible()) throw chart_error("affine_hessian: degenerate Darboux chart");
    return Phi * lu.inverse();
}

// Finite-difference Hessian through the coordinate change: central
// differences of the analytic gradient (Im w*, Im w) in y, each displaced
// point recovered by Newton inversion.
inline Eigen::MatrixXd affine_hessian_fd(const Prepotential& F, const Eigen::VectorXcd& w, double step = 1e-4,
                                         double newton_tol = 1e-12) {
    const int n2 = 2 * F.n();
    Eigen::VectorXd y = darboux_coords(F, w);
    Eigen::MatrixXd H(n2, n2);
    for (int j = 0; j < n2; ++j) {
        Eigen::VectorXd yp = y, ym = y;
        yp(j) += step;
        ym(j) -= step;
        Eigen::VectorXcd wp = invert_darboux(F, yp, w, newton_tol);
        Eigen::VectorXcd wm = invert_darboux(F, ym, w, newton_tol);
        H.col(j) = (dual_coords(F, wp) - dual_coords(F, wm)) / (2.0 * step);
    }
    return H;
}

struct MongeAmpereResult {
    double max_residual = 0.0;     // worst |det(phi_ij) - 1|
    Eigen::VectorXcd worst_point;  // sample achieving it
    int samples = 0;
};

// Monge-Ampere residual of the chart: the flat-coordinate Hessian is
// computed by finite differences through the coordinate change and its
// determinant compared against 1.
inline MongeAmpereResult monge_ampere_residual(const Prepotential& F, const std::vector<Eigen::VectorXcd>& region,
                                               double step = 1e-4) {
    MongeAmpereResult r;
    for (const auto& w : region) {
        Eigen::MatrixXd H = affine_hessian_fd(F, w, step);
        double dev = std::abs(H.determinant() - 1.0);
        if (dev >= r.max_residual) {
            r.max_residual = dev;
            r.worst_point = w;
        }
        ++r.samples;
    }
    return r;
}

namespace detail {

// Hermitian matrix of second mixed complex derivatives d^2 u / dw_i d(conj w_j)
// by central finite differences of a real-valued function of w.
inline Eigen::MatrixXcd complex_hessian_fd(const std::function<double(const Eigen::VectorXcd&)>& u,
                                           const Eigen::VectorXcd& w0, double h) {
    const int n = static_cast<int>(w0.size());
    auto shifted = [&](int i, double dre_i, double dim_i, int j, double dre_j, double dim_j) {
        Eigen::VectorXcd w = w0;
        w(i) += cd(dre_i, dim_i);
        w(j) += cd(dre_j, dim_j);
        return u(w);
    };
    // d^2/da db for coordinate directions a,b in {x_i, y_i}.
    auto second = [&](int i, bool i_imag, int j, bool j_imag) {
        double hxi_re = i_imag ? 0.0 : h, hxi_im = i_imag ? h : 0.0;
        double hxj_re = j_imag ? 0.0 : h, hxj_im = j_imag ? h : 0.0;
        if (i == j && i_imag == j_imag) {
            double up = shifted(i, hxi_re, hxi_im, i, 0, 0);
            double um = shifted(i, -hxi_re, -hxi_im, i, 0, 0);
            double u0 = u(w0);
            return (up - 2.0 * u0 + um) / (h * h);
        }
        double upp = shifted(i, hxi_re, hxi_im, j, hxj_re, hxj_im);
        double upm = shifted(i, hxi_re, hxi_im, j, -hxj_re, -hxj_im);
        double ump = shifted(i, -hxi_re, -hxi_im, j, hxj_re, hxj_im);
        double umm = shifted(i, -hxi_re, -hxi_im, j, -hxj_re, -hxj_im);
        return (upp - upm - ump + umm) / (4.0 * h * h);
    };
    Eigen::MatrixXcd H(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double xx = second(i, false, j, false);
            double yy = second(i, true, j, true);
            double xy = second(i, false, j, true);
            double yx = second(i, true, j, false);
            // d^2/dw_i dcw_j = 1/4 (d_xx + d_yy) + i/4 (d_xy - d_yx)
            cd v(0.25 * (xx + yy), 0.25 * (xy - yx));
            H(i, j) = v;
            H(j, i) = std::conj(v);
        }
    return H;
}

} // namespace detail

struct RicciWpResult {
    Eigen::MatrixXcd ricci;      // -(d d-bar) log det Im Z
    Eigen::MatrixXcd wp;         // -(d d-bar) log V_y, V_y = det(Im Z) * prod d_k
    double residual = 0.0;       // ||ricci - wp||_max
    double richardson = 0.0;     // consistency of ricci at step h vs h/2
};

// The Ricci form of the chart metric against the Weil-Petersson form of the
// fiber family.  V_y factors as det(Im Z) * prod(d_k); the constant factor
// is differentiated separately (a constant function runs through the same
// finite-difference stencil and contributes exactly zero), so the result is
// bitwise invariant under rescaling d.
inline RicciWpResult ricci_vs_weil_petersson(const Prepotential& F, const PolarizationType& d,
                                             const Eigen::VectorXcd& w, double step = 1e-4) {
    if (d.n() != F.n()) throw shape_error("ricci_vs_weil_petersson: polarization size mismatch");
    if (!F.domain().contains(w, 2.0 * step))
        throw domain_error("ricci_vs_weil_petersson: point too close to domain boundary for the step");
    auto logdet = [&](const Eigen::VectorXcd& p) {
        Eigen::MatrixXd im = F.hessian(p).imag();
        double det = im.determinant();
        if (det <= 0.0) throw domain_error("ricci_vs_weil_petersson: det Im Z not positive", det);
        return std::log(det);
    };
    const double log_pol = std::log(d.product());
    auto constant_part = [&](const Eigen::VectorXcd&) { return log_pol; };

    RicciWpResult r;
    r.ricci = -detail::complex_hessian_fd(logdet, w, step);
    Eigen::MatrixXcd ricci_half = -detail::complex_hessian_fd(logdet, w, step / 2.0);
    r.richardson = (r.ricci - ricci_half).cwiseAbs().maxCoeff();
    r.wp = r.ricci - detail::complex_hessian_fd(constant_part, w, step);
    r.residual = (r.ricci - r.wp).cwiseAbs().maxCoeff();
    return r;
}

struct LegendreDual {
    Eigen::VectorXd dual;          // (phi_1..phi_2n) = gradient of the flat potential
    Eigen::MatrixXd dual_hessian;  // inverse of the primal Hessian
};

// Legendre transform of the flat-coordinate potential at Darboux point y.
inline LegendreDual legendre_dual(const Prepotential& F, const Eigen::VectorXd& y, const Eigen::VectorXcd& w_seed,
                                  double newton_tol = 1e-12) {
    Eigen::VectorXcd w = invert_darboux(F, y, w_seed, newton_tol);
    LegendreDual out;
    out.dual = dual_coords(F, w);
    Eigen::MatrixXcd Z = F.hessian(w);
    Eigen::MatrixXd Phi = detail::dual_jacobian(Z);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(Phi);
    if (!lu.isInvertible()) throw chart_error("legendre_dual: degenerate dual chart");
    out.dual_hessian = detail::darboux_jacobian(Z) * lu.inverse();
    return out;
}

// Inverse transform: recover y from dual coordinates p.
inline Eigen::VectorXd legendre_primal(const Prepotential& F, const Eigen::VectorXd& p,
                                       const Eigen::VectorXcd& w_seed, double newton_tol = 1e-12) {
    Eigen::VectorXcd w = invert_dual(F, p, w_seed, newton_tol);
    return darboux_coords(F, w);
}

} // namespace skfib
