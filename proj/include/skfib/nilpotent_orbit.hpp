// Nilpotent-orbit period models near a normal crossings divisor:
//   Z(t) = Q(t) + sum_{p<=k} (log t_p / 2 pi i + b_p) Delta_d eta_p,
// with Q holomorphic (polynomial here), eta_p rational residues carried
// exactly, and an explicit integer branch vector b.  The induced base
// metric follows the period formula
//   G_ij = sum_p Z_ip dw_p/dt_j,
//   g_{i jbar} = (-i/4) sum_p ( G_pi conj(dw_p/dt_j) - dw_p/dt_i conj(G_pj) ),
// whose entries blow up at worst like 1 - eps(i) log|t_i| - eps(j) log|t_j|.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "skfib/errors.hpp"
#include "skfib/poly.hpp"
#include "skfib/rational.hpp"
#include "skfib/symplectic.hpp"

namespace skfib {

struct NilpotentOrbitModel {
    int n = 0; // base dimension
    int k = 0; // number of divisor directions (t_1..t_k -> 0)
    PolyMatrix Q;                 // symmetric holomorphic germ
    std::vector<RatMat> residues; // eta_p, rational n x n
    PolarizationType d;
    std::vector<int> orbifold_orders; // m_p per divisor direction
    PolyMatrix frame;                 // P_ij = dw_i/dt_j, polynomial; identity by default

    NilpotentOrbitModel(int nn, int kk, PolyMatrix q, std::vector<RatMat> etas, PolarizationType dd,
                        std::vector<int> orders = {}, PolyMatrix fr = {})
        : n(nn), k(kk), Q(std::move(q)), residues(std::move(etas)), d(std::move(dd)),
          orbifold_orders(std::move(orders)), frame(std::move(fr)) {
        if (frame.rows() == 0) frame = PolyMatrix::identity(n, n);
        if (orbifold_orders.empty()) orbifold_orders.assign(k, 1);
        validate();
    }

    void validate() const {
        if (k < 0 || k > n) throw shape_error("NilpotentOrbitModel: need 0 <= k <= n");
        if (Q.rows() != n || Q.cols() != n) throw shape_error("NilpotentOrbitModel: Q must be n x n");
        if (!Q.symmetric_exact()) throw model_error("NilpotentOrbitModel: Q(t) must be symmetric");
        if (static_cast<int>(residues.size()) != k) throw shape_error("NilpotentOrbitModel: need k residues");
        if (d.n() != n) throw shape_error("NilpotentOrbitModel: polarization size mismatch");
        if (static_cast<int>(orbifold_orders.size()) != k)
            throw shape_error("NilpotentOrbitModel: need k orbifold orders");
        if (frame.rows() != n || frame.cols() != n) throw shape_error("NilpotentOrbitModel: frame must be n x n");
        for (int m : orbifold_orders)
            if (m < 1) throw model_error("NilpotentOrbitModel: orbifold orders must be positive");

        RatMat Delta = d.delta();
        for (const auto& eta : residues) {
            if (eta.rows() != n || eta.cols() != n) throw shape_error("NilpotentOrbitModel: residue must be n x n");
            RatMat De = Delta * eta;
            if (De != De.transpose())
                throw model_error("NilpotentOrbitModel: Delta_d eta_p must be symmetric (Z symmetry)");
            check_residue_block(eta);
        }

        // Frame 1-forms dw_i must be closed: dP_ij/dt_l == dP_il/dt_j.
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int l = j + 1; l < n; ++l)
                    if (frame(i, j).derivative(l).max_coeff_diff(frame(i, l).derivative(j)) != 0.0)
                        throw model_error("NilpotentOrbitModel: frame 1-forms are not closed");
    }

    // eta_p has block form [[eta1, 0], [0, 0]] with eta1 a nu x nu positive
    // definite symmetric block (nu = size of its support, a leading range).
    void check_residue_block(const RatMat& eta) const {
        int nu = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (eta(i, j) != Rat(0)) nu = std::max(nu, std::max(i, j) + 1);
        if (nu == 0) return; // zero residue allowed (no degeneration in this direction)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if ((i >= nu || j >= nu) && eta(i, j) != Rat(0))
                    throw model_error("NilpotentOrbitModel: residue support is not a leading block");
        // Leading principal minors of the nu x nu block, exactly.
        for (int s = 1; s <= nu; ++s) {
            RatMat minor(s, s);
            for (int i = 0; i < s; ++i)
                for (int j = 0; j < s; ++j) minor(i, j) = eta(i, j);
            if (!(minor.det() > Rat(0)))
                throw model_error("NilpotentOrbitModel: residue block is not positive definite");
        }
    }
};

// Z(t) on the punctured polydisc; branch_p shifts log t_p by 2 pi i branch_p.
// The branch contribution is added as an exact integer multiple of
// Delta_d eta_p so that branch equivariance survives floating point.
inline Eigen::MatrixXcd period_map_eval(const NilpotentOrbitModel& model, const Eigen::VectorXcd& t,
                                        const std::vector<int>& branch = {}, bool check = true) {
    const int n = model.n;
    if (t.size() != n) throw shape_error("period_map_eval: point dimension mismatch");
    std::vector<int> b = branch.empty() ? std::vector<int>(model.k, 0) : branch;
    if (static_cast<int>(b.size()) != model.k) throw shape_error("period_map_eval: branch vector length mismatch");
    for (int p = 0; p < model.k; ++p) {
        double a = std::abs(t(p));
        if (!(a > 0.0 && a < 1.0)) throw domain_error("period_map_eval: need 0 < |t_p| < 1 on divisor directions", a);
    }

    std::vector<cd> x(t.data(), t.data() + n);
    Eigen::MatrixXcd Z(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) Z(i, j) = model.Q(i, j).eval(x);

    const cd two_pi_i(0.0, 2.0 * std::numbers::pi);
    for (int p = 0; p < model.k; ++p) {
        Eigen::MatrixXd De = (model.d.delta() * model.residues[p]).to_double();
        cd factor = std::log(t(p)) / two_pi_i;
        Z += factor * De.cast<cd>();
        if (b[p] != 0) Z += static_cast<double>(b[p]) * De.cast<cd>();
    }

    if (check) {
        auto sc = siegel_check(Z);
        if (!sc.valid) {
            std::ostringstream os;
            os << "period_map_eval: Z(t) left the Siegel space (min Im eigenvalue " << sc.min_im_eigenvalue << ")";
            throw domain_error(os.str(), sc.min_im_eigenvalue);
        }
    }
    return Z;
}

// dw_p/dt_j at t, from the polynomial frame.
inline Eigen::MatrixXcd frame_jacobian(const NilpotentOrbitModel& model, const Eigen::VectorXcd& t) {
    std::vector<cd> x(t.data(), t.data() + t.size());
    Eigen::MatrixXcd W(model.n, model.n);
    for (int i = 0; i < model.n; ++i)
        for (int j = 0; j < model.n; ++j) W(i, j) = model.frame(i, j).eval(x);
    return W;
}

// Base metric coefficients g_{i jbar}(t) in the t-coframe.
inline Eigen::MatrixXcd base_metric_coeffs(const NilpotentOrbitModel& model, const Eigen::VectorXcd& t,
                                           const std::vector<int>& branch = {}) {
    const int n = model.n;
    Eigen::MatrixXcd Z = period_map_eval(model, t, branch);
    Eigen::MatrixXcd W = frame_jacobian(model, t); // W(p, j) = dw_p/dt_j
    Eigen::MatrixXcd G = Z * W;                    // G(i, j) = dw*_i/dt_j

    const cd quarter_i(0.0, 0.25);
    Eigen::MatrixXcd g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            cd acc(0.0);
            for (int p = 0; p < n; ++p)
                acc += G(p, i) * std::conj(W(p, j)) - W(p, i) * std::conj(G(p, j));
            g(i, j) = -quarter_i * acc;
        }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw model_error("base_metric_coeffs: metric not positive definite at the point");
    return g;
}

inline double log_bound_denominator(const NilpotentOrbitModel& model, const Eigen::VectorXcd& t, int i, int j) {
    auto eps = [&](int a) { return a < model.k ? 1.0 : 0.0; };
    return 1.0 - eps(i) * std::log(std::abs(t(i))) - eps(j) * std::log(std::abs(t(j)));
}

struct LogBoundFit {
    double C = 0.0;              // smallest feasible constant over the samples
    double d_exponent = 0.0;     // fitted exponent of (1 - sum log) growth
    double branch_residual = 0.0;// max |g(b) - g(b')| over a branch shift
    bool pass = false;
    int samples = 0;
};

// Fit |g_{i jbar}| <= C (1 - eps(i) log|t_i| - eps(j) log|t_j|) over sample
// points approaching the divisor, and check single-valuedness of g.
inline LogBoundFit log_bound_fit(const NilpotentOrbitModel& model, const std::vector<Eigen::VectorXcd>& samples) {
    if (samples.empty()) throw shape_error("log_bound_fit: no samples");
    LogBoundFit fit;
    double max_ratio = 0.0;
    std::vector<double> xs, ys; // regression of log max|g| against log(1 - log|t_1|)
    std::vector<int> shifted(model.k, 0);
    if (model.k > 0) shifted[0] = 1;

    for (const auto& t : samples) {
        Eigen::MatrixXcd g = base_metric_coeffs(model, t);
        for (int i = 0; i < model.n; ++i)
            for (int j = 0; j < model.n; ++j)
                max_ratio = std::max(max_ratio, std::abs(g(i, j)) / log_bound_denominator(model, t, i, j));
        if (model.k > 0) {
            Eigen::MatrixXcd g_shift = base_metric_coeffs(model, t, shifted);
            fit.branch_residual = std::max(fit.branch_residual, (g - g_shift).cwiseAbs().maxCoeff());
            xs.push_back(std::log(1.0 - std::log(std::abs(t(0)))));
            ys.push_back(std::log(g.cwiseAbs().maxCoeff()));
        }
        ++fit.samples;
    }
    fit.C = max_ratio;

    if (xs.size() >= 2) {
        double mx = 0, my = 0;
        for (size_t i = 0; i < xs.size(); ++i) {
            mx += xs[i];
            my += ys[i];
        }
        mx /= xs.size();
        my /= ys.size();
        double num = 0, den = 0;
        for (size_t i = 0; i < xs.size(); ++i) {
            num += (xs[i] - mx) * (ys[i] - my);
            den += (xs[i] - mx) * (xs[i] - mx);
        }
        fit.d_exponent = den > 0 ? num / den : 0.0;
    }
    fit.pass = std::isfinite(fit.C) && fit.C > 0.0;
    return fit;
}

// Geometric ray toward the divisor: t_p = r e^{i theta_p} for p < k, fixed
// tail coordinates elsewhere.
inline std::vector<Eigen::VectorXcd> divisor_ray(const NilpotentOrbitModel& model, const std::vector<double>& thetas,
                                                 const Eigen::VectorXcd& tail, double r_max, double r_min,
                                                 int count) {
    if (static_cast<int>(thetas.size()) != model.k) throw shape_error("divisor_ray: need k angles");
    if (tail.size() != model.n - model.k) throw shape_error("divisor_ray: tail length mismatch");
    std::vector<Eigen::VectorXcd> pts;
    for (int s = 0; s < count; ++s) {
        double f = count == 1 ? 0.0 : static_cast<double>(s) / (count - 1);
        double r = r_max * std::pow(r_min / r_max, f);
        Eigen::VectorXcd t(model.n);
        for (int p = 0; p < model.k; ++p) t(p) = std::polar(r, thetas[p]);
        for (int q = model.k; q < model.n; ++q) t(q) = tail(q - model.k);
        pts.push_back(t);
    }
    return pts;
}

} // namespace skfib
