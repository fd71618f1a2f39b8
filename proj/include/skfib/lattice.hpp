// Flat torus geometry: LLL reduction with respect to an arbitrary inner
// product and brute-force diameter (covering radius) of R^m / L.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "skfib/errors.hpp"

namespace skfib {

// LLL-reduce the columns of B with respect to the SPD inner product M
// (delta = 3/4).  Works in doubles; inputs here are well-conditioned
// period lattices at desk scale.
inline Eigen::MatrixXd lll_reduce(Eigen::MatrixXd B, const Eigen::MatrixXd& M, double delta = 0.75) {
    const int m = static_cast<int>(B.cols());
    auto ip = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return a.dot(M * b); };

    Eigen::MatrixXd mu = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd norm2(m);
    std::vector<Eigen::VectorXd> star(m);
    auto gram_schmidt = [&]() {
        for (int i = 0; i < m; ++i) {
            star[i] = B.col(i);
            for (int j = 0; j < i; ++j) {
                mu(i, j) = ip(B.col(i), star[j]) / norm2(j);
                star[i] -= mu(i, j) * star[j];
            }
            norm2(i) = ip(star[i], star[i]);
            if (!(norm2(i) > 0.0)) throw domain_error("lll_reduce: degenerate lattice basis", norm2(i));
        }
    };
    gram_schmidt();

    int k = 1;
    int guard = 0;
    while (k < m) {
        if (++guard > 10000) throw resolution_error("lll_reduce: did not terminate");
        for (int j = k - 1; j >= 0; --j) {
            double r = std::round(mu(k, j));
            if (r != 0.0) {
                B.col(k) -= r * B.col(j);
                gram_schmidt();
            }
        }
        if (norm2(k) >= (delta - mu(k, k - 1) * mu(k, k - 1)) * norm2(k - 1)) {
            ++k;
        } else {
            B.col(k).swap(B.col(k - 1));
            gram_schmidt();
            k = std::max(k - 1, 1);
        }
    }
    return B;
}

inline double lattice_covolume(const Eigen::MatrixXd& B, const Eigen::MatrixXd& M) {
    return std::sqrt(std::abs(M.determinant())) * std::abs(B.determinant());
}

// Diameter of the flat torus R^m / (B Z^m) with metric M: the covering
// radius max_x min_lambda |x - lambda|_M, evaluated on a grid of lattice
// coordinates with the minimum searched over the 3^m nearest translates of
// the LLL-reduced basis.
inline double flat_torus_diameter(const Eigen::MatrixXd& B_in, const Eigen::MatrixXd& M, int grid_per_dim = 64) {
    const int m = static_cast<int>(B_in.cols());
    Eigen::MatrixXd B = lll_reduce(B_in, M);

    long total = 1;
    for (int i = 0; i < m; ++i) total *= grid_per_dim;
    long shifts = 1;
    for (int i = 0; i < m; ++i) shifts *= 3;

    // Precompute shifted basis combinations s in {-1,0,1}^m.
    std::vector<Eigen::VectorXd> translates;
    translates.reserve(shifts);
    for (long s = 0; s < shifts; ++s) {
        long rem = s;
        Eigen::VectorXd t = Eigen::VectorXd::Zero(B.rows());
        for (int i = 0; i < m; ++i) {
            int c = static_cast<int>(rem % 3) - 1;
            rem /= 3;
            t += static_cast<double>(c) * B.col(i);
        }
        translates.push_back(t);
    }

    double diam2 = 0.0;
    Eigen::VectorXd u(m);
    for (long g = 0; g < total; ++g) {
        long rem = g;
        for (int i = 0; i < m; ++i) {
            u(i) = static_cast<double>(rem % grid_per_dim) / grid_per_dim;
            rem /= grid_per_dim;
        }
        Eigen::VectorXd x = B * u;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& t : translates) {
            Eigen::VectorXd dvec = x - t;
            double d2 = dvec.dot(M * dvec);
            if (d2 < best) best = d2;
        }
        if (best > diam2) diam2 = best;
    }
    return std::sqrt(diam2);
}

} // namespace skfib
