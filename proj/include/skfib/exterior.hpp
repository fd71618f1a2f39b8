// Tiny dense exterior algebra over C on up to 16 generators, enough to wedge
// the 2-forms of a 4n-dimensional chart (n <= 4) into top degree exactly.
#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "skfib/errors.hpp"
#include "skfib/poly.hpp"

namespace skfib {

class ExtForm {
  public:
    ExtForm() : ngen_(0) {}
    explicit ExtForm(int ngen) : ngen_(ngen), coef_(std::size_t(1) << ngen, cd(0.0)) {
        if (ngen < 0 || ngen > 16) throw shape_error("ExtForm: generator count out of range");
    }

    static ExtForm scalar(int ngen, cd c) {
        ExtForm f(ngen);
        f.coef_[0] = c;
        return f;
    }

    // 1-form sum_a v_a e_a.
    static ExtForm one_form(int ngen, const Eigen::VectorXcd& v) {
        if (v.size() != ngen) throw shape_error("ExtForm: coefficient count mismatch");
        ExtForm f(ngen);
        for (int a = 0; a < ngen; ++a) f.coef_[std::size_t(1) << a] = v(a);
        return f;
    }

    // 2-form from an antisymmetric coefficient matrix: sum_{a<b} A_ab e_a ^ e_b.
    static ExtForm two_form(const Eigen::MatrixXcd& A) {
        const int g = static_cast<int>(A.rows());
        ExtForm f(g);
        for (int a = 0; a < g; ++a)
            for (int b = a + 1; b < g; ++b)
                f.coef_[(std::size_t(1) << a) | (std::size_t(1) << b)] = A(a, b);
        return f;
    }

    int ngen() const { return ngen_; }
    cd coefficient(std::uint32_t mask) const { return coef_[mask]; }
    cd top() const { return coef_[(std::size_t(1) << ngen_) - 1]; }

    ExtForm conj() const {
        ExtForm f(ngen_);
        for (std::size_t m = 0; m < coef_.size(); ++m) f.coef_[m] = std::conj(coef_[m]);
        return f;
    }

    ExtForm operator*(cd s) const {
        ExtForm f(ngen_);
        for (std::size_t m = 0; m < coef_.size(); ++m) f.coef_[m] = coef_[m] * s;
        return f;
    }

    ExtForm operator+(const ExtForm& o) const {
        check(o);
        ExtForm f(ngen_);
        for (std::size_t m = 0; m < coef_.size(); ++m) f.coef_[m] = coef_[m] + o.coef_[m];
        return f;
    }

    ExtForm operator-(const ExtForm& o) const {
        check(o);
        ExtForm f(ngen_);
        for (std::size_t m = 0; m < coef_.size(); ++m) f.coef_[m] = coef_[m] - o.coef_[m];
        return f;
    }

    ExtForm wedge(const ExtForm& o) const {
        check(o);
        ExtForm f(ngen_);
        for (std::size_t ma = 0; ma < coef_.size(); ++ma) {
            if (coef_[ma] == cd(0.0)) continue;
            for (std::size_t mb = 0; mb < o.coef_.size(); ++mb) {
                if (o.coef_[mb] == cd(0.0) || (ma & mb)) continue;
                f.coef_[ma | mb] += sign(static_cast<std::uint32_t>(ma), static_cast<std::uint32_t>(mb)) *
                                    coef_[ma] * o.coef_[mb];
            }
        }
        return f;
    }

    ExtForm pow_wedge(int k) const {
        ExtForm acc = scalar(ngen_, cd(1.0));
        for (int i = 0; i < k; ++i) acc = acc.wedge(*this);
        return acc;
    }

  private:
    void check(const ExtForm& o) const {
        if (ngen_ != o.ngen_) throw shape_error("ExtForm: generator count mismatch");
    }

    // (-1)^{#inversions} when concatenating increasing products indexed by
    // bitmasks a then b (disjoint).
    static double sign(std::uint32_t a, std::uint32_t b) {
        int inversions = 0;
        while (b) {
            std::uint32_t low = b & (~b + 1u);
            int pos = std::countr_zero(low);
            inversions += std::popcount(a >> (pos + 1));
            b ^= low;
        }
        return (inversions % 2 == 0) ? 1.0 : -1.0;
    }

    int ngen_;
    std::vector<cd> coef_;
};

} // namespace skfib
