// Multivariate polynomials over C with exact term-by-term differentiation.
// Used for prepotentials, period-matrix germs Q(t) and frame 1-forms.
#pragma once

#include <complex>
#include <map>
#include <span>
#include <vector>

#include "skfib/errors.hpp"

namespace skfib {

using cd = std::complex<double>;

class Poly {
  public:
    using Index = std::vector<int>; // exponent multi-index, length = nvars

    Poly() : nvars_(0) {}
    explicit Poly(int nvars) : nvars_(nvars) {}

    static Poly constant(int nvars, cd c) {
        Poly p(nvars);
        if (c != cd(0.0)) p.terms_[Index(nvars, 0)] = c;
        return p;
    }

    static Poly monomial(int nvars, const Index& idx, cd c) {
        if (static_cast<int>(idx.size()) != nvars) throw shape_error("Poly: multi-index length mismatch");
        for (int e : idx)
            if (e < 0) throw shape_error("Poly: negative exponent");
        Poly p(nvars);
        if (c != cd(0.0)) p.terms_[idx] = c;
        return p;
    }

    // x_k as a polynomial.
    static Poly variable(int nvars, int k) {
        Index idx(nvars, 0);
        idx[k] = 1;
        return monomial(nvars, idx, cd(1.0));
    }

    int nvars() const { return nvars_; }
    const std::map<Index, cd>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    int degree() const {
        int d = 0;
        for (const auto& [idx, c] : terms_) {
            int s = 0;
            for (int e : idx) s += e;
            if (s > d) d = s;
        }
        return d;
    }

    void add_term(const Index& idx, cd c) {
        if (static_cast<int>(idx.size()) != nvars_) throw shape_error("Poly: multi-index length mismatch");
        cd& slot = terms_[idx];
        slot += c;
        if (slot == cd(0.0)) terms_.erase(idx);
    }

    Poly operator+(const Poly& o) const {
        check_same(o);
        Poly r = *this;
        for (const auto& [idx, c] : o.terms_) r.add_term(idx, c);
        return r;
    }

    Poly operator-(const Poly& o) const {
        check_same(o);
        Poly r = *this;
        for (const auto& [idx, c] : o.terms_) r.add_term(idx, -c);
        return r;
    }

    Poly operator*(const Poly& o) const {
        check_same(o);
        Poly r(nvars_);
        for (const auto& [ia, ca] : terms_)
            for (const auto& [ib, cb] : o.terms_) {
                Index idx(nvars_);
                for (int k = 0; k < nvars_; ++k) idx[k] = ia[k] + ib[k];
                r.add_term(idx, ca * cb);
            }
        return r;
    }

    Poly operator*(cd s) const {
        Poly r(nvars_);
        if (s == cd(0.0)) return r;
        for (const auto& [idx, c] : terms_) r.terms_[idx] = c * s;
        return r;
    }

    // Exact partial derivative with respect to variable k.
    Poly derivative(int k) const {
        Poly r(nvars_);
        for (const auto& [idx, c] : terms_) {
            if (idx[k] == 0) continue;
            Index d = idx;
            d[k] -= 1;
            r.add_term(d, c * static_cast<double>(idx[k]));
        }
        return r;
    }

    // Exact antiderivative in variable k (constant of integration zero).
    Poly integral(int k) const {
        Poly r(nvars_);
        for (const auto& [idx, c] : terms_) {
            Index d = idx;
            d[k] += 1;
            r.add_term(d, c / static_cast<double>(d[k]));
        }
        return r;
    }

    cd eval(std::span<const cd> x) const {
        if (static_cast<int>(x.size()) != nvars_) throw shape_error("Poly: evaluation point dimension mismatch");
        cd sum(0.0);
        for (const auto& [idx, c] : terms_) {
            cd t = c;
            for (int k = 0; k < nvars_; ++k)
                for (int e = 0; e < idx[k]; ++e) t *= x[k];
            sum += t;
        }
        return sum;
    }

    cd eval(const std::vector<cd>& x) const { return eval(std::span<const cd>(x)); }

    double max_coeff_diff(const Poly& o) const {
        check_same(o);
        double m = 0.0;
        for (const auto& [idx, c] : terms_) {
            auto it = o.terms_.find(idx);
            double d = std::abs(it == o.terms_.end() ? c : c - it->second);
            if (d > m) m = d;
        }
        for (const auto& [idx, c] : o.terms_)
            if (!terms_.count(idx)) m = std::max(m, std::abs(c));
        return m;
    }

  private:
    void check_same(const Poly& o) const {
        if (nvars_ != o.nvars_) throw shape_error("Poly: variable count mismatch");
    }

    int nvars_;
    std::map<Index, cd> terms_;
};

// Dense matrix of polynomials (period germs, frames).
class PolyMatrix {
  public:
    PolyMatrix() : rows_(0), cols_(0) {}
    PolyMatrix(int rows, int cols, int nvars)
        : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, Poly(nvars)) {}

    static PolyMatrix identity(int n, int nvars) {
        PolyMatrix m(n, n, nvars);
        for (int i = 0; i < n; ++i) m(i, i) = Poly::constant(nvars, cd(1.0));
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Poly& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
    const Poly& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

    bool symmetric_exact() const {
        if (rows_ != cols_) return false;
        for (int i = 0; i < rows_; ++i)
            for (int j = i + 1; j < cols_; ++j)
                if ((*this)(i, j).max_coeff_diff((*this)(j, i)) != 0.0) return false;
        return true;
    }

  private:
    int rows_, cols_;
    std::vector<Poly> a_;
};

} // namespace skfib
