// Exact rational linear algebra for lattice and monodromy computations.
//
// Everything here is dense and small (matrices are 2n x 2n with n <= 4 in
// practice), so a plain row-major vector of boost rationals is plenty.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include <Eigen/Dense>

#include <initializer_list>
#include <string>
#include <vector>

#include "skfib/errors.hpp"

namespace skfib {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::rational<Int>;

inline double to_double(const Rat& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

// Parse "p", "p/q" or "-p/q".
inline Rat parse_rational(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rat(Int(s), 1);
        return Rat(Int(s.substr(0, slash)), Int(s.substr(slash + 1)));
    } catch (const std::exception&) {
        throw io_error("cannot parse rational literal '" + s + "'");
    }
}

class RatMat {
  public:
    RatMat() : rows_(0), cols_(0) {}
    RatMat(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, Rat(0)) {}
    RatMat(int rows, int cols, std::initializer_list<Rat> vals) : RatMat(rows, cols) {
        if (static_cast<int>(vals.size()) != rows * cols) throw shape_error("RatMat: initializer size mismatch");
        std::copy(vals.begin(), vals.end(), a_.begin());
    }

    static RatMat identity(int n) {
        RatMat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = Rat(1);
        return m;
    }

    static RatMat from_int_rows(const std::vector<std::vector<long long>>& rows) {
        if (rows.empty()) return RatMat();
        RatMat m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
        for (int i = 0; i < m.rows(); ++i) {
            if (static_cast<int>(rows[i].size()) != m.cols()) throw shape_error("RatMat: ragged rows");
            for (int j = 0; j < m.cols(); ++j) m(i, j) = Rat(rows[i][j]);
        }
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Rat& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
    const Rat& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

    bool operator==(const RatMat& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_; }
    bool operator!=(const RatMat& o) const { return !(*this == o); }

    bool is_zero() const {
        for (const auto& v : a_)
            if (v != Rat(0)) return false;
        return true;
    }

    bool is_integer() const {
        for (const auto& v : a_)
            if (v.denominator() != 1) return false;
        return true;
    }

    RatMat transpose() const {
        RatMat t(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    RatMat operator*(const RatMat& o) const {
        if (cols_ != o.rows_) throw shape_error("RatMat: product dimension mismatch");
        RatMat r(rows_, o.cols_);
        for (int i = 0; i < rows_; ++i)
            for (int k = 0; k < cols_; ++k) {
                const Rat& aik = (*this)(i, k);
                if (aik == Rat(0)) continue;
                for (int j = 0; j < o.cols_; ++j) r(i, j) += aik * o(k, j);
            }
        return r;
    }

    RatMat operator+(const RatMat& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw shape_error("RatMat: sum dimension mismatch");
        RatMat r = *this;
        for (size_t i = 0; i < a_.size(); ++i) r.a_[i] += o.a_[i];
        return r;
    }

    RatMat operator-(const RatMat& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw shape_error("RatMat: difference dimension mismatch");
        RatMat r = *this;
        for (size_t i = 0; i < a_.size(); ++i) r.a_[i] -= o.a_[i];
        return r;
    }

    RatMat operator*(const Rat& s) const {
        RatMat r = *this;
        for (auto& v : r.a_) v *= s;
        return r;
    }

    RatMat col(int j) const {
        RatMat c(rows_, 1);
        for (int i = 0; i < rows_; ++i) c(i, 0) = (*this)(i, j);
        return c;
    }

    // Horizontal concatenation.
    RatMat hcat(const RatMat& o) const {
        if (rows_ != o.rows_) throw shape_error("RatMat: hcat row mismatch");
        RatMat r(rows_, cols_ + o.cols_);
        for (int i = 0; i < rows_; ++i) {
            for (int j = 0; j < cols_; ++j) r(i, j) = (*this)(i, j);
            for (int j = 0; j < o.cols_; ++j) r(i, cols_ + j) = o(i, j);
        }
        return r;
    }

    RatMat vcat(const RatMat& o) const {
        if (cols_ != o.cols_ && rows_ != 0 && o.rows_ != 0) throw shape_error("RatMat: vcat col mismatch");
        if (rows_ == 0) return o;
        if (o.rows_ == 0) return *this;
        RatMat r(rows_ + o.rows_, cols_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) r(i, j) = (*this)(i, j);
        for (int i = 0; i < o.rows_; ++i)
            for (int j = 0; j < cols_; ++j) r(rows_ + i, j) = o(i, j);
        return r;
    }

    // Reduced row echelon form; returns pivot columns.
    RatMat rref(std::vector<int>* pivots = nullptr) const {
        RatMat m = *this;
        std::vector<int> piv;
        int lead = 0;
        for (int r = 0; r < m.rows_ && lead < m.cols_; ++r) {
            int i = r;
            while (i < m.rows_ && m(i, lead) == Rat(0)) {
                ++i;
                if (i == m.rows_) {
                    i = r;
                    ++lead;
                    if (lead == m.cols_) {
                        if (pivots) *pivots = piv;
                        return m;
                    }
                }
            }
            for (int j = 0; j < m.cols_; ++j) std::swap(m(i, j), m(r, j));
            Rat p = m(r, lead);
            for (int j = 0; j < m.cols_; ++j) m(r, j) /= p;
            for (int k = 0; k < m.rows_; ++k) {
                if (k == r) continue;
                Rat f = m(k, lead);
                if (f == Rat(0)) continue;
                for (int j = 0; j < m.cols_; ++j) m(k, j) -= f * m(r, j);
            }
            piv.push_back(lead);
            ++lead;
        }
        if (pivots) *pivots = piv;
        return m;
    }

    int rank() const {
        std::vector<int> piv;
        rref(&piv);
        return static_cast<int>(piv.size());
    }

    Rat det() const {
        if (rows_ != cols_) throw shape_error("RatMat: determinant of non-square matrix");
        RatMat m = *this;
        Rat d(1);
        for (int c = 0; c < cols_; ++c) {
            int p = -1;
            for (int i = c; i < rows_; ++i)
                if (m(i, c) != Rat(0)) {
                    p = i;
                    break;
                }
            if (p < 0) return Rat(0);
            if (p != c) {
                for (int j = 0; j < cols_; ++j) std::swap(m(p, j), m(c, j));
                d = -d;
            }
            d *= m(c, c);
            for (int i = c + 1; i < rows_; ++i) {
                Rat f = m(i, c) / m(c, c);
                if (f == Rat(0)) continue;
                for (int j = c; j < cols_; ++j) m(i, j) -= f * m(c, j);
            }
        }
        return d;
    }

    RatMat inverse() const {
        if (rows_ != cols_) throw shape_error("RatMat: inverse of non-square matrix");
        RatMat aug = hcat(identity(rows_));
        std::vector<int> piv;
        RatMat red = aug.rref(&piv);
        if (static_cast<int>(piv.size()) != rows_ || piv.back() >= rows_)
            throw constraint_error("RatMat: singular matrix has no inverse");
        RatMat inv(rows_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < rows_; ++j) inv(i, j) = red(i, rows_ + j);
        return inv;
    }

    // Basis of the (right) kernel, returned as columns.  May have zero columns.
    RatMat kernel() const {
        std::vector<int> piv;
        RatMat red = rref(&piv);
        std::vector<bool> is_pivot(cols_, false);
        for (int p : piv) is_pivot[p] = true;
        std::vector<int> free_cols;
        for (int j = 0; j < cols_; ++j)
            if (!is_pivot[j]) free_cols.push_back(j);
        RatMat K(cols_, static_cast<int>(free_cols.size()));
        for (size_t f = 0; f < free_cols.size(); ++f) {
            int fc = free_cols[f];
            K(fc, static_cast<int>(f)) = Rat(1);
            for (size_t r = 0; r < piv.size(); ++r) K(piv[r], static_cast<int>(f)) = -red(static_cast<int>(r), fc);
        }
        return K;
    }

    // Basis of the column space, returned as columns of the original matrix.
    RatMat column_space() const {
        std::vector<int> piv;
        rref(&piv);
        RatMat B(rows_, static_cast<int>(piv.size()));
        for (size_t k = 0; k < piv.size(); ++k)
            for (int i = 0; i < rows_; ++i) B(i, static_cast<int>(k)) = (*this)(i, piv[k]);
        return B;
    }

    Eigen::MatrixXd to_double() const {
        Eigen::MatrixXd m(rows_, cols_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) m(i, j) = skfib::to_double((*this)(i, j));
        return m;
    }

  private:
    int rows_, cols_;
    std::vector<Rat> a_;
};

// Do the columns of `sub` span a subspace of the column span of `space`?
inline bool subspace_contained(const RatMat& sub, const RatMat& space) {
    if (sub.cols() == 0) return true;
    return space.rank() == space.hcat(sub).rank();
}

inline bool subspace_equal(const RatMat& a, const RatMat& b) {
    return subspace_contained(a, b) && subspace_contained(b, a);
}

} // namespace skfib
