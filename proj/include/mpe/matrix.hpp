#pragma once

// =============================================================================
// Small dense matrices and the matrix exponential.
//
// Dimensions stay tiny (at most 8) -- the matrix type exists to express
// frozen-time exponential flows of small linear systems exactly, not to be a
// linear-algebra library.
// =============================================================================

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "mpe/errors.hpp"
#include "mpe/real.hpp"

namespace mpe {

inline constexpr std::size_t kMaxMatrixDim = 8;

/// Dense row-major matrix over the working scalar.
template <typename T>
class Matrix {
public:
    Matrix() : rows_(0), cols_(0) {}

    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}

    Matrix(std::initializer_list<std::initializer_list<T>> rows) {
        rows_ = rows.size();
        cols_ = rows_ == 0 ? 0 : rows.begin()->size();
        data_.reserve(rows_ * cols_);
        for (const auto& row : rows) {
            if (row.size() != cols_) {
                throw DimensionError("ragged matrix initializer");
            }
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    [[nodiscard]] static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = T(1);
        }
        return m;
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

    [[nodiscard]] T& operator()(std::size_t i, std::size_t j) {
        return data_[i * cols_ + j];
    }
    [[nodiscard]] const T& operator()(std::size_t i, std::size_t j) const {
        return data_[i * cols_ + j];
    }

    friend Matrix operator+(const Matrix& a, const Matrix& b) {
        a.require_same_shape(b);
        Matrix r(a.rows_, a.cols_);
        for (std::size_t i = 0; i < a.data_.size(); ++i) {
            r.data_[i] = a.data_[i] + b.data_[i];
        }
        return r;
    }

    friend Matrix operator-(const Matrix& a, const Matrix& b) {
        a.require_same_shape(b);
        Matrix r(a.rows_, a.cols_);
        for (std::size_t i = 0; i < a.data_.size(); ++i) {
            r.data_[i] = a.data_[i] - b.data_[i];
        }
        return r;
    }

    friend Matrix operator*(const Matrix& a, const T& s) {
        Matrix r(a.rows_, a.cols_);
        for (std::size_t i = 0; i < a.data_.size(); ++i) {
            r.data_[i] = a.data_[i] * s;
        }
        return r;
    }

    friend Matrix operator*(const T& s, const Matrix& a) { return a * s; }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) {
            throw DimensionError("matrix product shape mismatch");
        }
        Matrix r(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const T aik = a(i, k);
                for (std::size_t j = 0; j < b.cols_; ++j) {
                    r(i, j) += aik * b(k, j);
                }
            }
        }
        return r;
    }

    /// Matrix-vector product.
    [[nodiscard]] std::vector<T> apply(const std::vector<T>& x) const {
        if (x.size() != cols_) {
            throw DimensionError("matrix-vector shape mismatch");
        }
        std::vector<T> y(rows_, T(0));
        for (std::size_t i = 0; i < rows_; ++i) {
            CompensatedSum<T> acc;
            for (std::size_t j = 0; j < cols_; ++j) {
                acc.add((*this)(i, j) * x[j]);
            }
            y[i] = acc.value();
        }
        return y;
    }

    /// Largest absolute entry.
    [[nodiscard]] T max_abs() const {
        using std::abs;
        T m(0);
        for (const T& v : data_) {
            if (abs(v) > m) {
                m = abs(v);
            }
        }
        return m;
    }

    /// Infinity norm (max absolute row sum).
    [[nodiscard]] T inf_norm() const {
        using std::abs;
        T m(0);
        for (std::size_t i = 0; i < rows_; ++i) {
            T row(0);
            for (std::size_t j = 0; j < cols_; ++j) {
                row += abs((*this)(i, j));
            }
            if (row > m) {
                m = row;
            }
        }
        return m;
    }

    [[nodiscard]] bool all_finite() const {
        using std::isfinite;
        for (const T& v : data_) {
            if (!isfinite(v)) {
                return false;
            }
        }
        return true;
    }

private:
    void require_same_shape(const Matrix& other) const {
        if (rows_ != other.rows_ || cols_ != other.cols_) {
            throw DimensionError("matrix shape mismatch");
        }
    }

    std::size_t rows_;
    std::size_t cols_;
    std::vector<T> data_;
};

/// exp(scale * M) by scaling-and-squaring over a truncated Taylor series.
/// The series is summed until terms fall below the working epsilon of the
/// partial sum, so accuracy follows the instantiated scalar type.
template <typename T>
[[nodiscard]] Matrix<T> expm(const Matrix<T>& m, const T& scale = T(1)) {
    using std::abs;
    if (m.rows() != m.cols()) {
        throw DimensionError("matrix exponential requires a square matrix");
    }
    if (m.rows() == 0 || m.rows() > kMaxMatrixDim) {
        throw ArgumentError("matrix exponential supports dimensions 1 through 8");
    }

    Matrix<T> x = m * scale;
    if (!x.all_finite()) {
        throw OverflowError("matrix exponential argument is not finite");
    }

    // Halve until the norm is at most 1/2, then undo by repeated squaring.
    int squarings = 0;
    T norm = x.inf_norm();
    while (norm > T(0.5)) {
        x = x * T(0.5);
        norm *= T(0.5);
        ++squarings;
        if (squarings > 64) {
            throw OverflowError("matrix exponential argument norm too large");
        }
    }

    const std::size_t n = m.rows();
    Matrix<T> sum = Matrix<T>::identity(n);
    Matrix<T> term = Matrix<T>::identity(n);
    const T eps = real_epsilon<T>();
    bool converged = false;
    for (int k = 1; k <= 256; ++k) {
        term = term * x;
        term = term * (T(1) / T(k));
        sum = sum + term;
        if (term.max_abs() <= eps * sum.max_abs()) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw OverflowError("matrix exponential series failed to converge");
    }

    for (int i = 0; i < squarings; ++i) {
        sum = sum * sum;
    }
    if (!sum.all_finite()) {
        throw OverflowError("matrix exponential overflowed");
    }
    return sum;
}

} // namespace mpe
