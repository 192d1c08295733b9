#pragma once

#include "g2lab/scalar.hpp"

#include <Eigen/Dense>

#include <initializer_list>
#include <stdexcept>
#include <utility>
#include <vector>

namespace g2lab {

/// Dense row-major matrix over an exact or floating scalar. Sizes here never
/// exceed 35x35, so the algorithms are the textbook ones.
template <class S> class Matrix {
public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(size_t(rows) * cols, S(0)) {}
  Matrix(std::initializer_list<std::initializer_list<S>> rows) {
    rows_ = int(rows.size());
    cols_ = rows_ ? int(rows.begin()->size()) : 0;
    for (auto &r : rows) {
      if (int(r.size()) != cols_) throw std::invalid_argument("ragged matrix literal");
      for (auto &x : r) data_.push_back(x);
    }
  }

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = S(1);
    return m;
  }
  static Matrix diagonal(const std::vector<S> &d) {
    Matrix m(int(d.size()), int(d.size()));
    for (size_t i = 0; i < d.size(); ++i) m(int(i), int(i)) = d[i];
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  S &operator()(int i, int j) { return data_[size_t(i) * cols_ + j]; }
  const S &operator()(int i, int j) const { return data_[size_t(i) * cols_ + j]; }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Matrix operator*(const Matrix &o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("matrix shape mismatch in product");
    Matrix r(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
      for (int k = 0; k < cols_; ++k) {
        const S &a = (*this)(i, k);
        if (a == 0) continue;
        for (int j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
      }
    return r;
  }
  Matrix operator+(const Matrix &o) const { return combine(o, [](const S &a, const S &b) { return S(a + b); }); }
  Matrix operator-(const Matrix &o) const { return combine(o, [](const S &a, const S &b) { return S(a - b); }); }
  Matrix operator*(const S &s) const {
    Matrix r = *this;
    for (auto &x : r.data_) x *= s;
    return r;
  }
  bool operator==(const Matrix &o) const = default;

  /// Rows/cols selected by index lists (minor extraction).
  Matrix submatrix(const std::vector<int> &ri, const std::vector<int> &ci) const {
    Matrix r(int(ri.size()), int(ci.size()));
    for (size_t i = 0; i < ri.size(); ++i)
      for (size_t j = 0; j < ci.size(); ++j) r(int(i), int(j)) = (*this)(ri[i], ci[j]);
    return r;
  }

  S determinant() const {
    if (rows_ != cols_) throw std::invalid_argument("determinant of non-square matrix");
    const int n = rows_;
    if (n == 0) return S(1);
    if (n == 1) return data_[0];
    if (n == 2) return (*this)(0, 0) * (*this)(1, 1) - (*this)(0, 1) * (*this)(1, 0);
    Matrix a = *this;
    S det(1);
    for (int c = 0; c < n; ++c) {
      int piv = pivot_row(a, c, c);
      if (piv < 0) return S(0);
      if (piv != c) {
        a.swap_rows(piv, c);
        det = -det;
      }
      det *= a(c, c);
      for (int r = c + 1; r < n; ++r) {
        if (a(r, c) == 0) continue;
        S f = a(r, c) / a(c, c);
        for (int k = c; k < n; ++k) a(r, k) -= f * a(c, k);
      }
    }
    return det;
  }

  Matrix inverse() const {
    if (rows_ != cols_) throw std::invalid_argument("inverse of non-square matrix");
    const int n = rows_;
    Matrix a = *this, inv = identity(n);
    for (int c = 0; c < n; ++c) {
      int piv = pivot_row(a, c, c);
      if (piv < 0) throw std::domain_error("singular matrix");
      a.swap_rows(piv, c);
      inv.swap_rows(piv, c);
      S d = a(c, c);
      for (int k = 0; k < n; ++k) {
        a(c, k) /= d;
        inv(c, k) /= d;
      }
      for (int r = 0; r < n; ++r) {
        if (r == c || a(r, c) == 0) continue;
        S f = a(r, c);
        for (int k = 0; k < n; ++k) {
          a(r, k) -= f * a(c, k);
          inv(r, k) -= f * inv(c, k);
        }
      }
    }
    return inv;
  }

  /// Rank by elimination; `tol` is ignored for exact scalars.
  int rank(double tol = 1e-10) const {
    Matrix a = *this;
    int rank = 0;
    for (int c = 0; c < cols_ && rank < rows_; ++c) {
      int piv = -1;
      double best = 0;
      for (int r = rank; r < rows_; ++r) {
        double v = std::fabs(to_double(a(r, c)));
        if constexpr (ScalarTraits<S>::exact) {
          if (a(r, c) != 0) {
            piv = r;
            break;
          }
        } else if (v > tol && v > best) {
          best = v;
          piv = r;
        }
      }
      if (piv < 0) continue;
      a.swap_rows(piv, rank);
      for (int r = rank + 1; r < rows_; ++r) {
        if (a(r, c) == 0) continue;
        S f = a(r, c) / a(rank, c);
        for (int k = c; k < cols_; ++k) a(r, k) -= f * a(rank, k);
      }
      ++rank;
    }
    return rank;
  }

  S trace() const {
    S t(0);
    for (int i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  double max_abs() const {
    double m = 0;
    for (auto &x : data_) m = std::max(m, std::fabs(to_double(x)));
    return m;
  }

  Eigen::MatrixXd to_eigen() const {
    Eigen::MatrixXd m(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) m(i, j) = to_double((*this)(i, j));
    return m;
  }
  template <class T> Matrix<T> cast() const {
    Matrix<T> m(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) m(i, j) = T((*this)(i, j));
    return m;
  }

  const std::vector<S> &data() const { return data_; }

private:
  template <class F> Matrix combine(const Matrix &o, F f) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("matrix shape mismatch");
    Matrix r(rows_, cols_);
    for (size_t i = 0; i < data_.size(); ++i) r.data_[i] = f(data_[i], o.data_[i]);
    return r;
  }
  void swap_rows(int a, int b) {
    if (a == b) return;
    for (int k = 0; k < cols_; ++k) std::swap((*this)(a, k), (*this)(b, k));
  }
  static int pivot_row(const Matrix &a, int c, int from) {
    int piv = -1;
    double best = -1;
    for (int r = from; r < a.rows_; ++r) {
      if (a(r, c) == 0) continue;
      if constexpr (ScalarTraits<S>::exact) return r;
      double v = std::fabs(to_double(a(r, c)));
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    return piv;
  }

  int rows_ = 0, cols_ = 0;
  std::vector<S> data_;
};

template <class S> Matrix<double> to_double_matrix(const Matrix<S> &m) {
  Matrix<double> r(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r(i, j) = to_double(m(i, j));
  return r;
}

inline Matrix<double> from_eigen(const Eigen::MatrixXd &e) {
  Matrix<double> m(int(e.rows()), int(e.cols()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m(i, j) = e(i, j);
  return m;
}

} // namespace g2lab
