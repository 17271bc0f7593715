#pragma once

#include "mahlerlog/core/error.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace mahlerlog {

/// Dense row-major matrix over a ring T (FieldElem, RatFunc, series, ...).
/// Elimination routines additionally need T to be a field with `inverse()`.
template <class T>
class Matrix {
 public:
  Matrix(std::size_t rows, std::size_t cols, const T& fill) : r_(rows), c_(cols), a_(rows * cols, fill) {}

  static Matrix identity(std::size_t n, const T& zero, const T& one) {
    Matrix m(n, n, zero);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = one;
    return m;
  }

  std::size_t rows() const { return r_; }
  std::size_t cols() const { return c_; }
  T& operator()(std::size_t i, std::size_t j) { return a_[i * c_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return a_[i * c_ + j]; }

  Matrix operator*(const Matrix& o) const {
    require(c_ == o.r_, ErrorKind::InvalidArgument, "matrix shapes do not match");
    Matrix out(r_, o.c_, a_.empty() ? o.a_.front() : a_.front());
    for (std::size_t i = 0; i < r_; ++i)
      for (std::size_t j = 0; j < o.c_; ++j) {
        T acc = (*this)(i, 0) * o(0, j);
        for (std::size_t k = 1; k < c_; ++k) acc = acc + (*this)(i, k) * o(k, j);
        out(i, j) = acc;
      }
    return out;
  }

  std::vector<T> apply(const std::vector<T>& v) const {
    require(v.size() == c_, ErrorKind::InvalidArgument, "vector length does not match");
    std::vector<T> out;
    for (std::size_t i = 0; i < r_; ++i) {
      T acc = (*this)(i, 0) * v[0];
      for (std::size_t k = 1; k < c_; ++k) acc = acc + (*this)(i, k) * v[k];
      out.push_back(acc);
    }
    return out;
  }

  template <class F>
  auto map(F f) const -> Matrix<decltype(f(std::declval<const T&>()))> {
    Matrix<decltype(f(std::declval<const T&>()))> out(r_, c_, f(a_.front()));
    for (std::size_t i = 0; i < r_; ++i)
      for (std::size_t j = 0; j < c_; ++j) out(i, j) = f((*this)(i, j));
    return out;
  }

  /// In-place reduced row echelon form; returns the pivot columns.
  std::vector<std::size_t> rref() {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < c_ && row < r_; ++col) {
      std::size_t p = row;
      while (p < r_ && (*this)(p, col).is_zero()) ++p;
      if (p == r_) continue;
      if (p != row)
        for (std::size_t j = 0; j < c_; ++j) std::swap((*this)(p, j), (*this)(row, j));
      const T inv = (*this)(row, col).inverse();
      for (std::size_t j = col; j < c_; ++j) (*this)(row, j) = (*this)(row, j) * inv;
      for (std::size_t i = 0; i < r_; ++i) {
        if (i == row || (*this)(i, col).is_zero()) continue;
        const T f = (*this)(i, col);
        for (std::size_t j = col; j < c_; ++j) (*this)(i, j) = (*this)(i, j) - f * (*this)(row, j);
      }
      pivots.push_back(col);
      ++row;
    }
    return pivots;
  }

  /// Basis of {x : M x = 0}, one vector per free column (free entry 1).
  std::vector<std::vector<T>> nullspace(const T& zero, const T& one) const {
    Matrix m = *this;
    const auto pivots = m.rref();
    std::vector<bool> is_pivot(c_, false);
    for (auto p : pivots) is_pivot[p] = true;
    std::vector<std::vector<T>> basis;
    for (std::size_t f = 0; f < c_; ++f) {
      if (is_pivot[f]) continue;
      std::vector<T> v(c_, zero);
      v[f] = one;
      for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m(r, f);
      basis.push_back(std::move(v));
    }
    return basis;
  }

  std::size_t rank() const {
    Matrix m = *this;
    return m.rref().size();
  }

  T det(const T& zero, const T& one) const {
    require(r_ == c_, ErrorKind::InvalidArgument, "determinant of a non-square matrix");
    Matrix m = *this;
    T acc = one;
    for (std::size_t col = 0; col < c_; ++col) {
      std::size_t p = col;
      while (p < r_ && m(p, col).is_zero()) ++p;
      if (p == r_) return zero;
      if (p != col) {
        for (std::size_t j = 0; j < c_; ++j) std::swap(m(p, j), m(col, j));
        acc = -acc;
      }
      acc = acc * m(col, col);
      const T inv = m(col, col).inverse();
      for (std::size_t i = col + 1; i < r_; ++i) {
        if (m(i, col).is_zero()) continue;
        const T f = m(i, col) * inv;
        for (std::size_t j = col; j < c_; ++j) m(i, j) = m(i, j) - f * m(col, j);
      }
    }
    return acc;
  }

 private:
  std::size_t r_, c_;
  std::vector<T> a_;
};

}  // namespace mahlerlog
