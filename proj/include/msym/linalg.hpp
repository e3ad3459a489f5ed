#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "msym/algebra.hpp"

namespace msym {

// Dense exact matrix, row major.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Rational& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  void append_row(const std::vector<Rational>& row) {
    if (rows_ == 0 && cols_ == 0) cols_ = row.size();
    if (row.size() != cols_) throw DomainError("row length mismatch");
    a_.insert(a_.end(), row.begin(), row.end());
    ++rows_;
  }

  std::vector<Rational> row(std::size_t i) const {
    return std::vector<Rational>(a_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                                 a_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
  }

  std::vector<Rational> apply(const std::vector<Rational>& x) const {
    std::vector<Rational> y(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        if ((*this)(i, j) != 0) y[i] += (*this)(i, j) * x[j];
    return y;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Rational> a_;
};

namespace detail {
inline void axpy(Rational& y, const Rational& x, const Rational& f) { y += f * x; }
inline void axpy(Polynomial& y, const Polynomial& x, const Rational& f) { y.add_scaled(x, f); }
inline void scale(Rational& y, const Rational& f) { y *= f; }
inline void scale(Polynomial& y, const Rational& f) { y *= f; }
inline bool is_zero(const Rational& y) { return y == 0; }
inline bool is_zero(const Polynomial& y) { return y.is_zero(); }
}  // namespace detail

// Reduced row echelon form with the right-hand sides carried along.
template <class T>
struct Elimination {
  Matrix m;
  std::vector<T> rhs;
  std::vector<std::size_t> pivot_cols;  // pivot column of row r, r < rank
};

template <class T>
Elimination<T> eliminate(Matrix m, std::vector<T> rhs) {
  if (rhs.size() != m.rows()) throw DomainError("right-hand side length mismatch");
  Elimination<T> e;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && m(p, c) == 0) ++p;
    if (p == m.rows()) continue;
    if (p != r) {
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
      std::swap(rhs[p], rhs[r]);
    }
    Rational inv = 1 / m(r, c);
    for (std::size_t j = c; j < m.cols(); ++j) m(r, j) *= inv;
    detail::scale(rhs[r], inv);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || m(i, c) == 0) continue;
      Rational f = -m(i, c);
      for (std::size_t j = c; j < m.cols(); ++j)
        if (m(r, j) != 0) m(i, j) += f * m(r, j);
      detail::axpy(rhs[i], rhs[r], f);
    }
    e.pivot_cols.push_back(c);
    ++r;
  }
  e.m = std::move(m);
  e.rhs = std::move(rhs);
  return e;
}

inline std::size_t rank(const Matrix& m) {
  return eliminate(m, std::vector<Rational>(m.rows())).pivot_cols.size();
}

// Basis of {x : m x = 0}, one vector per free column.
inline std::vector<std::vector<Rational>> kernel_basis(const Matrix& m) {
  auto e = eliminate(m, std::vector<Rational>(m.rows()));
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto c : e.pivot_cols) is_pivot[c] = true;
  std::vector<std::vector<Rational>> basis;
  for (std::size_t f = 0; f < m.cols(); ++f) {
    if (is_pivot[f]) continue;
    std::vector<Rational> v(m.cols());
    v[f] = 1;
    for (std::size_t r = 0; r < e.pivot_cols.size(); ++r) v[e.pivot_cols[r]] = -e.m(r, f);
    basis.push_back(std::move(v));
  }
  return basis;
}

template <class T>
struct LinearSolution {
  bool consistent = false;
  std::vector<T> x;  // particular solution, free unknowns set to zero
  std::vector<std::size_t> free_cols;
};

template <class T>
LinearSolution<T> solve_linear(const Matrix& a, std::vector<T> b) {
  auto e = eliminate(a, std::move(b));
  LinearSolution<T> s;
  s.consistent = true;
  for (std::size_t r = e.pivot_cols.size(); r < a.rows(); ++r)
    if (!detail::is_zero(e.rhs[r])) s.consistent = false;
  s.x.assign(a.cols(), T{});
  std::vector<bool> is_pivot(a.cols(), false);
  for (std::size_t r = 0; r < e.pivot_cols.size(); ++r) {
    s.x[e.pivot_cols[r]] = e.rhs[r];
    is_pivot[e.pivot_cols[r]] = true;
  }
  for (std::size_t c = 0; c < a.cols(); ++c)
    if (!is_pivot[c]) s.free_cols.push_back(c);
  return s;
}

// Row space in reduced form; two matrices span the same row space iff equal.
inline Matrix row_space(const Matrix& m) {
  auto e = eliminate(m, std::vector<Rational>(m.rows()));
  Matrix out(0, m.cols());
  for (std::size_t r = 0; r < e.pivot_cols.size(); ++r) out.append_row(e.m.row(r));
  return out;
}

inline bool same_row_space(const Matrix& a, const Matrix& b) {
  Matrix ra = row_space(a), rb = row_space(b);
  if (ra.rows() != rb.rows() || ra.cols() != rb.cols()) return false;
  for (std::size_t i = 0; i < ra.rows(); ++i)
    for (std::size_t j = 0; j < ra.cols(); ++j)
      if (ra(i, j) != rb(i, j)) return false;
  return true;
}

inline Rational determinant(Matrix m) {
  if (m.rows() != m.cols()) throw DomainError("determinant of a non-square matrix");
  Rational det = 1;
  std::size_t n = m.rows();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m(p, c) == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(p, j), m(c, j));
      det = -det;
    }
    det *= m(c, c);
    for (std::size_t i = c + 1; i < n; ++i) {
      if (m(i, c) == 0) continue;
      Rational f = m(i, c) / m(c, c);
      for (std::size_t j = c; j < n; ++j) m(i, j) -= f * m(c, j);
    }
  }
  return det;
}

}  // namespace msym
