#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace linfty {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec operator+(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("vec+: size mismatch");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vec operator-(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("vec-: size mismatch");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vec operator*(double c, const Vec& a) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
  return r;
}

/// Dense real matrix, row-major, semantic indexing (alpha, i).
/// Dimensions are fixed at construction; entries are expected finite.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, 0.0) {
    if (rows <= 0 || cols <= 0) throw std::invalid_argument("Matrix: dimensions must be positive");
  }
  Matrix(int rows, int cols, std::vector<double> entries) : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (rows <= 0 || cols <= 0) throw std::invalid_argument("Matrix: dimensions must be positive");
    if (data_.size() != static_cast<std::size_t>(rows) * cols)
      throw std::invalid_argument("Matrix: entry count does not match dimensions");
    for (double v : data_)
      if (!std::isfinite(v)) throw std::invalid_argument("Matrix: non-finite entry");
  }

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  /// a (x) b, an |a| x |b| rank-one matrix.
  static Matrix outer(const Vec& a, const Vec& b) {
    Matrix m(static_cast<int>(a.size()), static_cast<int>(b.size()));
    for (std::size_t r = 0; r < a.size(); ++r)
      for (std::size_t c = 0; c < b.size(); ++c) m(static_cast<int>(r), static_cast<int>(c)) = a[r] * b[c];
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

  const std::vector<double>& data() const { return data_; }

  bool all_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  double trace() const {
    if (rows_ != cols_) throw std::domain_error("trace: matrix not square");
    double s = 0.0;
    for (int i = 0; i < rows_; ++i) s += (*this)(i, i);
    return s;
  }

  double frobenius_norm() const { return std::sqrt(frobenius_inner(*this, *this)); }

  static double frobenius_inner(const Matrix& a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw std::invalid_argument("frobenius_inner: shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.data_.size(); ++i) s += a.data_[i] * b.data_[i];
    return s;
  }

  Vec apply(const Vec& x) const {
    if (static_cast<int>(x.size()) != cols_) throw std::invalid_argument("apply: size mismatch");
    Vec y(rows_, 0.0);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) y[r] += (*this)(r, c) * x[c];
    return y;
  }

  Matrix operator+(const Matrix& o) const {
    check_same_shape(o, "+");
    Matrix r = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] += o.data_[i];
    return r;
  }

  Matrix operator-(const Matrix& o) const {
    check_same_shape(o, "-");
    Matrix r = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] -= o.data_[i];
    return r;
  }

  Matrix operator*(const Matrix& o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("matmul: inner dimension mismatch");
    Matrix r(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
      for (int k = 0; k < cols_; ++k) {
        const double v = (*this)(i, k);
        if (v == 0.0) continue;
        for (int j = 0; j < o.cols_; ++j) r(i, j) += v * o(k, j);
      }
    return r;
  }

  friend Matrix operator*(double c, const Matrix& m) {
    Matrix r = m;
    for (double& v : r.data_) v *= c;
    return r;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  void check_same_shape(const Matrix& o, const char* op) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw std::invalid_argument(std::string("Matrix") + op + ": shape mismatch");
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

/// Dense 4-tensor indexed (alpha, i, beta, j) with dims (N, n, N, n).
/// Houses Hamiltonian Hessians, the dilation Hessian and linear-system coefficients.
class FourTensor {
 public:
  FourTensor() = default;
  FourTensor(int N, int n) : N_(N), n_(n), data_(static_cast<std::size_t>(N) * n * N * n, 0.0) {
    if (N <= 0 || n <= 0) throw std::invalid_argument("FourTensor: dimensions must be positive");
  }

  int N() const { return N_; }
  int n() const { return n_; }

  double& operator()(int a, int i, int b, int j) { return data_[idx(a, i, b, j)]; }
  double operator()(int a, int i, int b, int j) const { return data_[idx(a, i, b, j)]; }

  bool all_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  /// Largest deviation from the pair symmetry T[a,i,b,j] = T[b,j,a,i].
  double pair_asymmetry() const {
    double m = 0.0;
    for (int a = 0; a < N_; ++a)
      for (int i = 0; i < n_; ++i)
        for (int b = 0; b < N_; ++b)
          for (int j = 0; j < n_; ++j) m = std::max(m, std::abs((*this)(a, i, b, j) - (*this)(b, j, a, i)));
    return m;
  }

  /// Quadratic form T : P (x) P.
  double quadratic_form(const Matrix& P) const {
    double s = 0.0;
    for (int a = 0; a < N_; ++a)
      for (int i = 0; i < n_; ++i)
        for (int b = 0; b < N_; ++b)
          for (int j = 0; j < n_; ++j) s += (*this)(a, i, b, j) * P(a, i) * P(b, j);
    return s;
  }

 private:
  std::size_t idx(int a, int i, int b, int j) const {
    return ((static_cast<std::size_t>(a) * n_ + i) * N_ + b) * n_ + j;
  }

  int N_ = 0;
  int n_ = 0;
  std::vector<double> data_;
};

/// Second-derivative slice D^2u: entries (alpha, i, j) with alpha < N and i, j < n,
/// symmetric in (i, j) for twice-differentiable maps.
class Hessian {
 public:
  Hessian() = default;
  Hessian(int N, int n) : N_(N), n_(n), data_(static_cast<std::size_t>(N) * n * n, 0.0) {
    if (N <= 0 || n <= 0) throw std::invalid_argument("Hessian: dimensions must be positive");
  }

  int N() const { return N_; }
  int n() const { return n_; }

  double& operator()(int a, int i, int j) { return data_[(static_cast<std::size_t>(a) * n_ + i) * n_ + j]; }
  double operator()(int a, int i, int j) const { return data_[(static_cast<std::size_t>(a) * n_ + i) * n_ + j]; }

  /// Componentwise Laplacian: (sum_i D^2_{ii} u_alpha)_alpha.
  Vec laplacian() const {
    Vec l(N_, 0.0);
    for (int a = 0; a < N_; ++a)
      for (int i = 0; i < n_; ++i) l[a] += (*this)(a, i, i);
    return l;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
  }

  double spatial_asymmetry() const {
    double m = 0.0;
    for (int a = 0; a < N_; ++a)
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) m = std::max(m, std::abs((*this)(a, i, j) - (*this)(a, j, i)));
    return m;
  }

  bool all_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

 private:
  int N_ = 0;
  int n_ = 0;
  std::vector<double> data_;
};

}  // namespace linfty
