#pragma once

// Test-side utilities and independent oracles. The oracles here deliberately
// avoid the library's decomposition backend so that cross-checks pair two
// genuinely different computation routes.

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include "linfty/maps.hpp"
#include "linfty/matrix.hpp"

namespace testutil {

using linfty::Hessian;
using linfty::MapModel;
using linfty::Matrix;
using linfty::Vec;

inline double uniform(std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53);
}

inline Vec random_vec(int n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  Vec v(n);
  for (double& x : v) x = uniform(rng, lo, hi);
  return v;
}

inline Vec random_unit(int n, std::mt19937_64& rng) {
  Vec v;
  double r = 0.0;
  do {
    v = random_vec(n, rng);
    r = linfty::norm(v);
  } while (r < 1e-3);
  for (double& x : v) x /= r;
  return v;
}

inline Matrix random_matrix(int rows, int cols, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = uniform(rng, lo, hi);
  return m;
}

/// Random orthogonal matrix by Gram-Schmidt on a random square matrix.
inline Matrix random_orthogonal(int n, std::mt19937_64& rng) {
  while (true) {
    Matrix a = random_matrix(n, n, rng);
    std::vector<Vec> cols(n, Vec(n));
    bool ok = true;
    for (int c = 0; c < n && ok; ++c) {
      Vec v(n);
      for (int r = 0; r < n; ++r) v[r] = a(r, c);
      for (int p = 0; p < c; ++p) {
        const double proj = linfty::dot(v, cols[p]);
        for (int r = 0; r < n; ++r) v[r] -= proj * cols[p][r];
      }
      const double nv = linfty::norm(v);
      if (nv < 1e-6) {
        ok = false;
        break;
      }
      for (int r = 0; r < n; ++r) cols[c][r] = v[r] / nv;
    }
    if (!ok) continue;
    Matrix q(n, n);
    for (int c = 0; c < n; ++c)
      for (int r = 0; r < n; ++r) q(r, c) = cols[c][r];
    return q;
  }
}

/// Gauss-Jordan inverse with partial pivoting (oracle for closed-form inverses).
inline Matrix gauss_jordan_inverse(Matrix a) {
  const int n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("gauss_jordan_inverse: not square");
  Matrix inv = Matrix::identity(n);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    if (std::abs(a(piv, col)) < 1e-14) throw std::runtime_error("gauss_jordan_inverse: singular");
    if (piv != col)
      for (int c = 0; c < n; ++c) {
        std::swap(a(piv, c), a(col, c));
        std::swap(inv(piv, c), inv(col, c));
      }
    const double d = a(col, col);
    for (int c = 0; c < n; ++c) {
      a(col, c) /= d;
      inv(col, c) /= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a(r, col);
      if (f == 0.0) continue;
      for (int c = 0; c < n; ++c) {
        a(r, c) -= f * a(col, c);
        inv(r, c) -= f * inv(col, c);
      }
    }
  }
  return inv;
}

/// Brute-force orthonormal basis of null(P^T) by Gaussian elimination on P^T,
/// then Gram-Schmidt; returns the projection sum q q^T. Independent of any
/// SVD machinery.
inline Matrix bruteforce_nullspace_projection(const Matrix& P, double tol = 1e-10) {
  const int N = P.rows(), n = P.cols();
  // row-reduce P^T (n x N); free variables of P^T y = 0 span the nullspace
  std::vector<std::vector<double>> a(n, std::vector<double>(N));
  double amax = 0.0;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < N; ++c) {
      a[r][c] = P(c, r);
      amax = std::max(amax, std::abs(a[r][c]));
    }
  const double cut = tol * std::max(amax, 1e-300);

  std::vector<int> pivot_cols;
  int row = 0;
  for (int col = 0; col < N && row < n; ++col) {
    int piv = row;
    for (int r = row + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) <= cut) continue;
    std::swap(a[piv], a[row]);
    const double d = a[row][col];
    for (int c = 0; c < N; ++c) a[row][c] /= d;
    for (int r = 0; r < n; ++r) {
      if (r == row) continue;
      const double f = a[r][col];
      for (int c = 0; c < N; ++c) a[r][c] -= f * a[row][c];
    }
    pivot_cols.push_back(col);
    ++row;
  }

  std::vector<Vec> basis;
  for (int col = 0; col < N; ++col) {
    bool is_pivot = false;
    for (int pc : pivot_cols) is_pivot |= (pc == col);
    if (is_pivot) continue;
    Vec y(N, 0.0);
    y[col] = 1.0;
    for (std::size_t r = 0; r < pivot_cols.size(); ++r) y[pivot_cols[r]] = -a[r][col];
    basis.push_back(y);
  }

  // Gram-Schmidt
  std::vector<Vec> ortho;
  for (Vec v : basis) {
    for (const Vec& q : ortho) {
      const double proj = linfty::dot(v, q);
      for (int i = 0; i < N; ++i) v[i] -= proj * q[i];
    }
    const double nv = linfty::norm(v);
    if (nv > 1e-12) {
      for (double& x : v) x /= nv;
      ortho.push_back(v);
    }
  }

  Matrix proj(N, N);
  for (const Vec& q : ortho)
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) proj(i, j) += q[i] * q[j];
  return proj;
}

/// Central FD gradient of a matrix -> scalar function.
inline Matrix fd_matrix_gradient(const std::function<double(const Matrix&)>& f, const Matrix& P, double h = 1e-5) {
  Matrix g(P.rows(), P.cols());
  for (int a = 0; a < P.rows(); ++a)
    for (int i = 0; i < P.cols(); ++i) {
      Matrix pp = P, pm = P;
      pp(a, i) += h;
      pm(a, i) -= h;
      g(a, i) = (f(pp) - f(pm)) / (2.0 * h);
    }
  return g;
}

/// Random polynomial map of degree <= 3 with analytic derivatives, the
/// generic smooth test subject. Coefficients are O(1) linear, smaller for
/// higher order, so gradients stay O(1) on the unit ball.
inline MapModel polynomial_map(int n, int N, std::mt19937_64& rng, bool full_rank_bias = false) {
  const auto L = random_matrix(N, n, rng, -1.0, 1.0);
  Matrix lin = L;
  if (full_rank_bias) {
    // dominate with a well-conditioned linear part
    lin = random_matrix(N, n, rng, -0.25, 0.25);
    for (int i = 0; i < std::min(N, n); ++i) lin(i, i) += 1.0;
  }
  std::vector<Matrix> quad;  // Q[a](i,j), symmetric
  for (int a = 0; a < N; ++a) {
    Matrix q = random_matrix(n, n, rng, -0.3, 0.3);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j) q(j, i) = q(i, j);
    if (full_rank_bias)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) q(i, j) *= 0.3;
    quad.push_back(q);
  }
  std::vector<std::vector<double>> cubic(N);  // C[a][i*n*n + j*n + k], fully symmetric
  for (int a = 0; a < N; ++a) {
    cubic[a].assign(static_cast<std::size_t>(n) * n * n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        for (int k = j; k < n; ++k) {
          const double c = full_rank_bias ? 0.0 : uniform(rng, -0.15, 0.15);
          int idx[3] = {i, j, k};
          std::sort(idx, idx + 3);
          do {
            cubic[a][(static_cast<std::size_t>(idx[0]) * n + idx[1]) * n + idx[2]] = c;
          } while (std::next_permutation(idx, idx + 3));
        }
  }
  auto C = [n, cubic](int a, int i, int j, int k) {
    return cubic[a][(static_cast<std::size_t>(i) * n + j) * n + k];
  };

  MapModel m;
  m.id = "polynomial";
  m.n = n;
  m.N = N;
  m.value = [=](const Vec& x) {
    Vec u(N, 0.0);
    for (int a = 0; a < N; ++a) {
      for (int i = 0; i < n; ++i) u[a] += lin(a, i) * x[i];
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) u[a] += 0.5 * quad[a](i, j) * x[i] * x[j];
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) u[a] += C(a, i, j, k) * x[i] * x[j] * x[k] / 6.0;
    }
    return u;
  };
  m.gradient = [=](const Vec& x) {
    Matrix g(N, n);
    for (int a = 0; a < N; ++a)
      for (int i = 0; i < n; ++i) {
        double v = lin(a, i);
        for (int j = 0; j < n; ++j) v += quad[a](i, j) * x[j];
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) v += 0.5 * C(a, i, j, k) * x[j] * x[k];
        g(a, i) = v;
      }
    return g;
  };
  m.hessian = [=](const Vec& x) {
    Hessian h(N, n);
    for (int a = 0; a < N; ++a)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double v = quad[a](i, j);
          for (int k = 0; k < n; ++k) v += C(a, i, j, k) * x[k];
          h(a, i, j) = v;
        }
    return h;
  };
  return m;
}

/// Adaptive Simpson quadrature.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-12,
                               int depth = 30) {
  std::function<double(double, double, double, double, double, double, double, int)> rec =
      [&](double lo, double hi, double flo, double fmid, double fhi, double whole, double eps,
          int d) -> double {
    const double m = 0.5 * (lo + hi);
    const double lm = 0.5 * (lo + m), rm = 0.5 * (m + hi);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - lo) / 6.0 * (flo + 4.0 * flm + fmid);
    const double right = (hi - m) / 6.0 * (fmid + 4.0 * frm + fhi);
    if (d <= 0 || std::abs(left + right - whole) < 15.0 * eps)
      return left + right + (left + right - whole) / 15.0;
    return rec(lo, m, flo, flm, fmid, left, eps * 0.5, d - 1) +
           rec(m, hi, fmid, frm, fhi, right, eps * 0.5, d - 1);
  };
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return rec(a, b, fa, fm, fb, whole, tol, depth);
}

/// Separable-quadrature oracle for the profile equation: with w = e^g the
/// equation in s = ln t reads dw/ds = (sqrt(a - (n-1) w^2) - w)/2, so
/// s(w) = -int_w^1 2 dsigma / (sqrt(a - (n-1) sigma^2) - sigma).
struct ProfileOracle {
  double a;
  int n;

  double s_of_w(double w) const {
    const double aa = a;
    const int nn = n;
    if (w >= 1.0) return 0.0;
    return -adaptive_simpson(
        [aa, nn](double sig) { return 2.0 / (std::sqrt(aa - (nn - 1) * sig * sig) - sig); }, w, 1.0, 1e-13);
  }

  /// ln of the singular radius t* where g -> -infinity.
  double s_blowup() const { return s_of_w(0.0); }

  /// g(t) by bisection on the strictly increasing s(w).
  double g_of_t(double t) const {
    const double s = std::log(t);
    if (s < s_blowup()) throw std::domain_error("ProfileOracle: t below the singular radius");
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (s_of_w(mid) < s)
        lo = mid;
      else
        hi = mid;
      if (hi - lo < 1e-15) break;
    }
    return std::log(0.5 * (lo + hi));
  }
};

}  // namespace testutil
