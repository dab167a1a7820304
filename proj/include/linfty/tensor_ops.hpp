#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "linfty/detail/eigen_backend.hpp"
#include "linfty/matrix.hpp"

namespace linfty {

/// Relative singular-value cutoff used for numerical rank decisions.
inline constexpr double kRankTol = 1e-10;

/// Complementary radial projections ([x]^T, [x]^perp) = (x(x)x/|x|^2, I - x(x)x/|x|^2).
inline std::pair<Matrix, Matrix> radial_projections(const Vec& x) {
  const double r2 = dot(x, x);
  if (r2 <= 0.0) throw std::domain_error("radial_projections: zero vector");
  const int n = static_cast<int>(x.size());
  Matrix tang(n, n), perp(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      tang(i, j) = x[i] * x[j] / r2;
      perp(i, j) = (i == j ? 1.0 : 0.0) - tang(i, j);
    }
  return {tang, perp};
}

/// Count of singular values above tol * sigma_max.
inline int numerical_rank(const Matrix& P, double tol = kRankTol) {
  const auto dec = detail::svd(P);
  if (dec.sigma.empty()) return 0;
  const double cutoff = tol * dec.sigma.front();
  int r = 0;
  for (double s : dec.sigma)
    if (s > cutoff && s > 0.0) ++r;
  return r;
}

struct NullspaceInfo {
  Matrix projection;      // N x N orthogonal projection onto null(P^T)
  int rank = 0;           // numerical rank of P
  double gap_ratio = std::numeric_limits<double>::infinity();  // smallest retained / largest discarded sigma
};

/// Orthogonal projection in R^N onto the nullspace of P^T (P is N x n), with
/// singular values below tol * sigma_max treated as zero. The gap ratio
/// diagnoses proximity to a rank interface; when no singular value is
/// discarded it is measured against the cutoff itself.
inline NullspaceInfo nullspace_projection_info(const Matrix& P, double tol = kRankTol) {
  const int N = P.rows();
  const auto dec = detail::svd(P);
  const double smax = dec.sigma.empty() ? 0.0 : dec.sigma.front();
  const double cutoff = tol * smax;

  NullspaceInfo info;
  info.projection = Matrix::identity(N);
  if (smax == 0.0) return info;  // zero matrix: null(P^T) is all of R^N

  double smallest_retained = std::numeric_limits<double>::infinity();
  double largest_discarded = 0.0;
  for (double s : dec.sigma) {
    if (s > cutoff) {
      ++info.rank;
      smallest_retained = std::min(smallest_retained, s);
    } else {
      largest_discarded = std::max(largest_discarded, s);
    }
  }
  if (info.rank > 0) {
    const double denom = largest_discarded > 0.0 ? largest_discarded : cutoff;
    info.gap_ratio = smallest_retained / denom;
  }

  // projection = I - U_r U_r^T over the retained left singular vectors
  for (int k = 0; k < info.rank; ++k)
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b) info.projection(a, b) -= dec.u(a, k) * dec.u(b, k);
  return info;
}

inline Matrix nullspace_projection(const Matrix& P, double tol = kRankTol) {
  return nullspace_projection_info(P, tol).projection;
}

/// Ahlfors operator S(A) = (A + A^T)/2 - (tr A / n) I; symmetric and traceless.
inline Matrix ahlfors(const Matrix& A) {
  if (A.rows() != A.cols()) throw std::domain_error("ahlfors: matrix not square");
  const int n = A.rows();
  const double t = A.trace() / n;
  Matrix s(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s(i, j) = 0.5 * (A(i, j) + A(j, i)) - (i == j ? t : 0.0);
  return s;
}

/// Dilation value; rank-deficient arguments carry an explicit infinite tag
/// (distinct from floating-point overflow).
struct Dilation {
  bool finite = false;
  double value = std::numeric_limits<double>::infinity();
};

/// K(P) = |P|^2 / det(P^T P)^{1/n} for rank(P) = n, +infinity otherwise.
/// Computed from singular values: K = (sum sigma_i^2) / (prod sigma_i)^{2/n}.
inline Dilation dilation(const Matrix& P, double tol = kRankTol) {
  const int n = P.cols();
  const auto dec = detail::svd(P);
  const double smax = dec.sigma.empty() ? 0.0 : dec.sigma.front();
  Dilation k;
  if (smax == 0.0) return k;
  const double cutoff = tol * smax;
  double sum2 = 0.0, logprod = 0.0;
  int rank = 0;
  for (double s : dec.sigma) {
    sum2 += s * s;
    if (s > cutoff) {
      ++rank;
      logprod += std::log(s);
    }
  }
  if (rank < n) return k;
  k.finite = true;
  k.value = sum2 / std::exp(2.0 * logprod / n);
  return k;
}

/// Gradient of the dilation, K_P(P) = 2 P [I - (1/n)|P|^2 (P^T P)^{-1}] / det(P^T P)^{1/n}.
inline Matrix dilation_gradient(const Matrix& P, double tol = kRankTol) {
  const int N = P.rows(), n = P.cols();
  if (numerical_rank(P, tol) < n) throw std::domain_error("dilation_gradient: rank-deficient argument");
  const Matrix gram = P.transpose() * P;
  const Matrix gram_inv = detail::inverse(gram);
  const double det_nth = std::pow(detail::determinant(gram), 1.0 / n);
  const double p2 = Matrix::frobenius_inner(P, P);

  Matrix bracket = Matrix::identity(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) bracket(i, j) -= (p2 / n) * gram_inv(i, j);
  Matrix g = P * bracket;
  Matrix out(N, n);
  for (int a = 0; a < N; ++a)
    for (int i = 0; i < n; ++i) out(a, i) = 2.0 * g(a, i) / det_nth;
  return out;
}

/// Constant 4-tensor E[k,j,l,m] = d_ml d_jk + d_mj d_kl - (2/n) d_mk d_jl
/// entering the second summand of the dilation Hessian.
inline double dilation_e_tensor(int k, int j, int l, int m, int n) {
  const auto d = [](int p, int q) { return p == q ? 1.0 : 0.0; };
  return d(m, l) * d(j, k) + d(m, j) * d(k, l) - (2.0 / n) * d(m, k) * d(j, l);
}

/// The two explicit summands of the dilation Hessian K_PP(P). The omitted
/// remainder has the form K_P(P) A(P) on its first index and is annihilated
/// by [K_P]^perp, so this tensor is valid only inside contractions prefixed
/// by that projection.
inline FourTensor dilation_hessian_projected(const Matrix& P, double tol = kRankTol) {
  const int N = P.rows(), n = P.cols();
  if (numerical_rank(P, tol) < n) throw std::domain_error("dilation_hessian_projected: rank-deficient argument");
  const Matrix gram = P.transpose() * P;
  const Matrix gram_inv = detail::inverse(gram);
  const double det_nth = std::pow(detail::determinant(gram), 1.0 / n);
  const Matrix s = ahlfors(gram);
  const Matrix gram_inv_s = gram_inv * s;

  FourTensor t(N, n);
  for (int a = 0; a < N; ++a)
    for (int i = 0; i < n; ++i)
      for (int b = 0; b < N; ++b)
        for (int j = 0; j < n; ++j) {
          double v = (a == b) ? 2.0 * gram_inv_s(i, j) / det_nth : 0.0;
          double second = 0.0;
          for (int m = 0; m < n; ++m)
            for (int l = 0; l < n; ++l) {
              double inner = 0.0;
              for (int k = 0; k < n; ++k) inner += gram_inv(i, k) * dilation_e_tensor(k, j, l, m, n);
              second += P(a, m) * P(b, l) * inner;
            }
          t(a, i, b, j) = v + 2.0 * second / det_nth;
        }
  return t;
}

/// Closed-form inverse (I + gamma [x]^T)^{-1} = I - (gamma/(gamma+1)) [x]^T.
inline Matrix rank_one_inverse(double gamma, const Vec& x) {
  if (gamma == -1.0) throw std::domain_error("rank_one_inverse: gamma = -1 is singular");
  const auto [tang, perp] = radial_projections(x);
  const int n = static_cast<int>(x.size());
  Matrix out = Matrix::identity(n);
  const double c = gamma / (gamma + 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) -= c * tang(i, j);
  return out;
}

}  // namespace linfty
