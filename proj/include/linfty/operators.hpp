#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "linfty/hamiltonian.hpp"
#include "linfty/maps.hpp"
#include "linfty/matrix.hpp"
#include "linfty/tensor_ops.hpp"

namespace linfty {

/// Evaluation side-channel: proximity to a rank interface, judged from the
/// singular-value gap at the nullspace-projection cutoff.
struct OperatorDiagnostics {
  bool near_interface = false;
  double sv_gap_ratio = std::numeric_limits<double>::infinity();
};

inline constexpr double kInterfaceGapThreshold = 1e3;

namespace detail_ops {

inline void note_gap(OperatorDiagnostics* diag, const NullspaceInfo& info) {
  if (!diag) return;
  diag->sv_gap_ratio = std::min(diag->sv_gap_ratio, info.gap_ratio);
  if (info.gap_ratio < kInterfaceGapThreshold) diag->near_interface = true;
}

}  // namespace detail_ops

/// Triple contraction D_i u_a D_j u_b D^2_ij u_b + |Du|^2 [Du]^perp_ab D^2_ii u_b.
inline Vec infinity_laplacian(const MapModel& u, const Vec& x, OperatorDiagnostics* diag = nullptr) {
  const Matrix du = u.gradient(x);
  const Hessian h = u.hessian(x);
  const int N = du.rows(), n = du.cols();

  Vec out(N, 0.0);
  for (int a = 0; a < N; ++a) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int b = 0; b < N; ++b)
        for (int j = 0; j < n; ++j) s += du(a, i) * du(b, j) * h(b, i, j);
    out[a] = s;
  }

  const auto info = nullspace_projection_info(du);
  detail_ops::note_gap(diag, info);
  const double du2 = Matrix::frobenius_inner(du, du);
  const Vec lap = h.laplacian();
  for (int a = 0; a < N; ++a) {
    double s = 0.0;
    for (int b = 0; b < N; ++b) s += info.projection(a, b) * lap[b];
    out[a] += du2 * s;
  }
  return out;
}

/// The two mutually orthogonal parts Du D(|Du|^2/2) and |Du|^2 [Du]^perp (Lap u),
/// whose sum is the full operator.
inline std::pair<Vec, Vec> infinity_laplacian_decoupled(const MapModel& u, const Vec& x,
                                                        OperatorDiagnostics* diag = nullptr) {
  const Matrix du = u.gradient(x);
  const Hessian h = u.hessian(x);
  const int N = du.rows(), n = du.cols();

  // D(|Du|^2/2)_i = sum_{b,j} D_j u_b D^2_{ji} u_b
  Vec half_grad(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int b = 0; b < N; ++b)
      for (int j = 0; j < n; ++j) half_grad[i] += du(b, j) * h(b, j, i);

  Vec tangential = du.apply(half_grad);

  const auto info = nullspace_projection_info(du);
  detail_ops::note_gap(diag, info);
  const double du2 = Matrix::frobenius_inner(du, du);
  Vec normal = du2 * info.projection.apply(h.laplacian());
  return {std::move(tangential), std::move(normal)};
}

/// General Euler-Lagrange operator
///   (H_P (x) H_P + H [H_P]^perp H_PP)(Du) : D^2 u
/// with [H_P]^perp the nullspace projection of the N x n matrix H_P(Du).
inline Vec aronsson_system(const HamiltonianModel& H, const MapModel& u, const Vec& x,
                           OperatorDiagnostics* diag = nullptr) {
  const Matrix du = u.gradient(x);
  const Hessian h = u.hessian(x);
  const int N = du.rows(), n = du.cols();
  const Matrix hp = H.gradient(du);
  const FourTensor hpp = H.hessian(du);
  const double hval = H.value(du);

  Vec out(N, 0.0);
  for (int a = 0; a < N; ++a) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int b = 0; b < N; ++b)
        for (int j = 0; j < n; ++j) s += hp(a, i) * hp(b, j) * h(b, i, j);
    out[a] = s;
  }

  const auto info = nullspace_projection_info(hp);
  detail_ops::note_gap(diag, info);
  Vec contracted(N, 0.0);  // (H_PP : D^2 u)_c = sum_{i,b,j} H_PP[c,i,b,j] h[b,i,j]
  for (int c = 0; c < N; ++c)
    for (int i = 0; i < n; ++i)
      for (int b = 0; b < N; ++b)
        for (int j = 0; j < n; ++j) contracted[c] += hpp(c, i, b, j) * h(b, i, j);
  for (int a = 0; a < N; ++a) {
    double s = 0.0;
    for (int c = 0; c < N; ++c) s += info.projection(a, c) * contracted[c];
    out[a] += hval * s;
  }
  return out;
}

/// (K_P (x) K_P + [K_P]^perp K_PP)(Du) : D^2 u. The omitted remainder of the
/// dilation Hessian is annihilated by [K_P]^perp, so the value is exact.
/// Throws when rank(Du) < n (the dilation is infinite there).
inline Vec q_infinity(const MapModel& u, const Vec& x, OperatorDiagnostics* diag = nullptr) {
  const Matrix du = u.gradient(x);
  const Hessian h = u.hessian(x);
  const int N = du.rows(), n = du.cols();
  const Matrix kp = dilation_gradient(du);  // throws on rank deficiency
  const FourTensor kpp = dilation_hessian_projected(du);

  Vec out(N, 0.0);
  for (int a = 0; a < N; ++a) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int b = 0; b < N; ++b)
        for (int j = 0; j < n; ++j) s += kp(a, i) * kp(b, j) * h(b, i, j);
    out[a] = s;
  }

  const auto info = nullspace_projection_info(kp);
  detail_ops::note_gap(diag, info);
  Vec contracted(N, 0.0);
  for (int c = 0; c < N; ++c)
    for (int i = 0; i < n; ++i)
      for (int b = 0; b < N; ++b)
        for (int j = 0; j < n; ++j) contracted[c] += kpp(c, i, b, j) * h(b, i, j);
  for (int a = 0; a < N; ++a) {
    double s = 0.0;
    for (int c = 0; c < N; ++c) s += info.projection(a, c) * contracted[c];
    out[a] += s;
  }
  return out;
}

/// Tangential part K_P(Du) D(K(Du)) (chain rule through the Hessian) and
/// normal part ([K_P]^perp K_PP)(Du) : D^2 u.
inline std::pair<Vec, Vec> q_infinity_decoupled(const MapModel& u, const Vec& x,
                                                OperatorDiagnostics* diag = nullptr) {
  const Matrix du = u.gradient(x);
  const Hessian h = u.hessian(x);
  const int N = du.rows(), n = du.cols();
  const Matrix kp = dilation_gradient(du);
  const FourTensor kpp = dilation_hessian_projected(du);

  // D(K(Du))_i = sum_{b,j} K_P(Du)_{bj} D^2_{ji} u_b
  Vec dk(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int b = 0; b < N; ++b)
      for (int j = 0; j < n; ++j) dk[i] += kp(b, j) * h(b, j, i);
  Vec tangential = kp.apply(dk);

  const auto info = nullspace_projection_info(kp);
  detail_ops::note_gap(diag, info);
  Vec contracted(N, 0.0);
  for (int c = 0; c < N; ++c)
    for (int i = 0; i < n; ++i)
      for (int b = 0; b < N; ++b)
        for (int j = 0; j < n; ++j) contracted[c] += kpp(c, i, b, j) * h(b, i, j);
  Vec normal(N, 0.0);
  for (int a = 0; a < N; ++a)
    for (int c = 0; c < N; ++c) normal[a] += info.projection(a, c) * contracted[c];
  return {std::move(tangential), std::move(normal)};
}

/// Coefficient tensor A[a,i,b,j](x) = (d_ai - mu x_a x_i/|x|^2)(d_bj - mu x_b x_j/|x|^2),
/// symmetric under (a,i) <-> (b,j) and positive semidefinite as a quadratic form.
inline FourTensor coefficient_tensor(double mu, const Vec& x) {
  if (!(mu > 1.0)) throw std::domain_error("coefficient_tensor: requires mu > 1");
  const double r2 = dot(x, x);
  if (r2 <= 0.0) throw std::domain_error("coefficient_tensor: zero point");
  const int n = static_cast<int>(x.size());
  Matrix m = Matrix::identity(n);
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < n; ++i) m(a, i) -= mu * x[a] * x[i] / r2;
  FourTensor t(n, n);
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < n; ++i)
      for (int b = 0; b < n; ++b)
        for (int j = 0; j < n; ++j) t(a, i, b, j) = m(a, i) * m(b, j);
  return t;
}

/// Contraction A(x) : D^2 u(x) of the linear degenerate elliptic system.
inline Vec linear_system_residual(double mu, const MapModel& u, const Vec& x) {
  const FourTensor A = coefficient_tensor(mu, x);
  const Hessian h = u.hessian(x);
  const int n = A.n();
  if (h.N() != n || h.n() != n) throw std::invalid_argument("linear_system_residual: dimension mismatch");
  Vec out(n, 0.0);
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < n; ++i)
      for (int b = 0; b < n; ++b)
        for (int j = 0; j < n; ++j) out[a] += A(a, i, b, j) * h(b, i, j);
  return out;
}

/// Scalar c(x) with K_P(Du^mu) (x) K_P(Du^mu) = c(x) A(x):
/// c = 4 g^2 (2+g)^2 |x|^{-2g} / (n^2 (1+g)^{4/n}), g = (n-mu)/(mu-1).
inline double linear_proportionality_constant(double mu, int n, double r) {
  const double g = mu_gamma(mu, n);
  return 4.0 * g * g * (2.0 + g) * (2.0 + g) * std::pow(r, -2.0 * g) /
         (static_cast<double>(n) * n * std::pow(1.0 + g, 4.0 / n));
}

}  // namespace linfty
