#pragma once

#include "linfty/maps.hpp"
#include "linfty/matrix.hpp"

namespace linfty {

/// Independent finite-difference oracle for analytic evaluators.
inline constexpr double kFdGradientStep = 1e-5;
inline constexpr double kFdHessianStep = 1e-4;

/// Central differences of the value: (u(x + h e_i) - u(x - h e_i)) / 2h.
inline Matrix fd_gradient(const MapModel& u, const Vec& x, double h = kFdGradientStep) {
  Matrix g(u.N, u.n);
  for (int i = 0; i < u.n; ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const Vec up = u.value(xp), um = u.value(xm);
    for (int a = 0; a < u.N; ++a) g(a, i) = (up[a] - um[a]) / (2.0 * h);
  }
  return g;
}

/// Central differences of the gradient evaluator, giving D^2_{ij} u_a.
inline Hessian fd_hessian(const MapModel& u, const Vec& x, double h = kFdHessianStep) {
  Hessian out(u.N, u.n);
  for (int j = 0; j < u.n; ++j) {
    Vec xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    const Matrix gp = u.gradient(xp), gm = u.gradient(xm);
    for (int a = 0; a < u.N; ++a)
      for (int i = 0; i < u.n; ++i) out(a, i, j) = (gp(a, i) - gm(a, i)) / (2.0 * h);
  }
  return out;
}

}  // namespace linfty
