#pragma once

#include <functional>
#include <stdexcept>
#include <string>

#include "linfty/matrix.hpp"

namespace linfty {

enum class Provenance { analytic, finite_difference };

/// Hamiltonian H in C^2 on the N x n matrix space, with value, gradient H_P
/// and Hessian H_PP evaluators. Evaluators are either analytic or backed by
/// central finite differences of the value.
struct HamiltonianModel {
  int N = 0;
  int n = 0;
  std::string id;
  std::function<double(const Matrix&)> value;
  std::function<Matrix(const Matrix&)> gradient;
  std::function<FourTensor(const Matrix&)> hessian;
  Provenance gradient_provenance = Provenance::analytic;
  Provenance hessian_provenance = Provenance::analytic;

  /// H(P) = |P|^2 with H_P = 2P and H_PP = 2 delta_ab delta_ij.
  static HamiltonianModel squared_frobenius(int N, int n) {
    HamiltonianModel h;
    h.N = N;
    h.n = n;
    h.id = "squared-frobenius";
    h.value = [](const Matrix& P) { return Matrix::frobenius_inner(P, P); };
    h.gradient = [](const Matrix& P) { return 2.0 * P; };
    h.hessian = [N, n](const Matrix&) {
      FourTensor t(N, n);
      for (int a = 0; a < N; ++a)
        for (int i = 0; i < n; ++i) t(a, i, a, i) = 2.0;
      return t;
    };
    return h;
  }

  /// Wrap a value-only Hamiltonian with finite-difference gradient and Hessian.
  static HamiltonianModel from_value(std::function<double(const Matrix&)> f, int N, int n,
                                     double h_grad = 1e-5, double h_hess = 1e-4,
                                     std::string id = "fd-hamiltonian") {
    HamiltonianModel m;
    m.N = N;
    m.n = n;
    m.id = std::move(id);
    m.value = f;
    m.gradient_provenance = Provenance::finite_difference;
    m.hessian_provenance = Provenance::finite_difference;
    m.gradient = [f, N, n, h_grad](const Matrix& P) {
      Matrix g(N, n);
      for (int a = 0; a < N; ++a)
        for (int i = 0; i < n; ++i) {
          Matrix p1 = P, p2 = P;
          p1(a, i) += h_grad;
          p2(a, i) -= h_grad;
          g(a, i) = (f(p1) - f(p2)) / (2.0 * h_grad);
        }
      return g;
    };
    m.hessian = [f, N, n, h_hess](const Matrix& P) {
      FourTensor t(N, n);
      const double h = h_hess;
      for (int a = 0; a < N; ++a)
        for (int i = 0; i < n; ++i)
          for (int b = 0; b < N; ++b)
            for (int j = 0; j < n; ++j) {
              Matrix pp = P, pm = P, mp = P, mm = P;
              pp(a, i) += h; pp(b, j) += h;
              pm(a, i) += h; pm(b, j) -= h;
              mp(a, i) -= h; mp(b, j) += h;
              mm(a, i) -= h; mm(b, j) -= h;
              t(a, i, b, j) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h * h);
            }
      return t;
    };
    return m;
  }
};

}  // namespace linfty
