#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "linfty/detail/eigen_backend.hpp"
#include "linfty/matrix.hpp"
#include "linfty/tensor_ops.hpp"

namespace linfty {

/// Sign requirement on det(S(A^T A)) for K-set membership. The strict form
/// follows the printed definition; the nonzero form admits mixed-sign
/// spectra (the power family at n = 2 has det S < 0) and is the default.
enum class DetMode { strict_positive, nonzero };

inline const char* to_string(DetMode m) { return m == DetMode::strict_positive ? "strict" : "nonzero"; }

struct InclusionVerdict {
  bool member = false;
  double norm_deviation = std::numeric_limits<double>::quiet_NaN();      // | |A|^2 - a |
  double det_margin = std::numeric_limits<double>::quiet_NaN();          // |det A|
  double dilation_deviation = std::numeric_limits<double>::quiet_NaN();  // |K(A) - a|
  double ahlfors_det = std::numeric_limits<double>::quiet_NaN();         // det S(A^T A)
};

namespace detail_inclusion {

// scale-honest determinant floor: tol_det_scale * sigma_max^p
inline double det_floor(const Matrix& A, int power, double tol_det_scale) {
  const auto dec = detail::svd(A);
  const double smax = dec.sigma.empty() ? 0.0 : dec.sigma.front();
  return tol_det_scale * std::pow(smax, power);
}

}  // namespace detail_inclusion

/// Membership in L_a = { A : |A|^2 = a, det A != 0 }.
inline InclusionVerdict in_L_a(const Matrix& A, double a, double tol, double tol_det_scale = 1e-12) {
  if (A.rows() != A.cols()) throw std::domain_error("in_L_a: matrix not square");
  if (a < 0.0) throw std::domain_error("in_L_a: requires a >= 0");
  InclusionVerdict v;
  v.norm_deviation = std::abs(Matrix::frobenius_inner(A, A) - a);
  v.det_margin = std::abs(detail::determinant(A));
  const double floor = detail_inclusion::det_floor(A, A.rows(), tol_det_scale);
  v.member = v.norm_deviation <= tol && v.det_margin > floor;
  return v;
}

/// Membership in K_a = { A : K(A) = a, det S(A^T A) sign condition }.
inline InclusionVerdict in_K_a(const Matrix& A, double a, double tol, DetMode mode = DetMode::nonzero,
                               double tol_det_scale = 1e-12) {
  if (A.rows() != A.cols()) throw std::domain_error("in_K_a: matrix not square");
  if (a < A.rows()) throw std::domain_error("in_K_a: requires a >= n");
  InclusionVerdict v;
  const Dilation k = dilation(A);
  v.dilation_deviation = k.finite ? std::abs(k.value - a) : std::numeric_limits<double>::infinity();
  const Matrix s = ahlfors(A.transpose() * A);
  v.ahlfors_det = detail::determinant(s);
  // S scales like sigma^2, so its determinant floor uses sigma_max^{2n}
  const double floor = detail_inclusion::det_floor(A, 2 * A.rows(), tol_det_scale);
  const bool det_ok = mode == DetMode::strict_positive ? v.ahlfors_det > floor : std::abs(v.ahlfors_det) > floor;
  v.member = k.finite && v.dilation_deviation <= tol && det_ok;
  return v;
}

/// Which matrix set a scan checks against.
struct SetSpec {
  enum class Kind { L, K } kind = Kind::L;
  double a = 0.0;
  // NaN = auto: 1e-9 for fully analytic maps, 1e-6 when any evaluator is FD-backed
  double tol = std::numeric_limits<double>::quiet_NaN();
  DetMode det_mode = DetMode::nonzero;
  double tol_det_scale = 1e-12;

  std::string label() const {
    return std::string(kind == Kind::L ? "L" : "K") + "_a(a=" + std::to_string(a) + ")";
  }
};

}  // namespace linfty
