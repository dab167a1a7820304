#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>

#include "linfty/hamiltonian.hpp"
#include "linfty/matrix.hpp"
#include "linfty/ode.hpp"

namespace linfty {

/// A point-to-value map u: R^n -> R^N with value, gradient (N x n) and
/// second-derivative (N x n x n) evaluators. Immutable after construction;
/// evaluators are safe for concurrent calls.
struct MapModel {
  std::string id;
  int n = 0;
  int N = 0;
  std::function<Vec(const Vec&)> value;
  std::function<Matrix(const Vec&)> gradient;
  std::function<Hessian(const Vec&)> hessian;
  Provenance gradient_provenance = Provenance::analytic;
  Provenance hessian_provenance = Provenance::analytic;

  // valid radial range; evaluations outside throw std::domain_error
  double r_inner = 0.0;
  double r_outer = std::numeric_limits<double>::infinity();
  bool origin_excluded = false;

  // distance to a rank interface, when the family has one
  std::function<double(const Vec&)> interface_distance;

  // profile backing an eikonal map, when applicable
  std::shared_ptr<const ode::ProfileSolution> profile;

  // absolute accuracy scale of the evaluators beyond roundoff (0 = exact
  // closed forms; profile-backed maps inherit the integration tolerance)
  double evaluator_accuracy = 0.0;

  bool fully_analytic() const {
    return gradient_provenance == Provenance::analytic && hessian_provenance == Provenance::analytic;
  }

  bool in_domain(const Vec& x) const {
    const double r = norm(x);
    if (origin_excluded && r == 0.0) return false;
    return r >= r_inner && r <= r_outer;
  }
};

namespace detail_maps {

inline std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline void require_dim(const Vec& x, int n, const char* who) {
  if (static_cast<int>(x.size()) != n) throw std::invalid_argument(std::string(who) + ": point dimension mismatch");
}

}  // namespace detail_maps

/// Scalar radial profile g with first and second derivatives, defined for
/// t = |x|^2 in [t_lo, t_hi].
struct RadialProfile {
  std::function<double(double)> g;
  std::function<double(double)> gprime;
  std::function<double(double)> gsecond;
  double t_lo = 0.0;
  double t_hi = std::numeric_limits<double>::infinity();
  std::string desc = "profile";
};

/// Map v(x) = e^{g(|x|^2)} x with closed-form gradient
///   Dv = e^g (I + 2 g' x (x) x)
/// and Hessian
///   D^2_{ij} v_a = 2 e^g [ g'(x_j d_ai + x_i d_aj + x_a d_ij) + 2(g'' + g'^2) x_a x_i x_j ].
inline MapModel radial_map(const RadialProfile& profile, int n) {
  if (n < 1) throw std::domain_error("radial_map: n must be positive");
  MapModel m;
  m.id = "radial(" + profile.desc + ",n=" + std::to_string(n) + ")";
  m.n = n;
  m.N = n;
  m.origin_excluded = true;
  m.r_inner = std::sqrt(std::max(profile.t_lo, 0.0));
  m.r_outer = std::isfinite(profile.t_hi) ? std::sqrt(profile.t_hi) : profile.t_hi;

  auto t_of = [profile, n](const Vec& x) {
    detail_maps::require_dim(x, n, "radial_map");
    double t = 0.0;
    for (double v : x) t += v * v;
    if (t == 0.0) throw std::domain_error("radial_map: evaluation at the origin");
    if (t < profile.t_lo * (1.0 - 1e-12) || t > profile.t_hi * (1.0 + 1e-12))
      throw std::domain_error("radial_map: point outside profile domain");
    return t;
  };

  m.value = [profile, t_of](const Vec& x) {
    const double e = std::exp(profile.g(t_of(x)));
    return e * x;
  };
  m.gradient = [profile, t_of, n](const Vec& x) {
    const double t = t_of(x);
    const double e = std::exp(profile.g(t));
    const double gp = profile.gprime(t);
    Matrix d(n, n);
    for (int a = 0; a < n; ++a)
      for (int i = 0; i < n; ++i) d(a, i) = e * ((a == i ? 1.0 : 0.0) + 2.0 * gp * x[a] * x[i]);
    return d;
  };
  m.hessian = [profile, t_of, n](const Vec& x) {
    const double t = t_of(x);
    const double e = std::exp(profile.g(t));
    const double gp = profile.gprime(t);
    const double gpp = profile.gsecond(t);
    const double q = 2.0 * (gpp + gp * gp);
    Hessian h(n, n);
    for (int a = 0; a < n; ++a)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double del = gp * (x[j] * (a == i ? 1.0 : 0.0) + x[i] * (a == j ? 1.0 : 0.0) +
                                   x[a] * (i == j ? 1.0 : 0.0));
          h(a, i, j) = 2.0 * e * (del + q * x[a] * x[i] * x[j]);
        }
    return h;
  };
  return m;
}

struct EikonalOptions {
  double t_min = 1e-6;
  double tol = 1e-10;
};

/// Solution family v_a(x) = e^{g_a(|x|^2)} x of the eikonal inclusion
/// |Dv|^2 = a with v = x on |x| = 1. The profile is integrated backward from
/// t = 1 as far as it extends; the map's valid radial range reflects the
/// attained grid (see MapModel::r_inner and the attached profile).
inline MapModel eikonal_map(double a, int n, const EikonalOptions& opts = {}) {
  if (!(a > n)) throw std::domain_error("eikonal_map: requires a > n");
  auto sol = std::make_shared<ode::ProfileSolution>(
      ode::solve_profile_clipped({.a = a, .n = n, .t_min = opts.t_min, .tol = opts.tol}));
  const ode::ProfileSolution* ps = sol.get();
  RadialProfile prof{
      .g = [ps](double t) { return ps->g_at(t); },
      .gprime = [ps](double t) { return ps->gprime_at(t); },
      .gsecond = [ps](double t) { return ps->gsecond_at(t); },
      .t_lo = sol->t_stop,
      .t_hi = 1.0,
      .desc = "eikonal",
  };
  MapModel m = radial_map(prof, n);
  m.id = "eikonal(a=" + detail_maps::fmt(a) + ",n=" + std::to_string(n) + ")";
  m.profile = sol;
  m.evaluator_accuracy = 1e3 * opts.tol;
  return m;
}

/// Constant dilation of the power map family, (n + g^2 + 2g)/(1+g)^{2/n}.
inline double power_dilation_constant(double gamma, int n) {
  return (n + gamma * gamma + 2.0 * gamma) / std::pow(1.0 + gamma, 2.0 / n);
}

/// Map v(x) = |x|^g x with gradient |x|^g (I + g x(x)x/|x|^2) and Hessian
///   D^2_{ij} v_a = g r^{g-2} (x_j d_ai + x_i d_aj + x_a d_ij) + g(g-2) r^{g-4} x_a x_i x_j.
inline MapModel power_map(double gamma, int n) {
  if (!(gamma > -1.0)) throw std::domain_error("power_map: requires gamma > -1");
  if (n < 1) throw std::domain_error("power_map: n must be positive");
  MapModel m;
  m.id = "power(gamma=" + detail_maps::fmt(gamma) + ",n=" + std::to_string(n) + ")";
  m.n = n;
  m.N = n;
  m.origin_excluded = true;

  auto r_of = [n](const Vec& x) {
    detail_maps::require_dim(x, n, "power_map");
    const double r = norm(x);
    if (r == 0.0) throw std::domain_error("power_map: evaluation at the origin");
    return r;
  };

  m.value = [gamma, r_of](const Vec& x) { return std::pow(r_of(x), gamma) * x; };
  m.gradient = [gamma, r_of, n](const Vec& x) {
    const double r = r_of(x);
    const double rg = std::pow(r, gamma);
    Matrix d(n, n);
    for (int a = 0; a < n; ++a)
      for (int i = 0; i < n; ++i) d(a, i) = rg * ((a == i ? 1.0 : 0.0) + gamma * x[a] * x[i] / (r * r));
    return d;
  };
  m.hessian = [gamma, r_of, n](const Vec& x) {
    const double r = r_of(x);
    const double c1 = gamma * std::pow(r, gamma - 2.0);
    const double c2 = gamma * (gamma - 2.0) * std::pow(r, gamma - 4.0);
    Hessian h(n, n);
    for (int a = 0; a < n; ++a)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double del = x[j] * (a == i ? 1.0 : 0.0) + x[i] * (a == j ? 1.0 : 0.0) +
                             x[a] * (i == j ? 1.0 : 0.0);
          h(a, i, j) = c1 * del + c2 * x[a] * x[i] * x[j];
        }
    return h;
  };
  return m;
}

/// Exponent g(mu) = (n - mu)/(mu - 1) of the linear-system solution family.
inline double mu_gamma(double mu, int n) {
  if (!(mu > 1.0)) throw std::domain_error("mu_gamma: requires mu > 1");
  return (n - mu) / (mu - 1.0);
}

/// u^mu(x) = |x|^{(n-mu)/(mu-1)} x, delegated to the power family.
inline MapModel mu_map(double mu, int n) {
  MapModel m = power_map(mu_gamma(mu, n), n);
  m.id = "mu(mu=" + detail_maps::fmt(mu) + ",n=" + std::to_string(n) + ")";
  return m;
}

/// The planar map (x, y) -> (cos x - cos y, sin x - sin y), whose gradient
/// rank drops to 1 on the diagonal x = y.
inline MapModel trig_map() {
  MapModel m;
  m.id = "trig";
  m.n = 2;
  m.N = 2;
  m.value = [](const Vec& x) {
    detail_maps::require_dim(x, 2, "trig_map");
    return Vec{std::cos(x[0]) - std::cos(x[1]), std::sin(x[0]) - std::sin(x[1])};
  };
  m.gradient = [](const Vec& x) {
    detail_maps::require_dim(x, 2, "trig_map");
    Matrix d(2, 2);
    d(0, 0) = -std::sin(x[0]);
    d(0, 1) = std::sin(x[1]);
    d(1, 0) = std::cos(x[0]);
    d(1, 1) = -std::cos(x[1]);
    return d;
  };
  m.hessian = [](const Vec& x) {
    detail_maps::require_dim(x, 2, "trig_map");
    Hessian h(2, 2);
    h(0, 0, 0) = -std::cos(x[0]);
    h(0, 1, 1) = std::cos(x[1]);
    h(1, 0, 0) = -std::sin(x[0]);
    h(1, 1, 1) = std::sin(x[1]);
    return h;
  };
  m.interface_distance = [](const Vec& x) { return std::abs(x[0] - x[1]) / std::sqrt(2.0); };
  return m;
}

inline MapModel identity_map(int n) {
  if (n < 1) throw std::domain_error("identity_map: n must be positive");
  MapModel m;
  m.id = "identity(n=" + std::to_string(n) + ")";
  m.n = n;
  m.N = n;
  m.value = [n](const Vec& x) {
    detail_maps::require_dim(x, n, "identity_map");
    return x;
  };
  m.gradient = [n](const Vec& x) {
    detail_maps::require_dim(x, n, "identity_map");
    return Matrix::identity(n);
  };
  m.hessian = [n](const Vec& x) {
    detail_maps::require_dim(x, n, "identity_map");
    return Hessian(n, n);
  };
  return m;
}

}  // namespace linfty
