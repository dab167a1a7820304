#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

namespace linfty::ode {

/// Right-hand side F(t, y) = (1/2t)(sqrt(a e^{-2y} - (n-1)) - 1) of the
/// profile equation, defined on B = (0, inf) x (-inf, ln sqrt(a/n)) where it
/// is strictly positive. Evaluated as e^{-y} sqrt(a - (n-1) e^{2y}) so very
/// negative y cannot overflow the radicand.
inline double rhs(double t, double y, double a, int n) {
  if (t <= 0.0) throw std::domain_error("ode::rhs: t must be positive");
  if (y >= 0.5 * std::log(a / n)) throw std::domain_error("ode::rhs: y outside admissibility domain B");
  const double root = std::exp(-y) * std::sqrt(a - (n - 1) * std::exp(2.0 * y));
  return (root - 1.0) / (2.0 * t);
}

/// Closed form g'' = -(g'/t)(1 + a e^{-2g} / (2 sqrt(a e^{-2g} - (n-1)))),
/// strictly negative whenever g' > 0. Rearranged for stability at large -g.
inline double second_derivative(double t, double g, double gprime, double a, int n) {
  if (t <= 0.0) throw std::domain_error("ode::second_derivative: t must be positive");
  if (g >= 0.5 * std::log(a / n)) throw std::domain_error("ode::second_derivative: g outside domain B");
  const double ratio = 0.5 * std::sqrt(a) * std::exp(-g) / std::sqrt(1.0 - ((n - 1) / a) * std::exp(2.0 * g));
  return -(gprime / t) * (1.0 + ratio);
}

struct ProfileParams {
  double a = 0.0;
  int n = 0;
  double t_min = 1e-6;
  double tol = 1e-10;
};

/// Raised when the integration step size underflows before t_min is reached;
/// carries the last t for which the solution was computed.
class SingularityError : public std::runtime_error {
 public:
  explicit SingularityError(double last_t)
      : std::runtime_error("ode: singularity reached before t_min (last valid t = " + std::to_string(last_t) + ")"),
        last_t_(last_t) {}
  double last_t() const { return last_t_; }

 private:
  double last_t_;
};

/// Profile solution on a strictly increasing grid in (t_stop, 1], with
/// g(1) = 0 exactly, g' > 0 and g'' < 0 on the grid, cubic Hermite dense
/// output on (g, g'). t_stop < t_min means the requested t_min was reached.
struct ProfileSolution {
  double a = 0.0;
  int n = 0;
  double t_min_requested = 0.0;
  double tol = 0.0;
  bool reached_t_min = false;
  double t_stop = 0.0;  // smallest grid t

  std::vector<double> t;     // ascending, back() == 1
  std::vector<double> g;     // g(1) == 0
  std::vector<double> gp;    // dg/dt
  std::vector<double> gpp;   // closed-form g''

  std::size_t size() const { return t.size(); }

  /// Index of the grid interval containing tq (throws outside the domain).
  std::size_t locate(double tq) const {
    if (t.size() < 2) throw std::runtime_error("ProfileSolution: empty grid");
    const double lo = t.front(), hi = t.back();
    const double slack = 4.0 * std::abs(hi) * 1e-16;
    if (tq < lo - slack || tq > hi + slack)
      throw std::domain_error("ProfileSolution: query outside profile domain");
    const double tc = std::clamp(tq, lo, hi);
    auto it = std::upper_bound(t.begin(), t.end(), tc);
    std::size_t k = static_cast<std::size_t>(it - t.begin());
    if (k == 0) k = 1;
    if (k >= t.size()) k = t.size() - 1;
    return k - 1;
  }

  double g_at(double tq) const { return hermite(tq).first; }
  double gprime_at(double tq) const { return hermite(tq).second; }
  double gsecond_at(double tq) const {
    const auto [gv, gd] = hermite(tq);
    return second_derivative(std::clamp(tq, t.front(), t.back()), gv, gd, a, n);
  }

  /// |g'_interp - F(t, g_interp)| at the interval midpoint. The integrator
  /// enforces 10*tol*(1 + |F|) at the interior error maxima, which dominates
  /// this value.
  double midpoint_residual(std::size_t interval) const {
    const double tm = 0.5 * (t[interval] + t[interval + 1]);
    const auto [gv, gd] = hermite(tm);
    return std::abs(gd - rhs(tm, gv, a, n));
  }

  /// One header line then full-precision rows.
  void write_csv(std::ostream& os) const {
    os << "t,g,gprime,gsecond\n";
    char buf[160];
    for (std::size_t k = 0; k < t.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", t[k], g[k], gp[k], gpp[k]);
      os << buf;
    }
  }

 private:
  std::pair<double, double> hermite(double tq) const {
    const std::size_t k = locate(tq);
    const double tl = t[k], th = t[k + 1];
    const double dt = th - tl;
    const double u = (std::clamp(tq, t.front(), t.back()) - tl) / dt;
    const double u2 = u * u, u3 = u2 * u;
    const double h00 = 2 * u3 - 3 * u2 + 1, h10 = u3 - 2 * u2 + u;
    const double h01 = -2 * u3 + 3 * u2, h11 = u3 - u2;
    const double val = h00 * g[k] + h10 * dt * gp[k] + h01 * g[k + 1] + h11 * dt * gp[k + 1];
    // factored difference avoids cancellation between the two value terms
    const double der = (6 * u2 - 6 * u) * (g[k] - g[k + 1]) / dt + (3 * u2 - 4 * u + 1) * gp[k] +
                       (3 * u2 - 2 * u) * gp[k + 1];
    return {val, der};
  }
};

namespace detail {

// Autonomous form in s = ln t: dg/ds = (sqrt(a e^{-2g} - (n-1)) - 1) / 2.
// Returns NaN outside the admissibility domain so step control can reject.
inline double rhs_log(double y, double a, int n) {
  const double radicand = a - (n - 1) * std::exp(2.0 * y);
  if (!(radicand > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return 0.5 * (std::exp(-y) * std::sqrt(radicand) - 1.0);
}

// Dormand-Prince 5(4) with step rejection. Besides the embedded error test,
// each candidate step must keep the cubic-Hermite residual |H' - F(t, H)|
// within half of the 10*tol*(1+|F|) budget at the two interior points
// u = (3 -+ sqrt(3))/6 where the interpolation derivative error peaks (it
// vanishes at the midpoint, which would make that check blind).
inline ProfileSolution integrate(const ProfileParams& p, bool clip_at_singularity) {
  if (!(p.a > p.n)) throw std::domain_error("solve_profile: requires a > n");
  if (p.n < 2) throw std::domain_error("solve_profile: requires n >= 2");
  if (!(p.t_min > 0.0 && p.t_min < 1.0)) throw std::domain_error("solve_profile: t_min must lie in (0,1)");
  if (!(p.tol > 0.0)) throw std::domain_error("solve_profile: tol must be positive");

  const double a = p.a;
  const int n = p.n;
  const double s_end = std::log(p.t_min);

  // descending-t storage, reversed at the end
  std::vector<double> ts{1.0}, gs{0.0}, gps{rhs(1.0, 0.0, a, n)};

  double s = 0.0, y = 0.0;
  double k1 = rhs_log(y, a, n);
  double h = -1e-3;
  // below this step size the grid cells are so few ulps wide in t that the
  // stored endpoints cannot represent the interval accurately enough for the
  // dense output to keep the 10*tol*(1+|F|) residual contract
  const double h_floor = std::max(1e-13, std::numeric_limits<double>::epsilon() / (10.0 * p.tol));
  bool reached = false;

  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                   e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                   e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

  const long max_steps = 4000000;
  long steps = 0;
  while (true) {
    if (s <= s_end + 1e-15) {
      reached = true;
      break;
    }
    if (++steps > max_steps) throw std::runtime_error("solve_profile: step budget exhausted");
    if (s + h < s_end) h = s_end - s;
    if (std::abs(h) < h_floor) {
      if (clip_at_singularity) break;
      throw SingularityError(std::exp(s));
    }

    const double k2 = rhs_log(y + h * a21 * k1, a, n);
    const double k3 = rhs_log(y + h * (a31 * k1 + a32 * k2), a, n);
    const double k4 = rhs_log(y + h * (a41 * k1 + a42 * k2 + a43 * k3), a, n);
    const double k5 = rhs_log(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), a, n);
    const double k6 = rhs_log(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), a, n);
    const double delta = h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const double y1 = y + delta;
    const double k7 = rhs_log(y1, a, n);
    const double err = std::abs(h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7));
    const double err_budget = p.tol * (1.0 + std::max(std::abs(y), std::abs(y1)));

    if (!(err <= err_budget)) {  // NaN-robust rejection
      h *= std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err_budget / err, 0.2)) : 0.2;
      continue;
    }

    // dense-output guard on the candidate interval [t1, t0]; the width comes
    // from expm1 so it is consistent with the stored endpoints to full
    // relative precision (differencing two exp() calls is not)
    const double t0 = ts.back();
    const double dt = -t0 * std::expm1(h);
    const double t1 = t0 - dt;
    const double d0 = k1 / t0, d1 = k7 / t1;
    double worst_ratio = 0.0;
    bool resid_ok = true;
    constexpr double offsets[2] = {0.21132486540518713, 0.78867513459481287};
    for (double u : offsets) {
      const double u2 = u * u, u3 = u2 * u;
      const double gq = (2 * u3 - 3 * u2 + 1) * y1 + (u3 - 2 * u2 + u) * dt * d1 +
                        (-2 * u3 + 3 * u2) * y + (u3 - u2) * dt * d0;
      // ascending interval [t1, t0] carries (y1, y); delta = y1 - y exactly
      const double dq = (6 * u2 - 6 * u) * delta / dt + (3 * u2 - 4 * u + 1) * d1 +
                        (3 * u2 - 2 * u) * d0;
      const double tq = t1 + u * dt;
      const double fq = rhs_log(gq, a, n) / tq;
      const double budget = 5.0 * p.tol * (1.0 + std::abs(fq));  // half of 10*tol*(1+|F|)
      const double ratio = std::abs(dq - fq) / budget;
      if (!(ratio <= 1.0)) {
        resid_ok = false;
        worst_ratio = std::numeric_limits<double>::quiet_NaN();
        break;
      }
      worst_ratio = std::max(worst_ratio, ratio);
    }
    if (!resid_ok) {
      h *= 0.4;
      continue;
    }

    s += h;
    y = y1;
    k1 = k7;
    ts.push_back(t1);
    gs.push_back(y1);
    gps.push_back(d1);

    const double grow_err = 0.9 * std::pow(err_budget / std::max(err, 1e-300), 0.2);
    const double grow_res = 0.9 * std::cbrt(1.0 / std::max(worst_ratio, 1e-3));
    h *= std::clamp(std::min(grow_err, grow_res), 0.2, 2.0);
  }

  ProfileSolution sol;
  sol.a = a;
  sol.n = n;
  sol.t_min_requested = p.t_min;
  sol.tol = p.tol;
  sol.reached_t_min = reached;
  std::reverse(ts.begin(), ts.end());
  std::reverse(gs.begin(), gs.end());
  std::reverse(gps.begin(), gps.end());
  sol.t = std::move(ts);
  sol.g = std::move(gs);
  sol.gp = std::move(gps);
  sol.t_stop = sol.t.front();
  sol.gpp.resize(sol.t.size());
  for (std::size_t k = 0; k < sol.t.size(); ++k)
    sol.gpp[k] = second_derivative(sol.t[k], sol.g[k], sol.gp[k], a, n);
  return sol;
}

}  // namespace detail

/// Adaptive backward integration from t = 1 to t_min. Throws
/// SingularityError if the step size underflows before t_min.
inline ProfileSolution solve_profile(const ProfileParams& p) { return detail::integrate(p, false); }

/// As solve_profile, but halts cleanly at the singular radius when t_min is
/// unreachable; reached_t_min records which case occurred.
inline ProfileSolution solve_profile_clipped(const ProfileParams& p) { return detail::integrate(p, true); }

}  // namespace linfty::ode
