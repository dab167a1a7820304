#pragma once

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "linfty/fd.hpp"
#include "linfty/inclusion.hpp"
#include "linfty/maps.hpp"
#include "linfty/operators.hpp"
#include "linfty/report.hpp"
#include "linfty/sampling.hpp"

namespace linfty {

/// Block-partitioned parallel loop; the callee owns any per-index error
/// handling, results must be written to disjoint slots.
template <class F>
void parallel_for(std::size_t count, int threads, F&& f) {
  if (threads <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  const int workers = std::min<std::size_t>(threads, count);
  const std::size_t chunk = (count + workers - 1) / workers;
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex err_mutex;
  for (int w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk, hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) f(i);
      } catch (...) {
        std::scoped_lock lk(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

enum class OperatorKind { InfinityLaplacian, QInfinity, Linear };

struct OperatorSpec {
  OperatorKind kind = OperatorKind::InfinityLaplacian;
  double mu = std::numeric_limits<double>::quiet_NaN();

  std::string name() const {
    switch (kind) {
      case OperatorKind::InfinityLaplacian: return "infinity-laplacian";
      case OperatorKind::QInfinity: return "q-infinity";
      case OperatorKind::Linear: return "linear(mu=" + detail_maps::fmt(mu) + ")";
    }
    return "?";
  }

  Vec evaluate(const MapModel& u, const Vec& x, OperatorDiagnostics* diag = nullptr) const {
    switch (kind) {
      case OperatorKind::InfinityLaplacian: return infinity_laplacian(u, x, diag);
      case OperatorKind::QInfinity: return q_infinity(u, x, diag);
      case OperatorKind::Linear: return linear_system_residual(mu, u, x);
    }
    throw std::logic_error("OperatorSpec: bad kind");
  }
};

struct ResidualOptions {
  double tol = 1e-6;                   // pass bound on max normalized residual
  double fd_h_grad = kFdGradientStep;
  double fd_h_hess = kFdHessianStep;
  int oracle_points = 8;
  double oracle_grad_tol = 1e-6;
  double oracle_hess_tol = 1e-5;
  int threads = 1;
  double interface_exclusion = 1e-3;   // band excluded from pass/fail aggregation
};

namespace detail_verify {

inline double rel_error(double diff, double a, double b) {
  return diff / std::max({a, b, 1e-8});
}

/// Analytic-vs-FD agreement on a subset drawn from the middle radius band,
/// away from domain edges where FD stencils exit the domain.
inline OracleSection run_oracle(const MapModel& map, const std::vector<Vec>& pts, const ResidualOptions& o) {
  OracleSection s;
  if (!map.fully_analytic()) return s;  // nothing to pair: evaluators are the FD oracle already
  s.applicable = true;

  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto i, auto j) { return norm(pts[i]) < norm(pts[j]); });
  const std::size_t lo = order.size() / 4, hi = 3 * order.size() / 4;
  const std::size_t span = std::max<std::size_t>(1, hi - lo);
  const int want = std::min<int>(o.oracle_points, static_cast<int>(span));

  for (int k = 0; k < want; ++k) {
    const Vec& x = pts[order[lo + (span * k) / want]];
    try {
      const Matrix ga = map.gradient(x);
      const Matrix gf = fd_gradient(map, x, o.fd_h_grad);
      double gd = 0.0;
      for (int a = 0; a < ga.rows(); ++a)
        for (int i = 0; i < ga.cols(); ++i) gd = std::max(gd, std::abs(ga(a, i) - gf(a, i)));
      s.gradient_max_rel = std::max(s.gradient_max_rel, rel_error(gd, ga.max_abs(), gf.max_abs()));

      const Hessian ha = map.hessian(x);
      const Hessian hf = fd_hessian(map, x, o.fd_h_hess);
      double hd = 0.0, hm = 0.0;
      for (int a = 0; a < ha.N(); ++a)
        for (int i = 0; i < ha.n(); ++i)
          for (int j = 0; j < ha.n(); ++j) {
            hd = std::max(hd, std::abs(ha(a, i, j) - hf(a, i, j)));
            hm = std::max({hm, std::abs(ha(a, i, j)), std::abs(hf(a, i, j))});
          }
      s.hessian_max_rel = std::max(s.hessian_max_rel, rel_error(hd, hm, 0.0));
      ++s.points;
    } catch (const std::exception&) {
      // stencil exited the domain; skip the point
    }
  }
  s.pass = s.points > 0 && s.gradient_max_rel <= o.oracle_grad_tol && s.hessian_max_rel <= o.oracle_hess_tol;
  return s;
}

}  // namespace detail_verify

/// Pointwise operator residuals over a sample set. Normalization divides the
/// Euclidean norm by (1 + |Du|^3)(1 + |D^2u|); raw values are retained.
/// Verdict: every point evaluated, oracle pairing intact, and the maximum
/// normalized residual within tol.
inline Report residual_report(const OperatorSpec& op, const MapModel& map, const SampleSet& samples,
                              const ResidualOptions& opts = {}) {
  Report rep;
  rep.map_id = map.id;
  rep.check_id = op.name();
  rep.fill_sampling(samples);
  rep.tolerances = {{"max_normalized_residual", opts.tol},
                    {"oracle_gradient_rel", opts.oracle_grad_tol},
                    {"oracle_hessian_rel", opts.oracle_hess_tol},
                    {"interface_exclusion_band", opts.interface_exclusion}};
  rep.points.resize(samples.points.size());

  parallel_for(samples.points.size(), opts.threads, [&](std::size_t idx) {
    const Vec& x = samples.points[idx];
    PointRecord r;
    r.x = x;
    if (map.interface_distance && map.interface_distance(x) < opts.interface_exclusion) {
      r.excluded = true;
      r.near_interface = true;
    }
    try {
      OperatorDiagnostics diag;
      const Vec v = op.evaluate(map, x, &diag);
      const Matrix du = map.gradient(x);
      const Hessian h = map.hessian(x);
      r.raw = norm(v);
      const double dn = du.frobenius_norm();
      r.normalized = r.raw / ((1.0 + dn * dn * dn) * (1.0 + h.frobenius_norm()));
      r.evaluated = true;
      r.near_interface = r.near_interface || diag.near_interface;
    } catch (const std::exception& e) {
      r.evaluated = false;
      r.error = e.what();
    }
    rep.points[idx] = r;
  });

  rep.aggregates = aggregate(rep.points);
  rep.oracle = detail_verify::run_oracle(map, samples.points, opts);
  rep.pass = rep.aggregates.failed == 0 && rep.oracle.pass && rep.aggregates.evaluated > 0 &&
             rep.aggregates.max_normalized <= opts.tol;
  return rep;
}

/// Outer-boundary deviation max |u(x) - x| on |x| = 1, plus the inner-limit
/// proxy |u(x)| evaluated at |x| = 1e-3 or at the innermost radius the map
/// admits; pass is decided on the outer deviation only.
inline BoundaryFragment boundary_check(const MapModel& map, int n, double tol, std::uint64_t seed = 42,
                                       int count = 128) {
  BoundaryFragment b;
  b.tol = tol;
  b.outer_samples = count;
  double outer = 0.0;
  for (const Vec& x : sphere_points(n, 1.0, count, seed)) {
    const Vec u = map.value(x);
    outer = std::max(outer, norm(u - x));
  }
  b.outer_max_deviation = outer;

  const double requested = 1e-3;
  double r_in = requested;
  if (map.r_inner > requested) {
    r_in = map.r_inner * (1.0 + 1e-9);
    b.inner_at_requested_radius = false;
  }
  b.inner_radius = r_in;
  try {
    double inner = 0.0;
    for (const Vec& x : sphere_points(n, r_in, count, seed + 1)) inner = std::max(inner, norm(map.value(x)));
    b.inner_max_norm = inner;
    b.inner_evaluated = true;
  } catch (const std::exception&) {
    b.inner_evaluated = false;
  }
  b.pass = outer <= tol;
  return b;
}

/// Gradient-membership scan of a map against L_a or K_a.
inline Report scan_inclusion(const MapModel& map, const SampleSet& samples, const SetSpec& set,
                             int threads = 1) {
  Report rep;
  rep.map_id = map.id;
  rep.check_id = std::string("inclusion-") + (set.kind == SetSpec::Kind::L ? "L" : "K");
  rep.fill_sampling(samples);
  const double tol = std::isnan(set.tol)
                         ? std::max(map.fully_analytic() ? 1e-9 : 1e-6, 10.0 * map.evaluator_accuracy)
                         : set.tol;
  rep.params = {{"a", set.a}, {"det_mode", to_string(set.det_mode)}};
  rep.tolerances = {{"equality", tol}, {"det_scale", set.tol_det_scale}};
  rep.points.resize(samples.points.size());

  parallel_for(samples.points.size(), threads, [&](std::size_t idx) {
    const Vec& x = samples.points[idx];
    PointRecord r;
    r.x = x;
    try {
      const Matrix A = map.gradient(x);
      const InclusionVerdict v = set.kind == SetSpec::Kind::L
                                     ? in_L_a(A, set.a, tol, set.tol_det_scale)
                                     : in_K_a(A, set.a, tol, set.det_mode, set.tol_det_scale);
      r.member = v.member;
      r.raw = set.kind == SetSpec::Kind::L ? v.norm_deviation : v.dilation_deviation;
      r.normalized = r.raw;
      r.evaluated = true;
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    rep.points[idx] = r;
  });

  rep.aggregates = aggregate(rep.points);
  int members = 0;
  for (const auto& p : rep.points)
    if (p.evaluated && p.member) ++members;
  const double fraction =
      rep.points.empty() ? 0.0 : static_cast<double>(members) / static_cast<double>(rep.points.size());
  rep.extra = {{"set", set.kind == SetSpec::Kind::L ? "L" : "K"},
               {"membership_fraction", fraction},
               {"worst_deviation", rep.aggregates.max_raw}};
  rep.oracle.pass = true;  // no analytic/FD pairing in a first-order scan
  rep.pass = rep.aggregates.failed == 0 && members == static_cast<int>(rep.points.size());
  return rep;
}

enum class Problem { InfinityLaplacian, QInfinity, Linear };

inline const char* to_string(Problem p) {
  switch (p) {
    case Problem::InfinityLaplacian: return "infinity-laplacian";
    case Problem::QInfinity: return "q-infinity";
    case Problem::Linear: return "linear";
  }
  return "?";
}

/// One Dirichlet problem, >= 2 candidate solutions.
struct DemoSpec {
  Problem problem = Problem::InfinityLaplacian;
  std::vector<double> params;  // a-list (eikonal), gamma-list (power) or mu-list (linear)
  int n = 2;
  EikonalOptions eikonal{};
};

inline std::vector<MapModel> demo_members(const DemoSpec& spec) {
  std::vector<MapModel> members;
  switch (spec.problem) {
    case Problem::InfinityLaplacian:
      for (double a : spec.params) members.push_back(eikonal_map(a, spec.n, spec.eikonal));
      break;
    case Problem::QInfinity:
      for (double g : spec.params) members.push_back(power_map(g, spec.n));
      break;
    case Problem::Linear:
      for (double mu : spec.params) members.push_back(mu_map(mu, spec.n));
      members.push_back(identity_map(spec.n));
      break;
  }
  if (members.size() < 2) throw std::domain_error("nonuniqueness_demo: needs at least two candidate solutions");
  return members;
}

struct PairDistance {
  std::size_t i = 0, j = 0;
  double sup_distance = 0.0;
  int common_points = 0;
};

struct DemoOptions {
  ResidualOptions residual{};
  double boundary_tol = 1e-10;
  double min_pair_distance = 1e-6;
  std::uint64_t boundary_seed = 42;
};

struct DemoResult {
  std::string problem_name;
  int n = 0;
  std::vector<Report> members;
  std::vector<PairDistance> distances;
  double min_pair_distance = std::numeric_limits<double>::infinity();
  bool all_members_pass = false;
  bool pass = false;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["schema"] = "linfty-demo-v1";
    j["problem"] = problem_name;
    j["n"] = n;
    j["members"] = nlohmann::json::array();
    for (const auto& m : members) j["members"].push_back(m.to_json());
    j["distances"] = nlohmann::json::array();
    for (const auto& d : distances)
      j["distances"].push_back({{"i", d.i}, {"j", d.j}, {"sup_distance", d.sup_distance},
                                {"common_points", d.common_points}});
    j["min_pair_distance"] = min_pair_distance;
    j["verdict"] = pass ? "pass" : "fail";
    return j;
  }
};

/// Builds all candidate maps for one Dirichlet problem, verifies each against
/// the residual and boundary checks, and certifies pairwise distinctness by
/// the reported sup-distance over commonly evaluable samples.
inline DemoResult nonuniqueness_demo(const DemoSpec& spec, const SampleSet& samples,
                                     const DemoOptions& opts = {}) {
  const auto members = demo_members(spec);
  OperatorSpec op;
  switch (spec.problem) {
    case Problem::InfinityLaplacian: op = {OperatorKind::InfinityLaplacian, {}}; break;
    case Problem::QInfinity: op = {OperatorKind::QInfinity, {}}; break;
    case Problem::Linear: op = {OperatorKind::Linear, spec.params.at(0)}; break;
  }

  DemoResult res;
  res.problem_name = to_string(spec.problem);
  res.n = spec.n;

  std::vector<std::vector<std::pair<bool, Vec>>> images(members.size());
  for (std::size_t m = 0; m < members.size(); ++m) {
    Report r = residual_report(op, members[m], samples, opts.residual);
    const BoundaryFragment b = boundary_check(members[m], spec.n, opts.boundary_tol, opts.boundary_seed);
    r.boundary = b;
    r.pass = r.pass && b.pass;
    res.members.push_back(std::move(r));

    auto& img = images[m];
    img.resize(samples.points.size());
    parallel_for(samples.points.size(), opts.residual.threads, [&](std::size_t idx) {
      try {
        img[idx] = {true, members[m].value(samples.points[idx])};
      } catch (const std::exception&) {
        img[idx] = {false, {}};
      }
    });
  }

  res.all_members_pass = std::all_of(res.members.begin(), res.members.end(), [](const Report& r) { return r.pass; });

  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      PairDistance d{i, j, 0.0, 0};
      for (std::size_t k = 0; k < samples.points.size(); ++k) {
        if (!images[i][k].first || !images[j][k].first) continue;
        ++d.common_points;
        d.sup_distance = std::max(d.sup_distance, norm(images[i][k].second - images[j][k].second));
      }
      res.min_pair_distance = std::min(res.min_pair_distance, d.sup_distance);
      res.distances.push_back(d);
    }

  bool all_pairs_ok = true;
  for (const auto& d : res.distances)
    all_pairs_ok = all_pairs_ok && d.common_points > 0 && d.sup_distance >= opts.min_pair_distance;
  res.pass = res.all_members_pass && all_pairs_ok;
  return res;
}

/// Vectorial maximum-principle proxy on an annulus r1 < |x| < r2: exact 2-D
/// convex hull containment of sampled interior images for n = 2, and the
/// monotone-magnitude sufficient criterion for n >= 3.
inline bool convex_hull_check(const MapModel& map, double r1, double r2, std::uint64_t seed = 42,
                              int boundary_count = 512, int interior_shells = 6, int interior_per_shell = 48) {
  if (!(0.0 < r1 && r1 < r2)) throw std::domain_error("convex_hull_check: requires 0 < r1 < r2");
  const int n = map.n;
  const double margin = std::max(1e-4, 0.01 * (r2 - r1));
  const SampleSet interior =
      sample_punctured_ball(n, interior_shells, interior_per_shell, r1 + margin, r2 - margin, seed);

  if (n == 2) {
    std::vector<Vec> hull_input;
    for (double r : {r1, r2})
      for (const Vec& x : sphere_points(2, r, boundary_count, seed)) hull_input.push_back(map.value(x));

    std::sort(hull_input.begin(), hull_input.end(), [](const Vec& a, const Vec& b) {
      return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
    });
    auto cross = [](const Vec& o, const Vec& a, const Vec& b) {
      return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    std::vector<Vec> hull(2 * hull_input.size());
    std::size_t k = 0;
    for (const auto& p : hull_input) {  // lower chain
      while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
      hull[k++] = p;
    }
    const std::size_t lower = k + 1;
    for (auto it = hull_input.rbegin(); it != hull_input.rend(); ++it) {  // upper chain
      while (k >= lower && cross(hull[k - 2], hull[k - 1], *it) <= 0) --k;
      hull[k++] = *it;
    }
    hull.resize(k > 0 ? k - 1 : 0);
    if (hull.size() < 3) return false;

    double scale = 0.0;
    for (const auto& p : hull) scale = std::max({scale, std::abs(p[0]), std::abs(p[1])});
    const double eps = 1e-9 * std::max(scale, 1.0);
    for (const Vec& x : interior.points) {
      const Vec u = map.value(x);
      for (std::size_t e = 0; e < hull.size(); ++e) {
        if (cross(hull[e], hull[(e + 1) % hull.size()], u) < -eps) return false;
      }
    }
    return true;
  }

  // n >= 3: |u| nondecreasing along rays implies containment in the image ball
  double boundary_max = 0.0;
  for (const Vec& x : sphere_points(n, r2, boundary_count, seed)) boundary_max = std::max(boundary_max, norm(map.value(x)));
  const int rays = 64, steps = 24;
  std::mt19937_64 rng(seed + 7);
  for (int q = 0; q < rays; ++q) {
    const Vec d = detail_rng::direction(n, rng);
    double prev = -1.0;
    for (int sidx = 0; sidx <= steps; ++sidx) {
      const double r = r1 + (r2 - r1) * sidx / steps;
      const double m = norm(map.value(r * d));
      if (m < prev * (1.0 - 1e-12)) return false;
      prev = m;
    }
  }
  for (const Vec& x : interior.points)
    if (norm(map.value(x)) > boundary_max * (1.0 + 1e-12)) return false;
  return true;
}

}  // namespace linfty
