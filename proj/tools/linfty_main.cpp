// Command-line front end: ODE profile solves, operator residual scans,
// differential-inclusion scans and nonuniqueness demonstrations, with JSON
// and CSV output for CI consumption.
//
// Exit codes: 0 pass, 1 verification fail, 2 config/domain error, 3 numeric
// failure.

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "linfty/linfty.hpp"

namespace {

using namespace linfty;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

int default_threads() {
  if (const char* env = std::getenv("LINFTY_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(hc) : 1;
}

struct SamplingFlags {
  int shells = 10;
  int per_shell = 36;
  double r_min = -1.0;  // <0: derive from the map's valid range
  double r_max = 0.99;
  std::uint64_t seed = 42;

  void attach(CLI::App* cmd) {
    cmd->add_option("--shells", shells, "number of radial shells");
    cmd->add_option("--per-shell", per_shell, "points per shell");
    cmd->add_option("--r-min", r_min, "inner sampling radius (default: adapted to the family)");
    cmd->add_option("--r-max", r_max, "outer sampling radius");
    cmd->add_option("--seed", seed, "RNG seed for direction sampling");
  }

  SampleSet make(const MapModel& map) const {
    double lo = r_min;
    if (lo < 0.0) lo = std::max(1e-2, map.r_inner > 0.0 ? map.r_inner * 1.02 : 1e-2);
    return sample_punctured_ball(map.n, shells, per_shell, lo, r_max, seed);
  }
};

struct FamilyFlags {
  std::string family;
  std::optional<double> a;
  std::optional<double> gamma;
  std::optional<double> mu;
  int n = 2;
  double ode_tol = 1e-10;

  void attach(CLI::App* cmd) {
    cmd->add_option("--family", family, "eikonal | power | mu | identity | trig")->required();
    cmd->add_option("--a", a, "eikonal norm-level parameter (also L-set level)");
    cmd->add_option("--gamma", gamma, "power-map exponent");
    cmd->add_option("--mu", mu, "linear-system parameter");
    cmd->add_option("--n", n, "space dimension");
    cmd->add_option("--ode-tol", ode_tol, "profile integration tolerance (eikonal family)");
  }

  MapModel build() const {
    if (family == "eikonal") {
      if (!a) throw std::domain_error("family eikonal requires --a");
      return eikonal_map(*a, n, {.t_min = 1e-6, .tol = ode_tol});
    }
    if (family == "power") {
      if (!gamma) throw std::domain_error("family power requires --gamma");
      return power_map(*gamma, n);
    }
    if (family == "mu") {
      if (!mu) throw std::domain_error("family mu requires --mu");
      return mu_map(*mu, n);
    }
    if (family == "identity") return identity_map(n);
    if (family == "trig") {
      if (n != 2) throw std::domain_error("family trig is defined for n = 2");
      return trig_map();
    }
    throw std::domain_error("unknown family '" + family + "'");
  }
};

void write_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << j.dump(2) << "\n";
}

int run_profile(double a, int n, double t_min, double tol, const std::string& out, bool strict) {
  ode::ProfileSolution sol;
  if (strict) {
    sol = ode::solve_profile({.a = a, .n = n, .t_min = t_min, .tol = tol});
  } else {
    sol = ode::solve_profile_clipped({.a = a, .n = n, .t_min = t_min, .tol = tol});
  }

  std::ofstream f(out);
  if (!f) throw std::runtime_error("cannot open " + out);
  sol.write_csv(f);

  double worst_scaled = 0.0;
  for (std::size_t k = 0; k + 1 < sol.size(); ++k) {
    const double tm = 0.5 * (sol.t[k] + sol.t[k + 1]);
    const double fm = ode::rhs(tm, sol.g_at(tm), a, n);
    worst_scaled = std::max(worst_scaled, sol.midpoint_residual(k) / (1.0 + std::abs(fm)));
  }

  std::printf("PASS profile a=%g n=%d grid=%zu t_stop=%.12g reached_t_min=%s g(t_stop)=%.12g "
              "gprime(1)=%.12g max_scaled_midpoint_residual=%.3e out=%s\n",
              a, n, sol.size(), sol.t_stop, sol.reached_t_min ? "yes" : "no", sol.g.front(),
              sol.gp.back(), worst_scaled, out.c_str());
  if (!sol.reached_t_min)
    std::printf("note: profile halts at its singular radius t ~= %.9g (> t_min = %g); the map family "
                "is defined on sqrt(t_stop) <= |x| <= 1\n",
                sol.t_stop, sol.t_min_requested);
  return kExitPass;
}

OperatorSpec parse_operator(const std::string& name, std::optional<double> mu) {
  if (name == "infinity-laplacian") return {OperatorKind::InfinityLaplacian, {}};
  if (name == "q-infinity") return {OperatorKind::QInfinity, {}};
  if (name == "linear") {
    if (!mu) throw std::domain_error("operator linear requires --mu");
    return {OperatorKind::Linear, *mu};
  }
  throw std::domain_error("unknown operator '" + name + "' (infinity-laplacian | q-infinity | linear)");
}

int run_residual(const FamilyFlags& fam, const SamplingFlags& sampling, const std::string& op_name,
                 double tol, int threads, const std::string& out, const std::string& csv) {
  const MapModel map = fam.build();
  const OperatorSpec op = parse_operator(op_name, fam.mu);
  const SampleSet samples = sampling.make(map);

  ResidualOptions opts;
  opts.tol = tol;
  opts.threads = threads;
  Report rep = residual_report(op, map, samples, opts);
  rep.boundary = boundary_check(map, map.n, 1e-10, sampling.seed);
  rep.params = {{"family", fam.family}, {"n", fam.n}};
  if (fam.a) rep.params["a"] = *fam.a;
  if (fam.gamma) rep.params["gamma"] = *fam.gamma;
  if (fam.mu) rep.params["mu"] = *fam.mu;

  rep.save_json(out);
  if (!csv.empty()) rep.save_csv(csv);

  std::printf("%s residual op=%s map=%s points=%zu max_normalized=%.3e tol=%.1e failed=%d "
              "boundary_outer=%.3e out=%s\n",
              rep.pass ? "PASS" : "FAIL", op.name().c_str(), map.id.c_str(), rep.points.size(),
              rep.aggregates.max_normalized, tol, rep.aggregates.failed,
              rep.boundary->outer_max_deviation, out.c_str());
  return rep.pass ? kExitPass : kExitFail;
}

int run_demo(const std::string& problem_name, const std::vector<double>& a_list,
             const std::vector<double>& gamma_list, const std::vector<double>& mu_list, int n,
             const SamplingFlags& sampling, double tol, int threads, const std::string& out) {
  DemoSpec spec;
  spec.n = n;
  if (problem_name == "infinity-laplacian") {
    spec.problem = Problem::InfinityLaplacian;
    spec.params = a_list;
  } else if (problem_name == "q-infinity") {
    spec.problem = Problem::QInfinity;
    spec.params = gamma_list;
  } else if (problem_name == "linear") {
    spec.problem = Problem::Linear;
    spec.params = mu_list;
  } else {
    throw std::domain_error("unknown problem '" + problem_name + "'");
  }
  if (spec.params.empty()) throw std::domain_error("demo: no family parameters given");

  const auto members = demo_members(spec);  // throws if fewer than two members
  double r_lo = 0.0;
  for (const auto& m : members) r_lo = std::max(r_lo, m.r_inner);
  SamplingFlags adjusted = sampling;
  if (adjusted.r_min < 0.0) adjusted.r_min = std::max(1e-2, r_lo > 0.0 ? r_lo * 1.02 : 1e-2);
  const SampleSet samples =
      sample_punctured_ball(n, adjusted.shells, adjusted.per_shell, adjusted.r_min, adjusted.r_max,
                            adjusted.seed);

  DemoOptions opts;
  opts.residual.tol = tol;
  opts.residual.threads = threads;
  const DemoResult res = nonuniqueness_demo(spec, samples, opts);
  write_json(res.to_json(), out);

  std::printf("%s demo problem=%s n=%d members=%zu min_pair_distance=%.6g out=%s\n",
              res.pass ? "PASS" : "FAIL", res.problem_name.c_str(), n, res.members.size(),
              res.min_pair_distance, out.c_str());
  std::printf("%-28s %16s %16s %8s\n", "solution", "max_norm_resid", "boundary_outer", "verdict");
  for (const auto& m : res.members)
    std::printf("%-28s %16.3e %16.3e %8s\n", m.map_id.c_str(), m.aggregates.max_normalized,
                m.boundary ? m.boundary->outer_max_deviation : -1.0, m.pass ? "pass" : "fail");
  for (const auto& d : res.distances)
    std::printf("distance %-20s vs %-20s sup=%.6g over %d common points\n",
                res.members[d.i].map_id.c_str(), res.members[d.j].map_id.c_str(), d.sup_distance,
                d.common_points);
  return res.pass ? kExitPass : kExitFail;
}

int run_inclusion(const FamilyFlags& fam, const SamplingFlags& sampling, const std::string& set_name,
                  std::optional<double> set_a, const std::string& det_mode_name, double tol,
                  int threads, const std::string& out) {
  const MapModel map = fam.build();
  SetSpec set;
  if (set_name == "L")
    set.kind = SetSpec::Kind::L;
  else if (set_name == "K")
    set.kind = SetSpec::Kind::K;
  else
    throw std::domain_error("--set must be L or K");

  if (det_mode_name == "nonzero")
    set.det_mode = DetMode::nonzero;
  else if (det_mode_name == "strict")
    set.det_mode = DetMode::strict_positive;
  else
    throw std::domain_error("--det-mode must be nonzero or strict");

  if (set_a) {
    set.a = *set_a;
  } else if (fam.family == "eikonal" && set.kind == SetSpec::Kind::L) {
    set.a = *fam.a;
  } else if ((fam.family == "power" || fam.family == "mu") && set.kind == SetSpec::Kind::K) {
    const double g = fam.family == "power" ? *fam.gamma : mu_gamma(*fam.mu, fam.n);
    set.a = power_dilation_constant(g, fam.n);
  } else if (fam.family == "identity") {
    set.a = fam.a ? *fam.a : static_cast<double>(fam.n);
  } else if (fam.family == "trig" && set.kind == SetSpec::Kind::L) {
    set.a = 2.0;
  } else {
    throw std::domain_error("no natural set level for this family/set pair; pass --set-a");
  }
  if (!std::isnan(tol)) set.tol = tol;

  const SampleSet samples = sampling.make(map);
  Report rep = scan_inclusion(map, samples, set, threads);
  rep.params["family"] = fam.family;
  rep.save_json(out);

  std::printf("%s inclusion map=%s set=%s a=%.9g det_mode=%s membership=%.1f%% worst_deviation=%.3e "
              "out=%s\n",
              rep.pass ? "PASS" : "FAIL", map.id.c_str(), set_name.c_str(), set.a,
              to_string(set.det_mode), 100.0 * rep.extra["membership_fraction"].get<double>(),
              rep.aggregates.max_raw, out.c_str());
  return rep.pass ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"linfty: construction and verification of nonunique solutions to L-infinity "
               "variational systems on the punctured ball"};
  app.require_subcommand(1);

  // profile
  auto* profile = app.add_subcommand("profile", "solve the radial eikonal profile ODE");
  double p_a = 0.0, p_tmin = 1e-6, p_tol = 1e-10;
  int p_n = 2;
  std::string p_out = "profile.csv";
  bool p_strict = false;
  profile->add_option("--a", p_a, "norm level (requires a > n)")->required();
  profile->add_option("--n", p_n, "space dimension");
  profile->add_option("--t-min", p_tmin, "lower end of the integration range");
  profile->add_option("--tol", p_tol, "local error tolerance");
  profile->add_option("--out", p_out, "output CSV path");
  profile->add_flag("--strict-tmin", p_strict, "fail (exit 3) when t_min is not reachable");

  // residual
  auto* residual = app.add_subcommand("residual", "pointwise operator residual scan");
  FamilyFlags r_fam;
  SamplingFlags r_sampling;
  std::string r_op, r_out = "report.json", r_csv;
  double r_tol = 1e-6;
  int r_threads = default_threads();
  residual->add_option("--op", r_op, "infinity-laplacian | q-infinity | linear")->required();
  r_fam.attach(residual);
  r_sampling.attach(residual);
  residual->add_option("--tol", r_tol, "pass bound on the max normalized residual");
  residual->add_option("--threads", r_threads, "worker threads");
  residual->add_option("--out", r_out, "report JSON path");
  residual->add_option("--csv", r_csv, "optional per-point CSV path");

  // demo
  auto* demo = app.add_subcommand("demo", "nonuniqueness demonstration for one Dirichlet problem");
  std::string d_problem, d_out = "demo.json";
  std::vector<double> d_a, d_gamma, d_mu;
  int d_n = 2, d_threads = default_threads();
  double d_tol = 1e-6;
  SamplingFlags d_sampling;
  demo->add_option("--problem", d_problem, "infinity-laplacian | q-infinity | linear")->required();
  demo->add_option("--a", d_a, "eikonal levels (comma separated)")->delimiter(',');
  demo->add_option("--gamma", d_gamma, "power exponents (comma separated)")->delimiter(',');
  demo->add_option("--mu", d_mu, "linear-system parameters (comma separated)")->delimiter(',');
  demo->add_option("--n", d_n, "space dimension");
  d_sampling.attach(demo);
  demo->add_option("--tol", d_tol, "pass bound on the max normalized residual");
  demo->add_option("--threads", d_threads, "worker threads");
  demo->add_option("--out", d_out, "demo JSON path");

  // inclusion
  auto* inclusion = app.add_subcommand("inclusion", "gradient differential-inclusion scan");
  FamilyFlags i_fam;
  SamplingFlags i_sampling;
  std::string i_set, i_det = "nonzero", i_out = "inclusion.json";
  std::optional<double> i_set_a;
  double i_tol = std::numeric_limits<double>::quiet_NaN();
  int i_threads = default_threads();
  inclusion->add_option("--set", i_set, "L | K")->required();
  i_fam.attach(inclusion);
  i_sampling.attach(inclusion);
  inclusion->add_option("--set-a", i_set_a, "set level override (defaults to the family's natural level)");
  inclusion->add_option("--det-mode", i_det, "nonzero | strict (K-set determinant sign handling)");
  inclusion->add_option("--tol", i_tol, "equality tolerance (default: adapted to evaluator accuracy)");
  inclusion->add_option("--threads", i_threads, "worker threads");
  inclusion->add_option("--out", i_out, "report JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (profile->parsed()) return run_profile(p_a, p_n, p_tmin, p_tol, p_out, p_strict);
    if (residual->parsed()) return run_residual(r_fam, r_sampling, r_op, r_tol, r_threads, r_out, r_csv);
    if (demo->parsed())
      return run_demo(d_problem, d_a, d_gamma, d_mu, d_n, d_sampling, d_tol, d_threads, d_out);
    if (inclusion->parsed())
      return run_inclusion(i_fam, i_sampling, i_set, i_set_a, i_det, i_tol, i_threads, i_out);
  } catch (const ode::SingularityError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitConfig;
}
