#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "linfty/matrix.hpp"
#include "linfty/sampling.hpp"

namespace linfty {

struct PointRecord {
  Vec x;
  double raw = std::numeric_limits<double>::quiet_NaN();
  double normalized = std::numeric_limits<double>::quiet_NaN();
  bool evaluated = false;
  bool excluded = false;        // near-interface band, kept out of aggregates
  bool near_interface = false;
  bool member = false;          // inclusion scans only
  std::string error;
};

struct Aggregates {
  double max_raw = 0.0;
  double max_normalized = 0.0;
  double mean_normalized = 0.0;
  double p99_normalized = 0.0;
  int evaluated = 0;
  int failed = 0;
  int excluded = 0;
};

/// Aggregates are a pure function of the per-point records.
inline Aggregates aggregate(const std::vector<PointRecord>& pts) {
  Aggregates a;
  std::vector<double> norms;
  for (const auto& p : pts) {
    if (p.excluded) {
      ++a.excluded;
      continue;
    }
    if (!p.evaluated) {
      ++a.failed;
      continue;
    }
    ++a.evaluated;
    a.max_raw = std::max(a.max_raw, p.raw);
    a.max_normalized = std::max(a.max_normalized, p.normalized);
    norms.push_back(p.normalized);
  }
  if (!norms.empty()) {
    double sum = 0.0;
    for (double v : norms) sum += v;
    a.mean_normalized = sum / norms.size();
    std::sort(norms.begin(), norms.end());
    const std::size_t idx = static_cast<std::size_t>(std::ceil(0.99 * norms.size())) - 1;
    a.p99_normalized = norms[std::min(idx, norms.size() - 1)];
  }
  return a;
}

struct OracleSection {
  bool applicable = false;  // false when the map's evaluators are already FD-backed
  int points = 0;
  double gradient_max_rel = 0.0;
  double hessian_max_rel = 0.0;
  bool pass = true;
};

struct BoundaryFragment {
  int outer_samples = 0;
  double outer_max_deviation = std::numeric_limits<double>::quiet_NaN();
  double inner_radius = std::numeric_limits<double>::quiet_NaN();
  double inner_max_norm = std::numeric_limits<double>::quiet_NaN();
  bool inner_at_requested_radius = true;
  bool inner_evaluated = false;
  double tol = std::numeric_limits<double>::quiet_NaN();
  bool pass = false;
};

/// Residual / inclusion / boundary statistics for one (map, check) pair,
/// serializable to the shared JSON schema and to per-point CSV.
struct Report {
  std::string map_id;
  std::string check_id;
  nlohmann::json params = nlohmann::json::object();
  int n = 0;

  int shells = 0;
  int per_shell = 0;
  double r_min = 0.0;
  double r_max = 0.0;
  std::uint64_t seed = 0;

  std::vector<PointRecord> points;
  Aggregates aggregates;
  OracleSection oracle;
  std::optional<BoundaryFragment> boundary;
  nlohmann::json tolerances = nlohmann::json::object();
  nlohmann::json extra = nlohmann::json::object();
  bool pass = false;

  void fill_sampling(const SampleSet& s) {
    n = s.n;
    shells = s.shells;
    per_shell = s.per_shell;
    r_min = s.r_min;
    r_max = s.r_max;
    seed = s.seed;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["schema"] = "linfty-report-v1";
    j["map"] = map_id;
    j["operator"] = check_id;
    j["params"] = params;
    j["n"] = n;
    j["samples"] = {{"shells", shells}, {"per_shell", per_shell}, {"r_min", r_min},
                    {"r_max", r_max},   {"seed", seed},           {"count", points.size()}};
    j["aggregates"] = {{"max_raw", aggregates.max_raw},
                       {"max_normalized", aggregates.max_normalized},
                       {"mean_normalized", aggregates.mean_normalized},
                       {"p99_normalized", aggregates.p99_normalized},
                       {"evaluated", aggregates.evaluated},
                       {"failed", aggregates.failed},
                       {"excluded_near_interface", aggregates.excluded}};
    j["oracle"] = {{"applicable", oracle.applicable},
                   {"points", oracle.points},
                   {"gradient_max_rel", oracle.gradient_max_rel},
                   {"hessian_max_rel", oracle.hessian_max_rel},
                   {"pass", oracle.pass}};
    if (boundary) {
      j["boundary"] = {{"outer_samples", boundary->outer_samples},
                       {"outer_max_deviation", boundary->outer_max_deviation},
                       {"inner_radius", boundary->inner_radius},
                       {"inner_max_norm", boundary->inner_max_norm},
                       {"inner_at_requested_radius", boundary->inner_at_requested_radius},
                       {"inner_evaluated", boundary->inner_evaluated},
                       {"tol", boundary->tol},
                       {"pass", boundary->pass}};
    }
    j["tolerances"] = tolerances;
    if (!extra.empty()) j["extra"] = extra;
    j["verdict"] = pass ? "pass" : "fail";
    return j;
  }

  void write_csv(std::ostream& os) const {
    for (int i = 0; i < n; ++i) os << "x" << i << ",";
    os << "residual,normalized_residual,member,evaluated,excluded,near_interface,error\n";
    char buf[64];
    for (const auto& p : points) {
      for (double xi : p.x) {
        std::snprintf(buf, sizeof buf, "%.17g,", xi);
        os << buf;
      }
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,", p.raw, p.normalized);
      os << buf << (p.member ? 1 : 0) << "," << (p.evaluated ? 1 : 0) << "," << (p.excluded ? 1 : 0) << ","
         << (p.near_interface ? 1 : 0) << "," << p.error << "\n";
    }
  }

  void save_json(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << to_json().dump(2) << "\n";
  }

  void save_csv(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    write_csv(f);
  }
};

}  // namespace linfty
