#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "linfty/matrix.hpp"

namespace linfty {

namespace detail_rng {

inline double uniform01(std::mt19937_64& rng) {
  return (rng() >> 11) * 0x1.0p-53;  // 53 uniform bits, reproducible across platforms
}

// Box-Muller; avoids std::normal_distribution whose stream is implementation-defined.
inline double normal(std::mt19937_64& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline Vec direction(int n, std::mt19937_64& rng) {
  Vec d(n);
  double r = 0.0;
  do {
    for (int i = 0; i < n; ++i) d[i] = normal(rng);
    r = norm(d);
  } while (r < 1e-12);
  for (int i = 0; i < n; ++i) d[i] /= r;
  return d;
}

}  // namespace detail_rng

/// Deterministic quasi-uniform sample of the annulus r_min <= |x| <= r_max,
/// organized as concentric shells. Identical (n, shells, per_shell, radii,
/// seed) always reproduce the identical point list.
struct SampleSet {
  int n = 0;
  int shells = 0;
  int per_shell = 0;
  double r_min = 0.0;
  double r_max = 0.0;
  std::uint64_t seed = 0;
  std::vector<Vec> points;
};

inline SampleSet sample_punctured_ball(int n, int shells, int per_shell, double r_min, double r_max,
                                       std::uint64_t seed) {
  if (n < 1) throw std::domain_error("sample_punctured_ball: n must be positive");
  if (shells < 1 || per_shell < 1) throw std::domain_error("sample_punctured_ball: empty sampling spec");
  if (!(r_min > 0.0) || !(r_max >= r_min) || !(r_max < 1.0 + 1e-12))
    throw std::domain_error("sample_punctured_ball: radii must satisfy 0 < r_min <= r_max <= 1");

  SampleSet s{.n = n, .shells = shells, .per_shell = per_shell,
              .r_min = r_min, .r_max = r_max, .seed = seed, .points = {}};
  s.points.reserve(static_cast<std::size_t>(shells) * per_shell);
  std::mt19937_64 rng(seed);
  const double golden = 0.6180339887498949;
  const double phase0 = detail_rng::uniform01(rng);

  for (int k = 0; k < shells; ++k) {
    const double r = shells == 1 ? r_min : r_min + (r_max - r_min) * k / (shells - 1.0);
    if (n == 2) {
      const double phase = phase0 + golden * k;
      for (int j = 0; j < per_shell; ++j) {
        const double th = 2.0 * M_PI * (j + phase) / per_shell;
        s.points.push_back(Vec{r * std::cos(th), r * std::sin(th)});
      }
    } else {
      for (int j = 0; j < per_shell; ++j) {
        Vec d = detail_rng::direction(n, rng);
        s.points.push_back(r * d);
      }
    }
  }
  return s;
}

/// count deterministic points on the sphere |x| = radius.
inline std::vector<Vec> sphere_points(int n, double radius, int count, std::uint64_t seed) {
  if (n < 1 || count < 1) throw std::domain_error("sphere_points: invalid spec");
  std::vector<Vec> pts;
  pts.reserve(count);
  std::mt19937_64 rng(seed);
  if (n == 2) {
    const double phase = detail_rng::uniform01(rng);
    for (int j = 0; j < count; ++j) {
      const double th = 2.0 * M_PI * (j + phase) / count;
      pts.push_back(Vec{radius * std::cos(th), radius * std::sin(th)});
    }
  } else {
    for (int j = 0; j < count; ++j) pts.push_back(radius * detail_rng::direction(n, rng));
  }
  return pts;
}

}  // namespace linfty
