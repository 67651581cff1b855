#pragma once

#include <cmath>
#include <numbers>

#include "skeleform/deform.hpp"
#include "skeleform/keypoints.hpp"
#include "skeleform/rng.hpp"
#include "skeleform/tensor.hpp"

namespace skeleform::test {

// Fully visible pose with joints uniform in a 512 x 512 canvas.
inline KeypointSet random_pose(Rng& rng, double lo = 0.0, double hi = 512.0) {
  KeypointSet k;
  for (std::size_t i = 0; i < kNumJoints; ++i) {
    k.points[i] = {rng.uniform(lo, hi), rng.uniform(lo, hi)};
    k.visible[i] = true;
  }
  return k;
}

inline GroupFactors random_factors(Rng& rng, double lo = 0.3, double hi = 3.0) {
  std::array<double, kNumGroups> t{};
  for (double& v : t) v = std::exp(rng.uniform(std::log(lo), std::log(hi)));
  return GroupFactors(t);
}

inline ImageTensor random_tensor(Rng& rng, std::size_t c, std::size_t h, std::size_t w) {
  ImageTensor t(c, h, w);
  for (double& v : t.values()) v = rng.uniform(-1.0, 1.0);
  return t;
}

inline bool close_rel(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

inline double max_rel_diff(const KeypointSet& a, const KeypointSet& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < kNumJoints; ++i) {
    for (auto [u, v] : {std::pair{a.points[i].x, b.points[i].x}, std::pair{a.points[i].y, b.points[i].y}})
      worst = std::max(worst, std::abs(u - v) / std::max(1.0, std::abs(v)));
  }
  return worst;
}

inline double angle_diff(double a, double b) {
  double d = std::fmod(a - b, 2.0 * std::numbers::pi);
  if (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
  if (d < -std::numbers::pi) d += 2.0 * std::numbers::pi;
  return std::abs(d);
}

}  // namespace skeleform::test
