#pragma once

#include <array>
#include <cmath>

#include "skeleform/topology.hpp"

namespace skeleform {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

/// One person's 18 image-space joints. Coordinates of invisible joints carry
/// no meaning.
struct KeypointSet {
  std::array<Vec2, kNumJoints> points{};
  std::array<bool, kNumJoints> visible{};

  bool fully_visible() const {
    for (bool v : visible)
      if (!v) return false;
    return true;
  }

  friend bool operator==(const KeypointSet&, const KeypointSet&) = default;
};

}  // namespace skeleform
