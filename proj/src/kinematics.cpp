#include "skeleform/kinematics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "skeleform/error.hpp"

namespace skeleform {
namespace {

constexpr Vec2 kPlusX{1.0, 0.0};

Vec2 rotate(Vec2 v, double radians) {
  const double c = std::cos(radians);
  const double s = std::sin(radians);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

}  // namespace

double wrap_angle(double radians) {
  double r = std::remainder(radians, 2.0 * std::numbers::pi);
  if (r <= -std::numbers::pi) r += 2.0 * std::numbers::pi;
  return r;
}

PolarPose to_polar(const KeypointSet& k, const Topology& topo) {
  for (std::size_t i = 0; i < kNumJoints; ++i)
    if (!k.visible[i])
      throw Error(ErrorCode::missing_joint, "joint '" + std::string(joint_name(i)) + "' is not visible",
                  std::string(joint_name(i)));

  PolarPose out;
  std::array<Vec2, kNumJoints> direction{};  // unit direction each child measures against
  for (std::size_t j : topo.order) {
    const bool root = topo.is_root(j);
    const Vec2 start = root ? Vec2{} : k.points[topo.parent[j]];
    const Vec2 ref = root ? kPlusX : direction[topo.parent[j]];
    const Vec2 seg = k.points[j] - start;
    const double len = norm(seg);
    if (len > 0.0) {
      out.entries[j] = {wrap_angle(std::atan2(cross(ref, seg), dot(ref, seg))), len};
      direction[j] = (1.0 / len) * seg;
    } else {
      out.entries[j] = {0.0, 0.0};
      direction[j] = ref;
    }
  }
  out.root_position = k.points[topo.root()];
  return out;
}

KeypointSet to_cartesian(const PolarPose& p, const Topology& topo) {
  KeypointSet out;
  std::array<Vec2, kNumJoints> direction{};
  for (std::size_t j : topo.order) {
    const bool root = topo.is_root(j);
    const Vec2 ref = root ? kPlusX : direction[topo.parent[j]];
    const PolarEntry& e = p.entries[j];
    const Vec2 dir = rotate(ref, e.alpha);
    direction[j] = e.length > 0.0 ? dir : ref;
    out.points[j] = root ? p.root_position : out.points[topo.parent[j]] + e.length * dir;
    out.visible[j] = true;
  }
  return out;
}

KeypointSet mirror(const KeypointSet& k, double axis_x, const Topology& topo) {
  KeypointSet out;
  for (std::size_t i = 0; i < kNumJoints; ++i) {
    const std::size_t m = topo.mirror_of(i);
    out.points[m] = {2.0 * axis_x - k.points[i].x, k.points[i].y};
    out.visible[m] = k.visible[i];
  }
  return out;
}

double mean_visible_segment_length(const KeypointSet& k, const Topology& topo) {
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < kNumJoints; ++i) {
    if (topo.is_root(i)) continue;
    const auto p = static_cast<std::size_t>(topo.parent[i]);
    if (!k.visible[i] || !k.visible[p]) continue;
    total += norm(k.points[i] - k.points[p]);
    ++count;
  }
  if (count == 0) return 1.0;
  const double mean = total / static_cast<double>(count);
  return mean > 0.0 && std::isfinite(mean) ? mean : 1.0;
}

Normalization normalize(const KeypointSet& k, const Topology& topo) {
  if (!k.visible[topo.root()]) throw Error(ErrorCode::missing_joint, "neck is not visible", "neck");
  Normalization n;
  n.offset = k.points[topo.root()];
  n.scale = mean_visible_segment_length(k, topo);
  n.pose.visible = k.visible;
  for (std::size_t i = 0; i < kNumJoints; ++i) n.pose.points[i] = (1.0 / n.scale) * (k.points[i] - n.offset);
  return n;
}

KeypointSet denormalize(const KeypointSet& k, double scale, Vec2 offset) {
  KeypointSet out;
  out.visible = k.visible;
  for (std::size_t i = 0; i < kNumJoints; ++i) out.points[i] = scale * k.points[i] + offset;
  return out;
}

}  // namespace skeleform
