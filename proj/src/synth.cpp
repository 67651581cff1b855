#include "skeleform/synth.hpp"

#include <cmath>
#include <numbers>

#include "skeleform/error.hpp"
#include "skeleform/rng.hpp"

namespace skeleform {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Jitter ranges applied to every sample.
constexpr double kRotationBound = 0.1;  // radians
constexpr double kScaleLo = 0.8;
constexpr double kScaleHi = 1.2;
constexpr double kShiftX = 40.0;
constexpr double kShiftY = 30.0;

HumanoidTemplate build_template() {
  HumanoidTemplate t;
  // Image coordinates: +y points down, so "up" is -90 degrees.
  const auto set = [&](Joint j, double degrees, double length, double bound) {
    t.direction[j] = degrees * kDeg;
    t.length[j] = length;
    t.angle_bound[j] = bound;
  };
  set(nose, -90, 50, 0.25);
  set(r_eye, -120, 18, 0.10);
  set(l_eye, -60, 18, 0.10);
  set(r_ear, 170, 25, 0.10);
  set(l_ear, 10, 25, 0.10);
  set(r_shoulder, 180, 55, 0.12);
  set(l_shoulder, 0, 55, 0.12);
  set(r_elbow, 95, 75, 0.25);
  set(l_elbow, 85, 75, 0.25);
  set(r_wrist, 95, 65, 0.25);
  set(l_wrist, 85, 65, 0.25);
  set(r_hip, std::atan2(140.0, -30.0) / kDeg, std::hypot(140.0, 30.0), 0.05);
  set(l_hip, std::atan2(140.0, 30.0) / kDeg, std::hypot(140.0, 30.0), 0.05);
  set(r_knee, 92, 100, 0.15);
  set(l_knee, 88, 100, 0.15);
  set(r_ankle, 90, 100, 0.15);
  set(l_ankle, 90, 100, 0.15);
  return t;
}

KeypointSet place(const HumanoidTemplate& t, const std::array<double, kNumJoints>& offsets, double rotation,
                  double scale, Vec2 neck) {
  const Topology& topo = topology_default();
  KeypointSet k;
  std::array<double, kNumJoints> carried{};  // accumulated perturbation along the chain
  for (std::size_t j : topo.order) {
    k.visible[j] = true;
    if (topo.is_root(j)) {
      k.points[j] = neck;
      carried[j] = 0.0;
      continue;
    }
    const auto p = static_cast<std::size_t>(topo.parent[j]);
    carried[j] = carried[p] + offsets[j];
    const double angle = t.direction[j] + carried[j] + rotation;
    k.points[j] = k.points[p] + (scale * t.length[j]) * Vec2{std::cos(angle), std::sin(angle)};
  }
  return k;
}

}  // namespace

const HumanoidTemplate& humanoid_template() {
  static const HumanoidTemplate t = build_template();
  return t;
}

KeypointSet template_pose() {
  const HumanoidTemplate& t = humanoid_template();
  return place(t, {}, 0.0, 1.0, t.neck);
}

std::vector<KeypointSet> synth_dataset(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::invalid_argument, "synth_dataset needs n >= 1");
  const HumanoidTemplate& t = humanoid_template();
  Rng rng(seed);
  std::vector<KeypointSet> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::array<double, kNumJoints> offsets{};
    for (std::size_t j = 0; j < kNumJoints; ++j) offsets[j] = rng.uniform(-t.angle_bound[j], t.angle_bound[j]);
    const double rotation = rng.uniform(-kRotationBound, kRotationBound);
    const double scale = rng.uniform(kScaleLo, kScaleHi);
    const Vec2 neck{t.neck.x + rng.uniform(-kShiftX, kShiftX), t.neck.y + rng.uniform(-kShiftY, kShiftY)};
    out.push_back(place(t, offsets, rotation, scale, neck));
  }
  return out;
}

}  // namespace skeleform
