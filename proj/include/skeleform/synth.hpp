#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "skeleform/keypoints.hpp"

namespace skeleform {

/// Canonical standing humanoid used by the synthetic generator.
struct HumanoidTemplate {
  std::array<double, kNumJoints> direction{};  // absolute image-space angle of each segment (radians)
  std::array<double, kNumJoints> length{};     // pixels; the neck entry is unused
  std::array<double, kNumJoints> angle_bound{};  // half-width of the uniform joint-angle perturbation
  Vec2 neck{256.0, 140.0};
};

const HumanoidTemplate& humanoid_template();

/// The unperturbed template pose.
KeypointSet template_pose();

/// `n` fully visible poses: template segment lengths, every joint angle
/// perturbed uniformly within its bound (the perturbation carries down the
/// chain), then a global rotation, scale and translation jitter about the neck.
std::vector<KeypointSet> synth_dataset(std::size_t n, std::uint64_t seed);

}  // namespace skeleform
