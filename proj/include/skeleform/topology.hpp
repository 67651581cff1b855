#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace skeleform {

inline constexpr std::size_t kNumJoints = 18;
inline constexpr std::size_t kNumGroups = 6;
inline constexpr std::size_t kNeck = 1;
/// Parent index used for the root; stands for the world origin (0, 0).
inline constexpr int kWorldOrigin = -1;

// OpenPose BODY-18 order.
enum Joint : std::size_t {
  nose = 0,
  neck = 1,
  r_shoulder = 2,
  r_elbow = 3,
  r_wrist = 4,
  l_shoulder = 5,
  l_elbow = 6,
  l_wrist = 7,
  r_hip = 8,
  r_knee = 9,
  r_ankle = 10,
  l_hip = 11,
  l_knee = 12,
  l_ankle = 13,
  r_eye = 14,
  l_eye = 15,
  r_ear = 16,
  l_ear = 17,
};

enum class GroupId : std::size_t { head = 0, shoulders = 1, arms = 2, torso = 3, waist = 4, legs = 5 };

std::string_view joint_name(std::size_t joint);
std::optional<std::size_t> joint_from_name(std::string_view name);
std::string_view group_name(GroupId group);

/// Segment hierarchy over the 18 joints. Joint i owns the segment running
/// from parent(i) to i; the neck owns the segment from the world origin.
struct Topology {
  std::array<int, kNumJoints> parent{};
  std::array<GroupId, kNumJoints> group{};
  std::vector<std::pair<std::size_t, std::size_t>> left_right_pairs;
  /// Joints ordered so every parent precedes its children.
  std::array<std::size_t, kNumJoints> order{};

  std::size_t root() const { return kNeck; }
  bool is_root(std::size_t joint) const { return parent[joint] == kWorldOrigin; }
  /// Index of the mirrored counterpart, or the joint itself if unpaired.
  std::size_t mirror_of(std::size_t joint) const;
};

/// Neck-rooted tree: nose<-neck, eyes<-nose, ears<-eyes, shoulders<-neck,
/// elbows<-shoulders, wrists<-elbows, hips<-neck, knees<-hips, ankles<-knees.
const Topology& topology_default();

/// Throws Error(schema) if the parent map is not a single tree rooted at the
/// neck or a left/right pair straddles two groups.
void validate(const Topology& topo);

}  // namespace skeleform
