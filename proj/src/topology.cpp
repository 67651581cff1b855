#include "skeleform/topology.hpp"

#include <string>

#include "skeleform/error.hpp"

namespace skeleform {
namespace {

constexpr std::array<std::string_view, kNumJoints> kJointNames = {
    "nose",    "neck",   "r_shoulder", "r_elbow", "r_wrist", "l_shoulder",
    "l_elbow", "l_wrist", "r_hip",     "r_knee",  "r_ankle", "l_hip",
    "l_knee",  "l_ankle", "r_eye",     "l_eye",   "r_ear",   "l_ear",
};

constexpr std::array<std::string_view, kNumGroups> kGroupNames = {
    "head", "shoulders", "arms", "torso", "waist", "legs",
};

Topology build_default() {
  Topology t;
  t.parent = {
      neck,          // nose
      kWorldOrigin,  // neck
      neck,          // r_shoulder
      r_shoulder,    // r_elbow
      r_elbow,       // r_wrist
      neck,          // l_shoulder
      l_shoulder,    // l_elbow
      l_elbow,       // l_wrist
      neck,          // r_hip
      r_hip,         // r_knee
      r_knee,        // r_ankle
      neck,          // l_hip
      l_hip,         // l_knee
      l_knee,        // l_ankle
      nose,          // r_eye
      nose,          // l_eye
      r_eye,         // r_ear
      l_eye,         // l_ear
  };
  using G = GroupId;
  t.group = {
      G::head,       // neck->nose
      G::torso,      // root segment
      G::shoulders,  G::arms,  G::arms,   // right arm chain
      G::shoulders,  G::arms,  G::arms,   // left arm chain
      G::torso,      G::waist, G::legs,   // right leg chain
      G::torso,      G::waist, G::legs,   // left leg chain
      G::head,       G::head,  G::head,  G::head,
  };
  t.left_right_pairs = {{2, 5}, {3, 6}, {4, 7}, {8, 11}, {9, 12}, {10, 13}, {14, 15}, {16, 17}};
  t.order = {neck, nose, r_shoulder, l_shoulder, r_hip, l_hip, r_eye, l_eye, r_elbow,
             l_elbow, r_knee, l_knee, r_ear, l_ear, r_wrist, l_wrist, r_ankle, l_ankle};
  return t;
}

}  // namespace

std::string_view joint_name(std::size_t joint) { return kJointNames.at(joint); }

std::optional<std::size_t> joint_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNumJoints; ++i)
    if (kJointNames[i] == name) return i;
  return std::nullopt;
}

std::string_view group_name(GroupId group) { return kGroupNames.at(static_cast<std::size_t>(group)); }

std::size_t Topology::mirror_of(std::size_t joint) const {
  for (auto [a, b] : left_right_pairs) {
    if (a == joint) return b;
    if (b == joint) return a;
  }
  return joint;
}

const Topology& topology_default() {
  static const Topology topo = [] {
    Topology t = build_default();
    validate(t);
    return t;
  }();
  return topo;
}

void validate(const Topology& topo) {
  std::size_t roots = 0;
  for (std::size_t i = 0; i < kNumJoints; ++i) {
    if (topo.parent[i] == kWorldOrigin) {
      ++roots;
      if (i != kNeck) throw Error(ErrorCode::schema, "root must be the neck");
    } else if (topo.parent[i] < 0 || topo.parent[i] >= static_cast<int>(kNumJoints)) {
      throw Error(ErrorCode::schema, "parent index out of range", std::string(joint_name(i)));
    }
  }
  if (roots != 1) throw Error(ErrorCode::schema, "topology must have exactly one root");

  // Every joint must reach the root within kNumJoints hops (no cycles).
  for (std::size_t i = 0; i < kNumJoints; ++i) {
    int j = static_cast<int>(i);
    std::size_t hops = 0;
    while (topo.parent[j] != kWorldOrigin) {
      j = topo.parent[j];
      if (++hops > kNumJoints) throw Error(ErrorCode::schema, "cycle in parent map", std::string(joint_name(i)));
    }
  }

  std::array<bool, kNumJoints> placed{};
  for (std::size_t j : topo.order) {
    if (j >= kNumJoints || placed[j]) throw Error(ErrorCode::schema, "order is not a permutation");
    if (!topo.is_root(j) && !placed[topo.parent[j]])
      throw Error(ErrorCode::schema, "order visits a child before its parent", std::string(joint_name(j)));
    placed[j] = true;
  }

  for (auto [a, b] : topo.left_right_pairs)
    if (topo.group[a] != topo.group[b])
      throw Error(ErrorCode::schema, "left/right pair split across groups", std::string(joint_name(a)));
}

}  // namespace skeleform
