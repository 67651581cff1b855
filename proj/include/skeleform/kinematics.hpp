#pragma once

#include <array>

#include "skeleform/keypoints.hpp"
#include "skeleform/topology.hpp"

namespace skeleform {

struct PolarEntry {
  double alpha = 0.0;   // radians in (-pi, pi]
  double length = 0.0;  // pixels
  friend bool operator==(const PolarEntry&, const PolarEntry&) = default;
};

/// Tree parameterization of a pose: per joint, the signed angle from the
/// parent segment's direction to the joint's own segment, and that segment's
/// length. Angles are counterclockwise-positive on raw image coordinates.
struct PolarPose {
  std::array<PolarEntry, kNumJoints> entries{};
  Vec2 root_position{};
  friend bool operator==(const PolarPose&, const PolarPose&) = default;
};

/// Wraps an angle into (-pi, pi].
double wrap_angle(double radians);

/// Inverse kinematics. Requires every joint visible (Error missing_joint).
/// A zero-length parent segment is skipped when measuring a child's angle:
/// the reference falls back to the nearest ancestor with nonzero length, then
/// to the +x axis.
PolarPose to_polar(const KeypointSet& k, const Topology& topo = topology_default());

/// Forward kinematics, root outward. The neck is placed at root_position.
KeypointSet to_cartesian(const PolarPose& p, const Topology& topo = topology_default());

/// Reflects x about axis_x and swaps left/right joint slots.
KeypointSet mirror(const KeypointSet& k, double axis_x, const Topology& topo = topology_default());

struct Normalization {
  KeypointSet pose;
  double scale = 1.0;
  Vec2 offset{};
};

/// Mean length over non-root segments whose two endpoints are visible;
/// 1.0 when nothing is measurable.
double mean_visible_segment_length(const KeypointSet& k, const Topology& topo = topology_default());

/// Moves the neck to the origin and divides by mean_visible_segment_length.
/// Requires a visible neck (Error missing_joint).
Normalization normalize(const KeypointSet& k, const Topology& topo = topology_default());

KeypointSet denormalize(const KeypointSet& k, double scale, Vec2 offset);

}  // namespace skeleform
