#pragma once

#include <array>
#include <span>
#include <vector>

#include "skeleform/keypoints.hpp"
#include "skeleform/kinematics.hpp"
#include "skeleform/topology.hpp"

namespace skeleform {

/// Six per-group body-ratio factors, indexed by GroupId.
class GroupFactors {
 public:
  GroupFactors() { tau_.fill(1.0); }
  /// Throws Error(invalid_factors) unless every entry is finite and > 0.
  explicit GroupFactors(const std::array<double, kNumGroups>& tau);

  double operator[](GroupId g) const { return tau_[static_cast<std::size_t>(g)]; }
  double operator[](std::size_t g) const { return tau_[g]; }
  const std::array<double, kNumGroups>& values() const { return tau_; }

  friend bool operator==(const GroupFactors&, const GroupFactors&) = default;

 private:
  std::array<double, kNumGroups> tau_;
};

/// Per-group sums of segment lengths; the root segment is not counted.
using GroupLengths = std::array<double, kNumGroups>;

GroupLengths group_lengths(const PolarPose& p, const Topology& topo = topology_default());

/// Retargets `person` to another body ratio: every non-root segment length is
/// multiplied by tau_a[g] / tau_p[g] for its group g. Angles and the neck
/// position are kept. Requires a fully visible person.
KeypointSet deform(const KeypointSet& person, const GroupFactors& tau_p, const GroupFactors& tau_a,
                   const Topology& topo = topology_default());

/// Baseline retargeting: the person's angles with the art pose's per-segment
/// lengths. The root segment (global placement) stays the person's.
KeypointSet deform_naive(const KeypointSet& person, const KeypointSet& art,
                         const Topology& topo = topology_default());

/// Scales non-root segment lengths of a polar pose by per-group multipliers.
PolarPose scale_groups(const PolarPose& p, const std::array<double, kNumGroups>& multipliers,
                       const Topology& topo = topology_default());

}  // namespace skeleform
