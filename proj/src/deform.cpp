#include "skeleform/deform.hpp"

#include <cmath>
#include <string>

#include "skeleform/error.hpp"

namespace skeleform {

GroupFactors::GroupFactors(const std::array<double, kNumGroups>& tau) : tau_(tau) {
  for (std::size_t g = 0; g < kNumGroups; ++g)
    if (!std::isfinite(tau_[g]) || tau_[g] <= 0.0)
      throw Error(ErrorCode::invalid_factors,
                  "factor for group '" + std::string(group_name(static_cast<GroupId>(g))) +
                      "' must be finite and positive",
                  std::string(group_name(static_cast<GroupId>(g))));
}

GroupLengths group_lengths(const PolarPose& p, const Topology& topo) {
  GroupLengths out{};
  for (std::size_t i = 0; i < kNumJoints; ++i) {
    if (topo.is_root(i)) continue;
    out[static_cast<std::size_t>(topo.group[i])] += p.entries[i].length;
  }
  return out;
}

PolarPose scale_groups(const PolarPose& p, const std::array<double, kNumGroups>& multipliers,
                       const Topology& topo) {
  PolarPose out = p;
  for (std::size_t i = 0; i < kNumJoints; ++i) {
    if (topo.is_root(i)) continue;
    out.entries[i].length *= multipliers[static_cast<std::size_t>(topo.group[i])];
  }
  return out;
}

KeypointSet deform(const KeypointSet& person, const GroupFactors& tau_p, const GroupFactors& tau_a,
                   const Topology& topo) {
  std::array<double, kNumGroups> ratio{};
  for (std::size_t g = 0; g < kNumGroups; ++g) ratio[g] = tau_a[g] / tau_p[g];
  return to_cartesian(scale_groups(to_polar(person, topo), ratio, topo), topo);
}

KeypointSet deform_naive(const KeypointSet& person, const KeypointSet& art, const Topology& topo) {
  PolarPose p = to_polar(person, topo);
  const PolarPose a = to_polar(art, topo);
  for (std::size_t i = 0; i < kNumJoints; ++i)
    if (!topo.is_root(i)) p.entries[i].length = a.entries[i].length;
  return to_cartesian(p, topo);
}

}  // namespace skeleform
