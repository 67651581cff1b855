#pragma once

#include <string>
#include <utility>
#include <vector>

#include "skeleform/keypoints.hpp"
#include "skeleform/topology.hpp"

namespace skeleform {

struct SvgStyle {
  std::string stroke_color = "#1f77b4";
  double joint_radius = 4.0;
  double opacity = 1.0;  // clamped into [0, 1] on render
};

/// Draws each pose as circles on visible joints plus a line along every
/// parent edge whose two endpoints are visible. Output is byte-stable.
std::string render_svg(const std::vector<std::pair<KeypointSet, SvgStyle>>& poses, double width, double height,
                       const Topology& topo = topology_default());

/// Default palette entry for the i-th overlaid pose.
SvgStyle default_style(std::size_t index);

}  // namespace skeleform
