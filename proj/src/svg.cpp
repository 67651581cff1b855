#include "skeleform/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <string_view>

namespace skeleform {
namespace {

std::string num(double v) {
  if (!std::isfinite(v)) v = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s(buf);
  // Trim trailing zeros so integral coordinates stay short.
  s.erase(s.find_last_not_of('0') + 1);
  if (s.back() == '.') s.pop_back();
  if (s == "-0") s = "0";
  return s;
}

std::string escape_attr(std::string_view in) {
  std::string out;
  for (char c : in) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

SvgStyle default_style(std::size_t index) {
  static constexpr std::array<std::string_view, 6> kPalette = {"#1f77b4", "#d62728", "#2ca02c",
                                                               "#ff7f0e", "#9467bd", "#8c564b"};
  SvgStyle s;
  s.stroke_color = kPalette[index % kPalette.size()];
  return s;
}

std::string render_svg(const std::vector<std::pair<KeypointSet, SvgStyle>>& poses, double width, double height,
                       const Topology& topo) {
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(width) + "\" height=\"" +
         num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\">\n";
  for (std::size_t p = 0; p < poses.size(); ++p) {
    const auto& [k, style] = poses[p];
    const std::string color = escape_attr(style.stroke_color);
    const double opacity = std::clamp(std::isfinite(style.opacity) ? style.opacity : 1.0, 0.0, 1.0);
    out += "  <g id=\"pose" + std::to_string(p) + "\" stroke=\"" + color + "\" fill=\"" + color +
           "\" opacity=\"" + num(opacity) + "\" stroke-width=\"2\" stroke-linecap=\"round\">\n";
    for (std::size_t j : topo.order) {
      if (topo.is_root(j)) continue;
      const auto parent = static_cast<std::size_t>(topo.parent[j]);
      if (!k.visible[j] || !k.visible[parent]) continue;
      const Vec2 a = k.points[parent];
      const Vec2 b = k.points[j];
      out += "    <line x1=\"" + num(a.x) + "\" y1=\"" + num(a.y) + "\" x2=\"" + num(b.x) + "\" y2=\"" + num(b.y) +
             "\"/>\n";
    }
    for (std::size_t j = 0; j < kNumJoints; ++j) {
      if (!k.visible[j]) continue;
      out += "    <circle cx=\"" + num(k.points[j].x) + "\" cy=\"" + num(k.points[j].y) + "\" r=\"" +
             num(style.joint_radius) + "\"><title>" + std::string(joint_name(j)) + "</title></circle>\n";
    }
    out += "  </g>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace skeleform
