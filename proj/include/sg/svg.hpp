#pragma once
#include <string>
#include <utility>
#include <vector>

#include "sg/ball.hpp"
#include "sg/idla.hpp"
#include "sg/sandpile.hpp"

namespace sg {

struct RenderSpec {
  int width = 800;
  int height = 800;
  // pinned palette
  std::string occupied = "#2b6cb0";  // cluster sites inside the nominal ball
  std::string ball_only = "#e53e3e"; // nominal-ball sites the cluster missed
  std::string outer = "#dd6b20";     // cluster sites past the nominal ball
  std::string paused = "#805ad5";    // reserved for stopped-state overlays
  bool draw_r_in = true;
  bool draw_n = true;
  bool draw_r_out = true;
};

// low-level assembly: one disc marker per point, one polygon per outline.
// refuses viewports with fewer pixels than markers.
struct SvgMarker {
  double x = 0.0, y = 0.0;
  std::string color;
  double opacity = 1.0;
};
using Outline = std::vector<std::pair<double, double>>;
std::string render_svg(const std::vector<SvgMarker>& markers,
                       const std::vector<Outline>& outlines,
                       const std::vector<std::string>& outline_colors,
                       int width, int height);

// convex hull (monotone chain), counterclockwise, no repeated endpoint
Outline convex_hull(std::vector<std::pair<double, double>> pts);

// hull of B_origin(r) in the Euclidean embedding; the reference outline
Outline ball_outline(const GraphFamily& g, int r);

std::string render_ball(const Ball& b, const RenderSpec& spec);
// draws the aggregate against B_origin(nominal): misses, members, overshoot,
// plus the three reference outlines r_in, nominal, r_out
std::string render_cluster(const Cluster& c, const RenderSpec& spec);
// disc per support site, opacity tracking mass up to 1
std::string render_sandpile(const GraphFamily& g, const SandState& s,
                            const RenderSpec& spec);

} // namespace sg
