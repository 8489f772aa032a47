#include "sg/svg.hpp"

#include <algorithm>
#include <cmath>

#include "sg/error.hpp"
#include "sg/io.hpp"

namespace sg {

namespace {

double cross(const std::pair<double, double>& o,
             const std::pair<double, double>& a,
             const std::pair<double, double>& b) {
  return (a.first - o.first) * (b.second - o.second) -
         (a.second - o.second) * (b.first - o.first);
}

} // namespace

Outline convex_hull(std::vector<std::pair<double, double>> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  size_t n = pts.size();
  if (n <= 2) return pts;
  Outline hull(2 * n);
  size_t k = 0;
  for (size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (size_t i = n - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

Outline ball_outline(const GraphFamily& g, int r) {
  if (r < 0) return {};
  auto b = ball(g, origin(), r);
  std::vector<std::pair<double, double>> pts;
  pts.reserve(b->members.size());
  for (const Vertex& v : b->members) pts.push_back(v.euclid());
  return convex_hull(std::move(pts));
}

std::string render_svg(const std::vector<SvgMarker>& markers,
                       const std::vector<Outline>& outlines,
                       const std::vector<std::string>& outline_colors,
                       int width, int height) {
  if (width < 1 || height < 1)
    throw DomainError("render: viewport must be positive");
  if (int64_t(width) * int64_t(height) < int64_t(markers.size()))
    throw ResourceError("render: viewport smaller than the marker count");
  if (outlines.size() != outline_colors.size())
    throw DomainError("render: outline/color count mismatch");

  double lo_x = 0.0, hi_x = 0.0, lo_y = 0.0, hi_y = 0.0;
  bool seen = false;
  auto grow = [&](double x, double y) {
    if (!seen) {
      lo_x = hi_x = x;
      lo_y = hi_y = y;
      seen = true;
      return;
    }
    lo_x = std::min(lo_x, x);
    hi_x = std::max(hi_x, x);
    lo_y = std::min(lo_y, y);
    hi_y = std::max(hi_y, y);
  };
  for (const auto& m : markers) grow(m.x, m.y);
  for (const auto& o : outlines)
    for (const auto& [x, y] : o) grow(x, y);
  if (!seen) grow(0.0, 0.0);

  double span_x = std::max(hi_x - lo_x, 1e-9);
  double span_y = std::max(hi_y - lo_y, 1e-9);
  double margin = 0.05;
  double sx = double(width) * (1.0 - 2.0 * margin) / span_x;
  double sy = double(height) * (1.0 - 2.0 * margin) / span_y;
  double scale = std::min(sx, sy);
  double off_x = double(width) * margin - lo_x * scale;
  double off_y = double(height) * margin + hi_y * scale; // y axis flips

  auto px = [&](double x) { return x * scale + off_x; };
  auto py = [&](double y) { return off_y - y * scale; };
  double radius = std::max(0.5, 0.35 * scale);

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(width) + "\" height=\"" + std::to_string(height) +
         "\" viewBox=\"0 0 " + std::to_string(width) + " " +
         std::to_string(height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  for (size_t i = 0; i < outlines.size(); ++i) {
    out += "<polygon points=\"";
    for (size_t j = 0; j < outlines[i].size(); ++j) {
      if (j) out += ' ';
      out += format_double(px(outlines[i][j].first));
      out += ',';
      out += format_double(py(outlines[i][j].second));
    }
    out += "\" fill=\"none\" stroke=\"" + outline_colors[i] +
           "\" stroke-width=\"1.5\"/>\n";
  }
  for (const auto& m : markers) {
    out += "<circle cx=\"" + format_double(px(m.x)) + "\" cy=\"" +
           format_double(py(m.y)) + "\" r=\"" + format_double(radius) +
           "\" fill=\"" + m.color + "\"";
    if (m.opacity < 1.0)
      out += " fill-opacity=\"" + format_double(m.opacity) + "\"";
    out += "/>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string render_ball(const Ball& b, const RenderSpec& spec) {
  std::vector<SvgMarker> markers;
  markers.reserve(b.members.size());
  for (size_t i = 0; i < b.members.size(); ++i) {
    auto [x, y] = b.members[i].euclid();
    markers.push_back(
        {x, y, b.inner_bdy[i] ? spec.ball_only : spec.occupied, 1.0});
  }
  std::vector<Outline> outlines;
  std::vector<std::string> colors;
  if (spec.draw_n) {
    outlines.push_back(ball_outline(b.family, b.radius));
    colors.push_back("#222222");
  }
  return render_svg(markers, outlines, colors, spec.width, spec.height);
}

std::string render_cluster(const Cluster& c, const RenderSpec& spec) {
  RadiusStats rs = radii(c);
  auto nominal = ball(c.family, origin(), rs.nominal);

  std::vector<SvgMarker> markers;
  for (const Vertex& v : nominal->members) {
    auto [x, y] = v.euclid();
    markers.push_back(
        {x, y, c.contains(v) ? spec.occupied : spec.ball_only, 1.0});
  }
  std::vector<Vertex> overshoot;
  for (uint64_t key : c.occupied) {
    Vertex v = Vertex::from_key(key);
    if (!nominal->contains(v)) overshoot.push_back(v);
  }
  std::sort(overshoot.begin(), overshoot.end(), vertex_less);
  for (const Vertex& v : overshoot) {
    auto [x, y] = v.euclid();
    markers.push_back({x, y, spec.outer, 1.0});
  }

  std::vector<Outline> outlines;
  std::vector<std::string> colors;
  if (spec.draw_r_in) {
    outlines.push_back(ball_outline(c.family, int(rs.r_in)));
    colors.push_back("#2f855a");
  }
  if (spec.draw_n) {
    outlines.push_back(ball_outline(c.family, rs.nominal));
    colors.push_back("#222222");
  }
  if (spec.draw_r_out) {
    outlines.push_back(ball_outline(c.family, int(rs.r_out)));
    colors.push_back("#9b2c2c");
  }
  return render_svg(markers, outlines, colors, spec.width, spec.height);
}

std::string render_sandpile(const GraphFamily& g, const SandState& s,
                            const RenderSpec& spec) {
  (void)g;
  std::vector<uint64_t> keys;
  keys.reserve(s.mass.size());
  for (const auto& [k, v] : s.mass)
    if (v > 0.0) keys.push_back(k);
  std::sort(keys.begin(), keys.end(), [](uint64_t x, uint64_t y) {
    return vertex_less(Vertex::from_key(x), Vertex::from_key(y));
  });
  std::vector<SvgMarker> markers;
  markers.reserve(keys.size());
  for (uint64_t k : keys) {
    Vertex v = Vertex::from_key(k);
    auto [x, y] = v.euclid();
    double m = s.mass_at(v);
    markers.push_back({x, y, spec.occupied, std::clamp(m, 0.05, 1.0)});
  }
  return render_svg(markers, {}, {}, spec.width, spec.height);
}

} // namespace sg
