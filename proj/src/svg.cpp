#include "servo/svg.hpp"

#include <algorithm>
#include <cstdio>

namespace servo {

namespace {

constexpr int kContourSamples = 1024;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

std::string trajectory_svg(const Shape& ideal,
                           std::span<const Point2> trajectory) {
  std::vector<Point2> contour;
  contour.reserve(kContourSamples);
  const double p = ideal.perimeter();
  for (int i = 0; i < kContourSamples; ++i) {
    contour.push_back(
        ideal.contour_point(p * i / static_cast<double>(kContourSamples)).point);
  }

  double min_x = contour.front().x, max_x = min_x;
  double min_y = contour.front().y, max_y = min_y;
  auto extend = [&](const Point2& q) {
    min_x = std::min(min_x, q.x);
    max_x = std::max(max_x, q.x);
    min_y = std::min(min_y, q.y);
    max_y = std::max(max_y, q.y);
  };
  for (const Point2& q : contour) extend(q);
  for (const Point2& q : trajectory) extend(q);
  const double margin = 0.05 * std::max(max_x - min_x, max_y - min_y) + 1.0;

  // World y grows upward; SVG y grows downward, so y is negated throughout.
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" +
         fmt(min_x - margin) + " " + fmt(-max_y - margin) + " " +
         fmt(max_x - min_x + 2 * margin) + " " + fmt(max_y - min_y + 2 * margin) +
         "\">\n";

  svg += "  <path d=\"M " + fmt(contour[0].x) + " " + fmt(-contour[0].y);
  for (std::size_t i = 1; i < contour.size(); ++i) {
    svg += " L " + fmt(contour[i].x) + " " + fmt(-contour[i].y);
  }
  svg += " Z\" fill=\"none\" stroke=\"#999999\" stroke-width=\"0.4\"/>\n";

  if (!trajectory.empty()) {
    svg += "  <polyline points=\"";
    for (std::size_t i = 0; i < trajectory.size(); ++i) {
      if (i > 0) svg += ' ';
      svg += fmt(trajectory[i].x) + "," + fmt(-trajectory[i].y);
    }
    svg += "\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"0.3\"/>\n";
    svg += "  <circle cx=\"" + fmt(trajectory.front().x) + "\" cy=\"" +
           fmt(-trajectory.front().y) +
           "\" r=\"0.8\" fill=\"#d62728\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace servo
