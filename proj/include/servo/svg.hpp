#pragma once

#include <span>
#include <string>

#include "servo/geometry.hpp"

namespace servo {

/// Trajectory (polyline) overlaid on the ideal contour (path), start marked
/// with a circle. Restricted to the path/circle/polyline SVG 1.1 elements.
std::string trajectory_svg(const Shape& ideal, std::span<const Point2> trajectory);

}  // namespace servo
