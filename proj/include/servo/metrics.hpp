#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "servo/geometry.hpp"

namespace servo {

struct CircleRef {
  Point2 center;
  double radius{};
};

struct MaeMse {
  double mae{};
  double mse{};
};

/// Per point: delta = |R - d(center, p_i)|; returns (mean delta, mean delta^2).
MaeMse mae_mse_circle(std::span<const Point2> trajectory, const CircleRef& ref);

/// Cox-style regularity score (P^2/A) * (A_est/P_est^2) * 100 with (P, A)
/// taken from the ideal shape, so non-circular ideals score against their own
/// compactness. The trajectory is closed by appending the first point when
/// the closing gap exceeds 1e-6 mm. Can exceed 100 when the estimate is more
/// compact than the ideal. Throws on fewer than 3 points or zero area.
double s100(std::span<const Point2> trajectory, const Shape& ideal);

struct MetricReport {
  std::optional<double> mae_mm;   // circle metrics, disk ideals only
  std::optional<double> mse_mm2;
  double s100_percent{};
  std::size_t n_points{};
  double perimeter_est_mm{};
  double area_est_mm2{};
};

/// Full report against an ideal shape; mae/mse filled when the ideal is a
/// disk. Verifies mse >= mae^2 as an internal consistency check.
MetricReport evaluate_trajectory(std::span<const Point2> trajectory,
                                 const Shape& ideal);

std::string metric_report_json(const MetricReport& report);

// Shared polygon helpers.
double closed_polyline_length(std::span<const Point2> points);
double shoelace_area(std::span<const Point2> points);  // absolute value

}  // namespace servo
