#include "servo/metrics.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "json.hpp"

namespace servo {

namespace {
constexpr double kClosureGapMm = 1e-6;
}

MaeMse mae_mse_circle(std::span<const Point2> trajectory,
                      const CircleRef& ref) {
  if (trajectory.empty()) {
    throw Error("mae_mse_circle: empty trajectory");
  }
  double mae = 0.0, mse = 0.0;
  for (const Point2& p : trajectory) {
    const double delta = std::abs(ref.radius - distance(ref.center, p));
    mae += delta;
    mse += delta * delta;
  }
  const double n = static_cast<double>(trajectory.size());
  return {mae / n, mse / n};
}

double closed_polyline_length(std::span<const Point2> points) {
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    len += distance(points[i], points[i + 1]);
  }
  return len;
}

double shoelace_area(std::span<const Point2> points) {
  double twice = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    twice += points[i].x * points[i + 1].y - points[i + 1].x * points[i].y;
  }
  return std::abs(twice) / 2.0;
}

namespace {

// Closed copy of the trajectory: the first point is appended when the run
// terminated near, but not exactly on, its start.
std::vector<Point2> closed_copy(std::span<const Point2> trajectory) {
  std::vector<Point2> pts(trajectory.begin(), trajectory.end());
  if (distance(pts.front(), pts.back()) > kClosureGapMm) {
    pts.push_back(pts.front());
  }
  return pts;
}

}  // namespace

double s100(std::span<const Point2> trajectory, const Shape& ideal) {
  if (trajectory.size() < 3) {
    throw Error("s100: need at least 3 trajectory points");
  }
  const std::vector<Point2> pts = closed_copy(trajectory);
  const double p_est = closed_polyline_length(pts);
  const double a_est = shoelace_area(pts);
  if (a_est == 0.0) {
    throw Error("s100: degenerate trajectory with zero enclosed area");
  }
  const auto [p_ideal, a_ideal] = shape_perimeter_area(ideal);
  return (p_ideal * p_ideal / a_ideal) * (a_est / (p_est * p_est)) * 100.0;
}

MetricReport evaluate_trajectory(std::span<const Point2> trajectory,
                                 const Shape& ideal) {
  MetricReport report;
  report.n_points = trajectory.size();
  const std::vector<Point2> pts = closed_copy(trajectory);
  report.perimeter_est_mm = closed_polyline_length(pts);
  report.area_est_mm2 = shoelace_area(pts);
  report.s100_percent = s100(trajectory, ideal);
  if (ideal.kind() == Shape::Kind::disk) {
    const MaeMse m =
        mae_mse_circle(trajectory, {ideal.center(), ideal.disk_radius()});
    if (m.mse + 1e-12 < m.mae * m.mae) {
      throw Error("metric consistency violated: mse < mae^2");
    }
    report.mae_mm = m.mae;
    report.mse_mm2 = m.mse;
  }
  return report;
}

std::string metric_report_json(const MetricReport& report) {
  nlohmann::json j;
  if (report.mae_mm) j["mae_mm"] = *report.mae_mm;
  if (report.mse_mm2) j["mse_mm2"] = *report.mse_mm2;
  j["s100_percent"] = report.s100_percent;
  j["n_points"] = report.n_points;
  j["perimeter_est_mm"] = report.perimeter_est_mm;
  j["area_est_mm2"] = report.area_est_mm2;
  return j.dump(2) + "\n";
}

}  // namespace servo
