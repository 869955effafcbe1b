#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "servo/errors.hpp"

namespace servo {

// Valid sensing ranges of the emulated sensor. Poses outside are still
// representable, but flagged.
constexpr double kXRangeMm = 5.0;
constexpr double kThetaRangeDeg = 45.0;
// Beyond this distance from the contour the sensor reports contact loss.
constexpr double kContactLossMm = 20.0;

double deg_to_rad(double deg);
double rad_to_deg(double rad);
double wrap_angle(double rad);  // to (-pi, pi]
double wrap_deg(double deg);    // to (-180, 180]

struct Point2 {
  double x{};
  double y{};
};

Point2 operator+(Point2 a, Point2 b);
Point2 operator-(Point2 a, Point2 b);
Point2 operator*(double s, Point2 p);
double dot(Point2 a, Point2 b);
double norm(Point2 p);
double distance(Point2 a, Point2 b);

/// Sensor pose in the world: position plus direction of travel.
struct Frame2 {
  Point2 origin;
  double heading{};  // radians, kept in (-pi, pi]
};

/// Local pose of the sensor relative to the nearest contour point:
/// signed normal offset (positive outward) and yaw misalignment.
struct EdgePose {
  double x_mm{};
  double theta_deg{};

  bool within_sensor_range() const;
};

struct ContourSample {
  Point2 point;
  double tangent_rad;  // direction of counterclockwise travel
};

/// Closed 2D contour. Parameterized by arc length, counterclockwise,
/// interior on the left of the direction of travel.
class Shape {
 public:
  enum class Kind { disk, teardrop, clover, polyline };

  static Shape disk(Point2 center, double radius_mm);
  /// Circle of `radius_mm` plus the two tangent lines from an external apex
  /// point; `apex_half_angle_deg` is half the opening angle at the apex.
  /// Arc length 0 lies on the arc diametrically opposite the apex.
  static Shape teardrop(Point2 center, double radius_mm,
                        double apex_half_angle_deg);
  /// Radial perturbation contour rho(phi) = base + amplitude*cos(lobes*phi).
  static Shape clover(Point2 center, double base_radius_mm,
                      double amplitude_mm, int lobes);
  /// Closed polygon; the first vertex is appended if the loop is open.
  static Shape polyline(std::vector<Point2> vertices);

  Kind kind() const;
  double perimeter() const;
  /// Point and tangent at arc length s (any real; wrapped modulo perimeter).
  ContourSample contour_point(double s_mm) const;

  // Parameters, echoed into reports and plots.
  Point2 center() const;
  double disk_radius() const;  // valid for Kind::disk only

  ~Shape();
  Shape(const Shape&);
  Shape(Shape&&) noexcept;
  Shape& operator=(const Shape&);
  Shape& operator=(Shape&&) noexcept;

 private:
  struct Impl;
  explicit Shape(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;

  friend std::pair<double, double> shape_perimeter_area(const Shape& shape);
};

struct EdgePoseResult {
  EdgePose pose;
  double nearest_s_mm;
  double distance_mm;
};

/// Ground-truth local edge pose of `sensor` relative to `shape`.
/// Throws ContactLost if the sensor is farther than kContactLossMm from the
/// contour.
EdgePoseResult local_edge_pose(const Shape& shape, const Frame2& sensor);

/// Perimeter and enclosed area. Analytic for the disk, exact vertex sums for
/// polylines, dense polygonization otherwise.
std::pair<double, double> shape_perimeter_area(const Shape& shape);

}  // namespace servo
