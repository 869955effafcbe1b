#include "servo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <variant>

namespace servo {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;
// Resolution of the coarse nearest-point scan and the refinement target.
constexpr int kCoarseScanSamples = 1024;
constexpr double kRefineTolMm = 1e-7;
// Polygonization density for perimeter/area of curved non-disk shapes.
constexpr int kPolygonizeSamples = 8192;
// Clover arc-length table resolution (intervals over one full turn).
constexpr int kCloverTableSize = 16384;

double wrap_arc_length(double s, double perimeter) {
  double r = std::fmod(s, perimeter);
  if (r < 0.0) r += perimeter;
  return r;
}

struct DiskImpl {
  Point2 center;
  double radius;
};

// Piecewise contour: circular arc plus two tangent segments. Arc length 0 is
// at polar angle pi (opposite the apex); traversal is counterclockwise.
struct TeardropImpl {
  Point2 center;
  double radius;
  double apex_half_angle;  // radians

  // Derived once at construction.
  double tangent_polar;    // polar angle of the upper tangent point
  double tangent_len;      // length of each straight segment
  Point2 apex;
  Point2 upper_touch;      // arc endpoint reached last
  Point2 lower_touch;      // arc endpoint where the first segment starts
  double arc_first_len;    // arc from polar pi to the lower touch point
  double arc_second_len;   // arc from the upper touch point back to pi
  double perimeter;
};

struct CloverImpl {
  Point2 center;
  double base_radius;
  double amplitude;
  int lobes;

  std::vector<double> cum_len;  // cumulative arc length at phi_i = i*h
  double perimeter;
};

struct PolylineImpl {
  std::vector<Point2> vertices;  // closed: front() == back()
  std::vector<double> cum_len;   // per vertex, cum_len[0] = 0
  double perimeter;
};

double clover_rho(const CloverImpl& c, double phi) {
  return c.base_radius + c.amplitude * std::cos(c.lobes * phi);
}

double clover_speed(const CloverImpl& c, double phi) {
  const double rho = clover_rho(c, phi);
  const double drho = -c.amplitude * c.lobes * std::sin(c.lobes * phi);
  return std::hypot(rho, drho);
}

ContourSample clover_sample_at_phi(const CloverImpl& c, double phi) {
  const double rho = clover_rho(c, phi);
  const double drho = -c.amplitude * c.lobes * std::sin(c.lobes * phi);
  const double cp = std::cos(phi);
  const double sp = std::sin(phi);
  const Point2 p{c.center.x + rho * cp, c.center.y + rho * sp};
  const double tx = drho * cp - rho * sp;
  const double ty = drho * sp + rho * cp;
  return {p, std::atan2(ty, tx)};
}

}  // namespace

double deg_to_rad(double deg) { return deg * kPi / 180.0; }
double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

double wrap_angle(double rad) {
  double r = std::fmod(rad + kPi, kTwoPi);
  if (r <= 0.0) r += kTwoPi;
  return r - kPi;
}

double wrap_deg(double deg) {
  double r = std::fmod(deg + 180.0, 360.0);
  if (r <= 0.0) r += 360.0;
  return r - 180.0;
}

Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
double norm(Point2 p) { return std::hypot(p.x, p.y); }
double distance(Point2 a, Point2 b) { return norm(a - b); }

bool EdgePose::within_sensor_range() const {
  return std::abs(x_mm) <= kXRangeMm && std::abs(theta_deg) <= kThetaRangeDeg;
}

struct Shape::Impl {
  std::variant<DiskImpl, TeardropImpl, CloverImpl, PolylineImpl> geom;
};

Shape::Shape(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
Shape::~Shape() = default;
Shape::Shape(const Shape& other) : impl_(std::make_unique<Impl>(*other.impl_)) {}
Shape::Shape(Shape&&) noexcept = default;
Shape& Shape::operator=(const Shape& other) {
  impl_ = std::make_unique<Impl>(*other.impl_);
  return *this;
}
Shape& Shape::operator=(Shape&&) noexcept = default;

Shape Shape::disk(Point2 center, double radius_mm) {
  if (!(radius_mm > 0.0) || !std::isfinite(radius_mm)) {
    throw ConfigError("disk radius must be positive and finite");
  }
  auto impl = std::make_unique<Impl>();
  impl->geom = DiskImpl{center, radius_mm};
  return Shape(std::move(impl));
}

Shape Shape::teardrop(Point2 center, double radius_mm,
                      double apex_half_angle_deg) {
  if (!(radius_mm > 0.0) || !std::isfinite(radius_mm)) {
    throw ConfigError("teardrop radius must be positive and finite");
  }
  if (!(apex_half_angle_deg > 0.0) || !(apex_half_angle_deg < 90.0)) {
    throw ConfigError("teardrop apex half-angle must be in (0, 90) degrees");
  }
  TeardropImpl t{};
  t.center = center;
  t.radius = radius_mm;
  t.apex_half_angle = deg_to_rad(apex_half_angle_deg);
  // Tangent lines from an apex at distance r/sin(alpha) touch the circle at
  // polar angles +-(pi/2 - alpha) measured from the apex direction (+x).
  t.tangent_polar = kPi / 2.0 - t.apex_half_angle;
  t.tangent_len = radius_mm / std::tan(t.apex_half_angle);
  const double apex_dist = radius_mm / std::sin(t.apex_half_angle);
  t.apex = center + Point2{apex_dist, 0.0};
  t.upper_touch = center + Point2{radius_mm * std::cos(t.tangent_polar),
                                  radius_mm * std::sin(t.tangent_polar)};
  t.lower_touch = center + Point2{radius_mm * std::cos(t.tangent_polar),
                                  -radius_mm * std::sin(t.tangent_polar)};
  t.arc_first_len = radius_mm * (kPi - t.tangent_polar);
  t.arc_second_len = t.arc_first_len;
  t.perimeter = t.arc_first_len + t.arc_second_len + 2.0 * t.tangent_len;

  auto impl = std::make_unique<Impl>();
  impl->geom = t;
  return Shape(std::move(impl));
}

Shape Shape::clover(Point2 center, double base_radius_mm, double amplitude_mm,
                    int lobes) {
  if (!(base_radius_mm > 0.0) || !std::isfinite(base_radius_mm)) {
    throw ConfigError("clover base radius must be positive and finite");
  }
  // The boundary value amplitude == base/4 is accepted; the contour stays
  // simple for any amplitude below the base radius, this is the documented
  // operating range.
  if (amplitude_mm < 0.0 || amplitude_mm > base_radius_mm / 4.0) {
    throw ConfigError("clover amplitude must lie in [0, base_radius/4]");
  }
  if (lobes < 2 || lobes > 12) {
    throw ConfigError("clover lobe count must lie in [2, 12]");
  }
  CloverImpl c{};
  c.center = center;
  c.base_radius = base_radius_mm;
  c.amplitude = amplitude_mm;
  c.lobes = lobes;
  // Cumulative arc length over a uniform phi grid; 5-point Gauss-Legendre per
  // interval. Queries interpolate linearly, which keeps returned points
  // exactly on the curve (only the parameterization is approximate).
  static const double kGlNodes[5] = {-0.9061798459386640, -0.5384693101056831,
                                     0.0, 0.5384693101056831,
                                     0.9061798459386640};
  static const double kGlWeights[5] = {0.2369268850561891, 0.4786286704993665,
                                       0.5688888888888889, 0.4786286704993665,
                                       0.2369268850561891};
  c.cum_len.resize(kCloverTableSize + 1);
  c.cum_len[0] = 0.0;
  const double h = kTwoPi / kCloverTableSize;
  for (int i = 0; i < kCloverTableSize; ++i) {
    const double a = i * h;
    const double mid = a + h / 2.0;
    double len = 0.0;
    for (int g = 0; g < 5; ++g) {
      len += kGlWeights[g] * clover_speed(c, mid + kGlNodes[g] * h / 2.0);
    }
    c.cum_len[i + 1] = c.cum_len[i] + len * h / 2.0;
  }
  c.perimeter = c.cum_len.back();

  auto impl = std::make_unique<Impl>();
  impl->geom = c;
  return Shape(std::move(impl));
}

Shape Shape::polyline(std::vector<Point2> vertices) {
  // Drop consecutive duplicates, then close the loop.
  std::vector<Point2> vs;
  for (const Point2& p : vertices) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw ConfigError("polyline vertices must be finite");
    }
    if (vs.empty() || distance(vs.back(), p) > 0.0) vs.push_back(p);
  }
  if (!vs.empty() && vs.size() >= 2 && distance(vs.front(), vs.back()) == 0.0) {
    vs.pop_back();
  }
  if (vs.size() < 3) {
    throw ConfigError("polyline needs at least 3 distinct vertices");
  }
  vs.push_back(vs.front());

  PolylineImpl p{};
  p.vertices = std::move(vs);
  p.cum_len.resize(p.vertices.size());
  p.cum_len[0] = 0.0;
  for (std::size_t i = 1; i < p.vertices.size(); ++i) {
    p.cum_len[i] = p.cum_len[i - 1] + distance(p.vertices[i - 1], p.vertices[i]);
  }
  p.perimeter = p.cum_len.back();
  if (!(p.perimeter > 0.0)) {
    throw ConfigError("polyline has zero perimeter");
  }

  auto impl = std::make_unique<Impl>();
  impl->geom = std::move(p);
  return Shape(std::move(impl));
}

Shape::Kind Shape::kind() const {
  switch (impl_->geom.index()) {
    case 0: return Kind::disk;
    case 1: return Kind::teardrop;
    case 2: return Kind::clover;
    default: return Kind::polyline;
  }
}

double Shape::perimeter() const {
  return std::visit(
      [](const auto& g) -> double {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, DiskImpl>) {
          return kTwoPi * g.radius;
        } else {
          return g.perimeter;
        }
      },
      impl_->geom);
}

Point2 Shape::center() const {
  return std::visit(
      [](const auto& g) -> Point2 {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, PolylineImpl>) {
          // Vertex centroid, for plotting only.
          Point2 c{0.0, 0.0};
          const std::size_t n = g.vertices.size() - 1;
          for (std::size_t i = 0; i < n; ++i) c = c + g.vertices[i];
          return {c.x / static_cast<double>(n), c.y / static_cast<double>(n)};
        } else {
          return g.center;
        }
      },
      impl_->geom);
}

double Shape::disk_radius() const {
  if (const auto* d = std::get_if<DiskImpl>(&impl_->geom)) return d->radius;
  throw Error("disk_radius() called on a non-disk shape");
}

ContourSample Shape::contour_point(double s_mm) const {
  const double p = perimeter();
  double s = wrap_arc_length(s_mm, p);

  return std::visit(
      [&](const auto& g) -> ContourSample {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, DiskImpl>) {
          const double phi = s / g.radius;
          const Point2 pt{g.center.x + g.radius * std::cos(phi),
                          g.center.y + g.radius * std::sin(phi)};
          return {pt, wrap_angle(phi + kPi / 2.0)};
        } else if constexpr (std::is_same_v<T, TeardropImpl>) {
          // Pieces in order: arc (pi -> 2*pi - tangent_polar), lower segment
          // to the apex, upper segment back, arc (tangent_polar -> pi).
          if (s < g.arc_first_len) {
            const double phi = kPi + s / g.radius;
            const Point2 pt{g.center.x + g.radius * std::cos(phi),
                            g.center.y + g.radius * std::sin(phi)};
            return {pt, wrap_angle(phi + kPi / 2.0)};
          }
          s -= g.arc_first_len;
          if (s < g.tangent_len) {
            const Point2 dir = (1.0 / g.tangent_len) * (g.apex - g.lower_touch);
            return {g.lower_touch + s * dir, std::atan2(dir.y, dir.x)};
          }
          s -= g.tangent_len;
          if (s < g.tangent_len) {
            const Point2 dir = (1.0 / g.tangent_len) * (g.upper_touch - g.apex);
            return {g.apex + s * dir, std::atan2(dir.y, dir.x)};
          }
          s -= g.tangent_len;
          const double phi = g.tangent_polar + s / g.radius;
          const Point2 pt{g.center.x + g.radius * std::cos(phi),
                          g.center.y + g.radius * std::sin(phi)};
          return {pt, wrap_angle(phi + kPi / 2.0)};
        } else if constexpr (std::is_same_v<T, CloverImpl>) {
          const auto it =
              std::upper_bound(g.cum_len.begin(), g.cum_len.end(), s);
          const std::size_t hi = std::min<std::size_t>(
              static_cast<std::size_t>(it - g.cum_len.begin()),
              g.cum_len.size() - 1);
          const std::size_t lo = hi - 1;
          const double seg = g.cum_len[hi] - g.cum_len[lo];
          const double frac = seg > 0.0 ? (s - g.cum_len[lo]) / seg : 0.0;
          const double h = kTwoPi / kCloverTableSize;
          return clover_sample_at_phi(g, (static_cast<double>(lo) + frac) * h);
        } else {
          const auto it =
              std::upper_bound(g.cum_len.begin(), g.cum_len.end(), s);
          const std::size_t hi = std::min<std::size_t>(
              static_cast<std::size_t>(it - g.cum_len.begin()),
              g.cum_len.size() - 1);
          const std::size_t lo = hi - 1;
          const Point2 a = g.vertices[lo];
          const Point2 b = g.vertices[hi];
          const double seg = g.cum_len[hi] - g.cum_len[lo];
          const double frac = seg > 0.0 ? (s - g.cum_len[lo]) / seg : 0.0;
          return {a + frac * (b - a), std::atan2(b.y - a.y, b.x - a.x)};
        }
      },
      impl_->geom);
}

EdgePoseResult local_edge_pose(const Shape& shape, const Frame2& sensor) {
  const double perimeter = shape.perimeter();
  const double step = perimeter / kCoarseScanSamples;

  // Coarse global scan, then golden-section refinement of the squared
  // distance inside the best bracket. Robust against the multiple local
  // minima near clover lobes.
  double best_s = 0.0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kCoarseScanSamples; ++i) {
    const double s = i * step;
    const Point2 p = shape.contour_point(s).point;
    const Point2 d = sensor.origin - p;
    const double d2 = dot(d, d);
    if (d2 < best_d2) {
      best_d2 = d2;
      best_s = s;
    }
  }

  auto dist2 = [&](double s) {
    const Point2 p = shape.contour_point(s).point;
    const Point2 d = sensor.origin - p;
    return dot(d, d);
  };

  constexpr double kInvPhi = 0.6180339887498949;
  double a = best_s - step;
  double b = best_s + step;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = dist2(c);
  double fd = dist2(d);
  while (b - a > kRefineTolMm) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = dist2(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = dist2(d);
    }
  }
  const double s_near = wrap_arc_length(0.5 * (a + b), perimeter);
  const ContourSample near = shape.contour_point(s_near);
  const double dist = distance(sensor.origin, near.point);
  if (dist > kContactLossMm) {
    throw ContactLost(dist);
  }

  // Outward normal is the tangent rotated -90 degrees (interior on the left
  // of counterclockwise travel).
  const Point2 outward{std::sin(near.tangent_rad), -std::cos(near.tangent_rad)};
  const double x_signed =
      dot(sensor.origin - near.point, outward) >= 0.0 ? dist : -dist;
  const double theta =
      wrap_deg(rad_to_deg(sensor.heading) - rad_to_deg(near.tangent_rad));
  return {{x_signed, theta}, s_near, dist};
}

namespace {

// Closed-polygon sums over a vertex ring (last edge closes back to front()).
double ring_length(const std::vector<Point2>& pts) {
  double len = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    len += distance(pts[i], pts[(i + 1) % pts.size()]);
  }
  return len;
}

double ring_area(const std::vector<Point2>& pts) {
  double twice = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Point2& a = pts[i];
    const Point2& b = pts[(i + 1) % pts.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return std::abs(twice) / 2.0;
}

}  // namespace

std::pair<double, double> shape_perimeter_area(const Shape& shape) {
  if (shape.kind() == Shape::Kind::disk) {
    const double r = shape.disk_radius();
    return {kTwoPi * r, kPi * r * r};
  }
  if (const auto* poly = std::get_if<PolylineImpl>(&shape.impl_->geom)) {
    // The polyline is its own polygon; vertex sums are exact.
    std::vector<Point2> ring(poly->vertices.begin(), poly->vertices.end() - 1);
    return {poly->perimeter, ring_area(ring)};
  }
  std::vector<Point2> pts;
  pts.reserve(kPolygonizeSamples);
  const double p = shape.perimeter();
  for (int i = 0; i < kPolygonizeSamples; ++i) {
    pts.push_back(
        shape.contour_point(p * i / static_cast<double>(kPolygonizeSamples))
            .point);
  }
  return {ring_length(pts), ring_area(pts)};
}

}  // namespace servo
