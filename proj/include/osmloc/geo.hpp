#pragma once

#include <cmath>

namespace osmloc {

inline constexpr double kPi = 3.14159265358979323846;

// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

// Absolute angular difference wrapped to [0, pi].
inline double angle_abs_diff(double a, double b) {
  return std::abs(wrap_angle(a - b));
}

struct GeoPoint {
  double lat = 0.0;  // degrees, [-90, 90]
  double lon = 0.0;  // degrees, [-180, 180]
};

// Position in the local tangent plane, meters. x points East, y points North.
struct LocalPoint {
  double x = 0.0;
  double y = 0.0;
};

// Planar 3-DoF pose. theta is the heading measured counterclockwise from the
// +x (East) axis, wrapped to (-pi, pi]; theta = pi/2 faces North.
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  // Unit forward direction (cos theta, sin theta).
  double fx() const { return std::cos(theta); }
  double fy() const { return std::sin(theta); }
  // Unit rightward direction, perpendicular to forward.
  double rx() const { return std::sin(theta); }
  double ry() const { return -std::cos(theta); }
};

// Equirectangular tangent-plane frame anchored at `origin`. Valid within
// roughly one degree of the origin; both scale factors are strictly positive.
struct LocalFrame {
  GeoPoint origin;
  double meters_per_degree_lat = 0.0;
  double meters_per_degree_lon = 0.0;
};

LocalFrame make_local_frame(const GeoPoint& origin);

// Projects `p` into the local frame: x east-meters, y north-meters.
// Throws OutOfCoverageError when |p - origin| exceeds the validity radius.
LocalPoint project_to_local(const GeoPoint& p, const LocalFrame& frame);

// Exact inverse of project_to_local.
GeoPoint unproject_to_geo(const LocalPoint& p, const LocalFrame& frame);

}  // namespace osmloc
