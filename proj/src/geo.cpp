#include "osmloc/geo.hpp"

#include <cmath>

#include "osmloc/error.hpp"

namespace osmloc {

namespace {
// WGS84 degree lengths as truncated series in the geodetic latitude.
double degree_length_lat(double lat_deg) {
  const double phi = lat_deg * kPi / 180.0;
  return 111132.954 - 559.822 * std::cos(2.0 * phi) + 1.175 * std::cos(4.0 * phi);
}

double degree_length_lon(double lat_deg) {
  const double phi = lat_deg * kPi / 180.0;
  return 111412.84 * std::cos(phi) - 93.5 * std::cos(3.0 * phi) + 0.118 * std::cos(5.0 * phi);
}
}  // namespace

LocalFrame make_local_frame(const GeoPoint& origin) {
  if (origin.lat < -90.0 || origin.lat > 90.0 || origin.lon < -180.0 || origin.lon > 180.0) {
    throw DataError("local frame origin out of geographic range");
  }
  LocalFrame f;
  f.origin = origin;
  f.meters_per_degree_lat = degree_length_lat(origin.lat);
  f.meters_per_degree_lon = degree_length_lon(origin.lat);
  if (f.meters_per_degree_lat <= 0.0 || f.meters_per_degree_lon <= 0.0) {
    throw DataError("degenerate local frame (origin too close to a pole)");
  }
  return f;
}

LocalPoint project_to_local(const GeoPoint& p, const LocalFrame& frame) {
  if (std::abs(p.lat - frame.origin.lat) >= 1.0 || std::abs(p.lon - frame.origin.lon) >= 1.0) {
    throw OutOfCoverageError("point outside the tangent-plane validity radius");
  }
  return LocalPoint{(p.lon - frame.origin.lon) * frame.meters_per_degree_lon,
                    (p.lat - frame.origin.lat) * frame.meters_per_degree_lat};
}

GeoPoint unproject_to_geo(const LocalPoint& p, const LocalFrame& frame) {
  return GeoPoint{frame.origin.lat + p.y / frame.meters_per_degree_lat,
                  frame.origin.lon + p.x / frame.meters_per_degree_lon};
}

}  // namespace osmloc
