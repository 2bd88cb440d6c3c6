#include "geoconformal/location.hpp"

#include <cmath>
#include <stdexcept>

namespace geocp {

std::string crs_name(Crs crs) {
  return crs == Crs::Planar ? "planar" : "latlon";
}

Crs crs_from_name(const std::string& name) {
  if (name == "planar") return Crs::Planar;
  if (name == "latlon") return Crs::LatLon;
  throw std::invalid_argument("unknown CRS '" + name + "' (expected 'planar' or 'latlon')");
}

void validate_location(const Location& loc) {
  if (!std::isfinite(loc.x) || !std::isfinite(loc.y)) {
    throw std::invalid_argument("location coordinates must be finite");
  }
  if (loc.crs == Crs::LatLon) {
    if (loc.x < -180.0 || loc.x > 180.0 || loc.y < -90.0 || loc.y > 90.0) {
      throw std::invalid_argument("lat/lon location out of range: lon=" + std::to_string(loc.x) +
                                  " lat=" + std::to_string(loc.y));
    }
  }
}

namespace {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

double haversine_meters(const Location& a, const Location& b) {
  const double lat1 = a.y * kDegToRad;
  const double lat2 = b.y * kDegToRad;
  const double dlat = (b.y - a.y) * kDegToRad;
  const double dlon = (b.x - a.x) * kDegToRad;
  const double s1 = std::sin(dlat / 2.0);
  const double s2 = std::sin(dlon / 2.0);
  const double h = s1 * s1 + std::cos(lat1) * std::cos(lat2) * s2 * s2;
  return 2.0 * kEarthRadiusMeters * std::asin(std::min(1.0, std::sqrt(h)));
}

}  // namespace

double distance(const Location& a, const Location& b) {
  if (a.crs != b.crs) {
    throw std::invalid_argument("CRS mismatch: " + crs_name(a.crs) + " vs " + crs_name(b.crs));
  }
  if (a.crs == Crs::Planar) {
    return std::hypot(a.x - b.x, a.y - b.y);
  }
  if (a.x == b.x && a.y == b.y) return 0.0;
  return haversine_meters(a, b);
}

}  // namespace geocp
