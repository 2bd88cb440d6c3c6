#pragma once

#include <string>

namespace geocp {

enum class Crs { Planar, LatLon };

std::string crs_name(Crs crs);
Crs crs_from_name(const std::string& name);

inline constexpr double kEarthRadiusMeters = 6371000.0;

// A georeferenced point. For LatLon, x is longitude and y is latitude in
// degrees; for Planar both are native map units (typically meters).
struct Location {
  double x = 0.0;
  double y = 0.0;
  Crs crs = Crs::Planar;
};

// Throws std::invalid_argument on non-finite coordinates or, for LatLon,
// coordinates outside [-180,180] x [-90,90].
void validate_location(const Location& loc);

// Planar: Euclidean distance in native units. LatLon: great-circle
// (haversine) distance in meters. Throws on CRS mismatch.
double distance(const Location& a, const Location& b);

}  // namespace geocp
