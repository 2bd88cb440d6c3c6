#pragma once

#include <string>
#include <utility>
#include <vector>

#include "geoconformal/location.hpp"

namespace geocp {

// FeatureCollection of Points; each named column supplies one numeric
// property per feature. Non-finite values are emitted as JSON null.
std::string geojson_points(const std::vector<Location>& locations,
                           const std::vector<std::pair<std::string, std::vector<double>>>& columns);

}  // namespace geocp
