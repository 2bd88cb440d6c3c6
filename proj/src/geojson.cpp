#include "geoconformal/geojson.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace geocp {

std::string geojson_points(
    const std::vector<Location>& locations,
    const std::vector<std::pair<std::string, std::vector<double>>>& columns) {
  for (const auto& [name, values] : columns) {
    if (values.size() != locations.size()) {
      throw std::invalid_argument("geojson column '" + name + "' has " +
                                  std::to_string(values.size()) + " values for " +
                                  std::to_string(locations.size()) + " points");
    }
  }
  nlohmann::json features = nlohmann::json::array();
  for (std::size_t i = 0; i < locations.size(); ++i) {
    nlohmann::json props = nlohmann::json::object();
    for (const auto& [name, values] : columns) {
      if (std::isfinite(values[i])) {
        props[name] = values[i];
      } else {
        props[name] = nullptr;
      }
    }
    features.push_back({{"type", "Feature"},
                        {"geometry",
                         {{"type", "Point"},
                          {"coordinates", {locations[i].x, locations[i].y}}}},
                        {"properties", props}});
  }
  const nlohmann::json doc = {{"type", "FeatureCollection"}, {"features", features}};
  return doc.dump(2) + "\n";
}

}  // namespace geocp
