#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "geoconformal/location.hpp"

namespace geocp {

struct SpatialRecord {
  Location loc;
  std::vector<double> features;  // may be empty
  double target = 0.0;
};

// Ordered collection of georeferenced records sharing one CRS and one
// feature schema.
struct SpatialDataset {
  std::vector<SpatialRecord> records;
  std::vector<std::string> feature_names;
  Crs crs = Crs::Planar;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }

  // Checks all invariants: finite values, uniform feature length matching
  // feature_names, uniform CRS. Throws std::invalid_argument on violation.
  void validate() const;
};

struct SplitFractions {
  double train = 0.8;
  double calib = 0.1;
  double test = 0.1;
};

SplitFractions parse_split_fractions(const std::string& text);  // "a/b/c"

struct SplitResult {
  SpatialDataset train;
  SpatialDataset calib;
  SpatialDataset test;
  std::uint64_t seed = 0;
  SplitFractions fractions;
};

// Uniform random partition, reproducible from the seed. Part sizes are
// floor(n * fraction) for calib and test with the remainder assigned to
// train; record order within each part follows the input order.
SplitResult split_dataset(const SpatialDataset& ds, SplitFractions fractions, std::uint64_t seed);

struct Neighbor {
  std::size_t index;
  double distance;
};

// The k nearest records to the query, sorted by ascending distance with
// ties broken by lower record index.
std::vector<Neighbor> knn_neighbors(const SpatialDataset& ds, const Location& query, std::size_t k);

// Largest pairwise distance between records (0 for fewer than 2 records).
double max_pairwise_distance(const SpatialDataset& ds);

// Median of all pairwise distances between the given locations.
double median_pairwise_distance(const std::vector<Location>& locs);

}  // namespace geocp
