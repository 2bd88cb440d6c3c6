#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "geoconformal/csv.hpp"
#include "geoconformal/dataset.hpp"
#include "geoconformal/location.hpp"
#include "geoconformal/rng.hpp"

using namespace geocp;

namespace {

SpatialDataset random_dataset(std::size_t n, Rng& rng, Crs crs = Crs::Planar) {
  SpatialDataset ds;
  ds.crs = crs;
  ds.feature_names = {"f0"};
  for (std::size_t i = 0; i < n; ++i) {
    SpatialRecord rec;
    if (crs == Crs::Planar) {
      rec.loc = {rng.uniform(-1000.0, 1000.0), rng.uniform(-1000.0, 1000.0), crs};
    } else {
      rec.loc = {rng.uniform(-179.0, 179.0), rng.uniform(-89.0, 89.0), crs};
    }
    rec.features = {rng.uniform(0.0, 1.0)};
    rec.target = rng.uniform(-5.0, 5.0);
    ds.records.push_back(rec);
  }
  return ds;
}

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("distance: planar pythagorean triple") {
  const Location a{0, 0, Crs::Planar};
  const Location b{3, 4, Crs::Planar};
  CHECK(distance(a, b) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("distance: identity is zero") {
  Rng rng(7);
  for (int i = 0; i < 20; ++i) {
    const Location p{rng.uniform(-170.0, 170.0), rng.uniform(-80.0, 80.0), Crs::LatLon};
    CHECK(distance(p, p) == 0.0);
  }
}

TEST_CASE("distance: quarter great circle") {
  const Location a{0.0, 0.0, Crs::LatLon};
  const Location b{90.0, 0.0, Crs::LatLon};
  const double quarter = 3.14159265358979323846 * kEarthRadiusMeters / 2.0;
  CHECK(distance(a, b) == doctest::Approx(quarter).epsilon(1e-9));
}

TEST_CASE("distance: CRS mismatch names both systems") {
  const Location a{0, 0, Crs::Planar};
  const Location b{0, 0, Crs::LatLon};
  CHECK_THROWS_WITH_AS(distance(a, b), "CRS mismatch: planar vs latlon", std::invalid_argument);
}

TEST_CASE("distance: symmetry and triangle inequality on random triples") {
  for (const Crs crs : {Crs::Planar, Crs::LatLon}) {
    Rng rng(11);
    for (int t = 0; t < 200; ++t) {
      const auto pick = [&]() {
        return crs == Crs::Planar
                   ? Location{rng.uniform(-500.0, 500.0), rng.uniform(-500.0, 500.0), crs}
                   : Location{rng.uniform(-180.0, 180.0), rng.uniform(-90.0, 90.0), crs};
      };
      const Location a = pick(), b = pick(), c = pick();
      CHECK(distance(a, b) == distance(b, a));
      CHECK(distance(a, b) >= 0.0);
      CHECK(distance(a, c) <= distance(a, b) + distance(b, c) + 1e-6);
    }
  }
}

TEST_CASE("split_dataset: 80/10/10 of 90 records gives 72/9/9") {
  Rng rng(3);
  const SpatialDataset ds = random_dataset(90, rng);
  const SplitResult split = split_dataset(ds, {0.8, 0.1, 0.1}, 42);
  CHECK(split.train.size() == 72);
  CHECK(split.calib.size() == 9);
  CHECK(split.test.size() == 9);
}

TEST_CASE("split_dataset: degenerate fractions put everything in train") {
  Rng rng(3);
  const SpatialDataset ds = random_dataset(25, rng);
  const SplitResult split = split_dataset(ds, {1.0, 0.0, 0.0}, 1);
  CHECK(split.train.size() == 25);
  CHECK(split.calib.empty());
  CHECK(split.test.empty());
}

TEST_CASE("split_dataset: partition is exact and seed-reproducible") {
  Rng rng(5);
  const SpatialDataset ds = random_dataset(137, rng);
  const SplitResult a = split_dataset(ds, {0.6, 0.2, 0.2}, 99);
  const SplitResult b = split_dataset(ds, {0.6, 0.2, 0.2}, 99);
  const SplitResult c = split_dataset(ds, {0.6, 0.2, 0.2}, 100);

  // Every record appears exactly once across the three parts.
  std::multiset<double> seen;
  for (const auto* part : {&a.train, &a.calib, &a.test}) {
    for (const auto& rec : part->records) seen.insert(rec.target);
  }
  std::multiset<double> expected;
  for (const auto& rec : ds.records) expected.insert(rec.target);
  CHECK(seen == expected);
  CHECK(a.train.size() + a.calib.size() + a.test.size() == ds.size());

  const auto targets = [](const SpatialDataset& part) {
    std::vector<double> out;
    for (const auto& rec : part.records) out.push_back(rec.target);
    return out;
  };
  CHECK(targets(a.train) == targets(b.train));
  CHECK(targets(a.calib) == targets(b.calib));
  CHECK(targets(a.test) == targets(b.test));
  CHECK(targets(a.train) != targets(c.train));
}

TEST_CASE("split_dataset: rejects bad input") {
  SpatialDataset empty;
  CHECK_THROWS_AS(split_dataset(empty, {0.8, 0.1, 0.1}, 0), std::invalid_argument);
  Rng rng(1);
  const SpatialDataset ds = random_dataset(10, rng);
  CHECK_THROWS_AS(split_dataset(ds, {0.8, 0.3, 0.1}, 0), std::invalid_argument);
  CHECK_THROWS_AS(split_dataset(ds, {-0.1, 0.6, 0.5}, 0), std::invalid_argument);
}

TEST_CASE("knn_neighbors: query at a data point and full k") {
  Rng rng(13);
  const SpatialDataset ds = random_dataset(30, rng);
  const auto hit = knn_neighbors(ds, ds.records[17].loc, 1);
  REQUIRE(hit.size() == 1);
  CHECK(hit[0].index == 17);
  CHECK(hit[0].distance == 0.0);

  const auto all = knn_neighbors(ds, ds.records[0].loc, ds.size());
  CHECK(all.size() == ds.size());
  for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1].distance <= all[i].distance);
}

TEST_CASE("knn_neighbors: agrees with exhaustive-scan oracle") {
  Rng rng(29);
  for (int round = 0; round < 10; ++round) {
    const SpatialDataset ds = random_dataset(50, rng);
    const Location query{rng.uniform(-1000.0, 1000.0), rng.uniform(-1000.0, 1000.0), Crs::Planar};
    const std::size_t k = 1 + rng.below(ds.size());

    // Independent oracle: score every record, full sort, take the prefix.
    std::vector<std::pair<double, std::size_t>> oracle;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      oracle.push_back({distance(query, ds.records[i].loc), i});
    }
    std::sort(oracle.begin(), oracle.end());
    const auto got = knn_neighbors(ds, query, k);
    REQUIRE(got.size() == k);
    for (std::size_t i = 0; i < k; ++i) {
      CHECK(got[i].index == oracle[i].second);
      CHECK(got[i].distance == oracle[i].first);
    }
  }
}

TEST_CASE("knn_neighbors: rejects out-of-range k and CRS mismatch") {
  Rng rng(31);
  const SpatialDataset ds = random_dataset(5, rng);
  CHECK_THROWS_AS(knn_neighbors(ds, ds.records[0].loc, 0), std::invalid_argument);
  CHECK_THROWS_AS(knn_neighbors(ds, ds.records[0].loc, 6), std::invalid_argument);
  CHECK_THROWS_AS(knn_neighbors(ds, Location{0, 0, Crs::LatLon}, 1), std::invalid_argument);
}

TEST_CASE("parse_dataset: schema mapping, errors, dedup") {
  const std::string path = temp_path("geocp_parse_test.csv");

  SUBCASE("table-style file parses with mapped columns") {
    std::ofstream out(path);
    out << "price,bathrooms,sqft_liv,waterfront,view,condition,grade,yr_built,UTM_X,UTM_Y\n";
    out << "45.5,2,1800,0,0,3,7,1975,550000,5270000\n";
    out << "32.0,1,1200,0,2,4,6,1942,551200,5268100\n";
    out.close();
    CsvSchema schema;
    schema.x_col = "UTM_X";
    schema.y_col = "UTM_Y";
    schema.target_col = "price";
    schema.feature_cols = {"bathrooms", "sqft_liv", "waterfront", "view",
                           "condition", "grade",    "yr_built"};
    schema.crs = Crs::Planar;
    const ParseResult result = parse_dataset(path, schema);
    CHECK(result.dataset.size() == 2);
    CHECK(result.dataset.feature_names.size() == 7);
    CHECK(result.dataset.records[0].target == 45.5);
    CHECK(result.dataset.records[1].features[1] == 1200.0);
    CHECK(result.warnings.empty());
  }

  SUBCASE("header-only file is an empty dataset") {
    std::ofstream out(path);
    out << "x,y,z\n";
    out.close();
    CsvSchema schema{"x", "y", "z", {}, Crs::Planar};
    CHECK_THROWS_WITH_AS(parse_dataset(path, schema),
                         ("empty dataset: '" + path + "' has a header only").c_str(),
                         std::runtime_error);
  }

  SUBCASE("missing column is named") {
    std::ofstream out(path);
    out << "x,y,z\n1,2,3\n";
    out.close();
    CsvSchema schema{"x", "y", "value", {}, Crs::Planar};
    CHECK_THROWS_WITH_AS(parse_dataset(path, schema), "missing column 'value' in CSV header",
                         std::runtime_error);
  }

  SUBCASE("unparseable cell reports row and column") {
    std::ofstream out(path);
    out << "x,y,z\n1,2,3\n4,oops,6\n";
    out.close();
    CsvSchema schema{"x", "y", "z", {}, Crs::Planar};
    CHECK_THROWS_WITH_AS(parse_dataset(path, schema), "row 2, column 'y': unparseable cell 'oops'",
                         std::runtime_error);
  }

  SUBCASE("identical duplicate rows merge with a warning") {
    std::ofstream out(path);
    out << "x,y,z\n1,2,5\n1,2,5\n3,3,7\n";
    out.close();
    CsvSchema schema{"x", "y", "z", {}, Crs::Planar};
    const ParseResult result = parse_dataset(path, schema);
    CHECK(result.dataset.size() == 2);
    CHECK(result.dataset.records[0].target == 5.0);
    REQUIRE(result.warnings.size() == 1);
    CHECK(result.warnings[0].find("deduplicated") != std::string::npos);
  }

  SUBCASE("co-located rows with differing targets average") {
    std::ofstream out(path);
    out << "x,y,z\n1,2,4\n1,2,6\n3,3,7\n";
    out.close();
    CsvSchema schema{"x", "y", "z", {}, Crs::Planar};
    const ParseResult result = parse_dataset(path, schema);
    CHECK(result.dataset.size() == 2);
    CHECK(result.dataset.records[0].target == 5.0);
    REQUIRE(result.warnings.size() == 1);
    CHECK(result.warnings[0].find("averaged") != std::string::npos);
  }

  std::remove(path.c_str());
}

TEST_CASE("csv: parse-serialize-parse round-trips to an equal dataset") {
  Rng rng(41);
  const SpatialDataset ds = random_dataset(40, rng);
  const std::string path = temp_path("geocp_roundtrip.csv");
  write_dataset_csv(path, ds);
  CsvSchema schema{"x", "y", "target", ds.feature_names, ds.crs};
  const SpatialDataset back = parse_dataset(path, schema).dataset;
  const std::string path2 = temp_path("geocp_roundtrip2.csv");
  write_dataset_csv(path2, back);

  REQUIRE(back.size() == ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK(back.records[i].loc.x == ds.records[i].loc.x);
    CHECK(back.records[i].loc.y == ds.records[i].loc.y);
    CHECK(back.records[i].target == ds.records[i].target);
    CHECK(back.records[i].features == ds.records[i].features);
  }

  std::ifstream f1(path), f2(path2);
  const std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  const std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  CHECK(s1 == s2);
  std::remove(path.c_str());
  std::remove(path2.c_str());
}

TEST_CASE("validate_location: rejects out-of-range lat/lon") {
  CHECK_THROWS_AS(validate_location(Location{181.0, 0.0, Crs::LatLon}), std::invalid_argument);
  CHECK_THROWS_AS(validate_location(Location{0.0, -91.0, Crs::LatLon}), std::invalid_argument);
  CHECK_NOTHROW(validate_location(Location{180.0, 90.0, Crs::LatLon}));
  CHECK_THROWS_AS(validate_location(Location{std::nan(""), 0.0, Crs::Planar}),
                  std::invalid_argument);
}
