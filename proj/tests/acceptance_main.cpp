// Acceptance suite: one named criterion per entry, each printing a single
// PASS/FAIL/SKIP line. The process exit code is the failure count.
//
// Usage: acceptance [criterion-number...]
//
// Criterion 5 needs the Seattle house-sales CSV; point GEOCP_SEATTLE_CSV at
// it (see README). Without the file the criterion reports SKIP.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "geoconformal/conformal.hpp"
#include "geoconformal/csv.hpp"
#include "geoconformal/diagnostics.hpp"
#include "geoconformal/format.hpp"
#include "geoconformal/predictor_factory.hpp"
#include "geoconformal/rng.hpp"
#include "geoconformal/synth.hpp"

namespace fs = std::filesystem;
using namespace geocp;

namespace {

struct Outcome {
  enum class Status { Pass, Fail, Skip } status;
  std::string detail;
};

Outcome pass(std::string detail) { return {Outcome::Status::Pass, std::move(detail)}; }
Outcome fail(std::string detail) { return {Outcome::Status::Fail, std::move(detail)}; }
Outcome skip(std::string detail) { return {Outcome::Status::Skip, std::move(detail)}; }

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double elapsed_s(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// shared oracles (independent implementations used only by this suite)

double brute_force_geo_quantile(const std::vector<double>& scores,
                                const std::vector<Location>& locs, const DecayKernel& kernel,
                                const Location& test, double epsilon) {
  struct Item {
    double score;
    double weight;
  };
  std::vector<Item> items;
  items.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    items.push_back({scores[i], kernel_weight(kernel, distance(test, locs[i]))});
  }
  std::stable_sort(items.begin(), items.end(),
                   [](const Item& a, const Item& b) { return a.score < b.score; });
  double total = 0.0;
  for (const Item& it : items) total += it.weight;
  if (!(total > 0.0)) {
    for (Item& it : items) it.weight = 1.0;
    total = static_cast<double>(items.size());
  }
  const double target = 1.0 - epsilon;
  double cumulative = 0.0;
  for (const Item& it : items) {
    cumulative += it.weight / total;
    if (cumulative >= target - kQuantileTolerance) return it.score;
  }
  return items.back().score;
}

std::vector<double> dense_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double sum = b[i];
    for (std::size_t c = i + 1; c < n; ++c) sum -= a[i][c] * x[c];
    x[i] = sum / a[i][i];
  }
  return x;
}

SpatialDataset random_points(std::size_t n, double extent, Rng& rng) {
  SpatialDataset ds;
  ds.crs = Crs::Planar;
  for (std::size_t i = 0; i < n; ++i) {
    ds.records.push_back(
        {{rng.uniform(0.0, extent), rng.uniform(0.0, extent), Crs::Planar}, {}, rng.normal()});
  }
  return ds;
}

std::vector<double> targets_of(const SpatialDataset& ds) {
  std::vector<double> out;
  for (const auto& rec : ds.records) out.push_back(rec.target);
  return out;
}

std::vector<Location> locations_of(const SpatialDataset& ds) {
  std::vector<Location> out;
  for (const auto& rec : ds.records) out.push_back(rec.loc);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// ---------------------------------------------------------------------------
// C1: geo_quantile agrees exactly with the brute-force oracle

Outcome c1_quantile_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(46001);
  const KernelFamily families[] = {KernelFamily::Gaussian, KernelFamily::Exponential,
                                   KernelFamily::Bisquare, KernelFamily::Uniform};
  const int instances = 1000;
  for (int round = 0; round < instances; ++round) {
    const std::size_t m = 1 + rng.below(500);
    std::vector<double> scores;
    std::vector<Location> locs;
    scores.reserve(m);
    locs.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
      scores.push_back(rng.below(5) == 0 ? std::floor(rng.uniform(0.0, 6.0))
                                         : rng.uniform(0.0, 50.0));
      locs.push_back({rng.uniform(0.0, 100.0), rng.uniform(0.0, 100.0), Crs::Planar});
    }
    const DecayKernel kernel{families[rng.below(4)], rng.uniform(0.5, 150.0)};
    const Location test{rng.uniform(-30.0, 130.0), rng.uniform(-30.0, 130.0), Crs::Planar};
    const double epsilon = rng.uniform(0.01, 0.5);

    const auto profile = CalibrationProfile::from_scores(scores, locs);
    const double got = geo_quantile(profile, test, kernel, {epsilon});
    const double want = brute_force_geo_quantile(scores, locs, kernel, test, epsilon);
    if (got != want) {
      return fail("instance " + std::to_string(round) + ": got " + fmt_double(got) +
                  ", oracle " + fmt_double(want));
    }
  }
  const double seconds = elapsed_s(t0);
  if (seconds >= 10.0) return fail("took " + fmt_fixed(seconds, 2) + " s (budget 10 s)");
  return pass(std::to_string(instances) + "/1000 instances exact in " + fmt_fixed(seconds, 2) +
              " s");
}

// ---------------------------------------------------------------------------
// C2: reduction law (uniform kernel; huge-bandwidth gaussian)

Outcome c2_reduction_law() {
  Rng rng(46002);
  for (int round = 0; round < 200; ++round) {
    const std::size_t m = 1 + rng.below(300);
    std::vector<double> scores;
    std::vector<Location> locs;
    double max_dist = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      scores.push_back(rng.uniform(0.0, 25.0));
      locs.push_back({rng.uniform(0.0, 500.0), rng.uniform(0.0, 500.0), Crs::Planar});
    }
    for (std::size_t i = 0; i + 1 < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        max_dist = std::max(max_dist, distance(locs[i], locs[j]));
      }
    }
    const auto profile = CalibrationProfile::from_scores(scores, locs);
    const Location test{rng.uniform(0.0, 500.0), rng.uniform(0.0, 500.0), Crs::Planar};
    const DecayKernel uniform{KernelFamily::Uniform, 1.0};
    const DecayKernel wide{KernelFamily::Gaussian, std::max(1.0, 1e6 * max_dist)};
    for (const double eps : {0.01, 0.05, 0.1, 0.2, 0.33, 0.5}) {
      const double reference = cp_quantile(profile, {eps});
      if (geo_quantile(profile, test, uniform, {eps}) != reference) {
        return fail("uniform-kernel mismatch at m=" + std::to_string(m) +
                    " eps=" + fmt_double(eps));
      }
      if (geo_quantile(profile, test, wide, {eps}) != reference) {
        return fail("wide-gaussian mismatch at m=" + std::to_string(m) +
                    " eps=" + fmt_double(eps));
      }
    }
  }
  return pass("200 profiles, 6 levels, both reductions exact");
}

// ---------------------------------------------------------------------------
// C3: marginal coverage on an exchangeable synthetic scene

Outcome c3_marginal_coverage() {
  const auto t0 = std::chrono::steady_clock::now();
  const double epsilon = 0.1;
  const int seeds = 50;
  double coverage_sum = 0.0;
  for (int s = 0; s < seeds; ++s) {
    SceneSpec spec;
    spec.n = 2700;  // 500 train / 200 calib / 2000 test
    spec.extent = 1000.0;
    spec.noise = {NoiseProfileKind::Constant, 1.5, 1.5};
    spec.seed = 5000 + static_cast<std::uint64_t>(s);
    const RegressionScene scene = make_regression_scene(spec);

    PredictorSpec predictor;
    predictor.kind = PredictorKind::Knn;
    predictor.knn_k = 8;
    GeoCpOptions options;
    options.kernel = {KernelFamily::Uniform, 1.0};
    options.bandwidth_median = false;
    options.level = {epsilon};
    options.fractions = {500.0 / 2700.0, 200.0 / 2700.0, 2000.0 / 2700.0};
    options.seed = spec.seed;
    options.threads = 4;
    const GeoCpResult result = geocp_run(scene.data, predictor, options);
    if (result.split.train.size() != 500 || result.profile.size() != 200 ||
        result.split.test.size() != 2000) {
      return fail("unexpected split sizes " + std::to_string(result.split.train.size()) + "/" +
                  std::to_string(result.profile.size()) + "/" +
                  std::to_string(result.split.test.size()));
    }
    coverage_sum += coverage_ratio(result.intervals, targets_of(result.split.test)).coverage;
  }
  const double mean_coverage = coverage_sum / seeds;
  const double seconds = elapsed_s(t0);
  if (seconds >= 60.0) return fail("took " + fmt_fixed(seconds, 1) + " s (budget 60 s)");
  if (mean_coverage < 0.88 || mean_coverage > 0.92) {
    return fail("mean coverage " + fmt_fixed(mean_coverage, 4) + " outside [0.88, 0.92]");
  }
  return pass("mean coverage " + fmt_fixed(mean_coverage, 4) + " over 50 seeds in " +
              fmt_fixed(seconds, 1) + " s");
}

// ---------------------------------------------------------------------------
// C4: covariate-shift benefit on the two-region heteroscedastic scene

Outcome c4_covariate_shift() {
  const int seeds = 20;
  double geo_gap_sum = 0.0, plain_gap_sum = 0.0;
  for (int s = 0; s < seeds; ++s) {
    SceneSpec spec;
    spec.n = 1200;
    spec.extent = 1000.0;
    spec.noise = {NoiseProfileKind::TwoRegion, 0.5, 2.0};
    spec.seed = 6000 + static_cast<std::uint64_t>(s);
    const RegressionScene scene = make_regression_scene(spec);
    const SplitResult split = split_dataset(scene.data, {0.5, 0.25, 0.25}, spec.seed);

    PredictorSpec predictor;
    predictor.kind = PredictorKind::Knn;
    predictor.knn_k = 10;
    const auto model = fit_predictor(predictor, split.train);
    const CalibrationProfile profile = nonconformity_scores(*model, split.calib);
    const DecayKernel kernel{KernelFamily::Gaussian, 125.0};
    const CoverageLevel level{0.1};
    const double plain_q = cp_quantile(profile, level);

    struct Tally {
      std::size_t n = 0;
      std::size_t covered_geo = 0;
      std::size_t covered_plain = 0;
    } left, right;
    for (const auto& rec : split.test.records) {
      const double pred = model->predict(rec);
      const double geo_q = geo_quantile(profile, rec.loc, kernel, level);
      Tally& region = rec.loc.x < 500.0 ? left : right;
      ++region.n;
      if (std::abs(rec.target - pred) <= geo_q) ++region.covered_geo;
      if (std::abs(rec.target - pred) <= plain_q) ++region.covered_plain;
    }
    const auto gap = [](const Tally& a, const Tally& b, bool geo) {
      const double ca = static_cast<double>(geo ? a.covered_geo : a.covered_plain) / a.n;
      const double cb = static_cast<double>(geo ? b.covered_geo : b.covered_plain) / b.n;
      return std::max(std::abs(ca - 0.9), std::abs(cb - 0.9));
    };
    geo_gap_sum += gap(left, right, true);
    plain_gap_sum += gap(left, right, false);
  }
  const double geo_gap = geo_gap_sum / seeds;
  const double plain_gap = plain_gap_sum / seeds;
  if (!(geo_gap < plain_gap)) {
    return fail("geo regional gap " + fmt_fixed(geo_gap, 4) + " not below plain gap " +
                fmt_fixed(plain_gap, 4));
  }
  return pass("mean regional gap geo " + fmt_fixed(geo_gap, 4) + " < plain " +
              fmt_fixed(plain_gap, 4) + " over 20 seeds");
}

// ---------------------------------------------------------------------------
// C5 (conditional): Seattle reproduction

Outcome c5_seattle() {
  const char* env_path = std::getenv("GEOCP_SEATTLE_CSV");
  const std::string path = env_path != nullptr ? env_path : "data/seattle_house_sales.csv";
  if (!fs::exists(path)) {
    return skip("dataset not supplied (set GEOCP_SEATTLE_CSV or place " + path + ")");
  }
  const char* env_b = std::getenv("GEOCP_SEATTLE_B");
  const std::size_t b_max = env_b != nullptr ? std::stoul(env_b) : 500;

  CsvSchema schema;
  const auto env_or = [](const char* name, const char* fallback) {
    const char* value = std::getenv(name);
    return std::string(value != nullptr ? value : fallback);
  };
  schema.x_col = env_or("GEOCP_SEATTLE_XCOL", "UTM_X");
  schema.y_col = env_or("GEOCP_SEATTLE_YCOL", "UTM_Y");
  schema.target_col = env_or("GEOCP_SEATTLE_TARGET", "price");
  std::stringstream features(
      env_or("GEOCP_SEATTLE_FEATURES",
             "bathrooms,sqft_liv,waterfront,view,condition,grade,yr_built"));
  std::string item;
  while (std::getline(features, item, ',')) schema.feature_cols.push_back(item);
  schema.crs = Crs::Planar;

  const ParseResult parsed = parse_dataset(path, schema);
  // Aspatial + spatial features: coordinates duplicated as columns.
  SpatialDataset ds = parsed.dataset;
  ds.feature_names.push_back("loc_x");
  ds.feature_names.push_back("loc_y");
  for (auto& rec : ds.records) {
    rec.features.push_back(rec.loc.x);
    rec.features.push_back(rec.loc.y);
  }

  PredictorSpec predictor;
  predictor.kind = PredictorKind::Gbt;
  predictor.gbt = {300, 4, 0.05, 2};
  GeoCpOptions options;
  options.level = {0.1};
  options.seed = 42;
  options.threads = 8;
  const GeoCpResult result = geocp_run(ds, predictor, options);
  const CoverageReport report = coverage_ratio(result.intervals, targets_of(result.split.test));
  std::ostringstream detail;
  detail << "GeoCP coverage " << fmt_fixed(report.coverage, 4);
  if (std::abs(report.coverage - 0.9367) > 0.02) {
    return fail(detail.str() + " outside 0.9367 +/- 0.02");
  }

  SpatialDataset pool = result.split.train;
  pool.records.insert(pool.records.end(), result.split.calib.records.begin(),
                      result.split.calib.records.end());
  const BootstrapReport boot_large =
      bootstrap_intervals(pool, result.split.test, predictor, {b_max, {0.1}, 42, 8});
  detail << ", bootstrap B=" << b_max << " coverage " << fmt_fixed(boot_large.coverage, 4);
  if (boot_large.coverage > 0.85) {
    return fail(detail.str() + " exceeds 0.85");
  }
  const BootstrapReport boot_small =
      bootstrap_intervals(pool, result.split.test, predictor, {10, {0.1}, 42, 8});
  detail << ", B=10 coverage " << fmt_fixed(boot_small.coverage, 4);
  if (!(boot_small.coverage < boot_large.coverage)) {
    return fail(detail.str() + " is not below the large-B coverage");
  }
  return pass(detail.str());
}

// ---------------------------------------------------------------------------
// C6: GeoCP end-to-end is at least 10x faster than bootstrap B=200

Outcome c6_speed_ratio() {
  SceneSpec spec;
  spec.n = 2000;
  spec.extent = 1000.0;
  spec.noise = {NoiseProfileKind::Constant, 1.0, 1.0};
  spec.seed = 777;
  const RegressionScene scene = make_regression_scene(spec);

  PredictorSpec predictor;
  predictor.kind = PredictorKind::Gbt;
  predictor.gbt = {100, 3, 0.1, 2};

  GeoCpOptions options;
  options.seed = 3;
  options.threads = 1;
  const auto t0 = std::chrono::steady_clock::now();
  const GeoCpResult result = geocp_run(scene.data, predictor, options);
  const double geocp_seconds = elapsed_s(t0);

  SpatialDataset pool = result.split.train;
  pool.records.insert(pool.records.end(), result.split.calib.records.begin(),
                      result.split.calib.records.end());
  const BootstrapReport report =
      bootstrap_intervals(pool, result.split.test, predictor, {200, {0.1}, 3, 1});

  const double ratio = report.wall_seconds / geocp_seconds;
  if (geocp_seconds > report.wall_seconds / 10.0) {
    return fail("geocp " + fmt_fixed(geocp_seconds, 4) + " s vs bootstrap " +
                fmt_fixed(report.wall_seconds, 4) + " s (ratio " + fmt_fixed(ratio, 1) + "x < 10x)");
  }
  return pass("geocp " + fmt_fixed(geocp_seconds, 4) + " s vs bootstrap B=200 " +
              fmt_fixed(report.wall_seconds, 4) + " s (" + fmt_fixed(ratio, 1) + "x)");
}

// ---------------------------------------------------------------------------
// C7: kriging exactness, dense-solve oracle, unit-sum weights

Outcome c7_kriging() {
  Rng rng(46007);

  // Zero-nugget exactness.
  const SpatialDataset train = random_points(25, 100.0, rng);
  VariogramModel vario;
  vario.kind = VariogramKind::Exponential;
  vario.nugget = 0.0;
  vario.partial_sill = 1.5;
  vario.range = 40.0;
  const auto exact_model = fit_kriging(train, vario);
  for (const auto& rec : train.records) {
    const auto pred = exact_model->predict_with_variance(rec.loc);
    if (std::abs(pred.value - rec.target) >= 1e-8) {
      return fail("training target missed by " + fmt_double(std::abs(pred.value - rec.target)));
    }
    if (!(pred.variance < 1e-8)) {
      return fail("variance at data point " + fmt_double(pred.variance));
    }
  }

  // Dense-solve oracle on 3-10 point systems.
  for (int round = 0; round < 25; ++round) {
    const std::size_t n = 3 + rng.below(8);
    const SpatialDataset small = random_points(n, 100.0, rng);
    VariogramModel v2;
    v2.kind = round % 2 == 0 ? VariogramKind::Exponential : VariogramKind::Gaussian;
    v2.nugget = rng.uniform(0.0, 0.3);
    v2.partial_sill = rng.uniform(0.5, 2.0);
    v2.range = rng.uniform(20.0, 60.0);
    const auto model = fit_kriging(small, v2);
    double max_dist = max_pairwise_distance(small);
    const double eps_reg = 1e-10 * v2.sill(max_dist);
    for (int q = 0; q < 4; ++q) {
      const Location query{rng.uniform(0.0, 100.0), rng.uniform(0.0, 100.0), Crs::Planar};
      std::vector<std::vector<double>> a(n + 1, std::vector<double>(n + 1, 0.0));
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          a[i][j] = v2(distance(small.records[i].loc, small.records[j].loc));
        }
        a[i][i] += eps_reg;
        a[i][n] = 1.0;
        a[n][i] = 1.0;
      }
      std::vector<double> rhs(n + 1, 1.0);
      for (std::size_t i = 0; i < n; ++i) rhs[i] = v2(distance(query, small.records[i].loc));
      const auto x = dense_solve(a, rhs);
      double want_value = 0.0, want_var = x[n];
      for (std::size_t i = 0; i < n; ++i) {
        want_value += x[i] * small.records[i].target;
        want_var += x[i] * v2(distance(query, small.records[i].loc));
      }
      const auto got = model->predict_with_variance(query);
      if (std::abs(got.value - want_value) > 1e-9 ||
          std::abs(got.variance - std::max(0.0, want_var)) > 1e-9) {
        return fail("oracle mismatch at n=" + std::to_string(n));
      }
    }
  }

  // Unit-sum weights on 500 random queries.
  VariogramModel v3;
  v3.kind = VariogramKind::Exponential;
  v3.nugget = 0.1;
  v3.partial_sill = 1.0;
  v3.range = 30.0;
  const auto sum_model = fit_kriging(random_points(40, 100.0, rng), v3);
  for (int q = 0; q < 500; ++q) {
    const Location query{rng.uniform(-100.0, 200.0), rng.uniform(-100.0, 200.0), Crs::Planar};
    const auto sol = sum_model->solve_weights(query);
    const double sum = std::accumulate(sol.weights.begin(), sol.weights.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-9) {
      return fail("weights sum " + fmt_double(sum) + " at query " + std::to_string(q));
    }
  }
  return pass("exactness 25/25, oracle 25 systems, unit-sum 500 queries");
}

// ---------------------------------------------------------------------------
// C8: variogram parameter recovery within 5%

Outcome c8_variogram_recovery() {
  const auto check = [](VariogramKind kind, double c0, double c1, double a,
                        double slope) -> std::string {
    VariogramModel truth;
    truth.kind = kind;
    truth.nugget = c0;
    truth.partial_sill = c1;
    truth.range = a;
    truth.slope = slope;
    EmpiricalVariogram emp;
    emp.max_lag = kind == VariogramKind::Gaussian ? 2000.0 : 1500.0;
    const std::size_t bins = 18;
    for (std::size_t b = 0; b < bins; ++b) {
      const double h = (static_cast<double>(b) + 0.5) * emp.max_lag / bins;
      emp.bins.push_back({h, truth(h), 40});
    }
    const auto fit = fit_variogram(emp, kind);
    const auto rel = [](double got, double want) {
      return want == 0.0 ? std::abs(got) : std::abs(got - want) / std::abs(want);
    };
    if (kind == VariogramKind::Linear) {
      if (rel(fit.model.slope, slope) > 0.05) return "linear slope off";
      if (std::abs(fit.model.nugget - c0) > 0.05 * std::max(1.0, c0)) return "linear nugget off";
      return "";
    }
    if (rel(fit.model.nugget, c0) > 0.05) return variogram_kind_name(kind) + " nugget off";
    if (rel(fit.model.partial_sill, c1) > 0.05) return variogram_kind_name(kind) + " sill off";
    if (rel(fit.model.range, a) > 0.05) return variogram_kind_name(kind) + " range off";
    return "";
  };

  for (const auto& message :
       {check(VariogramKind::Exponential, 0.1, 1.0, 500.0, 0.0),
        check(VariogramKind::Gaussian, 0.25, 2.0, 700.0, 0.0),
        check(VariogramKind::Linear, 0.4, 0.0, 1.0, 0.002)}) {
    if (!message.empty()) return fail(message);
  }
  return pass("exponential, gaussian, linear all within 5%");
}

// ---------------------------------------------------------------------------
// C9: Moran's I suite

Outcome c9_moran_suite() {
  // Checkerboard with rook weights.
  std::vector<Location> grid;
  std::vector<double> board;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      grid.push_back({static_cast<double>(c), static_cast<double>(r), Crs::Planar});
      board.push_back((r + c) % 2 == 0 ? 1.0 : -1.0);
    }
  }
  const auto rook = build_spatial_weights(grid, {WeightScheme::DistanceBand, 0, 1.01});
  const double checker_i = morans_i(board, rook).i;
  if (std::abs(checker_i + 1.0) > 1e-9) {
    return fail("checkerboard I " + fmt_double(checker_i) + " != -1");
  }

  // i.i.d. noise stays within three permutation-null standard deviations.
  Rng rng(46009);
  const std::size_t n = 400;
  std::vector<Location> locs;
  std::vector<double> noise(n);
  for (std::size_t i = 0; i < n; ++i) {
    locs.push_back({rng.uniform(0.0, 100.0), rng.uniform(0.0, 100.0), Crs::Planar});
    noise[i] = rng.normal();
  }
  const auto w = build_spatial_weights(locs, {WeightScheme::KnnRowStandardized, 8, 0.0});
  const MoranResult iid = morans_i(noise, w);
  std::vector<double> shuffled = noise;
  std::vector<double> perm;
  for (int p = 0; p < 500; ++p) {
    rng.shuffle(shuffled);
    perm.push_back(morans_i(shuffled, w).i);
  }
  const double perm_mean = mean_of(perm);
  double perm_var = 0.0;
  for (double v : perm) perm_var += (v - perm_mean) * (v - perm_mean);
  perm_var /= static_cast<double>(perm.size());
  const double null_sd = std::sqrt(perm_var);
  if (std::abs(iid.i - iid.expected_i) >= 3.0 * null_sd) {
    return fail("iid I " + fmt_double(iid.i) + " beyond 3 null sd (" + fmt_double(null_sd) + ")");
  }

  // Mean of local values equals the global statistic on random instances.
  for (int round = 0; round < 100; ++round) {
    const std::size_t size = 15 + rng.below(80);
    std::vector<Location> pts;
    std::vector<double> values(size);
    for (std::size_t i = 0; i < size; ++i) {
      pts.push_back({rng.uniform(0.0, 50.0), rng.uniform(0.0, 50.0), Crs::Planar});
      values[i] = rng.normal();
    }
    const auto wr = build_spatial_weights(
        pts, {WeightScheme::KnnRowStandardized, 2 + rng.below(6), 0.0});
    const auto local = local_morans_i(values, wr);
    const double gap = std::abs(mean_of(local) - morans_i(values, wr).i);
    if (gap > 1e-9) {
      return fail("local/global identity off by " + fmt_double(gap));
    }
  }
  return pass("checkerboard -1 exact, iid within 3 null sd, identity on 100 instances");
}

// ---------------------------------------------------------------------------
// synthetic "days" shared by C10 and C11

struct Day {
  SpatialDataset all;             // every station of the day
  std::vector<double> values;     // field values at every station
  SplitResult split;
  CalibrationProfile base_profile;
  DecayKernel kernel;             // resolved median bandwidth
};

Day make_day(int d, DgsiVariant variant, CalibrationProfile* variant_profile) {
  const double extent = 1000.0;
  const double ranges[] = {30.0, 60.0, 120.0, 250.0, 500.0, 900.0};
  Day day;
  const auto locs =
      random_locations(150, extent, SamplingKind::UniformRandom, 9000 + static_cast<std::uint64_t>(d));
  FieldSpec field;
  field.kind = CovarianceKind::Exponential;
  field.sill = 1.0;
  field.range = ranges[d % 6];
  field.nugget = 0.02;
  field.mean = 15.0;
  day.values = sample_gaussian_field(field, locs, 7000 + static_cast<std::uint64_t>(d));
  day.all.crs = Crs::Planar;
  for (std::size_t i = 0; i < locs.size(); ++i) {
    day.all.records.push_back({locs[i], {}, day.values[i]});
  }
  day.split = split_dataset(day.all, {0.8, 0.1, 0.1}, 100 + static_cast<std::uint64_t>(d));

  DgsiParams params;
  params.k = 6;
  params.epochs = 300;
  params.learning_rate = 0.01;
  params.seed = 200 + static_cast<std::uint64_t>(d);
  params.variant = DgsiVariant::Base;
  const auto base_model = train_dgsi_lite(day.split.train, params);
  day.base_profile = nonconformity_scores(*base_model, day.split.calib);
  if (variant_profile != nullptr) {
    params.variant = variant;
    const auto variant_model = train_dgsi_lite(day.split.train, params);
    *variant_profile = nonconformity_scores(*variant_model, day.split.calib);
  }

  const double median = median_pairwise_distance(locations_of(day.split.calib));
  day.kernel = {KernelFamily::Gaussian, median > 0.0 ? median : 1.0};
  return day;
}

// C10: outer correlation of (global I, corr(local I, uncertainty)) positive

Outcome c10_dependence_directionality() {
  const int days = 30;
  std::vector<SpatialWeightsMatrix> weights;
  std::vector<DependenceRun> runs;
  std::vector<std::vector<double>> uncertainties(days), values(days);
  weights.reserve(days);
  for (int d = 0; d < days; ++d) {
    const Day day = make_day(d, DgsiVariant::Base, nullptr);
    uncertainties[d] =
        geo_uncertainty_at(day.base_profile, locations_of(day.all), day.kernel, {0.1}, {}, 4);
    values[d] = day.values;
    weights.push_back(
        build_spatial_weights(locations_of(day.all), {WeightScheme::KnnRowStandardized, 8, 0.0}));
  }
  for (int d = 0; d < days; ++d) {
    runs.push_back({uncertainties[d], values[d], &weights[d]});
  }
  const DependenceResult result = dependence_analysis(runs);
  if (result.used < 25) {
    return fail("only " + std::to_string(result.used) + " usable days of 30");
  }
  if (!(result.outer_corr > 0.0)) {
    return fail("outer correlation " + fmt_fixed(result.outer_corr, 4) + " not positive");
  }
  return pass("outer correlation " + fmt_fixed(result.outer_corr, 4) + " over " +
              std::to_string(result.used) + " days");
}

// C11: local-feature variant reduces uncertainty; change anti-correlates
// with local dependence on strongly autocorrelated days

Outcome c11_feature_variants() {
  const int days = 30;
  double base_sum = 0.0, local_sum = 0.0;
  std::vector<double> qualifying_corrs;
  for (int d = 0; d < days; ++d) {
    CalibrationProfile local_profile;
    const Day day = make_day(d, DgsiVariant::LocalFeature, &local_profile);
    const auto locs = locations_of(day.all);
    const auto base_unc = geo_uncertainty_at(day.base_profile, locs, day.kernel, {0.1}, {}, 4);
    const auto local_unc = geo_uncertainty_at(local_profile, locs, day.kernel, {0.1}, {}, 4);
    base_sum += mean_of(base_unc);
    local_sum += mean_of(local_unc);

    const auto w = build_spatial_weights(locs, {WeightScheme::KnnRowStandardized, 8, 0.0});
    const double global_i = morans_i(day.values, w).i;
    if (global_i > 0.3) {
      const auto change = uncertainty_change_analysis(base_unc, local_unc, day.values, w);
      if (!change.degenerate) qualifying_corrs.push_back(change.corr);
    }
  }
  const double mean_base = base_sum / days;
  const double mean_local = local_sum / days;
  std::ostringstream detail;
  detail << "mean uncertainty base " << fmt_fixed(mean_base, 4) << ", local-feature "
         << fmt_fixed(mean_local, 4);
  if (!(mean_local <= mean_base)) {
    return fail(detail.str() + " (local-feature variant did not reduce uncertainty)");
  }
  if (qualifying_corrs.size() < 5) {
    return fail(detail.str() + "; only " + std::to_string(qualifying_corrs.size()) +
                " qualifying days with global I > 0.3");
  }
  const double mean_corr = mean_of(qualifying_corrs);
  std::size_t negative = 0;
  for (double c : qualifying_corrs) {
    if (c < 0.0) ++negative;
  }
  detail << "; corr(local I, delta) mean " << fmt_fixed(mean_corr, 4) << " (" << negative << "/"
         << qualifying_corrs.size() << " negative)";
  if (!(mean_corr < 0.0) || negative * 2 <= qualifying_corrs.size()) {
    return fail(detail.str());
  }
  return pass(detail.str());
}

// ---------------------------------------------------------------------------
// C12: CLI determinism across thread counts

Outcome c12_cli_determinism() {
  const std::string cli = GEOCP_CLI_PATH;
  const fs::path dir = fs::temp_directory_path() / "geocp_acceptance_c12";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto run = [&](const std::string& args) {
    const std::string command = cli + " " + args + " >/dev/null 2>&1";
    return std::system(command.c_str()) == 0;
  };

  const std::string scene_out = (dir / "scene").string();
  if (!run("synth --mode scene --n 400 --extent 1000 --noise tworegion --sigma0 0.5 --sigma1 2 "
           "--seed 21 --out " +
           scene_out)) {
    return fail("synth command failed");
  }
  const std::string data = scene_out + "/scene.csv";
  const std::string flags =
      " --x-col x --y-col y --target-col target --feature-cols coord_x,coord_y ";

  std::vector<std::pair<std::string, std::vector<std::string>>> checks = {
      {"geocp --data " + data + flags + "--predictor gbt --trees 40 --seed 13 --out ",
       {"intervals.csv"}},
      {"bootstrap --data " + data + flags +
           "--predictor knn --knn-k 6 --replicates 12 --seed 13 --out ",
       {"bootstrap_intervals.csv"}},
      {"experiment --name feature-variants --data " + data + flags +
           "--epochs 40 --seed 13 --out ",
       {"dgsi_base_intervals.csv", "dgsi_local_intervals.csv", "dgsi_loc_intervals.csv"}},
  };

  for (std::size_t c = 0; c < checks.size(); ++c) {
    const auto& [command, files] = checks[c];
    const std::string out1 = (dir / ("t1_" + std::to_string(c))).string();
    const std::string out8 = (dir / ("t8_" + std::to_string(c))).string();
    if (!run(command + out1 + " --threads 1")) return fail("command failed: " + command);
    if (!run(command + out8 + " --threads 8")) return fail("command failed: " + command);
    for (const auto& leaf : files) {
      const std::string a = read_file(out1 + "/" + leaf);
      const std::string b = read_file(out8 + "/" + leaf);
      if (a.empty() || a != b) {
        return fail(leaf + " differs between --threads 1 and --threads 8");
      }
    }
  }
  fs::remove_all(dir);
  return pass("geocp, bootstrap, and experiment CSVs byte-identical at 1 and 8 threads");
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "weighted-quantile oracle equivalence", c1_quantile_oracle},
      {2, "reduction law (uniform and wide-bandwidth kernels)", c2_reduction_law},
      {3, "marginal coverage on exchangeable synthetic data", c3_marginal_coverage},
      {4, "covariate-shift benefit on the two-region scene", c4_covariate_shift},
      {5, "Seattle reproduction (conditional)", c5_seattle},
      {6, "speed ratio vs bootstrap", c6_speed_ratio},
      {7, "kriging exactness and dense-solve oracle", c7_kriging},
      {8, "variogram parameter recovery", c8_variogram_recovery},
      {9, "Moran's I suite", c9_moran_suite},
      {10, "uncertainty-dependence directionality", c10_dependence_directionality},
      {11, "feature-variant directionality", c11_feature_variants},
      {12, "CLI determinism across thread counts", c12_cli_determinism},
  };

  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& criterion : criteria) {
    if (!selected.empty() &&
        std::find(selected.begin(), selected.end(), criterion.id) == selected.end()) {
      continue;
    }
    Outcome outcome{Outcome::Status::Fail, ""};
    try {
      outcome = criterion.run();
    } catch (const std::exception& e) {
      outcome = fail(std::string("exception: ") + e.what());
    }
    const char* tag = outcome.status == Outcome::Status::Pass   ? "PASS"
                      : outcome.status == Outcome::Status::Skip ? "SKIP"
                                                                : "FAIL";
    std::printf("[%s] C%02d %s — %s\n", tag, criterion.id, criterion.title,
                outcome.detail.c_str());
    std::fflush(stdout);
    if (outcome.status == Outcome::Status::Fail) ++failures;
  }
  return failures;
}
