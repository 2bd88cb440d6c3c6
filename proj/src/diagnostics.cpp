#include "geoconformal/diagnostics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "geoconformal/parallel.hpp"
#include "geoconformal/rng.hpp"

namespace geocp {

CoverageReport coverage_ratio(const std::vector<GeoInterval>& intervals,
                              const std::vector<double>& truth) {
  if (intervals.size() != truth.size()) {
    throw std::invalid_argument("coverage_ratio: " + std::to_string(intervals.size()) +
                                " intervals vs " + std::to_string(truth.size()) + " truths");
  }
  if (intervals.empty()) throw std::invalid_argument("coverage_ratio: empty interval list");

  CoverageReport report;
  report.n_test = intervals.size();
  report.level = intervals.front().level;
  std::vector<double> lengths;
  lengths.reserve(intervals.size());
  double length_sum = 0.0;
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    if (truth[i] >= intervals[i].lower() && truth[i] <= intervals[i].upper()) ++report.n_covered;
    lengths.push_back(intervals[i].length());
    length_sum += intervals[i].length();
  }
  report.coverage = static_cast<double>(report.n_covered) / static_cast<double>(report.n_test);
  report.mean_length = length_sum / static_cast<double>(report.n_test);
  std::sort(lengths.begin(), lengths.end());
  const std::size_t n = lengths.size();
  report.median_length = n % 2 == 1 ? lengths[n / 2] : 0.5 * (lengths[n / 2 - 1] + lengths[n / 2]);
  return report;
}

double rmse(const std::vector<double>& pred, const std::vector<double>& truth) {
  if (pred.size() != truth.size()) {
    throw std::invalid_argument("rmse: length mismatch " + std::to_string(pred.size()) + " vs " +
                                std::to_string(truth.size()));
  }
  if (pred.empty()) throw std::invalid_argument("rmse: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - truth[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(pred.size()));
}

double pearson_corr(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("pearson_corr: length mismatch");
  if (a.size() < 2) throw std::invalid_argument("pearson_corr: need at least 2 samples");
  const double n = static_cast<double>(a.size());
  const double mean_a = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mean_b = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double cov = 0.0, var_a = 0.0, var_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (var_a <= 0.0 || var_b <= 0.0) {
    throw std::invalid_argument("pearson_corr: constant vector has no correlation");
  }
  return cov / std::sqrt(var_a * var_b);
}

SpatialWeightsMatrix build_spatial_weights(const std::vector<Location>& locations,
                                           const SpatialWeightsSpec& spec) {
  const std::size_t n = locations.size();
  if (n < 2) throw std::invalid_argument("spatial weights need at least 2 points");

  SpatialWeightsMatrix w;
  w.n = n;
  w.spec = spec;
  w.rows.resize(n);

  if (spec.scheme == WeightScheme::KnnRowStandardized) {
    if (spec.k < 1 || spec.k >= n) {
      throw std::invalid_argument("knn weights need 1 <= k < n, got k=" + std::to_string(spec.k) +
                                  " n=" + std::to_string(n));
    }
    std::vector<std::pair<double, std::size_t>> cand;
    for (std::size_t i = 0; i < n; ++i) {
      cand.clear();
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        cand.push_back({distance(locations[i], locations[j]), j});
      }
      std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(spec.k),
                        cand.end());
      const double weight = 1.0 / static_cast<double>(spec.k);
      w.rows[i].reserve(spec.k);
      for (std::size_t j = 0; j < spec.k; ++j) w.rows[i].push_back({cand[j].second, weight});
      std::sort(w.rows[i].begin(), w.rows[i].end());
    }
    return w;
  }

  if (!(spec.radius > 0.0)) throw std::invalid_argument("distance band radius must be positive");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      if (distance(locations[i], locations[j]) <= spec.radius) w.rows[i].push_back({j, 1.0});
    }
    if (w.rows[i].empty()) {
      w.isolated.push_back(i);
    } else {
      const double weight = 1.0 / static_cast<double>(w.rows[i].size());
      for (auto& [j, value] : w.rows[i]) value = weight;
    }
  }
  return w;
}

SpatialWeightsMatrix build_spatial_weights(const SpatialDataset& ds,
                                           const SpatialWeightsSpec& spec) {
  std::vector<Location> locs;
  locs.reserve(ds.size());
  for (const auto& rec : ds.records) locs.push_back(rec.loc);
  return build_spatial_weights(locs, spec);
}

namespace {

struct Centered {
  std::vector<double> dev;  // z - mean
  double ss = 0.0;          // sum of squared deviations
};

Centered center(const std::vector<double>& values) {
  Centered c;
  const double mean =
      std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  c.dev.reserve(values.size());
  for (double v : values) {
    c.dev.push_back(v - mean);
    c.ss += (v - mean) * (v - mean);
  }
  return c;
}

}  // namespace

MoranResult morans_i(const std::vector<double>& values, const SpatialWeightsMatrix& w) {
  if (values.size() != w.n) throw std::invalid_argument("morans_i: values/weights size mismatch");
  if (w.n < 2) throw std::invalid_argument("morans_i: need at least 2 points");
  const Centered c = center(values);
  if (!(c.ss > 0.0)) throw std::invalid_argument("morans_i: zero variance input");

  const double n = static_cast<double>(w.n);
  double s0 = 0.0, cross = 0.0;
  for (std::size_t i = 0; i < w.n; ++i) {
    for (const auto& [j, wij] : w.rows[i]) {
      s0 += wij;
      cross += wij * c.dev[i] * c.dev[j];
    }
  }
  if (!(s0 > 0.0)) throw std::invalid_argument("morans_i: all weights are zero");

  MoranResult result;
  result.i = (n / s0) * (cross / c.ss);
  result.expected_i = -1.0 / (n - 1.0);

  // Moments under the normality assumption.
  double s1 = 0.0;
  std::vector<double> row_sum(w.n, 0.0), col_sum(w.n, 0.0);
  for (std::size_t i = 0; i < w.n; ++i) {
    for (const auto& [j, wij] : w.rows[i]) {
      row_sum[i] += wij;
      col_sum[j] += wij;
      double wji = 0.0;
      for (const auto& [jj, v] : w.rows[j]) {
        if (jj == i) {
          wji = v;
          break;
        }
      }
      s1 += 0.5 * (wij + wji) * (wij + wji);
    }
  }
  double s2 = 0.0;
  for (std::size_t i = 0; i < w.n; ++i) {
    s2 += (row_sum[i] + col_sum[i]) * (row_sum[i] + col_sum[i]);
  }
  const double var = (n * n * s1 - n * s2 + 3.0 * s0 * s0) / (s0 * s0 * (n * n - 1.0)) -
                     result.expected_i * result.expected_i;
  result.variance = std::max(0.0, var);
  result.z_score =
      result.variance > 0.0 ? (result.i - result.expected_i) / std::sqrt(result.variance) : 0.0;
  return result;
}

std::vector<double> local_morans_i(const std::vector<double>& values,
                                   const SpatialWeightsMatrix& w) {
  if (values.size() != w.n) {
    throw std::invalid_argument("local_morans_i: values/weights size mismatch");
  }
  const Centered c = center(values);
  if (!(c.ss > 0.0)) throw std::invalid_argument("local_morans_i: zero variance input");
  const double m2 = c.ss / static_cast<double>(w.n);
  std::vector<double> local(w.n, 0.0);
  for (std::size_t i = 0; i < w.n; ++i) {
    double lag = 0.0;
    for (const auto& [j, wij] : w.rows[i]) lag += wij * c.dev[j];
    local[i] = c.dev[i] / m2 * lag;
  }
  return local;
}

namespace {

// Order-statistic percentile with h = (B+1)p, linearly interpolated and
// clamped to [1, B]; B = 2 yields the sample minimum and maximum for the
// 5th/95th percentiles.
double percentile_sorted(const std::vector<double>& sorted, double p) {
  const double nb = static_cast<double>(sorted.size());
  const double h = (nb + 1.0) * p;
  if (h <= 1.0) return sorted.front();
  if (h >= nb) return sorted.back();
  const std::size_t i = static_cast<std::size_t>(h);  // floor, 1-based
  const double frac = h - static_cast<double>(i);
  return sorted[i - 1] + frac * (sorted[i] - sorted[i - 1]);
}

}  // namespace

BootstrapReport bootstrap_intervals(const SpatialDataset& ds, const SpatialDataset& test,
                                    const PredictorSpec& predictor, const BootstrapParams& params) {
  if (params.replicates < 2) throw std::invalid_argument("bootstrap needs at least 2 replicates");
  if (ds.empty()) throw std::invalid_argument("bootstrap source dataset is empty");
  if (test.empty()) throw std::invalid_argument("bootstrap test set is empty");
  validate_level(params.level);

  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t b = params.replicates;
  const std::size_t n = ds.size();
  const std::size_t n_test = test.size();

  // predictions[r] holds replicate r's prediction for every test point.
  std::vector<std::vector<double>> predictions(b);
  parallel_for(b, params.threads, [&](std::size_t r) {
    try {
      Rng rng(params.seed + r);
      SpatialDataset sample;
      sample.feature_names = ds.feature_names;
      sample.crs = ds.crs;
      sample.records.reserve(n);
      for (std::size_t i = 0; i < n; ++i) sample.records.push_back(ds.records[rng.below(n)]);
      PredictorSpec spec = predictor;
      spec.seed = params.seed + r;
      const auto model = fit_predictor(spec, sample);
      predictions[r] = predict_batch(*model, test);
    } catch (const std::exception& e) {
      throw std::runtime_error("bootstrap replicate " + std::to_string(r) + ": " + e.what());
    }
  });

  BootstrapReport report;
  report.replicates = b;
  report.intervals.resize(n_test);
  const double p_lo = params.level.epsilon / 2.0;
  const double p_hi = 1.0 - params.level.epsilon / 2.0;
  std::vector<double> column(b);
  double width_sum = 0.0;
  for (std::size_t i = 0; i < n_test; ++i) {
    for (std::size_t r = 0; r < b; ++r) column[r] = predictions[r][i];
    std::sort(column.begin(), column.end());
    const double lo = percentile_sorted(column, p_lo);
    const double hi = percentile_sorted(column, p_hi);
    report.intervals[i] = {lo, hi};
    width_sum += hi - lo;
    const double y = test.records[i].target;
    if (y >= lo && y <= hi) ++report.n_covered;
  }
  report.coverage = static_cast<double>(report.n_covered) / static_cast<double>(n_test);
  report.mean_width = width_sum / static_cast<double>(n_test);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

DependenceResult dependence_analysis(const std::vector<DependenceRun>& runs) {
  DependenceResult result;
  result.entries.resize(runs.size());
  std::vector<double> xs, ys;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const DependenceRun& run = runs[r];
    DependenceEntry& entry = result.entries[r];
    if (run.weights == nullptr) throw std::invalid_argument("dependence run missing weights");
    try {
      entry.global_i = morans_i(run.values, *run.weights).i;
      const std::vector<double> local = local_morans_i(run.values, *run.weights);
      entry.inner_corr = pearson_corr(local, run.uncertainty);
    } catch (const std::exception& e) {
      entry.degenerate = true;
      result.warnings.push_back("run " + std::to_string(r) + " skipped: " + e.what());
      continue;
    }
    xs.push_back(entry.global_i);
    ys.push_back(entry.inner_corr);
  }
  result.used = xs.size();
  if (result.used >= 2) {
    try {
      result.outer_corr = pearson_corr(xs, ys);
    } catch (const std::exception& e) {
      result.outer_corr = 0.0;
      result.warnings.push_back(std::string("outer correlation degenerate: ") + e.what());
    }
  } else {
    result.warnings.push_back("outer correlation needs at least 2 usable runs");
  }
  return result;
}

UncertaintyChangeResult uncertainty_change_analysis(const std::vector<double>& base_uncertainty,
                                                    const std::vector<double>& variant_uncertainty,
                                                    const std::vector<double>& values,
                                                    const SpatialWeightsMatrix& w) {
  if (base_uncertainty.size() != variant_uncertainty.size() ||
      base_uncertainty.size() != values.size()) {
    throw std::invalid_argument("uncertainty_change_analysis: runs must share test points");
  }
  std::vector<double> delta(base_uncertainty.size());
  for (std::size_t i = 0; i < delta.size(); ++i) {
    delta[i] = variant_uncertainty[i] - base_uncertainty[i];
  }
  UncertaintyChangeResult result;
  try {
    const std::vector<double> local = local_morans_i(values, w);
    result.corr = pearson_corr(local, delta);
  } catch (const std::exception&) {
    result.degenerate = true;
  }
  return result;
}

}  // namespace geocp
