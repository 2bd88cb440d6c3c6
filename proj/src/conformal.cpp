#include "geoconformal/conformal.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "geoconformal/parallel.hpp"
#include "geoconformal/predictor_factory.hpp"

namespace geocp {

void validate_level(CoverageLevel level) {
  if (!(level.epsilon > 0.0) || !(level.epsilon < 1.0)) {
    throw std::invalid_argument("miscoverage epsilon must be in (0, 1), got " +
                                std::to_string(level.epsilon));
  }
}

CalibrationProfile CalibrationProfile::from_scores(const std::vector<double>& scores,
                                                   const std::vector<Location>& locations) {
  if (scores.empty()) throw std::invalid_argument("calibration profile needs at least one score");
  if (scores.size() != locations.size()) {
    throw std::invalid_argument("scores and locations differ in length");
  }
  CalibrationProfile profile;
  profile.entries_.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i]) || scores[i] < 0.0) {
      throw std::invalid_argument("nonconformity score " + std::to_string(i) +
                                  " must be finite and nonnegative");
    }
    profile.entries_.push_back({scores[i], locations[i], i});
  }
  std::stable_sort(profile.entries_.begin(), profile.entries_.end(),
                   [](const CalibrationEntry& a, const CalibrationEntry& b) {
                     return a.score < b.score;
                   });
  return profile;
}

CalibrationProfile nonconformity_scores(const PredictorModel& model, const SpatialDataset& calib) {
  if (calib.empty()) throw std::invalid_argument("calibration set is empty");
  std::vector<double> scores;
  std::vector<Location> locations;
  scores.reserve(calib.size());
  locations.reserve(calib.size());
  for (const auto& rec : calib.records) {
    scores.push_back(std::abs(model.predict(rec) - rec.target));
    locations.push_back(rec.loc);
  }
  return CalibrationProfile::from_scores(scores, locations);
}

std::string kernel_family_name(KernelFamily family) {
  switch (family) {
    case KernelFamily::Gaussian: return "gaussian";
    case KernelFamily::Exponential: return "exponential";
    case KernelFamily::Bisquare: return "bisquare";
    case KernelFamily::Uniform: return "uniform";
  }
  return "?";
}

KernelFamily kernel_family_from_name(const std::string& name) {
  if (name == "gaussian") return KernelFamily::Gaussian;
  if (name == "exponential") return KernelFamily::Exponential;
  if (name == "bisquare") return KernelFamily::Bisquare;
  if (name == "uniform") return KernelFamily::Uniform;
  throw std::invalid_argument("unknown kernel family '" + name + "'");
}

double kernel_weight(const DecayKernel& kernel, double d) {
  if (!(kernel.bandwidth > 0.0)) {
    throw std::invalid_argument("kernel bandwidth must be positive, got " +
                                std::to_string(kernel.bandwidth));
  }
  if (d < 0.0) throw std::invalid_argument("kernel distance must be nonnegative");
  const double b = kernel.bandwidth;
  switch (kernel.family) {
    case KernelFamily::Gaussian: return std::exp(-(d * d) / (2.0 * b * b));
    case KernelFamily::Exponential: return std::exp(-d / b);
    case KernelFamily::Bisquare: {
      if (d >= b) return 0.0;
      const double u = 1.0 - (d / b) * (d / b);
      return u * u;
    }
    case KernelFamily::Uniform: return 1.0;
  }
  return 0.0;
}

namespace {

// Shared cumulative-weight walk over the score-sorted entries. `weights`
// is aligned with the profile; `total` already includes any virtual tail
// mass, so a finite score may never reach the target in conservative mode.
double weighted_quantile(const CalibrationProfile& profile, const std::vector<double>& weights,
                         double total, CoverageLevel level, bool conservative) {
  const double target = 1.0 - level.epsilon;
  double cumulative = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    cumulative += weights[k] / total;
    if (cumulative >= target - kQuantileTolerance) return profile.entries()[k].score;
  }
  if (conservative) return std::numeric_limits<double>::infinity();
  return profile.entries().back().score;
}

}  // namespace

double cp_quantile(const CalibrationProfile& profile, CoverageLevel level) {
  validate_level(level);
  const std::vector<double> weights(profile.size(), 1.0);
  return weighted_quantile(profile, weights, static_cast<double>(profile.size()), level, false);
}

double geo_quantile(const CalibrationProfile& profile, const Location& test_loc,
                    const DecayKernel& kernel, CoverageLevel level,
                    const GeoQuantileOptions& options, GeoQuantileStats* stats) {
  validate_level(level);
  std::vector<double> weights(profile.size());
  double total = 0.0;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    weights[i] = kernel_weight(kernel, distance(test_loc, profile.entries()[i].loc));
    total += weights[i];
  }
  if (!(total > 0.0)) {
    // Every calibration point fell outside a compact kernel's support.
    std::fill(weights.begin(), weights.end(), 1.0);
    total = static_cast<double>(profile.size());
    if (stats != nullptr) stats->uniform_fallback = true;
  }
  if (options.conservative) total += 1.0;  // beta(0) = 1 point mass at +inf
  return weighted_quantile(profile, weights, total, level, options.conservative);
}

std::vector<double> geo_uncertainty_at(const CalibrationProfile& profile,
                                       const std::vector<Location>& locations,
                                       const DecayKernel& kernel, CoverageLevel level,
                                       const GeoQuantileOptions& options, int threads) {
  std::vector<double> lengths(locations.size());
  parallel_for(locations.size(), threads, [&](std::size_t i) {
    lengths[i] = 2.0 * geo_quantile(profile, locations[i], kernel, level, options);
  });
  return lengths;
}

namespace {

template <typename Fn>
auto run_stage(const char* label, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string(label) + ": " + e.what());
  }
}

}  // namespace

GeoCpResult geocp_run(const SpatialDataset& ds, const PredictorSpec& spec,
                      const GeoCpOptions& options) {
  validate_level(options.level);
  const auto t0 = std::chrono::steady_clock::now();

  GeoCpResult result;
  result.split = run_stage("stage 1 (split)", [&] {
    auto split = split_dataset(ds, options.fractions, options.seed);
    if (split.train.empty()) throw std::invalid_argument("training part is empty");
    if (split.calib.empty()) throw std::invalid_argument("calibration part is empty");
    if (split.test.empty()) throw std::invalid_argument("test part is empty");
    return split;
  });

  const auto t1 = std::chrono::steady_clock::now();
  result.model = run_stage("stage 2 (fit)", [&] { return fit_predictor(spec, result.split.train); });
  result.fit_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();
  const PredictorModel& model = *result.model;

  result.profile = run_stage("stage 3 (calibration scores)",
                             [&] { return nonconformity_scores(model, result.split.calib); });

  DecayKernel kernel = options.kernel;
  if (options.bandwidth_median || !(kernel.bandwidth > 0.0)) {
    std::vector<Location> calib_locs;
    calib_locs.reserve(result.split.calib.size());
    for (const auto& rec : result.split.calib.records) calib_locs.push_back(rec.loc);
    const double median = median_pairwise_distance(calib_locs);
    kernel.bandwidth = median > 0.0 ? median : 1.0;
  }
  result.bandwidth = kernel.bandwidth;

  run_stage("stage 4 (weighted quantiles)", [&] {
    const std::vector<double> predictions =
        predict_batch(model, result.split.test, options.threads);
    result.intervals.resize(result.split.test.size());
    std::atomic<std::size_t> fallbacks{0};
    const GeoQuantileOptions q_options{options.conservative};
    parallel_for(result.split.test.size(), options.threads, [&](std::size_t i) {
      GeoQuantileStats stats;
      const double q = geo_quantile(result.profile, result.split.test.records[i].loc, kernel,
                                    options.level, q_options, &stats);
      if (stats.uniform_fallback) fallbacks.fetch_add(1, std::memory_order_relaxed);
      result.intervals[i] = GeoInterval{predictions[i], q, options.level};
    });
    result.uniform_fallbacks = fallbacks.load();
    return 0;
  });

  result.total_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace geocp
