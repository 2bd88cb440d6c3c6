#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "geoconformal/dataset.hpp"
#include "geoconformal/predictor.hpp"

namespace geocp {

// Miscoverage level epsilon in (0,1); the target coverage is 1 - epsilon.
struct CoverageLevel {
  double epsilon = 0.1;
};

void validate_level(CoverageLevel level);

struct CalibrationEntry {
  double score;              // nonconformity score |f(X) - y|
  Location loc;              // where the calibration sample lives
  std::size_t source_index;  // row in the calibration set
};

// Nonconformity scores sorted ascending; equal scores keep calibration
// order (stable sort), which fixes the quantile's tie-breaking.
class CalibrationProfile {
 public:
  static CalibrationProfile from_scores(const std::vector<double>& scores,
                                        const std::vector<Location>& locations);

  const std::vector<CalibrationEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<CalibrationEntry> entries_;
};

// Absolute-residual scores of the fitted model over the calibration set.
// The model must have been fitted on data disjoint from `calib`.
CalibrationProfile nonconformity_scores(const PredictorModel& model, const SpatialDataset& calib);

enum class KernelFamily { Gaussian, Exponential, Bisquare, Uniform };

std::string kernel_family_name(KernelFamily family);
KernelFamily kernel_family_from_name(const std::string& name);

// Distance-decay kernel: weight 1 at distance 0, nonincreasing, >= 0.
//   Gaussian:    exp(-d^2 / (2 b^2))
//   Exponential: exp(-d / b)
//   Bisquare:    (1 - (d/b)^2)^2 for d < b, else 0
//   Uniform:     1
struct DecayKernel {
  KernelFamily family = KernelFamily::Gaussian;
  double bandwidth = 1.0;
};

double kernel_weight(const DecayKernel& kernel, double d);

// Plain split-conformal quantile: the smallest score whose uniform
// cumulative weight k/m reaches 1 - epsilon.
double cp_quantile(const CalibrationProfile& profile, CoverageLevel level);

struct GeoQuantileOptions {
  // Adds a unit point mass at +infinity before normalizing (the standard
  // weighted-CP correction). The quantile is then +infinity whenever the
  // finite scores cannot reach the target cumulative weight.
  bool conservative = false;
};

struct GeoQuantileStats {
  // Set when a compact kernel left every calibration point at weight 0 and
  // uniform weights were used instead.
  bool uniform_fallback = false;
};

// The cumulative-weight threshold test allows this absolute slack, so that
// accumulated rounding (for example near-unit weights from a huge-bandwidth
// kernel) cannot push a boundary case past the next score. Any intended
// weight increment is many orders of magnitude larger.
inline constexpr double kQuantileTolerance = 1e-9;

// Geographically weighted (1-epsilon)-quantile: weight each calibration
// score by the kernel evaluated at its distance from the test location,
// normalize over the calibration points, accumulate in score order, and
// return the first score whose cumulative weight reaches 1 - epsilon.
double geo_quantile(const CalibrationProfile& profile, const Location& test_loc,
                    const DecayKernel& kernel, CoverageLevel level,
                    const GeoQuantileOptions& options = {}, GeoQuantileStats* stats = nullptr);

// Symmetric prediction interval [center - half_width, center + half_width].
struct GeoInterval {
  double center = 0.0;
  double half_width = 0.0;  // the quantile q-hat
  CoverageLevel level;

  double lower() const { return center - half_width; }
  double upper() const { return center + half_width; }
  double length() const { return 2.0 * half_width; }
};

struct GeoCpOptions {
  DecayKernel kernel{KernelFamily::Gaussian, 0.0};
  // When true (or when kernel.bandwidth <= 0) the bandwidth is set to the
  // median pairwise distance between calibration points.
  bool bandwidth_median = true;
  CoverageLevel level{0.1};
  SplitFractions fractions{0.8, 0.1, 0.1};
  std::uint64_t seed = 0;
  bool conservative = false;
  int threads = 1;
};

struct GeoCpResult {
  SplitResult split;
  std::vector<GeoInterval> intervals;  // one per test record, input order
  CalibrationProfile profile;
  std::unique_ptr<PredictorModel> model;
  double bandwidth = 0.0;  // resolved value actually used
  std::size_t uniform_fallbacks = 0;
  double fit_seconds = 0.0;
  double total_seconds = 0.0;
};

struct PredictorSpec;  // predictor_factory.hpp

// The full pipeline: split the dataset, fit the predictor on the training
// part, score the calibration part, then issue one geographically weighted
// interval per test point (parallel over test points, deterministic
// ordering). Component failures are rethrown with a stage label.
GeoCpResult geocp_run(const SpatialDataset& ds, const PredictorSpec& spec,
                      const GeoCpOptions& options);

// Interval lengths 2*q-hat of the profile evaluated at arbitrary locations;
// the uncertainty surface is independent of the predictions themselves.
std::vector<double> geo_uncertainty_at(const CalibrationProfile& profile,
                                       const std::vector<Location>& locations,
                                       const DecayKernel& kernel, CoverageLevel level,
                                       const GeoQuantileOptions& options = {}, int threads = 1);

}  // namespace geocp
