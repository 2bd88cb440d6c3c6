#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "geoconformal/conformal.hpp"
#include "geoconformal/dataset.hpp"
#include "geoconformal/predictor_factory.hpp"

namespace geocp {

struct CoverageReport {
  std::size_t n_test = 0;
  std::size_t n_covered = 0;
  double coverage = 0.0;
  double mean_length = 0.0;
  double median_length = 0.0;
  CoverageLevel level;
};

// Fraction of true targets inside their closed interval [lower, upper].
CoverageReport coverage_ratio(const std::vector<GeoInterval>& intervals,
                              const std::vector<double>& truth);

double rmse(const std::vector<double>& pred, const std::vector<double>& truth);

// Pearson correlation; throws if either vector is constant.
double pearson_corr(const std::vector<double>& a, const std::vector<double>& b);

enum class WeightScheme { KnnRowStandardized, DistanceBand };

struct SpatialWeightsSpec {
  WeightScheme scheme = WeightScheme::KnnRowStandardized;
  std::size_t k = 8;     // KnnRowStandardized
  double radius = 0.0;   // DistanceBand
};

// Row-standardized neighbor weights with no self-weight. Points without a
// neighbor inside a distance band get an empty row and are flagged.
struct SpatialWeightsMatrix {
  std::size_t n = 0;
  std::vector<std::vector<std::pair<std::size_t, double>>> rows;
  std::vector<std::size_t> isolated;
  SpatialWeightsSpec spec;
};

SpatialWeightsMatrix build_spatial_weights(const std::vector<Location>& locations,
                                           const SpatialWeightsSpec& spec);
SpatialWeightsMatrix build_spatial_weights(const SpatialDataset& ds,
                                           const SpatialWeightsSpec& spec);

struct MoranResult {
  double i = 0.0;
  double expected_i = 0.0;  // -1/(n-1)
  double variance = 0.0;    // under the normality assumption
  double z_score = 0.0;
};

// Global Moran's I = (n/S0) * sum_ij w_ij (z_i - mean)(z_j - mean) /
// sum_i (z_i - mean)^2. Throws on zero variance.
MoranResult morans_i(const std::vector<double>& values, const SpatialWeightsMatrix& w);

// Local Moran's I_i = ((z_i - mean)/m2) * sum_j w_ij (z_j - mean) with
// m2 = sum (z - mean)^2 / n. For row-standardized weights the mean of the
// local values equals the global statistic.
std::vector<double> local_morans_i(const std::vector<double>& values,
                                   const SpatialWeightsMatrix& w);

struct BootstrapParams {
  std::size_t replicates = 200;
  CoverageLevel level{0.1};
  std::uint64_t seed = 0;
  int threads = 1;
};

struct BootstrapReport {
  std::size_t replicates = 0;
  std::vector<std::pair<double, double>> intervals;  // per test point (lo, hi)
  std::size_t n_covered = 0;
  double coverage = 0.0;
  double mean_width = 0.0;
  double wall_seconds = 0.0;
};

// Percentile bootstrap baseline: refit the predictor on `replicates`
// with-replacement resamples of `ds`, predict every test point, and take
// the epsilon/2 and 1-epsilon/2 percentiles of each point's predictions
// (linear interpolation between order statistics, h = (B+1)p clamped to
// [1, B]). Replicate r draws from seed + r, so parallel and serial runs
// agree exactly.
BootstrapReport bootstrap_intervals(const SpatialDataset& ds, const SpatialDataset& test,
                                    const PredictorSpec& predictor, const BootstrapParams& params);

struct DependenceRun {
  std::vector<double> uncertainty;  // per-point interval lengths
  std::vector<double> values;       // per-point observed variable
  const SpatialWeightsMatrix* weights = nullptr;
};

struct DependenceEntry {
  double global_i = 0.0;
  double inner_corr = 0.0;  // corr(local Moran's I of values, uncertainty)
  bool degenerate = false;
};

struct DependenceResult {
  std::vector<DependenceEntry> entries;  // aligned with the input runs
  double outer_corr = 0.0;               // corr over (global_i, inner_corr)
  std::size_t used = 0;                  // non-degenerate runs
  std::vector<std::string> warnings;
};

// Two-level analysis: per run, correlate local spatial dependence with
// uncertainty; across runs, correlate that inner statistic with global
// Moran's I. Degenerate runs are skipped with a warning.
DependenceResult dependence_analysis(const std::vector<DependenceRun>& runs);

struct UncertaintyChangeResult {
  double corr = 0.0;
  bool degenerate = false;  // constant delta or constant local dependence
};

// Correlates local Moran's I of `values` with the per-point uncertainty
// change (variant - base).
UncertaintyChangeResult uncertainty_change_analysis(const std::vector<double>& base_uncertainty,
                                                    const std::vector<double>& variant_uncertainty,
                                                    const std::vector<double>& values,
                                                    const SpatialWeightsMatrix& w);

}  // namespace geocp
