#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "geoconformal/dataset.hpp"

namespace geocp {

enum class VariogramKind { Exponential, Linear, Gaussian };

std::string variogram_kind_name(VariogramKind kind);
VariogramKind variogram_kind_from_name(const std::string& name);

struct VariogramBin {
  double lag;         // bin midpoint h
  double gamma;       // estimated semivariance at h
  std::size_t pairs;  // point pairs that fell in the bin
};

struct EmpiricalVariogram {
  std::vector<VariogramBin> bins;  // lags strictly increasing, empty bins dropped
  double max_lag = 0.0;
};

// Method-of-moments estimator: gamma(h) = sum over pairs in the bin of
// (z_i - z_j)^2 / (2 N(h)). Pairs farther apart than max_lag are ignored.
EmpiricalVariogram empirical_semivariogram(const SpatialDataset& train, std::size_t n_bins,
                                           double max_lag);

// Parametric semivariance curve:
//   Exponential: c0 + c1 * (1 - exp(-h/a))
//   Gaussian:    c0 + c1 * (1 - exp(-(h/a)^2))
//   Linear:      c0 + b*h
struct VariogramModel {
  VariogramKind kind = VariogramKind::Exponential;
  double nugget = 0.0;        // c0
  double partial_sill = 0.0;  // c1 (unused for Linear)
  double range = 1.0;         // a  (unused for Linear)
  double slope = 0.0;         // b  (Linear only)

  double operator()(double h) const;

  // Semivariance approached (or reached) at the given separation; used to
  // scale the kriging regularizer.
  double sill(double max_dist) const;
};

struct VariogramFit {
  VariogramModel model;
  double weighted_rss = 0.0;
};

// Weighted least squares with pair counts as weights. Linear fits are
// closed-form; exponential/Gaussian profile the range over a refined grid
// in (0, 3*max_lag] with the nugget/partial-sill pair solved exactly for
// each candidate range.
VariogramFit fit_variogram(const EmpiricalVariogram& emp, VariogramKind kind);

struct VariogramFitOptions {
  std::size_t n_bins = 15;
  double max_lag = 0.0;  // <= 0: half of the max pairwise training distance
};

}  // namespace geocp
