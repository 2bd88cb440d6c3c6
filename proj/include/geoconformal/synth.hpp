#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "geoconformal/dataset.hpp"

namespace geocp {

enum class CovarianceKind { Exponential, Gaussian, Nugget };

std::string covariance_kind_name(CovarianceKind kind);
CovarianceKind covariance_kind_from_name(const std::string& name);

// Stationary covariance for Gaussian-field simulation:
//   Exponential: sill * exp(-d/range)
//   Gaussian:    sill * exp(-(d/range)^2)
//   Nugget:      sill at d == 0, else 0 (i.i.d. field)
// The nugget term is added to the diagonal before factorization.
struct FieldSpec {
  CovarianceKind kind = CovarianceKind::Exponential;
  double sill = 1.0;
  double range = 1.0;
  double nugget = 0.0;
  double mean = 0.0;
};

// Exact draw of a Gaussian random field at the given locations via Cholesky
// factorization of the covariance matrix. Reproducible from the seed.
std::vector<double> sample_gaussian_field(const FieldSpec& spec,
                                          const std::vector<Location>& locations,
                                          std::uint64_t seed);

enum class SamplingKind { UniformRandom, Clustered };

enum class NoiseProfileKind { Constant, LinearRamp, TwoRegion };

// Named noise laws sigma(x): Constant is sigma0 everywhere; LinearRamp
// interpolates sigma0 -> sigma1 across the x extent; TwoRegion is sigma0 on
// the left half (x < extent/2) and sigma1 on the right.
struct NoiseProfile {
  NoiseProfileKind kind = NoiseProfileKind::Constant;
  double sigma0 = 1.0;
  double sigma1 = 1.0;
};

double noise_sigma(const NoiseProfile& noise, double x, double extent);

struct SceneSpec {
  std::size_t n = 100;
  double extent = 1000.0;  // square domain [0, extent]^2, planar
  SamplingKind sampling = SamplingKind::UniformRandom;
  NoiseProfile noise;
  std::uint64_t seed = 0;
};

// Smooth deterministic trend underlying every regression scene:
//   10 + 5 sin(2 pi x / extent) cos(2 pi y / extent) + 2 x / extent
double scene_trend(double x, double y, double extent);

struct RegressionScene {
  SpatialDataset data;  // features: coord_x, coord_y (the coordinates)
  SceneSpec spec;

  double sigma_at(const Location& loc) const { return noise_sigma(spec.noise, loc.x, spec.extent); }
  double trend_at(const Location& loc) const { return scene_trend(loc.x, loc.y, spec.extent); }
};

// target = trend + sigma(x) * standard normal; the true noise law stays
// available through the returned scene for oracle coverage checks.
RegressionScene make_regression_scene(const SceneSpec& spec);

// n locations in [0, extent]^2; Clustered draws around 5 cluster centers.
std::vector<Location> random_locations(std::size_t n, double extent, SamplingKind sampling,
                                       std::uint64_t seed);

}  // namespace geocp
