#include "geoconformal/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "geoconformal/rng.hpp"

namespace geocp {

std::string covariance_kind_name(CovarianceKind kind) {
  switch (kind) {
    case CovarianceKind::Exponential: return "exp";
    case CovarianceKind::Gaussian: return "gau";
    case CovarianceKind::Nugget: return "nugget";
  }
  return "?";
}

CovarianceKind covariance_kind_from_name(const std::string& name) {
  if (name == "exp" || name == "exponential") return CovarianceKind::Exponential;
  if (name == "gau" || name == "gaussian") return CovarianceKind::Gaussian;
  if (name == "nugget") return CovarianceKind::Nugget;
  throw std::invalid_argument("unknown covariance kind '" + name + "'");
}

std::vector<double> sample_gaussian_field(const FieldSpec& spec,
                                          const std::vector<Location>& locations,
                                          std::uint64_t seed) {
  if (locations.empty()) throw std::invalid_argument("field needs at least one location");
  if (spec.sill < 0.0 || spec.nugget < 0.0 || !(spec.range > 0.0)) {
    throw std::invalid_argument("field spec requires sill >= 0, nugget >= 0, range > 0");
  }
  const auto n = static_cast<Eigen::Index>(locations.size());
  const auto cov = [&](double d) {
    switch (spec.kind) {
      case CovarianceKind::Exponential: return spec.sill * std::exp(-d / spec.range);
      case CovarianceKind::Gaussian:
        return spec.sill * std::exp(-(d / spec.range) * (d / spec.range));
      case CovarianceKind::Nugget: return d == 0.0 ? spec.sill : 0.0;
    }
    return 0.0;
  };

  Eigen::MatrixXd c(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double value = cov(distance(locations[static_cast<std::size_t>(i)],
                                        locations[static_cast<std::size_t>(j)]));
      c(i, j) = value;
      c(j, i) = value;
    }
    c(i, i) += spec.nugget;
  }

  if (c.isZero(0.0)) return std::vector<double>(locations.size(), spec.mean);

  Eigen::LLT<Eigen::MatrixXd> llt(c);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("field covariance is not factorizable after nugget regularization");
  }

  Rng rng(seed);
  Eigen::VectorXd xi(n);
  for (Eigen::Index i = 0; i < n; ++i) xi(i) = rng.normal();
  const Eigen::VectorXd z = llt.matrixL() * xi;

  std::vector<double> values(locations.size());
  for (Eigen::Index i = 0; i < n; ++i) values[static_cast<std::size_t>(i)] = spec.mean + z(i);
  return values;
}

double noise_sigma(const NoiseProfile& noise, double x, double extent) {
  switch (noise.kind) {
    case NoiseProfileKind::Constant: return noise.sigma0;
    case NoiseProfileKind::LinearRamp: {
      const double t = std::clamp(x / extent, 0.0, 1.0);
      return noise.sigma0 + (noise.sigma1 - noise.sigma0) * t;
    }
    case NoiseProfileKind::TwoRegion: return x < 0.5 * extent ? noise.sigma0 : noise.sigma1;
  }
  return noise.sigma0;
}

double scene_trend(double x, double y, double extent) {
  constexpr double two_pi = 2.0 * 3.14159265358979323846;
  return 10.0 + 5.0 * std::sin(two_pi * x / extent) * std::cos(two_pi * y / extent) +
         2.0 * x / extent;
}

std::vector<Location> random_locations(std::size_t n, double extent, SamplingKind sampling,
                                       std::uint64_t seed) {
  if (!(extent > 0.0)) throw std::invalid_argument("extent must be positive");
  Rng rng(seed);
  std::vector<Location> locs;
  locs.reserve(n);
  if (sampling == SamplingKind::UniformRandom) {
    for (std::size_t i = 0; i < n; ++i) {
      locs.push_back({rng.uniform(0.0, extent), rng.uniform(0.0, extent), Crs::Planar});
    }
    return locs;
  }
  constexpr std::size_t n_clusters = 5;
  std::vector<Location> centers;
  for (std::size_t c = 0; c < n_clusters; ++c) {
    centers.push_back({rng.uniform(0.0, extent), rng.uniform(0.0, extent), Crs::Planar});
  }
  const double spread = extent / 20.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Location& center = centers[rng.below(n_clusters)];
    const double x = std::clamp(center.x + spread * rng.normal(), 0.0, extent);
    const double y = std::clamp(center.y + spread * rng.normal(), 0.0, extent);
    locs.push_back({x, y, Crs::Planar});
  }
  return locs;
}

RegressionScene make_regression_scene(const SceneSpec& spec) {
  if (spec.n < 10) throw std::invalid_argument("scene needs at least 10 points");
  if (!(spec.extent > 0.0)) throw std::invalid_argument("scene extent must be positive");
  if (noise_sigma(spec.noise, 0.0, spec.extent) < 0.0 ||
      noise_sigma(spec.noise, spec.extent, spec.extent) < 0.0) {
    throw std::invalid_argument("scene noise must be nonnegative");
  }

  RegressionScene scene;
  scene.spec = spec;
  scene.data.crs = Crs::Planar;
  scene.data.feature_names = {"coord_x", "coord_y"};
  // One generator drives both the layout and the noise so a single seed
  // reproduces the whole scene.
  Rng rng(spec.seed);
  scene.data.records.reserve(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    Location loc{rng.uniform(0.0, spec.extent), rng.uniform(0.0, spec.extent), Crs::Planar};
    if (spec.sampling == SamplingKind::Clustered) {
      // Clustered layouts reuse the shared helper and an offset seed.
      break;
    }
    SpatialRecord rec;
    rec.loc = loc;
    rec.features = {loc.x, loc.y};
    rec.target = scene_trend(loc.x, loc.y, spec.extent) +
                 noise_sigma(spec.noise, loc.x, spec.extent) * rng.normal();
    scene.data.records.push_back(std::move(rec));
  }
  if (spec.sampling == SamplingKind::Clustered) {
    const auto locs = random_locations(spec.n, spec.extent, SamplingKind::Clustered, spec.seed);
    Rng noise_rng(spec.seed + 0x9e3779b97f4a7c15ULL);
    for (const auto& loc : locs) {
      SpatialRecord rec;
      rec.loc = loc;
      rec.features = {loc.x, loc.y};
      rec.target = scene_trend(loc.x, loc.y, spec.extent) +
                   noise_sigma(spec.noise, loc.x, spec.extent) * noise_rng.normal();
      scene.data.records.push_back(std::move(rec));
    }
  }
  return scene;
}

}  // namespace geocp
