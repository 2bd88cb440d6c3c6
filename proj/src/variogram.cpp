#include "geoconformal/variogram.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace geocp {

std::string variogram_kind_name(VariogramKind kind) {
  switch (kind) {
    case VariogramKind::Exponential: return "exponential";
    case VariogramKind::Linear: return "linear";
    case VariogramKind::Gaussian: return "gaussian";
  }
  return "?";
}

VariogramKind variogram_kind_from_name(const std::string& name) {
  if (name == "exponential" || name == "exp") return VariogramKind::Exponential;
  if (name == "linear" || name == "lin") return VariogramKind::Linear;
  if (name == "gaussian" || name == "gau") return VariogramKind::Gaussian;
  throw std::invalid_argument("unknown variogram kind '" + name + "'");
}

EmpiricalVariogram empirical_semivariogram(const SpatialDataset& train, std::size_t n_bins,
                                           double max_lag) {
  if (train.size() < 2) throw std::invalid_argument("semivariogram needs at least 2 points");
  if (n_bins < 1) throw std::invalid_argument("n_bins must be >= 1");
  if (!(max_lag > 0.0)) throw std::invalid_argument("max_lag must be positive");

  const double width = max_lag / static_cast<double>(n_bins);
  std::vector<double> sum(n_bins, 0.0);
  std::vector<std::size_t> count(n_bins, 0);
  for (std::size_t i = 0; i + 1 < train.size(); ++i) {
    for (std::size_t j = i + 1; j < train.size(); ++j) {
      const double d = distance(train.records[i].loc, train.records[j].loc);
      if (d > max_lag) continue;
      std::size_t bin = static_cast<std::size_t>(d / width);
      if (bin >= n_bins) bin = n_bins - 1;  // d == max_lag
      const double dz = train.records[i].target - train.records[j].target;
      sum[bin] += dz * dz;
      count[bin] += 1;
    }
  }

  EmpiricalVariogram emp;
  emp.max_lag = max_lag;
  for (std::size_t b = 0; b < n_bins; ++b) {
    if (count[b] == 0) continue;
    emp.bins.push_back({(static_cast<double>(b) + 0.5) * width,
                        sum[b] / (2.0 * static_cast<double>(count[b])), count[b]});
  }
  return emp;
}

double VariogramModel::operator()(double h) const {
  switch (kind) {
    case VariogramKind::Exponential: return nugget + partial_sill * (1.0 - std::exp(-h / range));
    case VariogramKind::Gaussian:
      return nugget + partial_sill * (1.0 - std::exp(-(h / range) * (h / range)));
    case VariogramKind::Linear: return nugget + slope * h;
  }
  return 0.0;
}

double VariogramModel::sill(double max_dist) const {
  if (kind == VariogramKind::Linear) return nugget + slope * max_dist;
  return nugget + partial_sill;
}

namespace {

struct TwoParamFit {
  double c0 = 0.0;
  double c1 = 0.0;
  double rss = 0.0;
};

// Weighted least squares of gamma ~ c0 + c1*g with both coefficients
// clamped at zero: solve unconstrained, then fall back to the best of the
// two single-parameter boundary solutions.
TwoParamFit wls_two_param(const std::vector<double>& g, const EmpiricalVariogram& emp) {
  const auto rss_of = [&](double c0, double c1) {
    double rss = 0.0;
    for (std::size_t i = 0; i < emp.bins.size(); ++i) {
      const double r = emp.bins[i].gamma - c0 - c1 * g[i];
      rss += static_cast<double>(emp.bins[i].pairs) * r * r;
    }
    return rss;
  };

  double sw = 0, swg = 0, swgg = 0, swy = 0, swgy = 0;
  for (std::size_t i = 0; i < emp.bins.size(); ++i) {
    const double w = static_cast<double>(emp.bins[i].pairs);
    const double y = emp.bins[i].gamma;
    sw += w;
    swg += w * g[i];
    swgg += w * g[i] * g[i];
    swy += w * y;
    swgy += w * g[i] * y;
  }

  const double det = sw * swgg - swg * swg;
  if (std::abs(det) > 1e-30) {
    const double c0 = (swgg * swy - swg * swgy) / det;
    const double c1 = (sw * swgy - swg * swy) / det;
    if (c0 >= 0.0 && c1 >= 0.0) return {c0, c1, rss_of(c0, c1)};
  }
  const double c1_only = swgg > 0.0 ? std::max(0.0, swgy / swgg) : 0.0;
  const double c0_only = sw > 0.0 ? std::max(0.0, swy / sw) : 0.0;
  const TwoParamFit fit_c1{0.0, c1_only, rss_of(0.0, c1_only)};
  const TwoParamFit fit_c0{c0_only, 0.0, rss_of(c0_only, 0.0)};
  return fit_c1.rss <= fit_c0.rss ? fit_c1 : fit_c0;
}

VariogramFit fit_linear(const EmpiricalVariogram& emp) {
  std::vector<double> g;
  g.reserve(emp.bins.size());
  for (const auto& bin : emp.bins) g.push_back(bin.lag);
  const TwoParamFit fit = wls_two_param(g, emp);
  VariogramFit out;
  out.model.kind = VariogramKind::Linear;
  out.model.nugget = fit.c0;
  out.model.slope = fit.c1;
  out.weighted_rss = fit.rss;
  return out;
}

}  // namespace

VariogramFit fit_variogram(const EmpiricalVariogram& emp, VariogramKind kind) {
  const std::size_t free_params = kind == VariogramKind::Linear ? 2 : 3;
  if (emp.bins.size() < free_params) {
    throw std::invalid_argument("variogram fit needs at least " + std::to_string(free_params) +
                                " nonempty bins, got " + std::to_string(emp.bins.size()));
  }
  if (kind == VariogramKind::Linear) return fit_linear(emp);

  const auto basis = [kind](double h, double a) {
    const double t = h / a;
    return kind == VariogramKind::Exponential ? 1.0 - std::exp(-t) : 1.0 - std::exp(-t * t);
  };

  const double a_max = 3.0 * emp.max_lag;
  std::vector<double> g(emp.bins.size());
  const auto eval_range = [&](double a) {
    for (std::size_t i = 0; i < emp.bins.size(); ++i) g[i] = basis(emp.bins[i].lag, a);
    return wls_two_param(g, emp);
  };

  // Profile the range over a coarse grid, then zoom on the best candidate.
  double best_a = a_max;
  TwoParamFit best = eval_range(a_max);
  double lo = a_max / 96.0, hi = a_max;
  for (int round = 0; round < 24; ++round) {
    const int steps = round == 0 ? 96 : 24;
    double round_best_a = best_a;
    for (int s = 0; s <= steps; ++s) {
      const double a = lo + (hi - lo) * static_cast<double>(s) / steps;
      if (!(a > 0.0)) continue;
      const TwoParamFit fit = eval_range(a);
      if (fit.rss < best.rss) {
        best = fit;
        round_best_a = a;
      }
    }
    best_a = round_best_a;
    const double step = (hi - lo) / steps;
    lo = std::max(step * 1e-3, best_a - step);
    hi = std::min(a_max, best_a + step);
  }

  if (!std::isfinite(best.rss)) throw std::runtime_error("variogram fit produced a non-finite objective");

  VariogramFit out;
  out.model.kind = kind;
  out.model.nugget = best.c0;
  out.model.partial_sill = best.c1;
  out.model.range = best_a;
  out.weighted_rss = best.rss;
  return out;
}

}  // namespace geocp
