#include "geoconformal/kriging.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "geoconformal/format.hpp"

namespace geocp {

KrigingModel::KrigingModel(const SpatialDataset& train, VariogramModel vario) : vario_(vario) {
  if (train.size() < 2) throw std::invalid_argument("kriging needs at least 2 training points");
  locs_.reserve(train.size());
  targets_.reserve(train.size());
  for (const auto& rec : train.records) {
    locs_.push_back(rec.loc);
    targets_.push_back(rec.target);
  }
  factorize();
}

void KrigingModel::factorize() {
  const std::size_t n = locs_.size();
  double max_dist = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      max_dist = std::max(max_dist, distance(locs_[i], locs_[j]));
    }
  }
  const double sill = vario_.sill(max_dist);
  eps_reg_ = sill > 0.0 ? 1e-10 * sill : 1e-12;

  Eigen::MatrixXd a(n + 1, n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double g = vario_(distance(locs_[i], locs_[j]));
      a(i, j) = g;
      a(j, i) = g;
    }
    a(i, i) += eps_reg_;
    a(i, n) = 1.0;
    a(n, i) = 1.0;
  }
  a(n, n) = 0.0;

  lu_.compute(a);
  if (!lu_.isInvertible()) {
    throw std::runtime_error("ordinary kriging system is singular after regularization (rank " +
                             std::to_string(lu_.rank()) + " of " + std::to_string(n + 1) + ")");
  }
}

KrigingModel::WeightSolution KrigingModel::solve_weights(const Location& query) const {
  const std::size_t n = locs_.size();
  if (query.crs != locs_.front().crs) {
    throw std::invalid_argument("query CRS does not match kriging training CRS");
  }
  Eigen::VectorXd b(n + 1);
  for (std::size_t i = 0; i < n; ++i) b(i) = vario_(distance(query, locs_[i]));
  b(n) = 1.0;
  const Eigen::VectorXd x = lu_.solve(b);
  WeightSolution sol;
  sol.weights.assign(x.data(), x.data() + n);
  sol.lagrange = x(n);
  return sol;
}

KrigingModel::Prediction KrigingModel::predict_with_variance(const Location& query) const {
  const WeightSolution sol = solve_weights(query);
  double value = 0.0;
  double variance = sol.lagrange;
  for (std::size_t i = 0; i < locs_.size(); ++i) {
    value += sol.weights[i] * targets_[i];
    variance += sol.weights[i] * vario_(distance(query, locs_[i]));
  }
  return {value, std::max(0.0, variance)};
}

double KrigingModel::predict(const SpatialRecord& query) const {
  return predict_with_variance(query.loc).value;
}

void KrigingModel::save(std::ostream& out) const {
  out << "geoconformal-model v1\n";
  out << "kind kriging\n";
  out << "variogram " << variogram_kind_name(vario_.kind) << ' ' << fmt_double(vario_.nugget) << ' '
      << fmt_double(vario_.partial_sill) << ' ' << fmt_double(vario_.range) << ' '
      << fmt_double(vario_.slope) << '\n';
  out << "crs " << crs_name(locs_.front().crs) << '\n';
  out << "points " << locs_.size() << '\n';
  for (std::size_t i = 0; i < locs_.size(); ++i) {
    out << fmt_double(locs_[i].x) << ' ' << fmt_double(locs_[i].y) << ' ' << fmt_double(targets_[i])
        << '\n';
  }
}

std::unique_ptr<KrigingModel> KrigingModel::load(std::istream& in) {
  std::string tag, kind_name;
  VariogramModel vario;
  in >> tag >> kind_name >> vario.nugget >> vario.partial_sill >> vario.range >> vario.slope;
  if (tag != "variogram") throw std::runtime_error("malformed kriging model: expected 'variogram'");
  vario.kind = variogram_kind_from_name(kind_name);
  std::string crs_text;
  in >> tag >> crs_text;
  if (tag != "crs") throw std::runtime_error("malformed kriging model: expected 'crs'");
  std::size_t n = 0;
  in >> tag >> n;
  if (tag != "points" || n < 2) throw std::runtime_error("malformed kriging model: bad point count");

  SpatialDataset train;
  train.crs = crs_from_name(crs_text);
  train.records.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    SpatialRecord& rec = train.records[i];
    in >> rec.loc.x >> rec.loc.y >> rec.target;
    rec.loc.crs = train.crs;
  }
  if (!in) throw std::runtime_error("malformed kriging model: truncated point table");
  return std::make_unique<KrigingModel>(train, vario);
}

std::unique_ptr<KrigingModel> fit_kriging(const SpatialDataset& train, const VariogramModel& vario) {
  return std::make_unique<KrigingModel>(train, vario);
}

}  // namespace geocp
