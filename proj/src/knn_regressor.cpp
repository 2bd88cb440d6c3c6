#include "geoconformal/knn_regressor.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

#include "geoconformal/format.hpp"

namespace geocp {

KnnRegressor::KnnRegressor(SpatialDataset train, std::size_t k) : train_(std::move(train)), k_(k) {
  if (train_.empty()) throw std::invalid_argument("knn training set is empty");
  if (k_ < 1 || k_ > train_.size()) {
    throw std::invalid_argument("knn k=" + std::to_string(k_) + " out of range [1, " +
                                std::to_string(train_.size()) + "]");
  }
}

double KnnRegressor::predict(const SpatialRecord& query) const {
  const auto neighbors = knn_neighbors(train_, query.loc, k_);
  double sum = 0.0;
  for (const auto& nb : neighbors) sum += train_.records[nb.index].target;
  return sum / static_cast<double>(neighbors.size());
}

void KnnRegressor::save(std::ostream& out) const {
  out << "geoconformal-model v1\n";
  out << "kind knn\n";
  out << "k " << k_ << " crs " << crs_name(train_.crs) << " points " << train_.size() << '\n';
  for (const auto& rec : train_.records) {
    out << fmt_double(rec.loc.x) << ' ' << fmt_double(rec.loc.y) << ' ' << fmt_double(rec.target)
        << '\n';
  }
}

std::unique_ptr<KnnRegressor> KnnRegressor::load(std::istream& in) {
  std::string tag, crs_text;
  std::size_t k = 0, n = 0;
  in >> tag >> k;
  if (tag != "k") throw std::runtime_error("malformed knn model: expected 'k'");
  in >> tag >> crs_text >> tag >> n;
  SpatialDataset train;
  train.crs = crs_from_name(crs_text);
  train.records.resize(n);
  for (auto& rec : train.records) {
    in >> rec.loc.x >> rec.loc.y >> rec.target;
    rec.loc.crs = train.crs;
  }
  if (!in) throw std::runtime_error("malformed knn model: truncated point table");
  return std::make_unique<KnnRegressor>(std::move(train), k);
}

std::unique_ptr<KnnRegressor> fit_knn_regressor(const SpatialDataset& train, std::size_t k) {
  return std::make_unique<KnnRegressor>(train, k);
}

}  // namespace geocp
