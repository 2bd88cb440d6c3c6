#pragma once

#include <memory>

#include "geoconformal/predictor.hpp"

namespace geocp {

// Mean target of the k nearest training points. Mostly used as a fast,
// assumption-free reference interpolator.
class KnnRegressor final : public PredictorModel {
 public:
  KnnRegressor(SpatialDataset train, std::size_t k);

  double predict(const SpatialRecord& query) const override;
  std::string kind() const override { return "knn"; }
  void save(std::ostream& out) const override;
  static std::unique_ptr<KnnRegressor> load(std::istream& in);

  std::size_t k() const { return k_; }

 private:
  SpatialDataset train_;
  std::size_t k_;
};

std::unique_ptr<KnnRegressor> fit_knn_regressor(const SpatialDataset& train, std::size_t k);

}  // namespace geocp
