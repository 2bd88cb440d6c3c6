#pragma once

#include <memory>
#include <span>
#include <vector>

#include "geoconformal/predictor.hpp"

namespace geocp {

struct GbtParams {
  int trees = 200;
  int depth = 3;               // 0 means a single leaf per tree
  double learning_rate = 0.1;  // in (0, 1]
  int min_samples = 1;         // minimum records in each child of a split
};

struct GbtNode {
  int feature = -1;  // -1 for leaves
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf value (mean residual)
};

struct GbtTree {
  std::vector<GbtNode> nodes;
  double predict(std::span<const double> features) const;
};

// Squared-error gradient boosting over depth-limited regression trees with
// greedy variance-reduction splits. Deterministic given the data order;
// split ties resolve to the lowest feature index, then lowest threshold.
class GbtModel final : public PredictorModel {
 public:
  GbtModel(double base_score, double learning_rate, std::size_t n_features,
           std::vector<GbtTree> trees);

  double predict(const SpatialRecord& query) const override;
  double predict_features(std::span<const double> features) const;
  std::string kind() const override { return "gbt"; }
  void save(std::ostream& out) const override;
  static std::unique_ptr<GbtModel> load(std::istream& in);

  double base_score() const { return base_score_; }
  std::size_t tree_count() const { return trees_.size(); }

  // Prediction truncated to the first `trees` rounds; lets callers trace
  // the training error as the ensemble grows.
  double predict_prefix(std::span<const double> features, std::size_t trees) const;

 private:
  double base_score_;
  double learning_rate_;
  std::size_t n_features_;
  std::vector<GbtTree> trees_;
};

std::unique_ptr<GbtModel> train_gbt(const SpatialDataset& train, const GbtParams& params);

}  // namespace geocp
