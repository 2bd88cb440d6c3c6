#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "geoconformal/predictor.hpp"

namespace geocp {

// Spatial context handed to the network, per neighbor:
//   Base:         normalized distance and orientation (sin/cos of bearing)
//   LocalFeature: Base plus the mean target of the query's neighbors
//   Location:     Base plus the neighbor's normalized coordinates
enum class DgsiVariant { Base, LocalFeature, Location };

std::string dgsi_variant_name(DgsiVariant variant);
DgsiVariant dgsi_variant_from_name(const std::string& name);

struct DgsiParams {
  DgsiVariant variant = DgsiVariant::Base;
  std::size_t k = 6;           // neighbors per query
  int epochs = 300;
  double learning_rate = 0.01;
  int hidden = 32;             // width of both hidden layers
  std::uint64_t seed = 0;
};

// Neighbor-weighting interpolator: a two-hidden-layer tanh network maps the
// spatial context of the k nearest observations to k softmax weights, and
// the prediction is the weighted sum of those neighbors' targets. Trained
// by full-batch gradient descent on squared error over leave-one-out
// queries within the training set.
class DgsiLiteModel final : public PredictorModel {
 public:
  double predict(const SpatialRecord& query) const override;
  std::string kind() const override { return "dgsi"; }
  void save(std::ostream& out) const override;
  static std::unique_ptr<DgsiLiteModel> load(std::istream& in);

  // Softmax weights over the query's k nearest training neighbors;
  // nonnegative and summing to 1.
  std::vector<double> neighbor_weights(const Location& query) const;

  const std::vector<double>& loss_trajectory() const { return losses_; }
  const DgsiParams& params() const { return params_; }

 private:
  DgsiLiteModel() = default;

  friend std::unique_ptr<DgsiLiteModel> train_dgsi_lite(const SpatialDataset& train,
                                                        const DgsiParams& params);

  std::size_t per_neighbor_features() const;
  void build_input(const Location& query, const std::vector<std::size_t>& neighbors,
                   Eigen::VectorXd& input, Eigen::VectorXd& targets) const;
  Eigen::VectorXd softmax_weights(const Eigen::VectorXd& input) const;

  SpatialDataset train_;
  DgsiParams params_;
  // Normalization constants captured from the training set.
  double max_distance_ = 1.0;
  double min_x_ = 0.0, span_x_ = 1.0;
  double min_y_ = 0.0, span_y_ = 1.0;
  double target_mean_ = 0.0, target_sd_ = 1.0;

  Eigen::MatrixXd w1_, w2_, w3_;
  Eigen::VectorXd b1_, b2_, b3_;
  std::vector<double> losses_;
};

std::unique_ptr<DgsiLiteModel> train_dgsi_lite(const SpatialDataset& train,
                                               const DgsiParams& params);

}  // namespace geocp
