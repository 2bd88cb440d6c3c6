#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "geoconformal/predictor.hpp"
#include "geoconformal/variogram.hpp"

namespace geocp {

// Ordinary kriging over a fitted variogram. The augmented system with the
// unit-sum (Lagrange) constraint is factored once at fit time and reused
// for every query; the diagonal is regularized by 1e-10 times the sill.
class KrigingModel final : public PredictorModel {
 public:
  KrigingModel(const SpatialDataset& train, VariogramModel vario);

  double predict(const SpatialRecord& query) const override;
  std::string kind() const override { return "kriging"; }
  void save(std::ostream& out) const override;
  static std::unique_ptr<KrigingModel> load(std::istream& in);

  struct Prediction {
    double value;
    double variance;  // kriging variance, >= 0
  };
  Prediction predict_with_variance(const Location& query) const;

  struct WeightSolution {
    std::vector<double> weights;  // sum to 1 (ordinary-kriging constraint)
    double lagrange;
  };
  WeightSolution solve_weights(const Location& query) const;

  const VariogramModel& variogram() const { return vario_; }
  std::size_t training_size() const { return locs_.size(); }

 private:
  void factorize();

  std::vector<Location> locs_;
  std::vector<double> targets_;
  VariogramModel vario_;
  double eps_reg_ = 0.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu_;
};

std::unique_ptr<KrigingModel> fit_kriging(const SpatialDataset& train, const VariogramModel& vario);

}  // namespace geocp
