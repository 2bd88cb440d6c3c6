#pragma once

#include <memory>
#include <string>

#include "geoconformal/dgsi.hpp"
#include "geoconformal/gbt.hpp"
#include "geoconformal/knn_regressor.hpp"
#include "geoconformal/kriging.hpp"
#include "geoconformal/predictor.hpp"
#include "geoconformal/variogram.hpp"

namespace geocp {

enum class PredictorKind {
  KrigingExponential,
  KrigingLinear,
  KrigingGaussian,
  DgsiBase,
  DgsiLocalFeature,
  DgsiLocation,
  Gbt,
  Knn,
};

// Names: kriging:exp, kriging:lin, kriging:gau, dgsi:base, dgsi:local,
// dgsi:loc, gbt, knn.
PredictorKind predictor_kind_from_name(const std::string& name);
std::string predictor_name(PredictorKind kind);

struct PredictorSpec {
  PredictorKind kind = PredictorKind::Gbt;
  GbtParams gbt;
  DgsiParams dgsi;               // dgsi.seed is overridden by `seed` below
  VariogramFitOptions vario;     // kriging variants
  std::size_t knn_k = 8;
  std::uint64_t seed = 0;        // training seed for stochastic models
};

std::unique_ptr<PredictorModel> fit_predictor(const PredictorSpec& spec,
                                              const SpatialDataset& train);

// Restores a model written by PredictorModel::save.
std::unique_ptr<PredictorModel> load_model(std::istream& in);
std::unique_ptr<PredictorModel> load_model_file(const std::string& path);
void save_model_file(const PredictorModel& model, const std::string& path);

}  // namespace geocp
