#include "geoconformal/predictor_factory.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace geocp {

PredictorKind predictor_kind_from_name(const std::string& name) {
  if (name == "kriging:exp") return PredictorKind::KrigingExponential;
  if (name == "kriging:lin") return PredictorKind::KrigingLinear;
  if (name == "kriging:gau") return PredictorKind::KrigingGaussian;
  if (name == "dgsi:base") return PredictorKind::DgsiBase;
  if (name == "dgsi:local") return PredictorKind::DgsiLocalFeature;
  if (name == "dgsi:loc") return PredictorKind::DgsiLocation;
  if (name == "gbt") return PredictorKind::Gbt;
  if (name == "knn") return PredictorKind::Knn;
  throw std::invalid_argument(
      "unknown predictor '" + name +
      "' (expected kriging:exp|kriging:lin|kriging:gau|dgsi:base|dgsi:local|dgsi:loc|gbt|knn)");
}

std::string predictor_name(PredictorKind kind) {
  switch (kind) {
    case PredictorKind::KrigingExponential: return "kriging:exp";
    case PredictorKind::KrigingLinear: return "kriging:lin";
    case PredictorKind::KrigingGaussian: return "kriging:gau";
    case PredictorKind::DgsiBase: return "dgsi:base";
    case PredictorKind::DgsiLocalFeature: return "dgsi:local";
    case PredictorKind::DgsiLocation: return "dgsi:loc";
    case PredictorKind::Gbt: return "gbt";
    case PredictorKind::Knn: return "knn";
  }
  return "?";
}

namespace {

std::unique_ptr<PredictorModel> fit_kriging_kind(const PredictorSpec& spec,
                                                 const SpatialDataset& train, VariogramKind kind) {
  double max_lag = spec.vario.max_lag;
  if (!(max_lag > 0.0)) max_lag = 0.5 * max_pairwise_distance(train);
  const auto emp = empirical_semivariogram(train, spec.vario.n_bins, max_lag);
  const auto fit = fit_variogram(emp, kind);
  return fit_kriging(train, fit.model);
}

}  // namespace

std::unique_ptr<PredictorModel> fit_predictor(const PredictorSpec& spec,
                                              const SpatialDataset& train) {
  switch (spec.kind) {
    case PredictorKind::KrigingExponential:
      return fit_kriging_kind(spec, train, VariogramKind::Exponential);
    case PredictorKind::KrigingLinear:
      return fit_kriging_kind(spec, train, VariogramKind::Linear);
    case PredictorKind::KrigingGaussian:
      return fit_kriging_kind(spec, train, VariogramKind::Gaussian);
    case PredictorKind::DgsiBase:
    case PredictorKind::DgsiLocalFeature:
    case PredictorKind::DgsiLocation: {
      DgsiParams params = spec.dgsi;
      params.variant = spec.kind == PredictorKind::DgsiBase          ? DgsiVariant::Base
                       : spec.kind == PredictorKind::DgsiLocalFeature ? DgsiVariant::LocalFeature
                                                                      : DgsiVariant::Location;
      params.seed = spec.seed;
      return train_dgsi_lite(train, params);
    }
    case PredictorKind::Gbt: return train_gbt(train, spec.gbt);
    case PredictorKind::Knn: return fit_knn_regressor(train, spec.knn_k);
  }
  throw std::invalid_argument("unknown predictor kind");
}

std::unique_ptr<PredictorModel> load_model(std::istream& in) {
  std::string magic, version, tag, kind;
  in >> magic >> version >> tag >> kind;
  if (magic != "geoconformal-model" || tag != "kind") {
    throw std::runtime_error("not a geoconformal model file");
  }
  if (version != "v1") throw std::runtime_error("unsupported model version '" + version + "'");
  if (kind == "kriging") return KrigingModel::load(in);
  if (kind == "dgsi") return DgsiLiteModel::load(in);
  if (kind == "gbt") return GbtModel::load(in);
  if (kind == "knn") return KnnRegressor::load(in);
  throw std::runtime_error("unknown model kind '" + kind + "'");
}

std::unique_ptr<PredictorModel> load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file '" + path + "'");
  return load_model(in);
}

void save_model_file(const PredictorModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write model file '" + path + "'");
  model.save(out);
}

}  // namespace geocp
