// Command-line front door for the geoconformal toolkit: runs the GeoCP
// pipeline, the bootstrap baseline, the canned experiments, synthetic data
// generation, and spatial-autocorrelation reports.
#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "geoconformal/conformal.hpp"
#include "geoconformal/csv.hpp"
#include "geoconformal/diagnostics.hpp"
#include "geoconformal/format.hpp"
#include "geoconformal/geojson.hpp"
#include "geoconformal/predictor_factory.hpp"
#include "geoconformal/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace geocp;

namespace {

struct Options {
  // data
  std::string data;
  std::string x_col = "x";
  std::string y_col = "y";
  std::string target_col = "target";
  std::vector<std::string> feature_cols;
  std::string crs = "planar";
  // conformal
  std::string predictor = "gbt";
  std::string kernel = "gaussian";
  std::string bandwidth = "median";
  double epsilon = 0.1;
  std::string split = "0.8/0.1/0.1";
  std::uint64_t seed = 42;
  bool conservative = false;
  // predictor hyperparameters
  int trees = 200;
  int depth = 3;
  double gbt_lr = 0.1;
  int min_samples = 1;
  std::size_t dgsi_k = 6;
  int epochs = 300;
  double dgsi_lr = 0.01;
  int dgsi_hidden = 32;
  std::size_t vario_bins = 15;
  double vario_max_lag = 0.0;
  std::size_t knn_k = 8;
  // run control
  std::string out;
  int threads = 1;
  std::string save_model;
  // bootstrap
  std::size_t replicates = 200;
  // experiment
  std::string experiment;
  // synth
  std::string synth_mode = "scene";
  std::size_t synth_n = 200;
  double synth_extent = 1000.0;
  std::string sampling = "uniform";
  std::string noise = "constant";
  double sigma0 = 1.0;
  double sigma1 = 1.0;
  std::string cov = "exp";
  double sill = 1.0;
  double field_range = 200.0;
  double nugget = 0.0;
  double field_mean = 0.0;
  // moran
  std::string weights = "knn";
  std::size_t weights_k = 8;
  double band_radius = 0.0;
};

void add_data_flags(CLI::App* cmd, Options& opt) {
  cmd->add_option("--data", opt.data, "input CSV path")->required();
  cmd->add_option("--x-col", opt.x_col, "column holding the x coordinate / longitude");
  cmd->add_option("--y-col", opt.y_col, "column holding the y coordinate / latitude");
  cmd->add_option("--target-col", opt.target_col, "column holding the target value");
  cmd->add_option("--feature-cols", opt.feature_cols, "comma-separated feature columns")
      ->delimiter(',');
  cmd->add_option("--crs", opt.crs, "coordinate system: planar|latlon")
      ->check(CLI::IsMember({"planar", "latlon"}));
}

void add_predictor_flags(CLI::App* cmd, Options& opt) {
  cmd->add_option("--predictor", opt.predictor,
                  "kriging:exp|kriging:lin|kriging:gau|dgsi:base|dgsi:local|dgsi:loc|gbt|knn");
  cmd->add_option("--trees", opt.trees, "gbt: number of boosting rounds");
  cmd->add_option("--depth", opt.depth, "gbt: maximum tree depth");
  cmd->add_option("--gbt-learning-rate", opt.gbt_lr, "gbt: shrinkage in (0,1]");
  cmd->add_option("--min-samples", opt.min_samples, "gbt: minimum records per child");
  cmd->add_option("--dgsi-k", opt.dgsi_k, "dgsi: neighbors per query");
  cmd->add_option("--epochs", opt.epochs, "dgsi: training epochs");
  cmd->add_option("--dgsi-learning-rate", opt.dgsi_lr, "dgsi: gradient-descent step size");
  cmd->add_option("--dgsi-hidden", opt.dgsi_hidden, "dgsi: hidden layer width");
  cmd->add_option("--vario-bins", opt.vario_bins, "kriging: empirical variogram bins");
  cmd->add_option("--vario-max-lag", opt.vario_max_lag,
                  "kriging: variogram max lag (0 = half the max pairwise distance)");
  cmd->add_option("--knn-k", opt.knn_k, "knn: neighbors averaged per prediction");
}

void add_conformal_flags(CLI::App* cmd, Options& opt) {
  cmd->add_option("--kernel", opt.kernel, "decay kernel: gaussian|exponential|bisquare|uniform")
      ->check(CLI::IsMember({"gaussian", "exponential", "bisquare", "uniform"}));
  cmd->add_option("--bandwidth", opt.bandwidth, "kernel bandwidth: a length or 'median'");
  cmd->add_option("--epsilon", opt.epsilon, "miscoverage level in (0,1)");
  cmd->add_option("--split", opt.split, "train/calib/test fractions, e.g. 0.8/0.1/0.1");
  cmd->add_option("--conservative", opt.conservative,
                  "add the weighted-CP virtual test mass before normalizing");
}

void add_run_flags(CLI::App* cmd, Options& opt) {
  cmd->add_option("--seed", opt.seed, "random seed");
  cmd->add_option("--out", opt.out, "output directory")->required();
  cmd->add_option("--threads", opt.threads, "worker thread cap")->check(CLI::Range(1, 64));
}

// ---------------------------------------------------------------------------
// small output helpers

void write_text_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("short write to '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

std::string timestamp_utc() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

CsvSchema schema_from(const Options& opt) {
  CsvSchema schema;
  schema.x_col = opt.x_col;
  schema.y_col = opt.y_col;
  schema.target_col = opt.target_col;
  schema.feature_cols = opt.feature_cols;
  schema.crs = crs_from_name(opt.crs);
  return schema;
}

PredictorSpec predictor_from(const Options& opt) {
  PredictorSpec spec;
  spec.kind = predictor_kind_from_name(opt.predictor);
  spec.gbt = {opt.trees, opt.depth, opt.gbt_lr, opt.min_samples};
  spec.dgsi.k = opt.dgsi_k;
  spec.dgsi.epochs = opt.epochs;
  spec.dgsi.learning_rate = opt.dgsi_lr;
  spec.dgsi.hidden = opt.dgsi_hidden;
  spec.vario.n_bins = opt.vario_bins;
  spec.vario.max_lag = opt.vario_max_lag;
  spec.knn_k = opt.knn_k;
  spec.seed = opt.seed;
  return spec;
}

GeoCpOptions geocp_options_from(const Options& opt) {
  GeoCpOptions options;
  options.kernel.family = kernel_family_from_name(opt.kernel);
  if (opt.bandwidth == "median") {
    options.bandwidth_median = true;
  } else {
    options.bandwidth_median = false;
    options.kernel.bandwidth = std::stod(opt.bandwidth);
    if (!(options.kernel.bandwidth > 0.0)) {
      throw std::invalid_argument("bandwidth must be positive or 'median'");
    }
  }
  options.level = {opt.epsilon};
  validate_level(options.level);
  options.fractions = parse_split_fractions(opt.split);
  options.seed = opt.seed;
  options.conservative = opt.conservative;
  options.threads = opt.threads;
  return options;
}

json config_echo(const Options& opt, const std::string& command) {
  json cfg;
  cfg["command"] = command;
  cfg["data"] = opt.data;
  cfg["x_col"] = opt.x_col;
  cfg["y_col"] = opt.y_col;
  cfg["target_col"] = opt.target_col;
  cfg["feature_cols"] = opt.feature_cols;
  cfg["crs"] = opt.crs;
  cfg["predictor"] = opt.predictor;
  cfg["kernel"] = opt.kernel;
  cfg["bandwidth"] = opt.bandwidth;
  cfg["epsilon"] = opt.epsilon;
  cfg["split"] = opt.split;
  cfg["seed"] = opt.seed;
  cfg["conservative"] = opt.conservative;
  cfg["threads"] = opt.threads;
  cfg["out"] = opt.out;
  return cfg;
}

std::string intervals_csv(const std::vector<GeoInterval>& intervals, const SpatialDataset& test) {
  std::ostringstream out;
  out << "x,y,y_true,y_pred,q_hat,lower,upper,length\n";
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const auto& rec = test.records[i];
    const auto& iv = intervals[i];
    out << fmt_double(rec.loc.x) << ',' << fmt_double(rec.loc.y) << ',' << fmt_double(rec.target)
        << ',' << fmt_double(iv.center) << ',' << fmt_double(iv.half_width) << ','
        << fmt_double(iv.lower()) << ',' << fmt_double(iv.upper()) << ','
        << fmt_double(iv.length()) << '\n';
  }
  return out.str();
}

json coverage_json(const CoverageReport& report) {
  return json{{"n_test", report.n_test},         {"n_covered", report.n_covered},
              {"coverage", report.coverage},     {"mean_length", report.mean_length},
              {"median_length", report.median_length}, {"epsilon", report.level.epsilon},
              {"target_coverage", 1.0 - report.level.epsilon}};
}

std::vector<Location> locations_of(const SpatialDataset& ds) {
  std::vector<Location> locs;
  locs.reserve(ds.size());
  for (const auto& rec : ds.records) locs.push_back(rec.loc);
  return locs;
}

std::vector<double> targets_of(const SpatialDataset& ds) {
  std::vector<double> out;
  out.reserve(ds.size());
  for (const auto& rec : ds.records) out.push_back(rec.target);
  return out;
}

// Moran's I of a possibly-degenerate series; returns null on zero variance.
json moran_or_null(const std::vector<double>& values, const SpatialWeightsMatrix& w) {
  try {
    const MoranResult result = morans_i(values, w);
    return json{{"i", result.i},
                {"expected_i", result.expected_i},
                {"z_score", result.z_score}};
  } catch (const std::exception& e) {
    return json{{"i", nullptr}, {"degenerate", true}, {"reason", e.what()}};
  }
}

SpatialDataset parse_input(const Options& opt) {
  const ParseResult parsed = parse_dataset(opt.data, schema_from(opt));
  for (const auto& warning : parsed.warnings) std::cerr << "warning: " << warning << '\n';
  return parsed.dataset;
}

// ---------------------------------------------------------------------------
// geocp

int cmd_geocp(const Options& opt) {
  const SpatialDataset ds = parse_input(opt);
  const PredictorSpec spec = predictor_from(opt);
  const GeoCpOptions options = geocp_options_from(opt);

  GeoCpResult result = geocp_run(ds, spec, options);
  if (result.uniform_fallbacks > 0) {
    std::cerr << "warning: " << result.uniform_fallbacks
              << " test points had zero total kernel weight; uniform weights used\n";
  }
  const CoverageReport report = coverage_ratio(result.intervals, targets_of(result.split.test));

  std::vector<double> lengths, q_hats, preds;
  for (const auto& iv : result.intervals) {
    lengths.push_back(iv.length());
    q_hats.push_back(iv.half_width);
    preds.push_back(iv.center);
  }

  json summary;
  summary["config"] = config_echo(opt, "geocp");
  summary["bandwidth_resolved"] = result.bandwidth;
  summary["coverage"] = coverage_json(report);
  summary["rmse"] = rmse(preds, targets_of(result.split.test));
  summary["sizes"] = {{"train", result.split.train.size()},
                      {"calib", result.split.calib.size()},
                      {"test", result.split.test.size()}};
  summary["uniform_fallbacks"] = result.uniform_fallbacks;
  summary["timing"] = {{"fit_seconds", fmt_fixed(result.fit_seconds, 4)},
                       {"total_seconds", fmt_fixed(result.total_seconds, 4)}};
  summary["timestamp"] = timestamp_utc();

  fs::create_directories(opt.out);
  const fs::path out(opt.out);
  write_text_atomic(out / "intervals.csv", intervals_csv(result.intervals, result.split.test));
  write_text_atomic(out / "coverage.json", coverage_json(report).dump(2) + "\n");
  write_text_atomic(out / "uncertainty.geojson",
                    geojson_points(locations_of(result.split.test),
                                   {{"uncertainty", lengths},
                                    {"q_hat", q_hats},
                                    {"y_pred", preds},
                                    {"y_true", targets_of(result.split.test)}}));
  write_text_atomic(out / "summary.json", summary.dump(2) + "\n");
  if (!opt.save_model.empty()) save_model_file(*result.model, opt.save_model);
  return 0;
}

// ---------------------------------------------------------------------------
// bootstrap

int cmd_bootstrap(const Options& opt) {
  const SpatialDataset ds = parse_input(opt);
  const PredictorSpec spec = predictor_from(opt);
  const GeoCpOptions options = geocp_options_from(opt);

  // Refit pool = train + calib; the held-out test part scores coverage.
  const SplitResult split = split_dataset(ds, options.fractions, options.seed);
  SpatialDataset pool = split.train;
  pool.records.insert(pool.records.end(), split.calib.records.begin(),
                      split.calib.records.end());
  if (split.test.empty()) throw std::invalid_argument("bootstrap: test part is empty");

  BootstrapParams params{opt.replicates, options.level, options.seed, options.threads};
  const BootstrapReport report = bootstrap_intervals(pool, split.test, spec, params);

  std::ostringstream csv;
  csv << "x,y,y_true,lower,upper,width,covered\n";
  std::vector<double> widths;
  for (std::size_t i = 0; i < report.intervals.size(); ++i) {
    const auto& rec = split.test.records[i];
    const auto& [lo, hi] = report.intervals[i];
    const bool covered = rec.target >= lo && rec.target <= hi;
    csv << fmt_double(rec.loc.x) << ',' << fmt_double(rec.loc.y) << ',' << fmt_double(rec.target)
        << ',' << fmt_double(lo) << ',' << fmt_double(hi) << ',' << fmt_double(hi - lo) << ','
        << (covered ? 1 : 0) << '\n';
    widths.push_back(hi - lo);
  }

  json report_json;
  report_json["replicates"] = report.replicates;
  report_json["coverage"] = report.coverage;
  report_json["n_covered"] = report.n_covered;
  report_json["n_test"] = report.intervals.size();
  report_json["mean_width"] = report.mean_width;
  report_json["epsilon"] = options.level.epsilon;
  report_json["wall_seconds"] = fmt_fixed(report.wall_seconds, 4);

  json summary;
  summary["config"] = config_echo(opt, "bootstrap");
  summary["config"]["replicates"] = opt.replicates;
  summary["bootstrap"] = report_json;
  summary["timestamp"] = timestamp_utc();

  fs::create_directories(opt.out);
  const fs::path out(opt.out);
  write_text_atomic(out / "bootstrap_intervals.csv", csv.str());
  write_text_atomic(out / "bootstrap.json", report_json.dump(2) + "\n");
  write_text_atomic(out / "summary.json", summary.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// experiment

struct RunArtifacts {
  GeoCpResult result;
  CoverageReport coverage;
  std::vector<double> lengths;
  std::vector<double> preds;
  std::vector<double> errors;  // |y_pred - y_true|
};

RunArtifacts run_variant(const SpatialDataset& ds, const PredictorSpec& spec,
                         const GeoCpOptions& options) {
  RunArtifacts art{geocp_run(ds, spec, options), {}, {}, {}, {}};
  const std::vector<double> truth = targets_of(art.result.split.test);
  art.coverage = coverage_ratio(art.result.intervals, truth);
  for (std::size_t i = 0; i < art.result.intervals.size(); ++i) {
    art.lengths.push_back(art.result.intervals[i].length());
    art.preds.push_back(art.result.intervals[i].center);
    art.errors.push_back(std::abs(art.result.intervals[i].center - truth[i]));
  }
  return art;
}

double mean_of(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return v.empty() ? 0.0 : sum / static_cast<double>(v.size());
}

std::optional<SpatialWeightsMatrix> test_weights(const SpatialDataset& test) {
  if (test.size() < 3) return std::nullopt;
  const std::size_t k = std::min<std::size_t>(8, test.size() - 1);
  return build_spatial_weights(locations_of(test), {WeightScheme::KnnRowStandardized, k, 0.0});
}

int experiment_regression_features(const Options& opt, json& summary, const fs::path& out) {
  const SpatialDataset aspatial = parse_input(opt);
  if (aspatial.feature_names.empty()) {
    throw std::invalid_argument("regression-features needs --feature-cols");
  }
  // Spatial variant: coordinates duplicated as extra features.
  SpatialDataset spatial = aspatial;
  spatial.feature_names.push_back("loc_x");
  spatial.feature_names.push_back("loc_y");
  for (auto& rec : spatial.records) {
    rec.features.push_back(rec.loc.x);
    rec.features.push_back(rec.loc.y);
  }

  const PredictorSpec spec = predictor_from(opt);
  const GeoCpOptions options = geocp_options_from(opt);
  const RunArtifacts base = run_variant(aspatial, spec, options);
  const RunArtifacts with_loc = run_variant(spatial, spec, options);

  const SpatialDataset& test = base.result.split.test;
  std::ostringstream diff;
  diff << "x,y,y_true,unc_aspatial,unc_spatial,unc_change_pct,err_aspatial,err_spatial,"
          "err_change\n";
  std::vector<double> unc_change_pct(test.size(), 0.0), err_change(test.size(), 0.0);
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto& rec = test.records[i];
    unc_change_pct[i] = base.lengths[i] > 0.0
                            ? 100.0 * (base.lengths[i] - with_loc.lengths[i]) / base.lengths[i]
                            : 0.0;
    err_change[i] = with_loc.errors[i] - base.errors[i];
    diff << fmt_double(rec.loc.x) << ',' << fmt_double(rec.loc.y) << ','
         << fmt_double(rec.target) << ',' << fmt_double(base.lengths[i]) << ','
         << fmt_double(with_loc.lengths[i]) << ',' << fmt_double(unc_change_pct[i]) << ','
         << fmt_double(base.errors[i]) << ',' << fmt_double(with_loc.errors[i]) << ','
         << fmt_double(err_change[i]) << '\n';
  }

  write_text_atomic(out / "aspatial_intervals.csv",
                    intervals_csv(base.result.intervals, base.result.split.test));
  write_text_atomic(out / "spatial_intervals.csv",
                    intervals_csv(with_loc.result.intervals, with_loc.result.split.test));
  write_text_atomic(out / "feature_effect.csv", diff.str());
  write_text_atomic(out / "feature_effect.geojson",
                    geojson_points(locations_of(test), {{"unc_aspatial", base.lengths},
                                                        {"unc_spatial", with_loc.lengths},
                                                        {"unc_change_pct", unc_change_pct},
                                                        {"err_aspatial", base.errors},
                                                        {"err_spatial", with_loc.errors},
                                                        {"err_change", err_change}}));
  write_text_atomic(out / "aspatial_uncertainty.geojson",
                    geojson_points(locations_of(test), {{"uncertainty", base.lengths}}));
  write_text_atomic(out / "spatial_uncertainty.geojson",
                    geojson_points(locations_of(test), {{"uncertainty", with_loc.lengths}}));

  summary["aspatial"] = {{"coverage", coverage_json(base.coverage)},
                         {"rmse", rmse(base.preds, targets_of(test))},
                         {"mean_uncertainty", mean_of(base.lengths)}};
  summary["spatial"] = {{"coverage", coverage_json(with_loc.coverage)},
                        {"rmse", rmse(with_loc.preds, targets_of(test))},
                        {"mean_uncertainty", mean_of(with_loc.lengths)}};
  summary["mean_uncertainty_change_pct"] = mean_of(unc_change_pct);
  return 0;
}

int experiment_interpolation_compare(const Options& opt, json& summary, const fs::path& out) {
  const SpatialDataset ds = parse_input(opt);
  const GeoCpOptions options = geocp_options_from(opt);

  struct ModelRow {
    std::string tag;
    PredictorKind kind;
  };
  const std::vector<ModelRow> models = {{"kriging_exp", PredictorKind::KrigingExponential},
                                        {"kriging_lin", PredictorKind::KrigingLinear},
                                        {"kriging_gau", PredictorKind::KrigingGaussian},
                                        {"dgsi_base", PredictorKind::DgsiBase}};

  json rows = json::array();
  std::vector<std::pair<double, std::string>> ranking;
  for (const auto& row : models) {
    PredictorSpec spec = predictor_from(opt);
    spec.kind = row.kind;
    const RunArtifacts art = run_variant(ds, spec, options);
    const SpatialDataset& test = art.result.split.test;
    const std::vector<double> truth = targets_of(test);

    write_text_atomic(out / (row.tag + "_intervals.csv"),
                      intervals_csv(art.result.intervals, test));
    write_text_atomic(out / (row.tag + "_uncertainty.geojson"),
                      geojson_points(locations_of(test), {{"uncertainty", art.lengths}}));

    json entry;
    entry["model"] = row.tag;
    entry["rmse"] = rmse(art.preds, truth);
    entry["coverage"] = art.coverage.coverage;
    entry["mean_uncertainty"] = mean_of(art.lengths);
    entry["median_uncertainty"] = art.coverage.median_length;

    const auto w = test_weights(test);
    if (w) {
      entry["moran_uncertainty"] = moran_or_null(art.lengths, *w);
      try {
        const auto local = local_morans_i(truth, *w);
        entry["corr_local_dependence_uncertainty"] = pearson_corr(local, art.lengths);
      } catch (const std::exception&) {
        entry["corr_local_dependence_uncertainty"] = nullptr;
      }
    }

    if (const auto* kriging = dynamic_cast<const KrigingModel*>(art.result.model.get())) {
      std::vector<double> variance;
      variance.reserve(test.size());
      for (const auto& rec : test.records) {
        variance.push_back(kriging->predict_with_variance(rec.loc).variance);
      }
      std::ostringstream vcsv;
      vcsv << "x,y,kriging_variance\n";
      for (std::size_t i = 0; i < test.size(); ++i) {
        vcsv << fmt_double(test.records[i].loc.x) << ',' << fmt_double(test.records[i].loc.y)
             << ',' << fmt_double(variance[i]) << '\n';
      }
      write_text_atomic(out / (row.tag + "_variance.csv"), vcsv.str());
      write_text_atomic(out / (row.tag + "_variance.geojson"),
                        geojson_points(locations_of(test), {{"kriging_variance", variance}}));
      entry["mean_kriging_variance"] = mean_of(variance);
      if (w) entry["moran_kriging_variance"] = moran_or_null(variance, *w);
    }
    ranking.push_back({entry["rmse"].get<double>(), row.tag});
    rows.push_back(entry);
  }
  std::sort(ranking.begin(), ranking.end());
  json order = json::array();
  for (const auto& [score, tag] : ranking) order.push_back(tag);
  summary["models"] = rows;
  summary["ranking_by_rmse"] = order;
  return 0;
}

int experiment_feature_variants(const Options& opt, json& summary, const fs::path& out) {
  const SpatialDataset ds = parse_input(opt);
  const GeoCpOptions options = geocp_options_from(opt);

  struct VariantRow {
    std::string tag;
    PredictorKind kind;
  };
  const std::vector<VariantRow> variants = {{"dgsi_base", PredictorKind::DgsiBase},
                                            {"dgsi_local", PredictorKind::DgsiLocalFeature},
                                            {"dgsi_loc", PredictorKind::DgsiLocation}};

  std::vector<RunArtifacts> arts;
  for (const auto& row : variants) {
    PredictorSpec spec = predictor_from(opt);
    spec.kind = row.kind;
    arts.push_back(run_variant(ds, spec, options));
  }
  const SpatialDataset& test = arts.front().result.split.test;
  const std::vector<double> truth = targets_of(test);
  const auto w = test_weights(test);

  json rows = json::array();
  for (std::size_t v = 0; v < variants.size(); ++v) {
    const RunArtifacts& art = arts[v];
    write_text_atomic(out / (variants[v].tag + "_intervals.csv"),
                      intervals_csv(art.result.intervals, test));
    write_text_atomic(out / (variants[v].tag + "_uncertainty.geojson"),
                      geojson_points(locations_of(test), {{"uncertainty", art.lengths}}));
    json entry;
    entry["model"] = variants[v].tag;
    entry["rmse"] = rmse(art.preds, truth);
    entry["coverage"] = art.coverage.coverage;
    entry["mean_uncertainty"] = mean_of(art.lengths);
    if (w) entry["moran_uncertainty"] = moran_or_null(art.lengths, *w);

    if (v > 0) {
      std::vector<double> delta(test.size());
      for (std::size_t i = 0; i < test.size(); ++i) {
        delta[i] = art.lengths[i] - arts[0].lengths[i];
      }
      std::ostringstream dcsv;
      dcsv << "x,y,delta_uncertainty\n";
      for (std::size_t i = 0; i < test.size(); ++i) {
        dcsv << fmt_double(test.records[i].loc.x) << ',' << fmt_double(test.records[i].loc.y)
             << ',' << fmt_double(delta[i]) << '\n';
      }
      write_text_atomic(out / (variants[v].tag + "_delta.csv"), dcsv.str());
      write_text_atomic(out / (variants[v].tag + "_delta.geojson"),
                        geojson_points(locations_of(test), {{"delta_uncertainty", delta}}));
      entry["mean_delta_uncertainty"] = mean_of(delta);
      if (w) {
        const auto change = uncertainty_change_analysis(arts[0].lengths, art.lengths, truth, *w);
        entry["corr_local_dependence_delta"] =
            change.degenerate ? json(nullptr) : json(change.corr);
        entry["delta_degenerate"] = change.degenerate;
      }
    }
    rows.push_back(entry);
  }
  summary["variants"] = rows;
  return 0;
}

int cmd_experiment(const Options& opt) {
  fs::create_directories(opt.out);
  const fs::path out(opt.out);
  json summary;
  summary["config"] = config_echo(opt, "experiment");
  summary["config"]["name"] = opt.experiment;

  if (opt.experiment == "regression-features") {
    experiment_regression_features(opt, summary, out);
  } else if (opt.experiment == "interpolation-compare") {
    experiment_interpolation_compare(opt, summary, out);
  } else if (opt.experiment == "feature-variants") {
    experiment_feature_variants(opt, summary, out);
  } else {
    throw std::invalid_argument(
        "unknown experiment '" + opt.experiment +
        "' (expected regression-features|interpolation-compare|feature-variants)");
  }
  summary["timestamp"] = timestamp_utc();
  write_text_atomic(out / "summary.json", summary.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// synth

int cmd_synth(const Options& opt) {
  SpatialDataset ds;
  json info;
  if (opt.synth_mode == "scene") {
    SceneSpec spec;
    spec.n = opt.synth_n;
    spec.extent = opt.synth_extent;
    spec.sampling =
        opt.sampling == "clustered" ? SamplingKind::Clustered : SamplingKind::UniformRandom;
    if (opt.noise == "constant") {
      spec.noise = {NoiseProfileKind::Constant, opt.sigma0, opt.sigma0};
    } else if (opt.noise == "ramp") {
      spec.noise = {NoiseProfileKind::LinearRamp, opt.sigma0, opt.sigma1};
    } else if (opt.noise == "tworegion") {
      spec.noise = {NoiseProfileKind::TwoRegion, opt.sigma0, opt.sigma1};
    } else {
      throw std::invalid_argument("unknown noise profile '" + opt.noise + "'");
    }
    spec.seed = opt.seed;
    ds = make_regression_scene(spec).data;
    info["mode"] = "scene";
    info["noise"] = opt.noise;
    info["sigma0"] = opt.sigma0;
    info["sigma1"] = opt.sigma1;
  } else if (opt.synth_mode == "field") {
    const auto locs = random_locations(
        opt.synth_n, opt.synth_extent,
        opt.sampling == "clustered" ? SamplingKind::Clustered : SamplingKind::UniformRandom,
        opt.seed);
    FieldSpec spec;
    spec.kind = covariance_kind_from_name(opt.cov);
    spec.sill = opt.sill;
    spec.range = opt.field_range;
    spec.nugget = opt.nugget;
    spec.mean = opt.field_mean;
    const auto values = sample_gaussian_field(spec, locs, opt.seed + 1);
    ds.crs = Crs::Planar;
    for (std::size_t i = 0; i < locs.size(); ++i) ds.records.push_back({locs[i], {}, values[i]});
    info["mode"] = "field";
    info["covariance"] = opt.cov;
    info["sill"] = opt.sill;
    info["range"] = opt.field_range;
    info["nugget"] = opt.nugget;
    info["mean"] = opt.field_mean;
  } else {
    throw std::invalid_argument("unknown synth mode '" + opt.synth_mode + "'");
  }

  std::ostringstream csv;
  csv << "x,y,target";
  for (const auto& name : ds.feature_names) csv << ',' << name;
  csv << '\n';
  for (const auto& rec : ds.records) {
    csv << fmt_double(rec.loc.x) << ',' << fmt_double(rec.loc.y) << ',' << fmt_double(rec.target);
    for (double f : rec.features) csv << ',' << fmt_double(f);
    csv << '\n';
  }

  json summary;
  summary["config"] = {{"command", "synth"}, {"n", opt.synth_n},     {"extent", opt.synth_extent},
                       {"sampling", opt.sampling}, {"seed", opt.seed}, {"out", opt.out}};
  summary["generated"] = info;
  summary["timestamp"] = timestamp_utc();

  fs::create_directories(opt.out);
  const fs::path out(opt.out);
  write_text_atomic(out / (opt.synth_mode == "scene" ? "scene.csv" : "field.csv"), csv.str());
  write_text_atomic(out / "summary.json", summary.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// moran

int cmd_moran(const Options& opt) {
  const SpatialDataset ds = parse_input(opt);
  SpatialWeightsSpec wspec;
  if (opt.weights == "knn") {
    wspec = {WeightScheme::KnnRowStandardized, opt.weights_k, 0.0};
  } else if (opt.weights == "band") {
    wspec = {WeightScheme::DistanceBand, 0, opt.band_radius};
  } else {
    throw std::invalid_argument("unknown weights scheme '" + opt.weights + "' (knn|band)");
  }
  const SpatialWeightsMatrix w = build_spatial_weights(ds, wspec);
  if (!w.isolated.empty()) {
    std::cerr << "warning: " << w.isolated.size() << " isolated points in the distance band\n";
  }
  const std::vector<double> values = targets_of(ds);
  const MoranResult global = morans_i(values, w);
  const std::vector<double> local = local_morans_i(values, w);

  json moran;
  moran["n"] = ds.size();
  moran["i"] = global.i;
  moran["expected_i"] = global.expected_i;
  moran["variance"] = global.variance;
  moran["z_score"] = global.z_score;
  moran["scheme"] = opt.weights;
  moran["k"] = opt.weights_k;
  moran["band_radius"] = opt.band_radius;
  moran["isolated"] = w.isolated.size();

  json summary;
  summary["config"] = config_echo(opt, "moran");
  summary["config"]["weights"] = opt.weights;
  summary["moran"] = moran;
  summary["timestamp"] = timestamp_utc();

  fs::create_directories(opt.out);
  const fs::path out(opt.out);
  write_text_atomic(out / "moran.json", moran.dump(2) + "\n");
  write_text_atomic(out / "lisa.geojson",
                    geojson_points(locations_of(ds), {{"value", values}, {"local_i", local}}));
  write_text_atomic(out / "summary.json", summary.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GeoConformal prediction toolkit: geographically weighted conformal intervals, "
               "reference spatial predictors, baselines, and diagnostics"};
  app.require_subcommand(1);
  app.set_config("--config", "", "configuration file ([subcommand] sections, key=value lines)");
  app.allow_config_extras(false);  // unknown config keys are errors

  Options opt;

  CLI::App* geocp_cmd =
      app.add_subcommand("geocp", "run the GeoCP pipeline and write prediction intervals");
  add_data_flags(geocp_cmd, opt);
  add_predictor_flags(geocp_cmd, opt);
  add_conformal_flags(geocp_cmd, opt);
  add_run_flags(geocp_cmd, opt);
  geocp_cmd->add_option("--save-model", opt.save_model, "also save the fitted model to this path");

  CLI::App* bootstrap_cmd =
      app.add_subcommand("bootstrap", "percentile-bootstrap baseline intervals");
  add_data_flags(bootstrap_cmd, opt);
  add_predictor_flags(bootstrap_cmd, opt);
  add_conformal_flags(bootstrap_cmd, opt);
  add_run_flags(bootstrap_cmd, opt);
  bootstrap_cmd->add_option("--replicates", opt.replicates, "bootstrap resamples (B)")
      ->check(CLI::Range(static_cast<std::size_t>(2), static_cast<std::size_t>(1000000)));

  CLI::App* experiment_cmd = app.add_subcommand("experiment", "canned multi-run studies");
  experiment_cmd
      ->add_option("--name", opt.experiment,
                   "regression-features|interpolation-compare|feature-variants")
      ->required();
  add_data_flags(experiment_cmd, opt);
  add_predictor_flags(experiment_cmd, opt);
  add_conformal_flags(experiment_cmd, opt);
  add_run_flags(experiment_cmd, opt);

  CLI::App* synth_cmd = app.add_subcommand("synth", "generate synthetic datasets");
  synth_cmd->add_option("--mode", opt.synth_mode, "scene|field");
  synth_cmd->add_option("--n", opt.synth_n, "number of points");
  synth_cmd->add_option("--extent", opt.synth_extent, "square domain side length");
  synth_cmd->add_option("--sampling", opt.sampling, "uniform|clustered")
      ->check(CLI::IsMember({"uniform", "clustered"}));
  synth_cmd->add_option("--noise", opt.noise, "scene noise law: constant|ramp|tworegion");
  synth_cmd->add_option("--sigma0", opt.sigma0, "noise level (left/start)");
  synth_cmd->add_option("--sigma1", opt.sigma1, "noise level (right/end)");
  synth_cmd->add_option("--cov", opt.cov, "field covariance: exp|gau|nugget");
  synth_cmd->add_option("--sill", opt.sill, "field sill");
  synth_cmd->add_option("--range", opt.field_range, "field range");
  synth_cmd->add_option("--nugget", opt.nugget, "field nugget");
  synth_cmd->add_option("--mean", opt.field_mean, "field mean");
  add_run_flags(synth_cmd, opt);

  CLI::App* moran_cmd =
      app.add_subcommand("moran", "global Moran's I and LISA for a CSV column");
  add_data_flags(moran_cmd, opt);
  moran_cmd->add_option("--weights", opt.weights, "neighbor scheme: knn|band");
  moran_cmd->add_option("--wk", opt.weights_k, "neighbors for the knn scheme");
  moran_cmd->add_option("--band-radius", opt.band_radius, "radius for the band scheme");
  add_run_flags(moran_cmd, opt);

  CLI11_PARSE(app, argc, argv);

  try {
    if (geocp_cmd->parsed()) return cmd_geocp(opt);
    if (bootstrap_cmd->parsed()) return cmd_bootstrap(opt);
    if (experiment_cmd->parsed()) return cmd_experiment(opt);
    if (synth_cmd->parsed()) return cmd_synth(opt);
    if (moran_cmd->parsed()) return cmd_moran(opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
