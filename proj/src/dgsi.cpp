#include "geoconformal/dgsi.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "geoconformal/format.hpp"
#include "geoconformal/rng.hpp"

namespace geocp {

std::string dgsi_variant_name(DgsiVariant variant) {
  switch (variant) {
    case DgsiVariant::Base: return "base";
    case DgsiVariant::LocalFeature: return "local";
    case DgsiVariant::Location: return "loc";
  }
  return "?";
}

DgsiVariant dgsi_variant_from_name(const std::string& name) {
  if (name == "base") return DgsiVariant::Base;
  if (name == "local") return DgsiVariant::LocalFeature;
  if (name == "loc") return DgsiVariant::Location;
  throw std::invalid_argument("unknown dgsi variant '" + name + "'");
}

std::size_t DgsiLiteModel::per_neighbor_features() const {
  switch (params_.variant) {
    case DgsiVariant::Base: return 3;
    case DgsiVariant::LocalFeature: return 4;
    case DgsiVariant::Location: return 5;
  }
  return 3;
}

void DgsiLiteModel::build_input(const Location& query, const std::vector<std::size_t>& neighbors,
                                Eigen::VectorXd& input, Eigen::VectorXd& targets) const {
  const std::size_t k = neighbors.size();
  const std::size_t stride = per_neighbor_features();
  input.resize(static_cast<Eigen::Index>(k * stride));
  targets.resize(static_cast<Eigen::Index>(k));

  double neighbor_mean = 0.0;
  for (std::size_t j = 0; j < k; ++j) neighbor_mean += train_.records[neighbors[j]].target;
  neighbor_mean /= static_cast<double>(k);
  const double mean_std = (neighbor_mean - target_mean_) / target_sd_;

  for (std::size_t j = 0; j < k; ++j) {
    const SpatialRecord& nb = train_.records[neighbors[j]];
    const double d = distance(query, nb.loc);
    // Orientation uses the coordinate-plane bearing from query to neighbor;
    // coincident points get (0,0).
    const double dx = nb.loc.x - query.x;
    const double dy = nb.loc.y - query.y;
    double sin_t = 0.0, cos_t = 0.0;
    const double norm = std::hypot(dx, dy);
    if (norm > 0.0) {
      sin_t = dy / norm;
      cos_t = dx / norm;
    }
    double* row = input.data() + j * stride;
    row[0] = d / max_distance_;
    row[1] = sin_t;
    row[2] = cos_t;
    if (params_.variant == DgsiVariant::LocalFeature) {
      row[3] = mean_std;
    } else if (params_.variant == DgsiVariant::Location) {
      row[3] = (nb.loc.x - min_x_) / span_x_;
      row[4] = (nb.loc.y - min_y_) / span_y_;
    }
    targets(static_cast<Eigen::Index>(j)) = nb.target;
  }
}

Eigen::VectorXd DgsiLiteModel::softmax_weights(const Eigen::VectorXd& input) const {
  const Eigen::VectorXd h1 = (w1_ * input + b1_).array().tanh();
  const Eigen::VectorXd h2 = (w2_ * h1 + b2_).array().tanh();
  Eigen::VectorXd logits = w3_ * h2 + b3_;
  logits.array() -= logits.maxCoeff();
  Eigen::VectorXd weights = logits.array().exp();
  weights /= weights.sum();
  return weights;
}

std::vector<double> DgsiLiteModel::neighbor_weights(const Location& query) const {
  const auto nb = knn_neighbors(train_, query, params_.k);
  std::vector<std::size_t> idx(nb.size());
  for (std::size_t j = 0; j < nb.size(); ++j) idx[j] = nb[j].index;
  Eigen::VectorXd input, targets;
  build_input(query, idx, input, targets);
  const Eigen::VectorXd w = softmax_weights(input);
  return std::vector<double>(w.data(), w.data() + w.size());
}

double DgsiLiteModel::predict(const SpatialRecord& query) const {
  const auto nb = knn_neighbors(train_, query.loc, params_.k);
  std::vector<std::size_t> idx(nb.size());
  for (std::size_t j = 0; j < nb.size(); ++j) idx[j] = nb[j].index;
  Eigen::VectorXd input, targets;
  build_input(query.loc, idx, input, targets);
  return softmax_weights(input).dot(targets);
}

namespace {

void init_matrix(Eigen::MatrixXd& m, Rng& rng) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      m(r, c) = rng.uniform(-scale, scale);
    }
  }
}

// k nearest neighbors of train[i] within train, excluding i itself.
std::vector<std::size_t> loo_neighbors(const SpatialDataset& train, std::size_t i, std::size_t k) {
  std::vector<std::pair<double, std::size_t>> all;
  all.reserve(train.size() - 1);
  for (std::size_t j = 0; j < train.size(); ++j) {
    if (j == i) continue;
    all.push_back({distance(train.records[i].loc, train.records[j].loc), j});
  }
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end());
  std::vector<std::size_t> idx(k);
  for (std::size_t j = 0; j < k; ++j) idx[j] = all[j].second;
  return idx;
}

}  // namespace

std::unique_ptr<DgsiLiteModel> train_dgsi_lite(const SpatialDataset& train,
                                               const DgsiParams& params) {
  if (params.k < 1) throw std::invalid_argument("dgsi k must be >= 1");
  if (train.size() <= params.k) {
    throw std::invalid_argument("dgsi needs more than k=" + std::to_string(params.k) +
                                " training points, got " + std::to_string(train.size()));
  }
  if (params.epochs < 0) throw std::invalid_argument("dgsi epochs must be >= 0");
  train.validate();

  auto model = std::unique_ptr<DgsiLiteModel>(new DgsiLiteModel());
  model->train_ = train;
  model->params_ = params;

  model->max_distance_ = max_pairwise_distance(train);
  if (!(model->max_distance_ > 0.0)) {
    throw std::invalid_argument("dgsi training locations are all identical");
  }
  double min_x = train.records.front().loc.x, max_x = min_x;
  double min_y = train.records.front().loc.y, max_y = min_y;
  double mean = 0.0;
  for (const auto& rec : train.records) {
    min_x = std::min(min_x, rec.loc.x);
    max_x = std::max(max_x, rec.loc.x);
    min_y = std::min(min_y, rec.loc.y);
    max_y = std::max(max_y, rec.loc.y);
    mean += rec.target;
  }
  mean /= static_cast<double>(train.size());
  double var = 0.0;
  for (const auto& rec : train.records) var += (rec.target - mean) * (rec.target - mean);
  var /= static_cast<double>(train.size());
  model->min_x_ = min_x;
  model->span_x_ = max_x > min_x ? max_x - min_x : 1.0;
  model->min_y_ = min_y;
  model->span_y_ = max_y > min_y ? max_y - min_y : 1.0;
  model->target_mean_ = mean;
  model->target_sd_ = var > 0.0 ? std::sqrt(var) : 1.0;

  const std::size_t n = train.size();
  const std::size_t k = params.k;
  const Eigen::Index input_dim = static_cast<Eigen::Index>(k * model->per_neighbor_features());
  const Eigen::Index hidden = params.hidden;
  const Eigen::Index out_dim = static_cast<Eigen::Index>(k);

  Rng rng(params.seed);
  model->w1_.resize(hidden, input_dim);
  model->w2_.resize(hidden, hidden);
  model->w3_.resize(out_dim, hidden);
  init_matrix(model->w1_, rng);
  init_matrix(model->w2_, rng);
  init_matrix(model->w3_, rng);
  model->b1_ = Eigen::VectorXd::Zero(hidden);
  model->b2_ = Eigen::VectorXd::Zero(hidden);
  model->b3_ = Eigen::VectorXd::Zero(out_dim);

  // Leave-one-out queries are fixed geometry; cache inputs once.
  std::vector<Eigen::VectorXd> inputs(n), neighbor_targets(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto idx = loo_neighbors(train, i, k);
    model->build_input(train.records[i].loc, idx, inputs[i], neighbor_targets[i]);
  }

  Eigen::MatrixXd gw1(hidden, input_dim), gw2(hidden, hidden), gw3(out_dim, hidden);
  Eigen::VectorXd gb1(hidden), gb2(hidden), gb3(out_dim);
  const double inv_n = 1.0 / static_cast<double>(n);

  model->losses_.reserve(static_cast<std::size_t>(params.epochs));
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    gw1.setZero();
    gw2.setZero();
    gw3.setZero();
    gb1.setZero();
    gb2.setZero();
    gb3.setZero();
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Eigen::VectorXd& x = inputs[i];
      const Eigen::VectorXd h1 = (model->w1_ * x + model->b1_).array().tanh();
      const Eigen::VectorXd h2 = (model->w2_ * h1 + model->b2_).array().tanh();
      Eigen::VectorXd logits = model->w3_ * h2 + model->b3_;
      logits.array() -= logits.maxCoeff();
      Eigen::VectorXd p = logits.array().exp();
      p /= p.sum();

      const Eigen::VectorXd& z = neighbor_targets[i];
      const double y_hat = p.dot(z);
      const double err = y_hat - train.records[i].target;
      loss += err * err * inv_n;

      const double g = 2.0 * err * inv_n;
      const Eigen::VectorXd dlogits = g * (p.array() * (z.array() - y_hat)).matrix();
      gw3.noalias() += dlogits * h2.transpose();
      gb3 += dlogits;
      const Eigen::VectorXd dh2 = model->w3_.transpose() * dlogits;
      const Eigen::VectorXd da2 = (1.0 - h2.array().square()) * dh2.array();
      gw2.noalias() += da2 * h1.transpose();
      gb2 += da2;
      const Eigen::VectorXd dh1 = model->w2_.transpose() * da2;
      const Eigen::VectorXd da1 = (1.0 - h1.array().square()) * dh1.array();
      gw1.noalias() += da1 * x.transpose();
      gb1 += da1;
    }
    if (!std::isfinite(loss)) {
      throw std::runtime_error("dgsi training loss became non-finite at epoch " +
                               std::to_string(epoch));
    }
    model->losses_.push_back(loss);
    model->w1_ -= params.learning_rate * gw1;
    model->w2_ -= params.learning_rate * gw2;
    model->w3_ -= params.learning_rate * gw3;
    model->b1_ -= params.learning_rate * gb1;
    model->b2_ -= params.learning_rate * gb2;
    model->b3_ -= params.learning_rate * gb3;
  }
  return model;
}

namespace {

void write_matrix(std::ostream& out, const char* name, const Eigen::MatrixXd& m) {
  out << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      out << fmt_double(m(r, c)) << (c + 1 == m.cols() ? '\n' : ' ');
    }
  }
}

Eigen::MatrixXd read_matrix(std::istream& in, const std::string& expect) {
  std::string tag;
  Eigen::Index rows = 0, cols = 0;
  in >> tag >> rows >> cols;
  if (tag != expect) throw std::runtime_error("malformed dgsi model: expected '" + expect + "'");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) in >> m(r, c);
  }
  return m;
}

}  // namespace

void DgsiLiteModel::save(std::ostream& out) const {
  out << "geoconformal-model v1\n";
  out << "kind dgsi\n";
  out << "variant " << dgsi_variant_name(params_.variant) << " k " << params_.k << " hidden "
      << params_.hidden << " epochs " << params_.epochs << " lr "
      << fmt_double(params_.learning_rate) << " seed " << params_.seed << '\n';
  out << "norm " << fmt_double(max_distance_) << ' ' << fmt_double(min_x_) << ' '
      << fmt_double(span_x_) << ' ' << fmt_double(min_y_) << ' ' << fmt_double(span_y_) << ' '
      << fmt_double(target_mean_) << ' ' << fmt_double(target_sd_) << '\n';
  out << "crs " << crs_name(train_.crs) << " points " << train_.size() << '\n';
  for (const auto& rec : train_.records) {
    out << fmt_double(rec.loc.x) << ' ' << fmt_double(rec.loc.y) << ' ' << fmt_double(rec.target)
        << '\n';
  }
  write_matrix(out, "w1", w1_);
  write_matrix(out, "w2", w2_);
  write_matrix(out, "w3", w3_);
  write_matrix(out, "b1", b1_);
  write_matrix(out, "b2", b2_);
  write_matrix(out, "b3", b3_);
}

std::unique_ptr<DgsiLiteModel> DgsiLiteModel::load(std::istream& in) {
  auto model = std::unique_ptr<DgsiLiteModel>(new DgsiLiteModel());
  std::string tag, text;
  in >> tag >> text;
  if (tag != "variant") throw std::runtime_error("malformed dgsi model: expected 'variant'");
  model->params_.variant = dgsi_variant_from_name(text);
  in >> tag >> model->params_.k >> tag >> model->params_.hidden >> tag >> model->params_.epochs >>
      tag >> model->params_.learning_rate >> tag >> model->params_.seed;
  in >> tag >> model->max_distance_ >> model->min_x_ >> model->span_x_ >> model->min_y_ >>
      model->span_y_ >> model->target_mean_ >> model->target_sd_;
  if (tag != "norm") throw std::runtime_error("malformed dgsi model: expected 'norm'");
  std::size_t n = 0;
  in >> tag >> text >> tag >> n;
  model->train_.crs = crs_from_name(text);
  model->train_.records.resize(n);
  for (auto& rec : model->train_.records) {
    in >> rec.loc.x >> rec.loc.y >> rec.target;
    rec.loc.crs = model->train_.crs;
  }
  model->w1_ = read_matrix(in, "w1");
  model->w2_ = read_matrix(in, "w2");
  model->w3_ = read_matrix(in, "w3");
  model->b1_ = read_matrix(in, "b1");
  model->b2_ = read_matrix(in, "b2");
  model->b3_ = read_matrix(in, "b3");
  if (!in) throw std::runtime_error("malformed dgsi model: truncated weights");
  return model;
}

}  // namespace geocp
