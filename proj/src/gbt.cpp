#include "geoconformal/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "geoconformal/format.hpp"

namespace geocp {

double GbtTree::predict(std::span<const double> features) const {
  int node = 0;
  while (nodes[node].feature >= 0) {
    const GbtNode& nd = nodes[node];
    node = features[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right;
  }
  return nodes[node].value;
}

GbtModel::GbtModel(double base_score, double learning_rate, std::size_t n_features,
                   std::vector<GbtTree> trees)
    : base_score_(base_score),
      learning_rate_(learning_rate),
      n_features_(n_features),
      trees_(std::move(trees)) {}

double GbtModel::predict_features(std::span<const double> features) const {
  if (features.size() != n_features_) {
    throw std::invalid_argument("gbt query has " + std::to_string(features.size()) +
                                " features, model expects " + std::to_string(n_features_));
  }
  return predict_prefix(features, trees_.size());
}

double GbtModel::predict_prefix(std::span<const double> features, std::size_t trees) const {
  double value = base_score_;
  const std::size_t limit = std::min(trees, trees_.size());
  for (std::size_t t = 0; t < limit; ++t) value += learning_rate_ * trees_[t].predict(features);
  return value;
}

double GbtModel::predict(const SpatialRecord& query) const {
  return predict_features(query.features);
}

namespace {

struct SplitChoice {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double children_sse = 0.0;
};

double subset_sse(const std::vector<double>& residual, const std::vector<std::size_t>& rows) {
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t r : rows) {
    sum += residual[r];
    sum2 += residual[r] * residual[r];
  }
  const double n = static_cast<double>(rows.size());
  return std::max(0.0, sum2 - sum * sum / n);
}

// Greedy scan over features (ascending) and thresholds (ascending): the
// first strictly-better candidate wins, which pins tie-breaking.
SplitChoice best_split(const std::vector<std::vector<double>>& features,
                       const std::vector<double>& residual, const std::vector<std::size_t>& rows,
                       int min_samples, double parent_sse) {
  SplitChoice best;
  const std::size_t n = rows.size();
  std::vector<std::pair<double, double>> col(n);  // (feature value, residual)
  for (std::size_t f = 0; f < features.size(); ++f) {
    for (std::size_t i = 0; i < n; ++i) {
      col[i] = {features[f][rows[i]], residual[rows[i]]};
    }
    std::sort(col.begin(), col.end());
    double left_sum = 0.0, left_sum2 = 0.0;
    double total_sum = 0.0, total_sum2 = 0.0;
    for (const auto& [v, r] : col) {
      total_sum += r;
      total_sum2 += r * r;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
      left_sum += col[i].second;
      left_sum2 += col[i].second * col[i].second;
      if (col[i].first == col[i + 1].first) continue;  // no boundary between equal values
      const std::size_t nl = i + 1, nr = n - nl;
      if (nl < static_cast<std::size_t>(min_samples) || nr < static_cast<std::size_t>(min_samples)) {
        continue;
      }
      const double right_sum = total_sum - left_sum;
      const double right_sum2 = total_sum2 - left_sum2;
      const double sse = std::max(0.0, left_sum2 - left_sum * left_sum / nl) +
                         std::max(0.0, right_sum2 - right_sum * right_sum / nr);
      const double candidate = sse;
      if (candidate < (best.found ? best.children_sse : parent_sse)) {
        best.found = true;
        best.feature = static_cast<int>(f);
        best.threshold = 0.5 * (col[i].first + col[i + 1].first);
        best.children_sse = candidate;
      }
    }
  }
  return best;
}

int grow(GbtTree& tree, const std::vector<std::vector<double>>& features,
         const std::vector<double>& residual, std::vector<std::size_t> rows, int depth_left,
         int min_samples) {
  const int id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  double mean = 0.0;
  for (std::size_t r : rows) mean += residual[r];
  mean /= static_cast<double>(rows.size());
  tree.nodes[id].value = mean;

  if (depth_left <= 0 || rows.size() < 2) return id;
  const double parent_sse = subset_sse(residual, rows);
  if (parent_sse <= 0.0) return id;
  const SplitChoice split = best_split(features, residual, rows, min_samples, parent_sse);
  if (!split.found) return id;

  std::vector<std::size_t> left_rows, right_rows;
  left_rows.reserve(rows.size());
  right_rows.reserve(rows.size());
  for (std::size_t r : rows) {
    (features[static_cast<std::size_t>(split.feature)][r] <= split.threshold ? left_rows
                                                                             : right_rows)
        .push_back(r);
  }
  tree.nodes[id].feature = split.feature;
  tree.nodes[id].threshold = split.threshold;
  const int left = grow(tree, features, residual, std::move(left_rows), depth_left - 1, min_samples);
  const int right =
      grow(tree, features, residual, std::move(right_rows), depth_left - 1, min_samples);
  tree.nodes[id].left = left;
  tree.nodes[id].right = right;
  return id;
}

}  // namespace

std::unique_ptr<GbtModel> train_gbt(const SpatialDataset& train, const GbtParams& params) {
  if (train.empty()) throw std::invalid_argument("gbt training set is empty");
  if (params.depth < 0) throw std::invalid_argument("gbt depth must be >= 0");
  if (params.trees < 1) throw std::invalid_argument("gbt needs at least 1 tree");
  if (!(params.learning_rate > 0.0) || params.learning_rate > 1.0) {
    throw std::invalid_argument("gbt learning rate must be in (0, 1]");
  }

  const std::size_t n = train.size();
  const std::size_t n_features = train.feature_names.size();
  // Column-major copy: split scans walk one feature at a time.
  std::vector<std::vector<double>> features(n_features, std::vector<double>(n));
  for (std::size_t f = 0; f < n_features; ++f) {
    for (std::size_t i = 0; i < n; ++i) features[f][i] = train.records[i].features[f];
  }

  double base = 0.0;
  for (const auto& rec : train.records) base += rec.target;
  base /= static_cast<double>(n);

  std::vector<double> current(n, base);
  std::vector<double> residual(n);
  std::vector<GbtTree> trees;
  trees.reserve(static_cast<std::size_t>(params.trees));
  std::vector<std::size_t> all_rows(n);
  for (std::size_t i = 0; i < n; ++i) all_rows[i] = i;

  for (int t = 0; t < params.trees; ++t) {
    for (std::size_t i = 0; i < n; ++i) residual[i] = train.records[i].target - current[i];
    GbtTree tree;
    grow(tree, features, residual, all_rows, params.depth, params.min_samples);
    for (std::size_t i = 0; i < n; ++i) {
      current[i] += params.learning_rate * tree.predict(train.records[i].features);
    }
    trees.push_back(std::move(tree));
  }
  return std::make_unique<GbtModel>(base, params.learning_rate, n_features, std::move(trees));
}

void GbtModel::save(std::ostream& out) const {
  out << "geoconformal-model v1\n";
  out << "kind gbt\n";
  out << "base " << fmt_double(base_score_) << " lr " << fmt_double(learning_rate_) << " features "
      << n_features_ << " trees " << trees_.size() << '\n';
  for (const auto& tree : trees_) {
    out << "tree " << tree.nodes.size() << '\n';
    for (const auto& nd : tree.nodes) {
      out << nd.feature << ' ' << fmt_double(nd.threshold) << ' ' << nd.left << ' ' << nd.right
          << ' ' << fmt_double(nd.value) << '\n';
    }
  }
}

std::unique_ptr<GbtModel> GbtModel::load(std::istream& in) {
  std::string tag;
  double base = 0.0, lr = 0.0;
  std::size_t n_features = 0, n_trees = 0;
  in >> tag >> base;
  if (tag != "base") throw std::runtime_error("malformed gbt model: expected 'base'");
  in >> tag >> lr >> tag >> n_features >> tag >> n_trees;
  std::vector<GbtTree> trees(n_trees);
  for (auto& tree : trees) {
    std::size_t n_nodes = 0;
    in >> tag >> n_nodes;
    if (tag != "tree") throw std::runtime_error("malformed gbt model: expected 'tree'");
    tree.nodes.resize(n_nodes);
    for (auto& nd : tree.nodes) {
      in >> nd.feature >> nd.threshold >> nd.left >> nd.right >> nd.value;
    }
  }
  if (!in) throw std::runtime_error("malformed gbt model: truncated tree table");
  return std::make_unique<GbtModel>(base, lr, n_features, std::move(trees));
}

}  // namespace geocp
