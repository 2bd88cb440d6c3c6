#include "geoconformal/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "geoconformal/rng.hpp"

namespace geocp {

void SpatialDataset::validate() const {
  for (std::size_t i = 0; i < records.size(); ++i) {
    const SpatialRecord& rec = records[i];
    if (rec.loc.crs != crs) {
      throw std::invalid_argument("record " + std::to_string(i) + " CRS differs from dataset CRS");
    }
    validate_location(rec.loc);
    if (!std::isfinite(rec.target)) {
      throw std::invalid_argument("record " + std::to_string(i) + " has non-finite target");
    }
    if (rec.features.size() != feature_names.size()) {
      throw std::invalid_argument("record " + std::to_string(i) + " has " +
                                  std::to_string(rec.features.size()) + " features, expected " +
                                  std::to_string(feature_names.size()));
    }
    for (double v : rec.features) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument("record " + std::to_string(i) + " has non-finite feature");
      }
    }
  }
}

SplitFractions parse_split_fractions(const std::string& text) {
  SplitFractions f;
  const auto p1 = text.find('/');
  const auto p2 = text.find('/', p1 == std::string::npos ? p1 : p1 + 1);
  if (p1 == std::string::npos || p2 == std::string::npos) {
    throw std::invalid_argument("split must be 'train/calib/test', got '" + text + "'");
  }
  try {
    f.train = std::stod(text.substr(0, p1));
    f.calib = std::stod(text.substr(p1 + 1, p2 - p1 - 1));
    f.test = std::stod(text.substr(p2 + 1));
  } catch (const std::exception&) {
    throw std::invalid_argument("split fractions must be numeric, got '" + text + "'");
  }
  return f;
}

namespace {

void check_fractions(const SplitFractions& f) {
  if (f.train < 0.0 || f.calib < 0.0 || f.test < 0.0) {
    throw std::invalid_argument("split fractions must be nonnegative");
  }
  const double sum = f.train + f.calib + f.test;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("split fractions must sum to 1, got " + std::to_string(sum));
  }
}

SpatialDataset take_rows(const SpatialDataset& ds, const std::vector<std::size_t>& rows) {
  SpatialDataset out;
  out.feature_names = ds.feature_names;
  out.crs = ds.crs;
  out.records.reserve(rows.size());
  for (std::size_t r : rows) out.records.push_back(ds.records[r]);
  return out;
}

}  // namespace

SplitResult split_dataset(const SpatialDataset& ds, SplitFractions fractions, std::uint64_t seed) {
  if (ds.empty()) throw std::invalid_argument("cannot split an empty dataset");
  check_fractions(fractions);

  const std::size_t n = ds.size();
  // The +1e-9 absorbs representation error in n*f (e.g. 90*0.1 < 9).
  const auto part = [n](double f) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) * f + 1e-9));
  };
  const std::size_t n_calib = part(fractions.calib);
  const std::size_t n_test = part(fractions.test);
  const std::size_t n_train = n - n_calib - n_test;

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  rng.shuffle(idx);

  std::vector<std::size_t> train_rows(idx.begin(), idx.begin() + n_train);
  std::vector<std::size_t> calib_rows(idx.begin() + n_train, idx.begin() + n_train + n_calib);
  std::vector<std::size_t> test_rows(idx.begin() + n_train + n_calib, idx.end());
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(calib_rows.begin(), calib_rows.end());
  std::sort(test_rows.begin(), test_rows.end());

  SplitResult result;
  result.train = take_rows(ds, train_rows);
  result.calib = take_rows(ds, calib_rows);
  result.test = take_rows(ds, test_rows);
  result.seed = seed;
  result.fractions = fractions;
  return result;
}

std::vector<Neighbor> knn_neighbors(const SpatialDataset& ds, const Location& query, std::size_t k) {
  if (k < 1 || k > ds.size()) {
    throw std::invalid_argument("k=" + std::to_string(k) + " out of range [1, " +
                                std::to_string(ds.size()) + "]");
  }
  if (!ds.empty() && query.crs != ds.crs) {
    throw std::invalid_argument("query CRS (" + crs_name(query.crs) +
                                ") does not match dataset CRS (" + crs_name(ds.crs) + ")");
  }
  std::vector<Neighbor> all;
  all.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    all.push_back({i, distance(query, ds.records[i].loc)});
  }
  const auto cmp = [](const Neighbor& a, const Neighbor& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.index < b.index;
  };
  if (k < all.size()) {
    std::nth_element(all.begin(), all.begin() + (k - 1), all.end(), cmp);
    all.resize(k);
  }
  std::sort(all.begin(), all.end(), cmp);
  return all;
}

double max_pairwise_distance(const SpatialDataset& ds) {
  double best = 0.0;
  for (std::size_t i = 0; i + 1 < ds.size(); ++i) {
    for (std::size_t j = i + 1; j < ds.size(); ++j) {
      best = std::max(best, distance(ds.records[i].loc, ds.records[j].loc));
    }
  }
  return best;
}

double median_pairwise_distance(const std::vector<Location>& locs) {
  std::vector<double> d;
  d.reserve(locs.size() * (locs.size() - 1) / 2);
  for (std::size_t i = 0; i + 1 < locs.size(); ++i) {
    for (std::size_t j = i + 1; j < locs.size(); ++j) {
      d.push_back(distance(locs[i], locs[j]));
    }
  }
  if (d.empty()) return 0.0;
  std::sort(d.begin(), d.end());
  const std::size_t n = d.size();
  return n % 2 == 1 ? d[n / 2] : 0.5 * (d[n / 2 - 1] + d[n / 2]);
}

}  // namespace geocp
