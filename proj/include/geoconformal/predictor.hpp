#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "geoconformal/dataset.hpp"

namespace geocp {

// Fitted regressor contract. Implementations are immutable after fitting;
// predict is deterministic and safe to call from many threads at once.
class PredictorModel {
 public:
  virtual ~PredictorModel() = default;

  // Point prediction for a query with the training schema (interpolators
  // read the location, feature models read the feature vector; the target
  // field is ignored).
  virtual double predict(const SpatialRecord& query) const = 0;

  virtual std::string kind() const = 0;

  // Versioned plain-text serialization; load_model() restores it exactly
  // to printed precision.
  virtual void save(std::ostream& out) const = 0;
};

// Elementwise predict over the query records, order preserved.
std::vector<double> predict_batch(const PredictorModel& model, const SpatialDataset& queries,
                                  int threads = 1);

}  // namespace geocp
