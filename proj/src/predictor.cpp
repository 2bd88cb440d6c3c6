#include "geoconformal/predictor.hpp"

#include "geoconformal/parallel.hpp"

namespace geocp {

std::vector<double> predict_batch(const PredictorModel& model, const SpatialDataset& queries,
                                  int threads) {
  std::vector<double> out(queries.size());
  parallel_for(queries.size(), threads,
               [&](std::size_t i) { out[i] = model.predict(queries.records[i]); });
  return out;
}

}  // namespace geocp
