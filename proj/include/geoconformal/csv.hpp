#pragma once

#include <string>
#include <vector>

#include "geoconformal/dataset.hpp"

namespace geocp {

// Column-name mapping from a CSV header to the dataset schema.
struct CsvSchema {
  std::string x_col;
  std::string y_col;
  std::string target_col;
  std::vector<std::string> feature_cols;  // may be empty
  Crs crs = Crs::Planar;
};

struct ParseResult {
  SpatialDataset dataset;
  std::vector<std::string> warnings;
};

// Reads a headered CSV ('.' decimal separator, UTF-8) through the schema
// mapping. Record order follows row order. Rows sharing an identical
// location are merged: equal targets are deduplicated, differing targets
// averaged; either case appends a warning. Throws on missing columns,
// unparseable cells (named by row and column), or an empty table.
ParseResult parse_dataset(const std::string& path, const CsvSchema& schema);

// Writes columns x,y,target followed by the feature columns. Values are
// printed so that parsing the file back yields bit-identical doubles.
void write_dataset_csv(const std::string& path, const SpatialDataset& ds);

// Splits one CSV line into cells, honoring double quotes.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace geocp
