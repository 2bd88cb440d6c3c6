#include "geoconformal/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "geoconformal/format.hpp"

namespace geocp {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  cells.push_back(cell);
  return cells;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return s.substr(b, e - b);
}

double parse_cell(const std::string& raw, std::size_t row, const std::string& col) {
  const std::string text = trim(raw);
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw std::runtime_error("row " + std::to_string(row) + ", column '" + col +
                             "': unparseable cell '" + text + "'");
  }
  return value;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw std::runtime_error("missing column '" + name + "' in CSV header");
  }
  return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

ParseResult parse_dataset(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty dataset: '" + path + "' has no header");
  std::vector<std::string> header = split_csv_line(line);
  for (auto& h : header) h = trim(h);

  const std::size_t xi = column_index(header, schema.x_col);
  const std::size_t yi = column_index(header, schema.y_col);
  const std::size_t ti = column_index(header, schema.target_col);
  std::vector<std::size_t> fi;
  fi.reserve(schema.feature_cols.size());
  for (const auto& f : schema.feature_cols) fi.push_back(column_index(header, f));

  ParseResult result;
  result.dataset.feature_names = schema.feature_cols;
  result.dataset.crs = schema.crs;

  std::size_t row = 1;  // 1-based data rows, header excluded
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() < header.size()) {
      throw std::runtime_error("row " + std::to_string(row) + ": expected " +
                               std::to_string(header.size()) + " cells, got " +
                               std::to_string(cells.size()));
    }
    SpatialRecord rec;
    rec.loc.x = parse_cell(cells[xi], row, schema.x_col);
    rec.loc.y = parse_cell(cells[yi], row, schema.y_col);
    rec.loc.crs = schema.crs;
    rec.target = parse_cell(cells[ti], row, schema.target_col);
    rec.features.reserve(fi.size());
    for (std::size_t j = 0; j < fi.size(); ++j) {
      rec.features.push_back(parse_cell(cells[fi[j]], row, schema.feature_cols[j]));
    }
    validate_location(rec.loc);
    result.dataset.records.push_back(std::move(rec));
    ++row;
  }
  if (result.dataset.empty()) throw std::runtime_error("empty dataset: '" + path + "' has a header only");

  // Merge rows at identical locations; kriging systems are singular otherwise.
  std::map<std::pair<double, double>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < result.dataset.size(); ++i) {
    const auto& loc = result.dataset.records[i].loc;
    groups[{loc.x, loc.y}].push_back(i);
  }
  bool any_merge = false;
  for (const auto& [key, rows] : groups) {
    if (rows.size() > 1) {
      any_merge = true;
      break;
    }
  }
  if (any_merge) {
    std::vector<bool> drop(result.dataset.size(), false);
    for (const auto& [key, rows] : groups) {
      if (rows.size() < 2) continue;
      SpatialRecord& first = result.dataset.records[rows.front()];
      bool equal_targets = true;
      double target_sum = 0.0;
      std::vector<double> feature_sum(first.features.size(), 0.0);
      for (std::size_t r : rows) {
        const SpatialRecord& rec = result.dataset.records[r];
        if (rec.target != first.target) equal_targets = false;
        target_sum += rec.target;
        for (std::size_t j = 0; j < feature_sum.size(); ++j) feature_sum[j] += rec.features[j];
        if (r != rows.front()) drop[r] = true;
      }
      const double inv = 1.0 / static_cast<double>(rows.size());
      first.target = target_sum * inv;
      for (std::size_t j = 0; j < feature_sum.size(); ++j) first.features[j] = feature_sum[j] * inv;
      char buf[160];
      if (equal_targets) {
        std::snprintf(buf, sizeof(buf), "%zu duplicate rows at (%g, %g) deduplicated", rows.size(),
                      key.first, key.second);
      } else {
        std::snprintf(buf, sizeof(buf), "%zu rows at (%g, %g) with differing targets averaged",
                      rows.size(), key.first, key.second);
      }
      result.warnings.emplace_back(buf);
    }
    std::vector<SpatialRecord> kept;
    kept.reserve(result.dataset.size());
    for (std::size_t i = 0; i < result.dataset.size(); ++i) {
      if (!drop[i]) kept.push_back(std::move(result.dataset.records[i]));
    }
    result.dataset.records = std::move(kept);
  }

  result.dataset.validate();
  return result;
}

void write_dataset_csv(const std::string& path, const SpatialDataset& ds) {
  std::ostringstream out;
  out << "x,y,target";
  for (const auto& name : ds.feature_names) out << ',' << name;
  out << '\n';
  for (const auto& rec : ds.records) {
    out << fmt_double(rec.loc.x) << ',' << fmt_double(rec.loc.y) << ',' << fmt_double(rec.target);
    for (double f : rec.features) out << ',' << fmt_double(f);
    out << '\n';
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot write file '" + path + "'");
  file << out.str();
}

}  // namespace geocp
