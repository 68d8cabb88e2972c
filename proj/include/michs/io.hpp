#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "michs/common.hpp"
#include "michs/model.hpp"

namespace michs {

// Shortest round-trip decimal text for a double; locale independent.
inline std::string format_double(double value) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text, const std::string& where) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end)
    throw IoError(where + ": cannot parse number '" + std::string(text) + "'");
  return value;
}

inline long parse_long(std::string_view text, const std::string& where) {
  long value = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end)
    throw IoError(where + ": cannot parse integer '" + std::string(text) + "'");
  return value;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

// Flat matrix file: one CSV line per row, no header.
inline void write_matrix_csv(const std::string& path, const Mat& matrix) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_matrix_csv: cannot open " + path);
  for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
      if (c) out << ',';
      out << format_double(matrix(r, c));
    }
    out << '\n';
  }
  if (!out) throw IoError("write_matrix_csv: write failed for " + path);
}

inline Mat read_matrix_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_matrix_csv: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& field : split_csv_line(line))
      row.push_back(parse_double(field, path + ":" + std::to_string(lineno)));
    if (!rows.empty() && row.size() != rows.front().size())
      throw IoError(path + ":" + std::to_string(lineno) + ": ragged row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("read_matrix_csv: " + path + " is empty");
  Mat matrix(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return matrix;
}

// Sidecar metadata: one class id per column, one per line.
inline void write_labels(const std::string& path, const std::vector<int>& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_labels: cannot open " + path);
  for (const int label : labels) out << label << '\n';
  if (!out) throw IoError("write_labels: write failed for " + path);
}

inline std::vector<int> read_labels(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_labels: cannot open " + path);
  std::vector<int> labels;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    labels.push_back(static_cast<int>(parse_long(line, path + ":" + std::to_string(lineno))));
  }
  if (labels.empty()) throw IoError("read_labels: " + path + " is empty");
  return labels;
}

inline void save_dictionary(const Dictionary& dict, const std::string& matrix_path,
                            const std::string& labels_path) {
  write_matrix_csv(matrix_path, dict.atoms());
  write_labels(labels_path, dict.column_labels());
}

// Columns must already be unit-norm (shortest round-trip text preserves them
// exactly); no renormalization happens here.
inline Dictionary load_dictionary(const std::string& matrix_path, const std::string& labels_path) {
  Mat atoms = read_matrix_csv(matrix_path);
  std::vector<int> labels = read_labels(labels_path);
  if (static_cast<Eigen::Index>(labels.size()) != atoms.cols())
    throw IoError("load_dictionary: " + labels_path + " has " + std::to_string(labels.size()) +
                  " labels but the matrix has " + std::to_string(atoms.cols()) + " columns");
  return Dictionary(std::move(atoms), std::move(labels));
}

// Pool metadata CSV: column_index,class_id,view_tag with a header row.
inline void write_pool_meta(const std::string& path, const std::vector<LabeledVector>& pool) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_pool_meta: cannot open " + path);
  out << "column_index,class_id,view_tag\n";
  for (std::size_t j = 0; j < pool.size(); ++j)
    out << j << ',' << pool[j].class_id << ',' << pool[j].view_tag << '\n';
  if (!out) throw IoError("write_pool_meta: write failed for " + path);
}

inline std::vector<LabeledVector> read_pool(const std::string& matrix_path,
                                            const std::string& meta_path) {
  const Mat matrix = read_matrix_csv(matrix_path);
  std::ifstream in(meta_path, std::ios::binary);
  if (!in) throw IoError("read_pool: cannot open " + meta_path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("read_pool: " + meta_path + " is empty");
  std::vector<LabeledVector> pool;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 3)
      throw IoError(meta_path + ":" + std::to_string(lineno) + ": expected 3 fields");
    const std::string where = meta_path + ":" + std::to_string(lineno);
    const long col = parse_long(fields[0], where);
    if (col < 0 || col >= matrix.cols())
      throw IoError(where + ": column index " + std::to_string(col) + " out of range");
    pool.push_back({matrix.col(col), static_cast<int>(parse_long(fields[1], where)),
                    static_cast<int>(parse_long(fields[2], where))});
  }
  if (pool.empty()) throw IoError("read_pool: " + meta_path + " lists no samples");
  return pool;
}

inline Mat vectors_to_matrix(const std::vector<LabeledVector>& items) {
  require(!items.empty(), "vectors_to_matrix: empty input");
  Mat matrix(items.front().features.size(), static_cast<Eigen::Index>(items.size()));
  for (std::size_t j = 0; j < items.size(); ++j) {
    require(items[j].features.size() == matrix.rows(), "vectors_to_matrix: ragged vectors");
    matrix.col(static_cast<Eigen::Index>(j)) = items[j].features;
  }
  return matrix;
}

// Image dataset manifest: path,class_name,view_tag with a header row.
inline void write_manifest(const std::string& path, const std::vector<std::string>& paths,
                           const std::vector<std::string>& class_names,
                           const std::vector<LabeledVector>& images) {
  require(paths.size() == images.size(), "write_manifest: path/image count mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_manifest: cannot open " + path);
  out << "path,class_name,view_tag\n";
  for (std::size_t j = 0; j < images.size(); ++j)
    out << paths[j] << ',' << class_names[images[j].class_id - 1] << ',' << images[j].view_tag
        << '\n';
  if (!out) throw IoError("write_manifest: write failed for " + path);
}

}  // namespace michs
