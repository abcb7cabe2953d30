#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tframe/errors.hpp"
#include "tframe/rng.hpp"

namespace tframe {

// %.17g round-trips every finite double exactly.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// CSV matrix format: first record "rows,cols", then one record per row.
inline std::string matrix_to_csv(const Matrix& m) {
  std::string out;
  out += std::to_string(m.rows());
  out += ',';
  out += std::to_string(m.cols());
  out += '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

inline std::string vector_to_csv(const Vector& v) { return matrix_to_csv(v); }

namespace detail {

inline std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  return fields;
}

inline double parse_double_field(const std::string& field) {
  std::size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(field, &pos);
  } catch (const std::exception&) {
    throw invalid_input("matrix_from_csv: unparseable value '" + field + "'");
  }
  while (pos < field.size() && (field[pos] == ' ' || field[pos] == '\r')) ++pos;
  if (pos != field.size())
    throw invalid_input("matrix_from_csv: trailing garbage in value '" + field + "'");
  if (!std::isfinite(value))
    throw invalid_input("matrix_from_csv: non-finite value '" + field + "'");
  return value;
}

}  // namespace detail

inline Matrix matrix_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw invalid_input("matrix_from_csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = detail::split_record(line);
  if (header.size() != 2) throw invalid_input("matrix_from_csv: header must be 'rows,cols'");
  long rows = 0, cols = 0;
  try {
    rows = std::stol(header[0]);
    cols = std::stol(header[1]);
  } catch (const std::exception&) {
    throw invalid_input("matrix_from_csv: malformed header '" + line + "'");
  }
  if (rows < 0 || cols < 0) throw invalid_input("matrix_from_csv: negative dimensions");
  Matrix m(rows, cols);
  for (long i = 0; i < rows; ++i) {
    if (!std::getline(in, line))
      throw invalid_input("matrix_from_csv: expected " + std::to_string(rows) +
                          " rows, file ends after " + std::to_string(i));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = detail::split_record(line);
    if (static_cast<long>(fields.size()) != cols)
      throw invalid_input("matrix_from_csv: row " + std::to_string(i) + " has " +
                          std::to_string(fields.size()) + " fields, expected " +
                          std::to_string(cols));
    for (long j = 0; j < cols; ++j) m(i, j) = detail::parse_double_field(fields[static_cast<std::size_t>(j)]);
  }
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) throw invalid_input("matrix_from_csv: unexpected extra row");
  }
  return m;
}

inline Vector vector_from_csv(const std::string& text) {
  const Matrix m = matrix_from_csv(text);
  if (m.cols() != 1)
    throw invalid_input("vector_from_csv: expected a single column, got " +
                        std::to_string(m.cols()));
  return m.col(0);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw invalid_input("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw invalid_input("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw invalid_input("write to '" + path + "' failed");
}

inline Matrix read_matrix_csv(const std::string& path) { return matrix_from_csv(read_text_file(path)); }
inline Vector read_vector_csv(const std::string& path) { return vector_from_csv(read_text_file(path)); }

}  // namespace tframe
