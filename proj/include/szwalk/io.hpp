#pragma once

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "szwalk/error.hpp"
#include "szwalk/graph.hpp"
#include "szwalk/types.hpp"

// File formats. All of them are plain UTF-8 text with LF line endings and
// '.' as the decimal separator:
//   matrix:       N lines of N comma-separated decimals, line j = row j
//   vector:       N lines, one decimal per line
//   state vector: N^2 lines of "re,im", component N*i+j = amplitude of |i>|j>
//   trace:        steps+1 lines of N comma-separated decimals
//   ranking:      lines of "node_index,score"

namespace szwalk::io {

namespace detail {

inline Real parse_decimal(std::string_view field, const std::string& path,
                          std::size_t line) {
  const char* first = field.data();
  const char* last = field.data() + field.size();
  while (first < last && (*first == ' ' || *first == '\t')) ++first;
  while (last > first && (last[-1] == ' ' || last[-1] == '\t' ||
                          last[-1] == '\r')) {
    --last;
  }
  Real value = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || first == last) {
    throw Error(ErrorCode::IoError,
                path + ":" + std::to_string(line) + ": bad decimal literal '" +
                    std::string(field) + "'");
  }
  return value;
}

inline std::vector<Real> parse_csv_line(const std::string& line,
                                        const std::string& path,
                                        std::size_t lineno) {
  std::vector<Real> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    const std::size_t stop = comma == std::string::npos ? line.size() : comma;
    fields.push_back(parse_decimal(
        std::string_view(line).substr(start, stop - start), path, lineno));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

inline void append_decimal(std::string& out, Real value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  out.append(buf, ptr);
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream file(path, std::ios::binary);  // binary: keep LF endings
  if (!file) {
    throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  }
  return file;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) {
    throw Error(ErrorCode::IoError, "cannot open '" + path + "' for reading");
  }
  return file;
}

}  // namespace detail

inline RealMatrix read_matrix_csv(const std::string& path) {
  std::ifstream file = detail::open_input(path);
  std::vector<std::vector<Real>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(file, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    rows.push_back(detail::parse_csv_line(line, path, lineno));
    if (rows.back().size() != rows.front().size()) {
      throw Error(ErrorCode::IoError,
                  path + ":" + std::to_string(lineno) +
                      ": ragged row, expected " +
                      std::to_string(rows.front().size()) + " fields");
    }
  }
  if (rows.empty()) {
    throw Error(ErrorCode::IoError, path + ": empty matrix file");
  }
  RealMatrix m(static_cast<Index>(rows.size()),
               static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return m;
}

inline void write_matrix_csv(const std::string& path, const RealMatrix& m) {
  std::ofstream file = detail::open_output(path);
  std::string line;
  for (Index i = 0; i < m.rows(); ++i) {
    line.clear();
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) line.push_back(',');
      detail::append_decimal(line, m(i, j));
    }
    line.push_back('\n');
    file << line;
  }
}

inline RealVector read_vector(const std::string& path) {
  std::ifstream file = detail::open_input(path);
  std::vector<Real> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(file, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    values.push_back(detail::parse_decimal(line, path, lineno));
  }
  if (values.empty()) {
    throw Error(ErrorCode::IoError, path + ": empty vector file");
  }
  return Eigen::Map<const RealVector>(values.data(),
                                      static_cast<Index>(values.size()));
}

inline void write_vector(const std::string& path, const RealVector& v) {
  std::ofstream file = detail::open_output(path);
  std::string line;
  for (Index i = 0; i < v.size(); ++i) {
    line.clear();
    detail::append_decimal(line, v(i));
    line.push_back('\n');
    file << line;
  }
}

/// State vector file: one "re,im" pair per line, component N*i+j.
inline ComplexVector read_state_vector(const std::string& path) {
  std::ifstream file = detail::open_input(path);
  std::vector<Complex> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(file, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto fields = detail::parse_csv_line(line, path, lineno);
    if (fields.size() != 2) {
      throw Error(ErrorCode::IoError,
                  path + ":" + std::to_string(lineno) +
                      ": expected 're,im', got " +
                      std::to_string(fields.size()) + " fields");
    }
    values.emplace_back(fields[0], fields[1]);
  }
  if (values.empty()) {
    throw Error(ErrorCode::IoError, path + ": empty state vector file");
  }
  return Eigen::Map<const ComplexVector>(values.data(),
                                         static_cast<Index>(values.size()));
}

inline void write_state_vector(const std::string& path,
                               const ComplexVector& v) {
  std::ofstream file = detail::open_output(path);
  std::string line;
  for (Index i = 0; i < v.size(); ++i) {
    line.clear();
    detail::append_decimal(line, v(i).real());
    line.push_back(',');
    detail::append_decimal(line, v(i).imag());
    line.push_back('\n');
    file << line;
  }
}

inline void write_trace_csv(const std::string& path,
                            const std::vector<ProbabilityVector>& trace) {
  std::ofstream file = detail::open_output(path);
  std::string line;
  for (const ProbabilityVector& p : trace) {
    line.clear();
    for (Index j = 0; j < p.size(); ++j) {
      if (j > 0) line.push_back(',');
      detail::append_decimal(line, p[j]);
    }
    line.push_back('\n');
    file << line;
  }
}

/// Ranking as "node_index,score" lines, by node index or descending score.
inline void write_ranking_csv(const std::string& path,
                              const ProbabilityVector& ranking,
                              bool by_descending_score = false) {
  std::vector<Index> order(static_cast<std::size_t>(ranking.size()));
  for (Index i = 0; i < ranking.size(); ++i) {
    order[static_cast<std::size_t>(i)] = i;
  }
  if (by_descending_score) {
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
      return ranking[a] > ranking[b];
    });
  }
  std::ofstream file = detail::open_output(path);
  std::string line;
  for (Index i : order) {
    line.clear();
    line.append(std::to_string(i));
    line.push_back(',');
    detail::append_decimal(line, ranking[i]);
    line.push_back('\n');
    file << line;
  }
}

}  // namespace szwalk::io
