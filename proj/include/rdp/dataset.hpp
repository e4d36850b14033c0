// Copyright 2026 The rdp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rdp/error.hpp"
#include "rdp/linalg.hpp"

namespace rdp {

struct Dataset {
  Matrix features;
  std::optional<std::vector<int>> labels;
  std::vector<std::string> feature_names;

  std::size_t n() const { return rows(features); }
  std::size_t d() const { return cols(features); }
  bool has_labels() const { return labels.has_value(); }

  /// Throws kFormat if the dataset breaks its shape or finiteness invariants.
  void validate() const {
    if (n() < 1 || d() < 1) fail(ErrorKind::kFormat, "dataset must have at least one row and one column");
    if (labels && labels->size() != n()) fail(ErrorKind::kFormat, "label count does not match row count");
    if (!feature_names.empty() && feature_names.size() != d()) {
      fail(ErrorKind::kFormat, "feature name count does not match column count");
    }
    if (!features.allFinite()) fail(ErrorKind::kNumeric, "dataset contains non-finite values");
  }
};

/// Column chosen by header name or by 0-based index.
using LabelSelector = std::variant<std::string, std::size_t>;

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::optional<double> parse_double(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace detail

/// Resolves a label selector against a header (may be empty when the file
/// has none). Names are tried first; an all-digit string falls back to an index.
inline std::size_t resolve_label_column(const LabelSelector& sel,
                                        const std::vector<std::string>& header,
                                        std::size_t n_cols) {
  std::size_t idx = n_cols;
  if (const auto* name = std::get_if<std::string>(&sel)) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (header[c] == *name) idx = c;
    }
    if (idx == n_cols) {
      std::size_t parsed = 0;
      auto [ptr, ec] = std::from_chars(name->data(), name->data() + name->size(), parsed);
      if (ec == std::errc() && ptr == name->data() + name->size()) idx = parsed;
      else fail(ErrorKind::kConfig, "label column '" + *name + "' not found in header");
    }
  } else {
    idx = std::get<std::size_t>(sel);
  }
  if (idx >= n_cols) {
    fail(ErrorKind::kConfig, "label column index " + std::to_string(idx) + " out of range (" +
                                 std::to_string(n_cols) + " columns)");
  }
  return idx;
}

inline Dataset parse_csv(std::istream& in, const std::string& source,
                         const std::optional<LabelSelector>& label_column, bool has_header) {
  std::vector<std::string> header;
  std::vector<std::vector<double>> cells;
  std::size_t n_cols = 0;
  std::size_t line_no = 0;
  std::string line;

  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    auto fields = detail::split_commas(line);
    if (has_header && header.empty() && cells.empty() && line_no == 1) {
      for (auto f : fields) header.emplace_back(f);
      n_cols = header.size();
      continue;
    }
    if (n_cols == 0) n_cols = fields.size();
    const std::size_t row = cells.size() + 1;
    if (fields.size() != n_cols) {
      fail(ErrorKind::kFormat, source + ": ragged row " + std::to_string(row) + " (line " +
                                   std::to_string(line_no) + "): expected " + std::to_string(n_cols) +
                                   " fields, got " + std::to_string(fields.size()));
    }
    std::vector<double> values(n_cols);
    for (std::size_t c = 0; c < n_cols; ++c) {
      auto v = detail::parse_double(fields[c]);
      if (!v || !std::isfinite(*v)) {
        fail(ErrorKind::kFormat, source + ": non-numeric cell '" + std::string(fields[c]) + "' at row " +
                                     std::to_string(row) + ", column " + std::to_string(c) + " (line " +
                                     std::to_string(line_no) + ")");
      }
      values[c] = *v;
    }
    cells.push_back(std::move(values));
  }
  if (cells.empty()) fail(ErrorKind::kFormat, source + ": no data rows");

  std::optional<std::size_t> label_idx;
  if (label_column) label_idx = resolve_label_column(*label_column, header, n_cols);

  Dataset ds;
  const std::size_t d = n_cols - (label_idx ? 1 : 0);
  if (d == 0) fail(ErrorKind::kFormat, source + ": no feature columns");
  ds.features.resize(static_cast<Eigen::Index>(cells.size()), static_cast<Eigen::Index>(d));
  if (label_idx) ds.labels.emplace(cells.size());
  for (std::size_t r = 0; r < cells.size(); ++r) {
    std::size_t out_c = 0;
    for (std::size_t c = 0; c < n_cols; ++c) {
      if (label_idx && c == *label_idx) {
        const double v = cells[r][c];
        if (v != std::floor(v)) {
          fail(ErrorKind::kFormat, source + ": non-integer label at row " + std::to_string(r + 1));
        }
        (*ds.labels)[r] = static_cast<int>(v);
      } else {
        ds.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(out_c++)) = cells[r][c];
      }
    }
  }
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (!(label_idx && c == *label_idx)) ds.feature_names.push_back(header[c]);
  }
  ds.validate();
  return ds;
}

inline Dataset load_csv(const std::filesystem::path& path,
                        const std::optional<LabelSelector>& label_column = std::nullopt,
                        bool has_header = true) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open '" + path.string() + "' for reading");
  return parse_csv(in, path.string(), label_column, has_header);
}

inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

/// Writes `contents` to a sibling temp file and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::kIo, "cannot open '" + tmp.string() + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) fail(ErrorKind::kIo, "write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorKind::kIo, "cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

/// Shortest round-trip formatting; labels (if any) go in a trailing "label" column.
inline std::string to_csv(const Dataset& ds) {
  std::ostringstream os;
  for (std::size_t c = 0; c < ds.d(); ++c) {
    if (c) os << ',';
    os << (ds.feature_names.empty() ? "x" + std::to_string(c) : ds.feature_names[c]);
  }
  if (ds.labels) os << ",label";
  os << '\n';
  for (std::size_t r = 0; r < ds.n(); ++r) {
    for (std::size_t c = 0; c < ds.d(); ++c) {
      if (c) os << ',';
      os << format_double(ds.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
    }
    if (ds.labels) os << ',' << (*ds.labels)[r];
    os << '\n';
  }
  return os.str();
}

inline void write_csv(const std::filesystem::path& path, const Dataset& ds) {
  write_file_atomic(path, to_csv(ds));
}

struct StandardizeParams {
  Vector means;
  Vector stds;  // zero-variance columns carry 1
};

/// Population-std z-scoring. Constant columns map to exact zeros.
inline std::pair<Dataset, StandardizeParams> standardize(const Dataset& data) {
  const auto n = data.features.rows();
  const auto d = data.features.cols();
  StandardizeParams p{Vector::Zero(d), Vector::Ones(d)};
  for (Eigen::Index c = 0; c < d; ++c) {
    auto col = data.features.col(c);
    const bool constant = (col.array() == col(0)).all();
    if (constant) {
      p.means(c) = col(0);
      continue;
    }
    const double mean = col.sum() / static_cast<double>(n);
    const double var = (col.array() - mean).square().sum() / static_cast<double>(n);
    p.means(c) = mean;
    p.stds(c) = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  Dataset out = data;
  out.features = ((data.features.rowwise() - p.means.transpose()).array().rowwise() /
                  p.stds.transpose().array()).matrix();
  return {std::move(out), std::move(p)};
}

inline Matrix apply_standardize(const Matrix& x, const StandardizeParams& p) {
  return ((x.rowwise() - p.means.transpose()).array().rowwise() / p.stds.transpose().array()).matrix();
}

inline Matrix unstandardize(const Matrix& z, const StandardizeParams& p) {
  return ((z.array().rowwise() * p.stds.transpose().array()).matrix().rowwise() + p.means.transpose());
}

}  // namespace rdp
