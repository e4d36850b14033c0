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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>

#include "rdp/error.hpp"
#include "rdp/linalg.hpp"
#include "rdp/rng.hpp"

namespace rdp {

enum class MapKind : std::uint8_t { kGaussianRP = 0, kSparseRP = 1, kRFF = 2, kIdentity = 3 };

inline const char* to_string(MapKind k) {
  switch (k) {
    case MapKind::kGaussianRP: return "gaussian_rp";
    case MapKind::kSparseRP: return "sparse_rp";
    case MapKind::kRFF: return "rff";
    case MapKind::kIdentity: return "identity";
  }
  return "unknown";
}

/// A frozen random mapping from R^in_dim to R^out_dim. Nothing is resampled
/// after construction, so every target computed from it is fixed.
///
///   GaussianRP:  x -> A x / sqrt(K),         A_ij ~ N(0, 1)
///   SparseRP:    x -> R x,                   R_ij in {+s, 0, -s}, s = 1/sqrt(density K)
///   RFF:         x -> sqrt(2/K) cos(W x + b), W_ij ~ N(0, 1/sigma^2), b_i ~ U[0, 2pi)
///   Identity:    x -> x
struct RandomMap {
  MapKind kind = MapKind::kIdentity;
  Matrix weights;  // out_dim x in_dim; empty for identity
  Vector offsets;  // out_dim; RFF only
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  double bandwidth = 0.0;  // RFF only
  double density = 0.0;    // SparseRP only
  std::uint64_t seed = 0;

  Vector project(const Vector& x) const {
    if (static_cast<std::size_t>(x.size()) != in_dim) {
      fail(ErrorKind::kConfig, "random map expects dimension " + std::to_string(in_dim) + ", got " +
                                   std::to_string(x.size()));
    }
    switch (kind) {
      case MapKind::kIdentity:
        return x;
      case MapKind::kGaussianRP:
        return (weights * x) / std::sqrt(static_cast<double>(out_dim));
      case MapKind::kSparseRP:
        return weights * x;
      case MapKind::kRFF: {
        Vector z = weights * x + offsets;
        return std::sqrt(2.0 / static_cast<double>(out_dim)) * z.array().cos().matrix();
      }
    }
    return x;
  }
};

namespace detail {
inline void check_dims(std::size_t d, std::size_t k) {
  require(d >= 1, "random map input dimension must be >= 1");
  require(k >= 1, "random map output dimension must be >= 1");
}
}  // namespace detail

inline RandomMap new_gaussian_rp(std::size_t d, std::size_t k, std::uint64_t seed) {
  detail::check_dims(d, k);
  RngStream rng(seed);
  RandomMap m;
  m.kind = MapKind::kGaussianRP;
  m.in_dim = d;
  m.out_dim = k;
  m.seed = seed;
  m.weights.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < m.weights.size(); ++i) m.weights.data()[i] = rng.normal();
  return m;
}

/// Very sparse projection; density defaults to 1/sqrt(d).
inline RandomMap new_sparse_rp(std::size_t d, std::size_t k, std::optional<double> density,
                               std::uint64_t seed) {
  detail::check_dims(d, k);
  const double s = density.value_or(1.0 / std::sqrt(static_cast<double>(d)));
  require(s > 0.0 && s <= 1.0, "sparse projection density must lie in (0, 1]");
  RngStream rng(seed);
  RandomMap m;
  m.kind = MapKind::kSparseRP;
  m.in_dim = d;
  m.out_dim = k;
  m.density = s;
  m.seed = seed;
  const double value = std::sqrt(1.0 / (s * static_cast<double>(k)));
  m.weights = Matrix::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < m.weights.size(); ++i) {
    const double u = rng.uniform();
    if (u < s / 2.0) m.weights.data()[i] = value;
    else if (u < s) m.weights.data()[i] = -value;
  }
  return m;
}

inline RandomMap new_rff(std::size_t d, std::size_t k, double bandwidth, std::uint64_t seed) {
  detail::check_dims(d, k);
  require(bandwidth > 0.0 && std::isfinite(bandwidth), "RFF bandwidth must be positive");
  RngStream rng(seed);
  RandomMap m;
  m.kind = MapKind::kRFF;
  m.in_dim = d;
  m.out_dim = k;
  m.bandwidth = bandwidth;
  m.seed = seed;
  m.weights.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < m.weights.size(); ++i) m.weights.data()[i] = rng.normal(0.0, 1.0 / bandwidth);
  m.offsets.resize(static_cast<Eigen::Index>(k));
  for (auto& b : m.offsets) {
    b = rng.uniform(0.0, 2.0 * std::numbers::pi);
    if (b >= 2.0 * std::numbers::pi) b = 0.0;  // guard against rounding up
  }
  return m;
}

/// Median pairwise Euclidean distance over a uniform subset of at most
/// `max_points` rows. Falls back to 1 when every sampled pair coincides.
inline double median_heuristic(const Matrix& data, std::uint64_t seed, std::size_t max_points = 1000) {
  require(data.rows() >= 1, "median heuristic needs at least one row");
  RngStream rng(seed);
  auto idx = rng.sample_without_replacement(rows(data), max_points);
  std::sort(idx.begin(), idx.end());
  std::vector<double> dists;
  dists.reserve(idx.size() * (idx.size() - 1) / 2);
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = a + 1; b < idx.size(); ++b) {
      dists.push_back((data.row(static_cast<Eigen::Index>(idx[a])) - data.row(static_cast<Eigen::Index>(idx[b]))).norm());
    }
  }
  if (dists.empty()) return 1.0;
  const auto mid = dists.begin() + static_cast<std::ptrdiff_t>(dists.size() / 2);
  std::nth_element(dists.begin(), mid, dists.end());
  double med = *mid;
  if (dists.size() % 2 == 0) {
    med = 0.5 * (med + *std::max_element(dists.begin(), mid));
  }
  return med > 0.0 ? med : 1.0;
}

/// RFF with the bandwidth taken from `data` by the median heuristic unless given.
inline RandomMap new_rff(const Matrix& data, std::size_t k, std::optional<double> bandwidth,
                         std::uint64_t seed) {
  const double sigma = bandwidth ? *bandwidth : median_heuristic(data, derive_seed(seed, 0xb4d));
  return new_rff(cols(data), k, sigma, seed);
}

inline RandomMap new_identity(std::size_t d) {
  require(d >= 1, "identity map dimension must be >= 1");
  RandomMap m;
  m.kind = MapKind::kIdentity;
  m.in_dim = d;
  m.out_dim = d;
  return m;
}

/// Row i of the result is map.project(row i of x).
inline Matrix apply(const RandomMap& map, const Matrix& x) {
  if (cols(x) != map.in_dim) {
    fail(ErrorKind::kConfig, "random map expects " + std::to_string(map.in_dim) + " columns, got " +
                                 std::to_string(x.cols()));
  }
  Matrix out(x.rows(), static_cast<Eigen::Index>(map.out_dim));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    out.row(i) = map.project(x.row(i).transpose()).transpose();
  }
  return out;
}

/// Supervisory target y_ij = eta(x_i) . eta(x_j).
inline double pairwise_target(const RandomMap& map, const Vector& xi, const Vector& xj) {
  const Vector a = map.project(xi);
  const Vector b = map.project(xj);
  return a.dot(b);
}

inline double rbf_kernel(const Vector& x, const Vector& y, double sigma) {
  require(x.size() == y.size(), "rbf_kernel: dimension mismatch");
  require(sigma > 0.0, "rbf_kernel: sigma must be positive");
  return std::exp(-(x - y).squaredNorm() / (2.0 * sigma * sigma));
}

struct JlAudit {
  double epsilon = 0.0;
  std::size_t sample_pairs = 0;
  std::size_t violations = 0;
  double violation_rate = 0.0;
  double bound = 0.0;  // 4 exp(-(eps^2 - eps^3) K / 4)
};

inline double jl_inner_product_bound(double epsilon, std::size_t k) {
  return 4.0 * std::exp(-(epsilon * epsilon - epsilon * epsilon * epsilon) * static_cast<double>(k) / 4.0);
}

/// Samples `n_pairs` row pairs (with replacement) and counts how often the
/// projected inner product deviates from the original one by at least
/// epsilon. Rows are first scaled by the largest row norm so all |x| <= 1.
inline JlAudit jl_audit(const RandomMap& map, const Matrix& data, double epsilon, std::size_t n_pairs,
                        std::uint64_t seed) {
  if (map.kind != MapKind::kGaussianRP) {
    fail(ErrorKind::kConfig, std::string("jl_audit requires a gaussian_rp map, got ") + to_string(map.kind));
  }
  require(epsilon > 0.0 && epsilon < 0.5, "jl_audit: epsilon must lie in (0, 1/2)");
  require(data.rows() >= 1, "jl_audit: empty data");
  const double max_norm = data.rowwise().norm().maxCoeff();
  const Matrix normalized = max_norm > 0.0 ? Matrix(data / max_norm) : data;
  const Matrix projected = apply(map, normalized);

  RngStream rng(seed);
  JlAudit audit;
  audit.epsilon = epsilon;
  audit.sample_pairs = n_pairs;
  for (std::size_t p = 0; p < n_pairs; ++p) {
    const auto i = static_cast<Eigen::Index>(rng.index(rows(data)));
    const auto j = static_cast<Eigen::Index>(rng.index(rows(data)));
    const double original = normalized.row(i).dot(normalized.row(j));
    const double mapped = projected.row(i).dot(projected.row(j));
    if (std::abs(original - mapped) >= epsilon) ++audit.violations;
  }
  audit.violation_rate = n_pairs ? static_cast<double>(audit.violations) / static_cast<double>(n_pairs) : 0.0;
  audit.bound = jl_inner_product_bound(epsilon, map.out_dim);
  return audit;
}

/// Which mapping supplies the supervisory inner products.
enum class Source { kRff, kSrp, kIdentity, kGaussian };

inline const char* to_string(Source s) {
  switch (s) {
    case Source::kRff: return "rff";
    case Source::kSrp: return "srp";
    case Source::kIdentity: return "identity";
    case Source::kGaussian: return "gaussian";
  }
  return "unknown";
}

inline Source parse_source(const std::string& s) {
  if (s == "rff") return Source::kRff;
  if (s == "srp") return Source::kSrp;
  if (s == "identity") return Source::kIdentity;
  if (s == "gaussian") return Source::kGaussian;
  fail(ErrorKind::kConfig, "unknown source '" + s + "' (expected rff, srp, identity or gaussian)");
}

struct MapSpec {
  Source source = Source::kRff;
  std::size_t k = 50;  // ignored for identity
  std::optional<double> bandwidth;
  std::optional<double> density;
};

/// Output dimension of the described map on data with `d` columns.
inline std::size_t output_dim(const MapSpec& spec, std::size_t d) {
  return spec.source == Source::kIdentity ? d : spec.k;
}

inline RandomMap make_map(const MapSpec& spec, const Matrix& data, std::uint64_t seed) {
  switch (spec.source) {
    case Source::kRff: return new_rff(data, spec.k, spec.bandwidth, seed);
    case Source::kSrp: return new_sparse_rp(cols(data), spec.k, spec.density, seed);
    case Source::kIdentity: return new_identity(cols(data));
    case Source::kGaussian: return new_gaussian_rp(cols(data), spec.k, seed);
  }
  fail(ErrorKind::kConfig, "unknown source");
}

}  // namespace rdp
