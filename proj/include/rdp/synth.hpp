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

#include <cmath>
#include <cstdint>

#include "rdp/dataset.hpp"
#include "rdp/rng.hpp"

namespace rdp {

/// k isotropic Gaussian clusters of `per_cluster` points each. Centers are
/// drawn uniformly in a box and rejected until every pair is at least
/// 10 * spread apart. Rows are grouped by cluster; labels are cluster ids.
inline Dataset synth_blobs(std::size_t k, std::size_t per_cluster, std::size_t d, double spread,
                           std::uint64_t seed) {
  require(k >= 1 && per_cluster >= 1 && d >= 1, "synth_blobs: k, per_cluster and d must be >= 1");
  require(spread >= 0.0, "synth_blobs: spread must be nonnegative");
  RngStream rng(seed);
  const double min_gap = 10.0 * spread;
  double half_width = std::max(min_gap, 1.0) * static_cast<double>(k);

  std::vector<Vector> centers;
  std::size_t attempts = 0;
  while (centers.size() < k) {
    Vector c(static_cast<Eigen::Index>(d));
    for (auto& v : c) v = rng.uniform(-half_width, half_width);
    bool ok = true;
    for (const auto& other : centers) ok = ok && (c - other).norm() >= min_gap;
    if (ok) {
      centers.push_back(std::move(c));
    } else if (++attempts % 1000 == 0) {
      half_width *= 2.0;
    }
  }

  Dataset ds;
  ds.features.resize(static_cast<Eigen::Index>(k * per_cluster), static_cast<Eigen::Index>(d));
  ds.labels.emplace(k * per_cluster);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t p = 0; p < per_cluster; ++p) {
      const auto r = static_cast<Eigen::Index>(c * per_cluster + p);
      for (std::size_t j = 0; j < d; ++j) {
        ds.features(r, static_cast<Eigen::Index>(j)) = centers[c](static_cast<Eigen::Index>(j)) + spread * rng.normal();
      }
      (*ds.labels)[static_cast<std::size_t>(r)] = static_cast<int>(c);
    }
  }
  return ds;
}

/// Standard-normal inliers followed by anomalies placed uniformly on random
/// directions at radius in [sqrt(d) + 6, sqrt(d) + 8], i.e. more than six
/// standard deviations beyond the typical inlier norm. Label 1 = anomaly.
inline Dataset synth_anomaly(std::size_t n_normal, std::size_t n_anomaly, std::size_t d,
                             std::uint64_t seed) {
  require(d >= 1 && n_normal >= 1, "synth_anomaly: n_normal and d must be >= 1");
  require(n_anomaly < n_normal, "synth_anomaly: n_anomaly must be smaller than n_normal");
  RngStream rng(seed);
  const auto n = n_normal + n_anomaly;
  Dataset ds;
  ds.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  ds.labels.emplace(n, 0);
  for (std::size_t i = 0; i < n_normal; ++i) {
    for (std::size_t j = 0; j < d; ++j) ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rng.normal();
  }
  const double base = std::sqrt(static_cast<double>(d));
  for (std::size_t i = n_normal; i < n; ++i) {
    Vector dir(static_cast<Eigen::Index>(d));
    do {
      for (auto& v : dir) v = rng.normal();
    } while (dir.norm() == 0.0);
    const double radius = rng.uniform(base + 6.0, base + 8.0);
    ds.features.row(static_cast<Eigen::Index>(i)) = (radius / dir.norm()) * dir.transpose();
    (*ds.labels)[i] = 1;
  }
  return ds;
}

}  // namespace rdp
