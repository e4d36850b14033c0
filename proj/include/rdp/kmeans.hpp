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

#include <cstdint>
#include <limits>
#include <vector>

#include "rdp/error.hpp"
#include "rdp/linalg.hpp"
#include "rdp/rng.hpp"

namespace rdp {

struct KMeansResult {
  std::vector<int> assignments;
  Matrix centroids;  // k x dim
  double inertia = 0.0;
  std::size_t iterations_run = 0;
  std::vector<double> inertia_history;  // after initial assignment, then after each iteration
};

namespace detail {

// Nearest centroid for every row; ties go to the lowest cluster id.
inline double assign_points(const Matrix& x, const Matrix& centroids, std::vector<int>& out,
                            std::vector<double>& dist2) {
  double inertia = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int best_c = 0;
    for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
      const double d = (x.row(i) - centroids.row(c)).squaredNorm();
      if (d < best) {
        best = d;
        best_c = static_cast<int>(c);
      }
    }
    out[static_cast<std::size_t>(i)] = best_c;
    dist2[static_cast<std::size_t>(i)] = best;
    inertia += best;
  }
  return inertia;
}

inline Matrix kmeanspp_init(const Matrix& x, std::size_t k, RngStream& rng) {
  const std::size_t n = rows(x);
  Matrix centroids(static_cast<Eigen::Index>(k), x.cols());
  std::size_t first = rng.index(n);
  centroids.row(0) = x.row(static_cast<Eigen::Index>(first));
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) {
    d2[i] = (x.row(static_cast<Eigen::Index>(i)) - centroids.row(0)).squaredNorm();
  }
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (double v : d2) total += v;
    std::size_t pick = 0;
    if (total > 0.0) {
      double target = rng.uniform() * total;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        target -= d2[i];
        if (target < 0.0 && d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
      while (d2[pick] == 0.0 && pick > 0) --pick;
    } else {
      pick = rng.index(n);
    }
    centroids.row(static_cast<Eigen::Index>(c)) = x.row(static_cast<Eigen::Index>(pick));
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], (x.row(static_cast<Eigen::Index>(i)) - centroids.row(static_cast<Eigen::Index>(c))).squaredNorm());
    }
  }
  return centroids;
}

}  // namespace detail

/// Lloyd's algorithm from a k-means++ start. Stops when assignments no longer
/// change or after max_iters updates. An empty cluster takes over the point
/// farthest from its current centroid.
inline KMeansResult kmeans(const Matrix& x, std::size_t k, std::size_t max_iters, std::uint64_t seed) {
  const std::size_t n = rows(x);
  require(k >= 1, "kmeans: k must be >= 1");
  if (k > n) fail(ErrorKind::kConfig, "kmeans: k=" + std::to_string(k) + " exceeds point count " + std::to_string(n));

  RngStream rng(seed);
  KMeansResult res;
  res.centroids = detail::kmeanspp_init(x, k, rng);
  res.assignments.assign(n, 0);
  std::vector<double> dist2(n);
  res.inertia = detail::assign_points(x, res.centroids, res.assignments, dist2);
  res.inertia_history.push_back(res.inertia);

  std::vector<int> next(n);
  for (std::size_t it = 1; it <= max_iters; ++it) {
    std::vector<std::size_t> counts(k, 0);
    for (int a : res.assignments) ++counts[static_cast<std::size_t>(a)];
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[static_cast<std::size_t>(res.assignments[i])] < 2) continue;
        if (far == n || dist2[i] > dist2[far]) far = i;
      }
      if (far == n) break;  // cannot happen while k <= n
      --counts[static_cast<std::size_t>(res.assignments[far])];
      res.assignments[far] = static_cast<int>(c);
      counts[c] = 1;
      dist2[far] = 0.0;
    }

    res.centroids.setZero();
    for (std::size_t i = 0; i < n; ++i) {
      res.centroids.row(res.assignments[i]) += x.row(static_cast<Eigen::Index>(i));
    }
    for (std::size_t c = 0; c < k; ++c) {
      res.centroids.row(static_cast<Eigen::Index>(c)) /= static_cast<double>(counts[c]);
    }

    res.inertia = detail::assign_points(x, res.centroids, next, dist2);
    res.inertia_history.push_back(res.inertia);
    res.iterations_run = it;
    const bool converged = next == res.assignments;
    res.assignments.swap(next);
    if (converged) break;
  }
  return res;
}

}  // namespace rdp
