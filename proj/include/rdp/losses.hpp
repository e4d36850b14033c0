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
#include <vector>

#include "rdp/network.hpp"

namespace rdp {

// Loss conventions used everywhere (training, gradients, scoring):
//   pair loss            (phi(x_i) . phi(x_j) - y_ij)^2          raw square
//   reconstruction loss  |x - dec(phi(x))|^2                     summed over D
//   novelty loss         mean_k (phi(x)_k - eta(x)_k)^2          averaged over K

/// Mean squared deviation between a representation and its random target.
inline double novelty_value(const Vector& rep, const Vector& target) {
  return (rep - target).squaredNorm() / static_cast<double>(rep.size());
}

inline double l_rdp(const RdpModel& model, const Vector& xi, const Vector& xj, double yij) {
  const double diff = forward(model, xi).dot(forward(model, xj)) - yij;
  return diff * diff;
}

inline double l_aux_clu(const RdpModel& model, const Vector& x) {
  return (x - decode(model, forward(model, x))).squaredNorm();
}

inline void require_novelty_dims(const RdpModel& model) {
  if (!model.map || model.rep_dim() != model.map->out_dim) {
    fail(ErrorKind::kConfig, "novelty loss needs representation dimension equal to map output dimension");
  }
}

inline double l_aux_ad(const RdpModel& model, const Vector& x) {
  require_novelty_dims(model);
  return novelty_value(forward(model, x), model.map->project(x));
}

struct Pair {
  std::size_t i = 0;
  std::size_t j = 0;
  double y = 0.0;
};

struct PairBatch {
  std::vector<Pair> pairs;

  /// Sorted unique row indices referenced by the pairs.
  std::vector<std::size_t> distinct_points() const {
    std::vector<std::size_t> pts;
    pts.reserve(pairs.size() * 2);
    for (const auto& p : pairs) {
      pts.push_back(p.i);
      pts.push_back(p.j);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
  }
};

/// Builds a batch with targets taken straight from the model's map.
inline PairBatch make_pair_batch(const RandomMap& map, const Matrix& data,
                                 const std::vector<std::pair<std::size_t, std::size_t>>& index_pairs) {
  PairBatch batch;
  batch.pairs.reserve(index_pairs.size());
  for (auto [i, j] : index_pairs) {
    require(i < rows(data) && j < rows(data), "pair index out of range");
    batch.pairs.push_back({i, j, pairwise_target(map, row_of(data, i), row_of(data, j))});
  }
  return batch;
}

struct ObjectiveParts {
  double total = 0.0;
  double rdp = 0.0;  // mean pair loss
  double aux = 0.0;  // mean auxiliary loss over distinct points, unweighted
};

/// Evaluates the training objective term by term: mean pair loss plus
/// aux_weight times the mean auxiliary loss over the batch's distinct points.
inline ObjectiveParts batch_objective_parts(const RdpModel& model, const Matrix& data, const PairBatch& batch,
                                            const TrainConfig& config) {
  require(!batch.pairs.empty(), "batch_objective: empty batch");
  if (!config.use_rdp_loss && !config.use_aux_loss) fail(ErrorKind::kConfig, "no loss enabled");
  ObjectiveParts parts;
  if (config.use_rdp_loss) {
    double sum = 0.0;
    for (const auto& p : batch.pairs) sum += l_rdp(model, row_of(data, p.i), row_of(data, p.j), p.y);
    parts.rdp = sum / static_cast<double>(batch.pairs.size());
    parts.total += parts.rdp;
  }
  if (config.use_aux_loss) {
    const auto pts = batch.distinct_points();
    double sum = 0.0;
    for (auto i : pts) {
      const Vector x = row_of(data, i);
      sum += config.task == Task::kAnomaly ? l_aux_ad(model, x) : l_aux_clu(model, x);
    }
    parts.aux = sum / static_cast<double>(pts.size());
    parts.total += config.aux_weight * parts.aux;
  }
  return parts;
}

inline double batch_objective(const RdpModel& model, const Matrix& data, const PairBatch& batch,
                              const TrainConfig& config) {
  return batch_objective_parts(model, data, batch, config).total;
}

}  // namespace rdp
