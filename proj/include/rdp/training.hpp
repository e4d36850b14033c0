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
#include <memory>
#include <string>
#include <vector>

#include "rdp/losses.hpp"

namespace rdp {

/// eta(x) for every row of a dataset, computed once per training run.
class TargetCache {
 public:
  TargetCache(const RandomMap& map, const Matrix& data) {
    rows_.reserve(rows(data));
    for (std::size_t i = 0; i < rows(data); ++i) rows_.push_back(map.project(row_of(data, i)));
  }

  const Vector& eta(std::size_t i) const { return rows_[i]; }

  /// Bit-identical to pairwise_target(map, x_i, x_j).
  double target(std::size_t i, std::size_t j) const { return rows_[i].dot(rows_[j]); }

 private:
  std::vector<Vector> rows_;
};

struct Gradients {
  Matrix weights;
  Vector bias;
  Matrix decoder_weights;  // empty when the model has no decoder
  Vector decoder_bias;
  ObjectiveParts loss;
};

/// Analytic gradients of the mean batch objective (see batch_objective) with
/// respect to every trainable parameter.
inline Gradients grad_batch(const RdpModel& model, const Matrix& data, const PairBatch& batch,
                            const TrainConfig& config, const TargetCache* cache = nullptr) {
  require(!batch.pairs.empty(), "grad_batch: empty batch");
  if (!config.use_rdp_loss && !config.use_aux_loss) fail(ErrorKind::kConfig, "no loss enabled");
  const bool novelty = config.novelty_active();
  const bool recon = config.reconstruction_active();
  if (novelty) require_novelty_dims(model);
  if (recon && !model.has_decoder()) fail(ErrorKind::kConfig, "reconstruction loss needs a decoder");

  const auto pts = batch.distinct_points();
  const std::size_t u = pts.size();
  const auto slot = [&pts](std::size_t row) {
    return static_cast<std::size_t>(std::lower_bound(pts.begin(), pts.end(), row) - pts.begin());
  };
  const double slope = model.leaky_slope;

  std::vector<Vector> xs(u), zs(u), hs(u), dhs(u);
  for (std::size_t s = 0; s < u; ++s) {
    xs[s] = row_of(data, pts[s]);
    zs[s] = pre_activation(model, xs[s]);
    hs[s] = zs[s].unaryExpr([slope](double v) { return leaky_relu(v, slope); });
    dhs[s] = Vector::Zero(zs[s].size());
  }

  Gradients g;
  g.weights = Matrix::Zero(model.weights.rows(), model.weights.cols());
  g.bias = Vector::Zero(model.bias.size());
  if (recon) {
    g.decoder_weights = Matrix::Zero(model.decoder_weights->rows(), model.decoder_weights->cols());
    g.decoder_bias = Vector::Zero(model.decoder_bias->size());
  }

  if (config.use_rdp_loss) {
    const double inv_pairs = 1.0 / static_cast<double>(batch.pairs.size());
    double sum = 0.0;
    for (const auto& p : batch.pairs) {
      const auto a = slot(p.i);
      const auto b = slot(p.j);
      const double r = hs[a].dot(hs[b]) - p.y;
      sum += r * r;
      const double coef = 2.0 * r * inv_pairs;
      dhs[a] += coef * hs[b];
      dhs[b] += coef * hs[a];
    }
    g.loss.rdp = sum * inv_pairs;
    g.loss.total += g.loss.rdp;
  }

  if (config.use_aux_loss) {
    const double inv_u = 1.0 / static_cast<double>(u);
    const double lambda = config.aux_weight;
    double sum = 0.0;
    for (std::size_t s = 0; s < u; ++s) {
      if (novelty) {
        const Vector eta = cache ? cache->eta(pts[s]) : model.map->project(xs[s]);
        const Vector diff = hs[s] - eta;
        sum += novelty_value(hs[s], eta);
        dhs[s] += (lambda * 2.0 * inv_u / static_cast<double>(diff.size())) * diff;
      } else {
        const Vector diff = *model.decoder_weights * hs[s] + *model.decoder_bias - xs[s];
        sum += diff.squaredNorm();
        const Vector gr = (lambda * 2.0 * inv_u) * diff;
        g.decoder_weights.noalias() += gr * hs[s].transpose();
        g.decoder_bias += gr;
        dhs[s].noalias() += model.decoder_weights->transpose() * gr;
      }
    }
    g.loss.aux = sum * inv_u;
    g.loss.total += lambda * g.loss.aux;
  }

  if (!std::isfinite(g.loss.total)) fail(ErrorKind::kNumeric, "non-finite loss: training diverged");

  for (std::size_t s = 0; s < u; ++s) {
    const Vector dz = dhs[s].cwiseProduct(zs[s].unaryExpr([slope](double v) { return leaky_relu_grad(v, slope); }));
    g.weights.noalias() += dz * xs[s].transpose();
    g.bias += dz;
  }
  return g;
}

inline double gradient_norm(const Gradients& g) {
  return std::sqrt(g.weights.squaredNorm() + g.bias.squaredNorm() + g.decoder_weights.squaredNorm() +
                   g.decoder_bias.squaredNorm());
}

/// Plain SGD update. With `clip` > 0 the whole gradient is rescaled so its
/// global norm is at most `clip`.
inline void sgd_step(RdpModel& model, const Gradients& g, double learning_rate, double clip = 0.0) {
  if (clip > 0.0) {
    const double norm = gradient_norm(g);
    if (norm > clip) learning_rate *= clip / norm;
  }
  model.weights -= learning_rate * g.weights;
  model.bias -= learning_rate * g.bias;
  if (model.decoder_weights && g.decoder_weights.size() > 0) {
    *model.decoder_weights -= learning_rate * g.decoder_weights;
    *model.decoder_bias -= learning_rate * g.decoder_bias;
  }
}

struct LossTrace {
  std::vector<double> total;
  std::vector<double> rdp;
  std::vector<double> aux;
};

/// Splits a permutation into consecutive batches of `batch_size`; a trailing
/// singleton is folded into the previous batch so every batch has >= 2 rows
/// whenever the data does.
inline std::vector<std::vector<std::size_t>> make_batches(const std::vector<std::size_t>& order,
                                                          std::size_t batch_size) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const auto end = std::min(order.size(), start + batch_size);
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                     order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  if (out.size() >= 2 && out.back().size() == 1) {
    out[out.size() - 2].push_back(out.back().front());
    out.pop_back();
  }
  return out;
}

/// Each batch member is paired with its cyclic neighbour and with a partner
/// drawn uniformly from the same batch: 2 * |batch| pairs per step.
inline std::vector<std::pair<std::size_t, std::size_t>> batch_pairs(const std::vector<std::size_t>& members,
                                                                   RngStream& rng) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const auto b = members.size();
  out.reserve(2 * b);
  for (std::size_t p = 0; p < b; ++p) {
    out.emplace_back(members[p], members[(p + 1) % b]);
    out.emplace_back(members[p], members[rng.index(b)]);
  }
  return out;
}

struct TrainResult {
  RdpModel model;
  LossTrace trace;
};

/// Plain SGD at a fixed learning rate. Pure function of (data, config, map).
inline TrainResult train(const Matrix& data, const TrainConfig& config, std::shared_ptr<const RandomMap> map) {
  config.validate();
  require(data.rows() >= 1, "train: empty data");
  TrainResult result{init_model(cols(data), config.m, config, std::move(map), derive_seed(config.seed, 0)), {}};
  RdpModel& model = result.model;
  const TargetCache cache(*model.map, data);
  RngStream rng(derive_seed(config.seed, 1));

  std::vector<std::size_t> order(rows(data));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double total = 0.0, rdp_sum = 0.0, aux_sum = 0.0;
    const auto batches = make_batches(order, config.batch_size);
    for (const auto& members : batches) {
      PairBatch batch;
      for (auto [i, j] : batch_pairs(members, rng)) batch.pairs.push_back({i, j, cache.target(i, j)});
      Gradients g;
      try {
        g = grad_batch(model, data, batch, config, &cache);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kNumeric) throw;
        fail(ErrorKind::kNumeric, "training diverged at epoch " + std::to_string(epoch) + ": non-finite loss");
      }
      sgd_step(model, g, config.learning_rate, config.grad_clip);
      if (!model.all_finite()) {
        fail(ErrorKind::kNumeric, "training diverged at epoch " + std::to_string(epoch) + ": non-finite parameters");
      }
      total += g.loss.total;
      rdp_sum += g.loss.rdp;
      aux_sum += g.loss.aux;
    }
    const double nb = static_cast<double>(batches.size());
    result.trace.total.push_back(total / nb);
    result.trace.rdp.push_back(rdp_sum / nb);
    result.trace.aux.push_back(aux_sum / nb);
  }
  return result;
}

}  // namespace rdp
