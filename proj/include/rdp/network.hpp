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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rdp/error.hpp"
#include "rdp/linalg.hpp"
#include "rdp/random_map.hpp"
#include "rdp/rng.hpp"

namespace rdp {

/// Selects the auxiliary loss: novelty for anomaly detection, reconstruction
/// for clustering.
enum class Task : std::uint8_t { kAnomaly = 0, kClustering = 1 };

inline const char* to_string(Task t) { return t == Task::kAnomaly ? "anomaly" : "clustering"; }

struct TrainConfig {
  std::size_t epochs = 200;
  std::size_t batch_size = 192;
  double learning_rate = 0.1;
  std::size_t m = 50;
  bool use_rdp_loss = true;
  bool use_aux_loss = true;
  double aux_weight = 1.0;
  double leaky_slope = 0.01;
  double grad_clip = 20.0;  // max global gradient norm per step; 0 disables
  std::uint64_t seed = 0;
  Task task = Task::kAnomaly;

  bool novelty_active() const { return use_aux_loss && task == Task::kAnomaly; }
  bool reconstruction_active() const { return use_aux_loss && task == Task::kClustering; }

  /// All violated constraints, empty when valid.
  std::vector<std::string> problems() const {
    std::vector<std::string> out;
    if (epochs < 1) out.emplace_back("epochs must be >= 1");
    if (batch_size < 2) out.emplace_back("batch size must be >= 2");
    if (!(learning_rate > 0.0)) out.emplace_back("learning rate must be > 0");
    if (!(aux_weight >= 0.0)) out.emplace_back("aux weight must be >= 0");
    if (!(grad_clip >= 0.0)) out.emplace_back("gradient clip must be >= 0");
    if (m < 1) out.emplace_back("representation dimension m must be >= 1");
    if (!use_rdp_loss && !use_aux_loss) out.emplace_back("no loss enabled");
    return out;
  }

  void validate() const {
    auto p = problems();
    if (!p.empty()) {
      std::string msg = p.front();
      for (std::size_t i = 1; i < p.size(); ++i) msg += "; " + p[i];
      fail(ErrorKind::kConfig, msg);
    }
  }

  static TrainConfig anomaly_defaults() { return {}; }

  static TrainConfig clustering_defaults() {
    TrainConfig c;
    c.epochs = 1000;
    c.m = 1024;
    c.task = Task::kClustering;
    return c;
  }
};

/// One affine layer followed by leaky-ReLU, with an optional linear decoder
/// back to input space. `map` is the frozen mapping supplying targets.
struct RdpModel {
  Matrix weights;  // M x D
  Vector bias;     // M
  std::optional<Matrix> decoder_weights;  // D x M
  std::optional<Vector> decoder_bias;     // D
  double leaky_slope = 0.01;

  Task task = Task::kAnomaly;
  bool use_rdp_loss = true;
  bool use_aux_loss = true;
  double aux_weight = 1.0;

  std::shared_ptr<const RandomMap> map;

  std::size_t in_dim() const { return cols(weights); }
  std::size_t rep_dim() const { return rows(weights); }
  bool has_decoder() const { return decoder_weights.has_value(); }

  bool all_finite() const {
    bool ok = weights.allFinite() && bias.allFinite();
    if (decoder_weights) ok = ok && decoder_weights->allFinite() && decoder_bias->allFinite();
    return ok;
  }
};

inline RdpModel init_model(std::size_t d, std::size_t m, const TrainConfig& config,
                           std::shared_ptr<const RandomMap> map, std::uint64_t seed) {
  require(d >= 1 && m >= 1, "init_model: d and m must be >= 1");
  require(map != nullptr, "init_model: a random map is required");
  require(map->in_dim == d, "init_model: map input dimension " + std::to_string(map->in_dim) +
                                " does not match data dimension " + std::to_string(d));
  if (config.novelty_active() && m != map->out_dim) {
    fail(ErrorKind::kConfig, "novelty loss needs m == k, got m=" + std::to_string(m) +
                                 " k=" + std::to_string(map->out_dim));
  }
  RngStream rng(seed);
  RdpModel model;
  model.leaky_slope = config.leaky_slope;
  model.task = config.task;
  model.use_rdp_loss = config.use_rdp_loss;
  model.use_aux_loss = config.use_aux_loss;
  model.aux_weight = config.aux_weight;
  model.map = std::move(map);

  const double enc_std = 1.0 / std::sqrt(static_cast<double>(d));
  model.weights.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < model.weights.size(); ++i) model.weights.data()[i] = rng.normal(0.0, enc_std);
  model.bias = Vector::Zero(static_cast<Eigen::Index>(m));

  if (config.reconstruction_active()) {
    const double dec_std = 1.0 / std::sqrt(static_cast<double>(m));
    Matrix dw(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(m));
    for (Eigen::Index i = 0; i < dw.size(); ++i) dw.data()[i] = rng.normal(0.0, dec_std);
    model.decoder_weights = std::move(dw);
    model.decoder_bias = Vector::Zero(static_cast<Eigen::Index>(d));
  }
  return model;
}

inline double leaky_relu(double z, double slope) { return z > 0.0 ? z : slope * z; }

/// Derivative used in backprop; the kink at 0 takes the negative-side slope.
inline double leaky_relu_grad(double z, double slope) { return z > 0.0 ? 1.0 : slope; }

inline Vector pre_activation(const RdpModel& model, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != model.in_dim()) {
    fail(ErrorKind::kConfig, "forward: expected input of dimension " + std::to_string(model.in_dim()) +
                                 ", got " + std::to_string(x.size()));
  }
  return model.weights * x + model.bias;
}

inline Vector forward(const RdpModel& model, const Vector& x) {
  Vector z = pre_activation(model, x);
  const double a = model.leaky_slope;
  return z.unaryExpr([a](double v) { return leaky_relu(v, a); });
}

inline Vector decode(const RdpModel& model, const Vector& h) {
  if (!model.has_decoder()) fail(ErrorKind::kConfig, "decode: model has no decoder");
  if (static_cast<std::size_t>(h.size()) != model.rep_dim()) {
    fail(ErrorKind::kConfig, "decode: expected representation of dimension " + std::to_string(model.rep_dim()));
  }
  return *model.decoder_weights * h + *model.decoder_bias;
}

}  // namespace rdp
