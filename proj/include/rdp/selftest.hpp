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

// Quick invariant checks shipped with the tool (`rdp selftest`). Each check
// is small enough to finish in well under a second.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "rdp/clustering.hpp"
#include "rdp/model_io.hpp"
#include "rdp/synth.hpp"

namespace rdp {

struct SelftestResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace selftest {

// Largest relative deviation between analytic and central-difference
// gradients over all encoder/decoder parameters.
inline double gradient_check(const TrainConfig& cfg, std::uint64_t seed) {
  RngStream rng(seed);
  Matrix x(8, 5);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  auto map = std::make_shared<const RandomMap>(new_rff(5, 4, 2.0, seed + 1));
  RdpModel model = init_model(5, 4, cfg, map, seed + 2);
  for (auto& b : model.bias) b = rng.normal(0.0, 0.1);
  std::vector<std::pair<std::size_t, std::size_t>> idx;
  for (std::size_t i = 0; i < 8; ++i) idx.emplace_back(i, (i + 3) % 8);
  const PairBatch batch = make_pair_batch(*map, x, idx);
  const Gradients g = grad_batch(model, x, batch, cfg);

  const double h = 1e-5;
  double num2 = 0.0, diff2 = 0.0, ana2 = 0.0;
  auto probe = [&](double& param, double analytic) {
    const double saved = param;
    param = saved + h;
    const double up = batch_objective(model, x, batch, cfg);
    param = saved - h;
    const double down = batch_objective(model, x, batch, cfg);
    param = saved;
    const double numeric = (up - down) / (2.0 * h);
    num2 += numeric * numeric;
    ana2 += analytic * analytic;
    diff2 += (numeric - analytic) * (numeric - analytic);
  };
  for (Eigen::Index i = 0; i < model.weights.size(); ++i) probe(model.weights.data()[i], g.weights.data()[i]);
  for (Eigen::Index i = 0; i < model.bias.size(); ++i) probe(model.bias[i], g.bias[i]);
  if (model.decoder_weights) {
    for (Eigen::Index i = 0; i < model.decoder_weights->size(); ++i) {
      probe(model.decoder_weights->data()[i], g.decoder_weights.data()[i]);
    }
    for (Eigen::Index i = 0; i < model.decoder_bias->size(); ++i) probe((*model.decoder_bias)[i], g.decoder_bias[i]);
  }
  return std::sqrt(diff2) / std::max({std::sqrt(num2), std::sqrt(ana2), 1e-12});
}

}  // namespace selftest

inline std::vector<SelftestResult> run_selftest() {
  std::vector<SelftestResult> out;
  auto check = [&out](const std::string& name, const std::function<std::pair<bool, std::string>()>& fn) {
    try {
      auto [ok, detail] = fn();
      out.push_back({name, ok, detail});
    } catch (const std::exception& e) {
      out.push_back({name, false, e.what()});
    }
  };

  check("gradients match finite differences", [] {
    double worst = 0.0;
    for (int variant = 0; variant < 3; ++variant) {
      TrainConfig cfg;
      cfg.m = 4;
      cfg.use_aux_loss = variant != 0;
      cfg.task = variant == 2 ? Task::kClustering : Task::kAnomaly;
      for (std::uint64_t s = 0; s < 5; ++s) worst = std::max(worst, selftest::gradient_check(cfg, 100 + s));
    }
    return std::pair{worst <= 1e-4, "max relative error " + format_double(worst)};
  });

  check("random Fourier features approximate the RBF kernel", [] {
    RngStream rng(7);
    Matrix x(40, 6);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
    const RandomMap map = new_rff(x, 4096, std::nullopt, 11);
    double err = 0.0;
    for (std::size_t p = 0; p < 20; ++p) {
      const Vector a = row_of(x, 2 * p), b = row_of(x, 2 * p + 1);
      err += std::abs(map.project(a).dot(map.project(b)) - rbf_kernel(a, b, map.bandwidth));
    }
    err /= 20.0;
    return std::pair{err <= 0.05, "mean abs error " + format_double(err)};
  });

  check("AUC metrics on a hand-checked ranking", [] {
    const std::vector<double> s{0.9, 0.8, 0.3, 0.2};
    const std::vector<int> l{1, 0, 1, 0};
    const double roc = auc_roc(s, l), pr = auc_pr(s, l);
    std::vector<double> scaled = s;
    for (auto& v : scaled) v *= 7.3;
    const bool ok = std::abs(roc - 0.75) < 1e-12 && std::abs(pr - 5.0 / 6.0) < 1e-12 &&
                    auc_roc(scaled, l) == roc && auc_pr(scaled, l) == pr;
    return std::pair{ok, "auc_roc " + format_double(roc) + ", auc_pr " + format_double(pr)};
  });

  check("k-means inertia never increases", [] {
    const Dataset blobs = synth_blobs(3, 30, 4, 1.0, 5);
    const auto res = kmeans(blobs.features, 3, 100, 9);
    bool ok = true;
    for (std::size_t i = 1; i < res.inertia_history.size(); ++i) {
      ok = ok && res.inertia_history[i] <= res.inertia_history[i - 1] + 1e-9;
    }
    return std::pair{ok, std::to_string(res.iterations_run) + " iterations"};
  });

  check("model files round-trip bit-exactly", [] {
    const Dataset data = synth_anomaly(60, 3, 5, 3);
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.m = 8;
    cfg.batch_size = 16;
    auto map = std::make_shared<const RandomMap>(new_rff(data.features, 8, std::nullopt, 4));
    const RdpModel model = train(data.features, cfg, map).model;
    const RdpModel loaded = deserialize_model(serialize_model(model));
    bool ok = true;
    for (std::size_t i = 0; i < data.n(); ++i) {
      const Vector x = row_of(data.features, i);
      ok = ok && forward(model, x) == forward(loaded, x) && anomaly_score(model, x) == anomaly_score(loaded, x);
    }
    return std::pair{ok, std::string(ok ? "identical outputs" : "outputs differ")};
  });

  check("standardize inverts", [] {
    const Dataset data = synth_blobs(2, 10, 3, 2.0, 1);
    auto [z, p] = standardize(data);
    const double err = (unstandardize(z.features, p) - data.features).cwiseAbs().maxCoeff();
    return std::pair{err <= 1e-9, "max abs error " + format_double(err)};
  });

  return out;
}

}  // namespace rdp
