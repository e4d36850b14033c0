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

#include <chrono>
#include <cmath>
#include <cstdint>
#include <memory>
#include <set>
#include <vector>

#include "rdp/anomaly.hpp"
#include "rdp/kmeans.hpp"

namespace rdp {

/// Row i of the result is forward(model, x_i).
inline Matrix embed(const RdpModel& model, const Matrix& x) {
  if (cols(x) != model.in_dim()) {
    fail(ErrorKind::kConfig, "embed: expected " + std::to_string(model.in_dim()) + " columns, got " +
                                 std::to_string(x.cols()));
  }
  Matrix out(x.rows(), static_cast<Eigen::Index>(model.rep_dim()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) out.row(i) = forward(model, x.row(i).transpose()).transpose();
  return out;
}

inline void normalize_rows(Matrix& x) {
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double n = x.row(i).norm();
    if (n > 0.0) x.row(i) /= n;
  }
}

struct ClusterRunConfig {
  TrainConfig base = TrainConfig::clustering_defaults();
  MapSpec map{Source::kRff, 1024, std::nullopt, std::nullopt};
  std::size_t restarts = 30;
  std::size_t max_iters = 300;
  bool normalize_embeddings = false;
  std::uint64_t seed = 42;
  std::size_t workers = 1;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population convention; 0 for a single value
};

inline MeanStd mean_std(const std::vector<double>& v) {
  MeanStd r;
  if (v.empty()) return r;
  for (double x : v) r.mean += x;
  r.mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - r.mean) * (x - r.mean);
  r.std = std::sqrt(ss / static_cast<double>(v.size()));
  return r;
}

struct ClusterResult {
  MeanStd nmi;
  MeanStd f_score;
  std::vector<double> nmi_per_restart;
  std::vector<double> f_per_restart;
  std::vector<int> best_assignments;  // restart with the lowest inertia
  std::size_t k = 0;
  RdpModel model;
  LossTrace trace;
  TrainConfig effective;
  MapSpec effective_map;
  double train_seconds = 0.0;
  double cluster_seconds = 0.0;
};

inline std::size_t distinct_count(const std::vector<int>& labels) {
  return std::set<int>(labels.begin(), labels.end()).size();
}

inline std::uint64_t restart_seed(std::uint64_t seed, std::size_t r) { return derive_seed(seed, 0x20000 + r); }

inline ClusterResult run_clustering(const Dataset& data, const ClusterRunConfig& config, Ablation ablation,
                                    Source source) {
  using clock = std::chrono::steady_clock;
  if (!data.labels) fail(ErrorKind::kConfig, "clustering evaluation needs labels");
  require(config.restarts >= 1, "restarts must be >= 1");
  if (ablation == Ablation::kNoBoosting) fail(ErrorKind::kConfig, "no_boosting does not apply to clustering");

  ClusterResult res;
  res.effective = config.base;
  res.effective.task = Task::kClustering;
  if (ablation == Ablation::kNoRdpLoss) res.effective.use_rdp_loss = false;
  if (ablation == Ablation::kNoAuxLoss) res.effective.use_aux_loss = false;
  res.effective.seed = derive_seed(config.seed, 2);
  res.effective_map = config.map;
  res.effective_map.source = source;
  res.k = distinct_count(*data.labels);

  const auto t0 = clock::now();
  auto map = std::make_shared<const RandomMap>(make_map(res.effective_map, data.features, derive_seed(config.seed, 1)));
  auto trained = train(data.features, res.effective, std::move(map));
  res.model = std::move(trained.model);
  res.trace = std::move(trained.trace);
  const auto t1 = clock::now();

  Matrix emb = embed(res.model, data.features);
  if (config.normalize_embeddings) normalize_rows(emb);
  std::vector<KMeansResult> runs(config.restarts);
  parallel_for(config.restarts, config.workers, [&](std::size_t r) {
    runs[r] = kmeans(emb, res.k, config.max_iters, restart_seed(config.seed, r));
  });
  std::size_t best = 0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    res.nmi_per_restart.push_back(nmi(*data.labels, runs[r].assignments));
    res.f_per_restart.push_back(pairwise_f(*data.labels, runs[r].assignments));
    if (runs[r].inertia < runs[best].inertia) best = r;
  }
  res.best_assignments = runs[best].assignments;
  res.nmi = mean_std(res.nmi_per_restart);
  res.f_score = mean_std(res.f_per_restart);
  res.cluster_seconds = std::chrono::duration<double>(clock::now() - t1).count();
  res.train_seconds = std::chrono::duration<double>(t1 - t0).count();
  return res;
}

}  // namespace rdp
