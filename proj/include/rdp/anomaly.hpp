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
#include <chrono>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "rdp/dataset.hpp"
#include "rdp/metrics.hpp"
#include "rdp/parallel.hpp"
#include "rdp/training.hpp"

namespace rdp {

enum class Ablation { kNone, kNoRdpLoss, kNoAuxLoss, kNoBoosting };

inline const char* to_string(Ablation a) {
  switch (a) {
    case Ablation::kNone: return "none";
    case Ablation::kNoRdpLoss: return "no_rdp_loss";
    case Ablation::kNoAuxLoss: return "no_aux_loss";
    case Ablation::kNoBoosting: return "no_boosting";
  }
  return "unknown";
}

inline Ablation parse_ablation(const std::string& s) {
  if (s == "none") return Ablation::kNone;
  if (s == "no_rdp_loss") return Ablation::kNoRdpLoss;
  if (s == "no_aux_loss") return Ablation::kNoAuxLoss;
  if (s == "no_boosting") return Ablation::kNoBoosting;
  fail(ErrorKind::kConfig, "unknown ablation '" + s + "' (expected none, no_rdp_loss, no_aux_loss or no_boosting)");
}

struct BoostConfig {
  std::size_t members = 30;
  double filter_fraction = 0.05;
  std::size_t filter_rounds = 1;
  TrainConfig base = TrainConfig::anomaly_defaults();
  MapSpec map;
  std::size_t workers = 1;

  void validate() const {
    require(members >= 1, "members must be >= 1");
    require(filter_fraction >= 0.0 && filter_fraction < 0.5, "filter fraction must lie in [0, 0.5)");
    require(base.task == Task::kAnomaly, "boosting config needs task=anomaly");
    base.validate();
  }
};

/// Novelty value of x under the model; larger means more anomalous.
inline double anomaly_score(const RdpModel& model, const Vector& x) { return l_aux_ad(model, x); }

inline std::vector<double> anomaly_scores(const RdpModel& model, const Matrix& x) {
  require_novelty_dims(model);
  std::vector<double> out(rows(x));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = anomaly_score(model, row_of(x, i));
  return out;
}

inline std::uint64_t member_map_seed(std::uint64_t member_seed) { return derive_seed(member_seed, 0x6d6170); }

/// Seed of the training run after `round` filtering rounds (round 0 = full data).
inline std::uint64_t member_round_seed(std::uint64_t member_seed, std::size_t round) {
  return derive_seed(member_seed, round + 1);
}

/// Number of points a filtering round removes from `size` rows.
inline std::size_t filter_removal_count(double fraction, std::size_t size) {
  if (fraction <= 0.0) return 0;
  return static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(size) - 1e-9));
}

struct MemberResult {
  RdpModel model;
  LossTrace trace;                          // of the final training run
  std::vector<std::size_t> training_sizes;  // one entry per training run
  std::uint64_t seed = 0;
};

namespace detail {
inline Matrix select_rows(const Matrix& x, const std::vector<std::size_t>& idx) {
  Matrix out(static_cast<Eigen::Index>(idx.size()), x.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(idx[r]));
  return out;
}
}  // namespace detail

/// Trains on all rows, then for each filtering round drops the top-scoring
/// fraction of the current training set and retrains from a fresh
/// initialization. The member's map is built once, on the full data.
inline MemberResult boost_train_member(const Matrix& data, const BoostConfig& config, std::uint64_t member_seed) {
  config.validate();
  auto map = std::make_shared<const RandomMap>(make_map(config.map, data, member_map_seed(member_seed)));
  TrainConfig tc = config.base;
  tc.seed = member_round_seed(member_seed, 0);

  MemberResult res;
  res.seed = member_seed;
  std::vector<std::size_t> subset(rows(data));
  std::iota(subset.begin(), subset.end(), std::size_t{0});
  auto trained = train(data, tc, map);
  res.training_sizes.push_back(subset.size());

  const std::size_t rounds = config.filter_fraction > 0.0 ? config.filter_rounds : 0;
  for (std::size_t round = 1; round <= rounds; ++round) {
    const std::size_t remove = filter_removal_count(config.filter_fraction, subset.size());
    if (subset.size() - remove < 2 * tc.batch_size) {
      fail(ErrorKind::kConfig, "filter round " + std::to_string(round) + " would leave " +
                                   std::to_string(subset.size() - remove) + " rows, fewer than 2 * batch size");
    }
    std::vector<double> scores(subset.size());
    for (std::size_t r = 0; r < subset.size(); ++r) scores[r] = anomaly_score(trained.model, row_of(data, subset[r]));
    std::vector<std::size_t> order(subset.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    std::vector<bool> drop(subset.size(), false);
    for (std::size_t r = 0; r < remove; ++r) drop[order[r]] = true;
    std::vector<std::size_t> kept;
    kept.reserve(subset.size() - remove);
    for (std::size_t r = 0; r < subset.size(); ++r) {
      if (!drop[r]) kept.push_back(subset[r]);
    }
    subset.swap(kept);
    tc.seed = member_round_seed(member_seed, round);
    trained = train(detail::select_rows(data, subset), tc, map);
    res.training_sizes.push_back(subset.size());
  }
  res.model = std::move(trained.model);
  res.trace = std::move(trained.trace);
  return res;
}

struct Ensemble {
  std::vector<MemberResult> members;
};

inline std::uint64_t member_seed(std::uint64_t ensemble_seed, std::size_t index) {
  return derive_seed(ensemble_seed, 0x10000 + index);
}

inline Ensemble fit_ensemble(const Matrix& data, const BoostConfig& config, std::uint64_t seed) {
  config.validate();
  Ensemble ens;
  ens.members.resize(config.members);
  parallel_for(config.members, config.workers, [&](std::size_t i) {
    ens.members[i] = boost_train_member(data, config, member_seed(seed, i));
  });
  return ens;
}

/// Per-point arithmetic mean of member scores.
inline std::vector<double> ensemble_score(const Ensemble& ensemble, const Matrix& x, std::size_t workers = 1) {
  require(!ensemble.members.empty(), "ensemble_score: empty ensemble");
  std::vector<std::vector<double>> per_member(ensemble.members.size());
  parallel_for(per_member.size(), workers, [&](std::size_t m) {
    per_member[m] = anomaly_scores(ensemble.members[m].model, x);
  });
  std::vector<double> mean(rows(x), 0.0);
  for (const auto& s : per_member) {
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += s[i];
  }
  const double count = static_cast<double>(per_member.size());
  for (auto& v : mean) v /= count;
  return mean;
}

struct AnomalyRunConfig {
  BoostConfig boost;
  std::uint64_t seed = 42;
};

struct AnomalyResult {
  std::vector<double> scores;
  std::optional<double> auc_roc;
  std::optional<double> auc_pr;
  Ensemble ensemble;
  BoostConfig effective;  // config after ablation/source overrides
  double train_seconds = 0.0;
  double score_seconds = 0.0;
};

/// Applies ablation and supervisory-source overrides to a boosting config.
/// Scoring always uses the novelty value, so the representation dimension is
/// tied to the map's output dimension.
inline BoostConfig configure_anomaly(BoostConfig cfg, Ablation ablation, Source source, std::size_t d) {
  if (ablation == Ablation::kNoRdpLoss) cfg.base.use_rdp_loss = false;
  if (ablation == Ablation::kNoAuxLoss) cfg.base.use_aux_loss = false;
  if (ablation == Ablation::kNoBoosting) cfg.filter_rounds = 0;
  if (!cfg.base.use_rdp_loss && !cfg.base.use_aux_loss) {
    fail(ErrorKind::kConfig, "no_rdp_loss combined with no_aux_loss leaves no training signal");
  }
  cfg.map.source = source;
  cfg.base.task = Task::kAnomaly;
  cfg.base.m = output_dim(cfg.map, d);
  return cfg;
}

inline AnomalyResult run_anomaly(const Dataset& data, const AnomalyRunConfig& config, Ablation ablation,
                                 Source source) {
  using clock = std::chrono::steady_clock;
  AnomalyResult res;
  res.effective = configure_anomaly(config.boost, ablation, source, data.d());
  const auto t0 = clock::now();
  res.ensemble = fit_ensemble(data.features, res.effective, config.seed);
  const auto t1 = clock::now();
  res.scores = ensemble_score(res.ensemble, data.features, res.effective.workers);
  const auto t2 = clock::now();
  res.train_seconds = std::chrono::duration<double>(t1 - t0).count();
  res.score_seconds = std::chrono::duration<double>(t2 - t1).count();
  if (data.labels) {
    res.auc_roc = auc_roc(res.scores, *data.labels);
    res.auc_pr = auc_pr(res.scores, *data.labels);
  }
  return res;
}

}  // namespace rdp
