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
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "rdp/error.hpp"

namespace rdp {

// Evaluation metrics. Binary metrics treat label 1 as the positive
// (anomalous) class and any other value as negative.

struct BinaryEval {
  std::vector<double> scores;
  std::vector<int> labels;
};

struct PartitionPair {
  std::vector<int> labels_a;
  std::vector<int> labels_b;
};

namespace detail {

inline std::pair<std::size_t, std::size_t> count_classes(std::span<const double> scores,
                                                         std::span<const int> labels) {
  if (scores.size() != labels.size()) fail(ErrorKind::kConfig, "scores and labels differ in length");
  std::size_t pos = 0;
  for (int l : labels) pos += (l == 1);
  const std::size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0) fail(ErrorKind::kConfig, "binary metric needs both positive and negative labels");
  return {pos, neg};
}

}  // namespace detail

/// Mann-Whitney statistic: P(score of random positive > random negative),
/// ties counting one half. Uses average ranks, O(n log n).
inline double auc_roc(std::span<const double> scores, std::span<const int> labels) {
  const auto [pos, neg] = detail::count_classes(scores, labels);
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double pos_rank_sum = 0.0;
  for (std::size_t start = 0; start < n;) {
    std::size_t end = start;
    while (end < n && scores[order[end]] == scores[order[start]]) ++end;
    // ranks start+1 .. end share their average
    const double avg_rank = 0.5 * static_cast<double>(start + 1 + end);
    for (std::size_t k = start; k < end; ++k) {
      if (labels[order[k]] == 1) pos_rank_sum += avg_rank;
    }
    start = end;
  }
  const double p = static_cast<double>(pos);
  return (pos_rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

/// Average precision. Points are ranked by descending score; tied scores keep
/// their input order (stable), so a positive listed before a tied negative is
/// ranked ahead of it.
inline double auc_pr(std::span<const double> scores, std::span<const int> labels) {
  const auto [pos, neg] = detail::count_classes(scores, labels);
  (void)neg;
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double ap = 0.0;
  std::size_t hits = 0;
  for (std::size_t r = 0; r < order.size(); ++r) {
    if (labels[order[r]] == 1) {
      ++hits;
      ap += static_cast<double>(hits) / static_cast<double>(r + 1);
    }
  }
  return ap / static_cast<double>(pos);
}

inline double auc_roc(const BinaryEval& e) { return auc_roc(e.scores, e.labels); }
inline double auc_pr(const BinaryEval& e) { return auc_pr(e.scores, e.labels); }

enum class NmiNorm { kGeometric, kArithmetic };

/// Normalised mutual information (natural log). Two single-cluster
/// partitions score 1; a single-cluster partition against a non-trivial one
/// scores 0.
inline double nmi(std::span<const int> a, std::span<const int> b, NmiNorm norm = NmiNorm::kGeometric) {
  if (a.size() != b.size()) fail(ErrorKind::kConfig, "nmi: partitions differ in length");
  require(!a.empty(), "nmi: empty partitions");
  const double n = static_cast<double>(a.size());
  std::map<int, double> ca, cb;
  std::map<std::pair<int, int>, double> joint;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ca[a[i]] += 1.0;
    cb[b[i]] += 1.0;
    joint[{a[i], b[i]}] += 1.0;
  }
  auto entropy = [n](const std::map<int, double>& counts) {
    double h = 0.0;
    for (const auto& [label, c] : counts) h -= (c / n) * std::log(c / n);
    return h;
  };
  const double ha = entropy(ca);
  const double hb = entropy(cb);
  if (ca.size() == 1 && cb.size() == 1) return 1.0;
  double mi = 0.0;
  for (const auto& [key, c] : joint) {
    mi += (c / n) * std::log(n * c / (ca[key.first] * cb[key.second]));
  }
  const double denom = norm == NmiNorm::kGeometric ? std::sqrt(ha * hb) : 0.5 * (ha + hb);
  if (denom <= 0.0) return 0.0;
  return std::clamp(mi / denom, 0.0, 1.0);
}

inline double nmi(const PartitionPair& p, NmiNorm norm = NmiNorm::kGeometric) {
  return nmi(p.labels_a, p.labels_b, norm);
}

/// Pairwise F1 over co-clustered point pairs, `truth` vs `predicted`.
/// Returns 1 when neither partition has a co-clustered pair, 0 when only one
/// of them does.
inline double pairwise_f(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) fail(ErrorKind::kConfig, "pairwise_f: partitions differ in length");
  require(truth.size() >= 2, "pairwise_f: need at least two points");
  std::map<int, std::uint64_t> ct, cp;
  std::map<std::pair<int, int>, std::uint64_t> joint;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++ct[truth[i]];
    ++cp[predicted[i]];
    ++joint[{truth[i], predicted[i]}];
  }
  auto pairs = [](std::uint64_t c) { return c * (c - 1) / 2; };
  std::uint64_t true_pairs = 0, pred_pairs = 0, both = 0;
  for (const auto& [k, c] : ct) true_pairs += pairs(c);
  for (const auto& [k, c] : cp) pred_pairs += pairs(c);
  for (const auto& [k, c] : joint) both += pairs(c);
  if (true_pairs == 0 && pred_pairs == 0) return 1.0;
  if (true_pairs == 0 || pred_pairs == 0 || both == 0) return 0.0;
  const double precision = static_cast<double>(both) / static_cast<double>(pred_pairs);
  const double recall = static_cast<double>(both) / static_cast<double>(true_pairs);
  return 2.0 * precision * recall / (precision + recall);
}

inline double pairwise_f(const PartitionPair& p) { return pairwise_f(p.labels_a, p.labels_b); }

}  // namespace rdp
