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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "rdp/metrics.hpp"
#include "rdp/rng.hpp"

namespace rdp {
namespace {

std::vector<double> S(std::initializer_list<double> v) { return v; }
std::vector<int> L(std::initializer_list<int> v) { return v; }

TEST(AucRoc, Examples) {
  EXPECT_DOUBLE_EQ(auc_roc(S({0.1, 0.4, 0.35, 0.8}), L({0, 0, 1, 1})), 0.75);
  EXPECT_EQ(auc_roc(S({1, 2, 3, 4}), L({0, 0, 1, 1})), 1.0);
  EXPECT_EQ(auc_roc(S({4, 3, 2, 1}), L({0, 0, 1, 1})), 0.0);
  EXPECT_EQ(auc_roc(S({1, 1, 1, 1}), L({0, 1, 0, 1})), 0.5);
}

TEST(AucRoc, NeedsBothClasses) {
  EXPECT_THROW(auc_roc(S({1, 2}), L({1, 1})), Error);
  EXPECT_THROW(auc_roc(S({1, 2}), L({0, 0})), Error);
  EXPECT_THROW(auc_roc(S({1, 2}), L({0})), Error);
  EXPECT_THROW(auc_pr(S({1, 2}), L({0, 0})), Error);
}

TEST(AucPr, Examples) {
  EXPECT_NEAR(auc_pr(S({0.1, 0.4, 0.35, 0.8}), L({0, 0, 1, 1})), 5.0 / 6.0, 1e-12);
  EXPECT_EQ(auc_pr(S({1, 2, 3, 4}), L({0, 0, 1, 1})), 1.0);
}

TEST(AucPr, RandomScoresApproachPrevalence) {
  RngStream rng(3);
  const std::size_t n = 10000;
  for (double p : {0.05, 0.2, 0.5}) {
    std::vector<double> s(n);
    std::vector<int> l(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = rng.uniform();
      l[i] = rng.uniform() < p ? 1 : 0;
    }
    EXPECT_NEAR(auc_pr(s, l), p, 0.03) << p;
    EXPECT_NEAR(auc_roc(s, l), 0.5, 0.03) << p;
  }
}

TEST(Nmi, Examples) {
  EXPECT_NEAR(nmi(L({0, 0, 1, 1}), L({0, 1, 0, 1})), 0.0, 1e-12);
  EXPECT_NEAR(nmi(L({0, 0, 1, 1}), L({1, 1, 0, 0})), 1.0, 1e-12);
  EXPECT_EQ(nmi(L({0, 0, 0}), L({5, 5, 5})), 1.0);
  EXPECT_EQ(nmi(L({0, 0, 0}), L({0, 1, 2})), 0.0);
  EXPECT_NEAR(nmi(L({0, 0, 1, 1}), L({1, 1, 0, 0}), NmiNorm::kArithmetic), 1.0, 1e-12);
  EXPECT_THROW(nmi(L({0, 1}), L({0})), Error);
}

TEST(PairwiseF, Examples) {
  EXPECT_NEAR(pairwise_f(L({0, 0, 1, 1}), L({0, 0, 0, 1})), 0.4, 1e-12);
  EXPECT_EQ(pairwise_f(L({0, 0, 1}), L({3, 3, 4})), 1.0);
  EXPECT_EQ(pairwise_f(L({0, 1, 2}), L({0, 1, 2})), 1.0);
  EXPECT_EQ(pairwise_f(L({0, 1, 2}), L({0, 0, 2})), 0.0);
}

class RandomInstances : public ::testing::Test {
 protected:
  RngStream rng{2024};
  std::vector<double> scores(std::size_t n, bool ties) {
    std::vector<double> s(n);
    for (auto& v : s) v = ties ? static_cast<double>(rng.index(3)) : rng.normal();
    return s;
  }
  std::vector<int> binary(std::size_t n) {
    std::vector<int> l(n);
    do {
      for (auto& v : l) v = static_cast<int>(rng.index(2));
    } while (std::count(l.begin(), l.end(), 1) == 0 || std::count(l.begin(), l.end(), 0) == 0);
    return l;
  }
  std::vector<int> partition(std::size_t n) {
    std::vector<int> l(n);
    const auto k = 1 + rng.index(4);
    for (auto& v : l) v = static_cast<int>(rng.index(k));
    return l;
  }
};

TEST_F(RandomInstances, AgreeWithBruteForce) {
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 2 + rng.index(7);
    const bool ties = t % 2 == 0;
    const auto s = scores(n, ties);
    const auto l = binary(n);
    ASSERT_NEAR(auc_roc(s, l), oracle::auc_roc(s, l), 1e-12);
    ASSERT_NEAR(auc_pr(s, l), oracle::auc_pr(s, l), 1e-12);
    if (!ties) ASSERT_NEAR(auc_roc(s, l), oracle::auc_roc_trapezoid(s, l), 1e-12);
    const auto a = partition(n), b = partition(n);
    ASSERT_NEAR(nmi(a, b), oracle::nmi(a, b), 1e-12);
    ASSERT_NEAR(pairwise_f(a, b), oracle::pairwise_f(a, b), 1e-12);
  }
}

TEST_F(RandomInstances, Ranges) {
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 2 + rng.index(30);
    const auto s = scores(n, t % 3 == 0);
    const auto l = binary(n);
    const double roc = auc_roc(s, l), pr = auc_pr(s, l);
    EXPECT_GE(roc, 0.0);
    EXPECT_LE(roc, 1.0);
    EXPECT_GT(pr, 0.0);
    EXPECT_LE(pr, 1.0);
    const auto a = partition(n), b = partition(n);
    EXPECT_GE(nmi(a, b), -1e-12);
    EXPECT_LE(nmi(a, b), 1.0 + 1e-12);
    EXPECT_GE(pairwise_f(a, b), 0.0);
    EXPECT_LE(pairwise_f(a, b), 1.0);
  }
}

TEST_F(RandomInstances, AucInvariantUnderMonotoneTransform) {
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + rng.index(40);
    const auto s = scores(n, t % 2 == 0);
    const auto l = binary(n);
    std::vector<double> scaled(s), shifted(s), cubed(s);
    for (std::size_t i = 0; i < n; ++i) {
      scaled[i] = 7.3 * s[i];
      shifted[i] = s[i] - 11.0;
      cubed[i] = s[i] * s[i] * s[i];
    }
    for (const auto* v : {&scaled, &shifted, &cubed}) {
      EXPECT_NEAR(auc_roc(*v, l), auc_roc(s, l), 1e-12);
      EXPECT_NEAR(auc_pr(*v, l), auc_pr(s, l), 1e-12);
    }
  }
}

TEST_F(RandomInstances, AucFlipsUnderNegationWithoutTies) {
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + rng.index(40);
    auto s = scores(n, false);
    const auto l = binary(n);
    const double a = auc_roc(s, l);
    for (auto& v : s) v = -v;
    EXPECT_NEAR(auc_roc(s, l), 1.0 - a, 1e-12);
  }
}

TEST_F(RandomInstances, PartitionMetricsIgnoreRelabelingAndOrder) {
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + rng.index(40);
    const auto a = partition(n), b = partition(n);
    std::vector<int> renamed(b);
    for (auto& v : renamed) v = 100 - 3 * v;
    EXPECT_NEAR(nmi(a, renamed), nmi(a, b), 1e-12);
    EXPECT_NEAR(pairwise_f(a, renamed), pairwise_f(a, b), 1e-12);
    EXPECT_NEAR(nmi(a, b), nmi(b, a), 1e-12);
    EXPECT_NEAR(nmi(a, a), 1.0, 1e-12);

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    std::vector<int> pa(n), pb(n);
    for (std::size_t i = 0; i < n; ++i) {
      pa[i] = a[perm[i]];
      pb[i] = b[perm[i]];
    }
    EXPECT_NEAR(nmi(pa, pb), nmi(a, b), 1e-12);
    EXPECT_NEAR(pairwise_f(pa, pb), pairwise_f(a, b), 1e-12);
  }
}

TEST_F(RandomInstances, AucPermutationInvariantWithoutTies) {
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + rng.index(40);
    const auto s = scores(n, false);
    const auto l = binary(n);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    std::vector<double> ps(n);
    std::vector<int> pl(n);
    for (std::size_t i = 0; i < n; ++i) {
      ps[i] = s[perm[i]];
      pl[i] = l[perm[i]];
    }
    EXPECT_NEAR(auc_roc(ps, pl), auc_roc(s, l), 1e-12);
    EXPECT_NEAR(auc_pr(ps, pl), auc_pr(s, l), 1e-12);
  }
}

TEST(Overloads, StructsMatchSpans) {
  BinaryEval e{{0.1, 0.4, 0.35, 0.8}, {0, 0, 1, 1}};
  EXPECT_EQ(auc_roc(e), auc_roc(e.scores, e.labels));
  EXPECT_EQ(auc_pr(e), auc_pr(e.scores, e.labels));
  PartitionPair p{{0, 0, 1, 1}, {0, 0, 0, 1}};
  EXPECT_EQ(pairwise_f(p), pairwise_f(p.labels_a, p.labels_b));
  EXPECT_EQ(nmi(p), nmi(p.labels_a, p.labels_b));
}

}  // namespace
}  // namespace rdp
