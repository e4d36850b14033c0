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

#include <filesystem>
#include <fstream>

#include "rdp/dataset.hpp"
#include "rdp/rng.hpp"
#include "rdp/synth.hpp"

namespace rdp {
namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& contents) {
  auto p = std::filesystem::temp_directory_path() / ("rdp_core_" + name);
  std::ofstream(p) << contents;
  return p;
}

TEST(Rng, SameSeedSameSequence) {
  RngStream a(17), b(17);
  for (int i = 0; i < 100; ++i) {
    ASSERT_EQ(a.normal(), b.normal());
    ASSERT_EQ(a.uniform(), b.uniform());
    ASSERT_EQ(a.index(13), b.index(13));
  }
}

TEST(Rng, DerivedSeedsDiffer) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(5, i));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_NE(derive_seed(5, 0), derive_seed(6, 0));
}

TEST(Rng, SampleWithoutReplacementIsDistinct) {
  RngStream rng(3);
  auto s = rng.sample_without_replacement(50, 20);
  std::set<std::size_t> u(s.begin(), s.end());
  EXPECT_EQ(u.size(), 20u);
  EXPECT_LT(*u.rbegin(), 50u);
}

TEST(Csv, LabelByName) {
  auto p = write_temp("a.csv", "a,b,y\n1,2,0\n3,4,1");
  auto ds = load_csv(p, LabelSelector(std::string("y")), true);
  EXPECT_EQ(ds.n(), 2u);
  EXPECT_EQ(ds.d(), 2u);
  ASSERT_TRUE(ds.labels);
  EXPECT_EQ(*ds.labels, (std::vector<int>{0, 1}));
  EXPECT_EQ(ds.features(1, 1), 4.0);
  EXPECT_EQ(ds.feature_names, (std::vector<std::string>{"a", "b"}));
}

TEST(Csv, NoLabelKeepsAllColumns) {
  auto p = write_temp("b.csv", "a,b,y\n1,2,0\n3,4,1");
  auto ds = load_csv(p, std::nullopt, true);
  EXPECT_EQ(ds.n(), 2u);
  EXPECT_EQ(ds.d(), 3u);
  EXPECT_FALSE(ds.labels);
}

TEST(Csv, LabelByIndexWithoutHeader) {
  auto p = write_temp("c.csv", "1,2,0\n3,4,1\n");
  auto ds = load_csv(p, LabelSelector(std::size_t{0}), false);
  EXPECT_EQ(ds.d(), 2u);
  EXPECT_EQ(*ds.labels, (std::vector<int>{1, 3}));
}

TEST(Csv, NonNumericCellNamesRow) {
  auto p = write_temp("d.csv", "a,b\n1,2\nx,4\n");
  try {
    load_csv(p, std::nullopt, true);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kFormat);
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos) << e.what();
  }
}

TEST(Csv, RaggedRowsRejected) {
  auto p = write_temp("e.csv", "a,b\n1,2\n3\n");
  EXPECT_THROW(load_csv(p, std::nullopt, true), Error);
}

TEST(Csv, MissingFileIsIoError) {
  try {
    load_csv("/nonexistent/rdp.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
  }
}

TEST(Csv, RoundTripIsExact) {
  auto ds = synth_blobs(3, 5, 4, 1.3, 11);
  auto p = std::filesystem::temp_directory_path() / "rdp_core_roundtrip.csv";
  write_csv(p, ds);
  auto back = load_csv(p, LabelSelector(std::string("label")), true);
  EXPECT_EQ(back.n(), ds.n());
  EXPECT_LE((back.features - ds.features).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(*back.labels, *ds.labels);
}

TEST(Standardize, TwoPointColumn) {
  Dataset ds;
  ds.features.resize(2, 1);
  ds.features << 1.0, 3.0;
  auto [z, p] = standardize(ds);
  EXPECT_DOUBLE_EQ(z.features(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(z.features(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(p.means(0), 2.0);
  EXPECT_DOUBLE_EQ(p.stds(0), 1.0);
}

TEST(Standardize, ConstantColumnBecomesZeros) {
  Dataset ds;
  ds.features.resize(3, 2);
  ds.features << 5, 0.1, 5, 0.1, 5, 0.1;
  auto [z, p] = standardize(ds);
  EXPECT_TRUE((z.features.array() == 0.0).all());
  EXPECT_EQ(p.stds(0), 1.0);
}

TEST(Standardize, MomentsAndIdempotence) {
  auto ds = synth_anomaly(200, 10, 6, 4);
  auto [z, p] = standardize(ds);
  for (Eigen::Index c = 0; c < z.features.cols(); ++c) {
    const auto col = z.features.col(c);
    const double mean = col.mean();
    EXPECT_NEAR(mean, 0.0, 1e-9);
    EXPECT_NEAR(std::sqrt((col.array() - mean).square().mean()), 1.0, 1e-9);
  }
  auto [z2, p2] = standardize(z);
  EXPECT_LE((z2.features - z.features).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LE((unstandardize(z.features, p) - ds.features).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(SynthBlobs, ShapeAndLabels) {
  auto ds = synth_blobs(2, 3, 2, 1.0, 1);
  EXPECT_EQ(ds.n(), 6u);
  EXPECT_EQ(*ds.labels, (std::vector<int>{0, 0, 0, 1, 1, 1}));
  auto one = synth_blobs(1, 4, 3, 1.0, 2);
  for (int l : *one.labels) EXPECT_EQ(l, 0);
}

TEST(SynthBlobs, Deterministic) {
  auto a = synth_blobs(4, 10, 5, 0.5, 99);
  auto b = synth_blobs(4, 10, 5, 0.5, 99);
  EXPECT_TRUE(a.features == b.features);
}

TEST(SynthBlobs, ClusterMeansAreSeparated) {
  const double spread = 0.7;
  auto ds = synth_blobs(5, 400, 3, spread, 8);
  std::vector<Eigen::RowVectorXd> means;
  for (int c = 0; c < 5; ++c) means.push_back(ds.features.middleRows(c * 400, 400).colwise().mean());
  for (int a = 0; a < 5; ++a) {
    for (int b = a + 1; b < 5; ++b) EXPECT_GE((means[a] - means[b]).norm(), 10 * spread - 0.5);
  }
}

TEST(SynthAnomaly, RateAndSeparation) {
  auto ds = synth_anomaly(950, 50, 16, 21);
  EXPECT_EQ(ds.n(), 1000u);
  int anomalies = 0;
  double max_normal = 0.0, min_anomaly = 1e300;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const double norm = ds.features.row(static_cast<Eigen::Index>(i)).norm();
    if ((*ds.labels)[i] == 1) {
      ++anomalies;
      min_anomaly = std::min(min_anomaly, norm);
    } else {
      max_normal = std::max(max_normal, norm);
    }
  }
  EXPECT_EQ(anomalies, 50);
  EXPECT_GT(min_anomaly, max_normal);
  auto again = synth_anomaly(950, 50, 16, 21);
  EXPECT_TRUE(again.features == ds.features);
}

TEST(SynthAnomaly, RejectsTooManyAnomalies) {
  EXPECT_THROW(synth_anomaly(10, 10, 2, 1), Error);
}

}  // namespace
}  // namespace rdp
