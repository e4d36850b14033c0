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

#include "rdp/harness.hpp"
#include "rdp/selftest.hpp"
#include "rdp/synth.hpp"

namespace rdp {
namespace {

namespace fs = std::filesystem;

class HarnessTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / ("rdp_harness_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }

  fs::path dir;
};

std::string expect_config_error(const ConfigMap& raw) {
  try {
    resolve_config(raw);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
    return e.what();
  }
  ADD_FAILURE() << "expected a configuration error";
  return "";
}

TEST(Config, ParsesKeyValueLines) {
  const auto m = parse_config_text("# comment\ntask = anomaly\n\n  input=data.csv   # trailing\nlr = 0.05\n");
  EXPECT_EQ(m.size(), 3u);
  EXPECT_EQ(m.at("task"), "anomaly");
  EXPECT_EQ(m.at("input"), "data.csv");
  EXPECT_EQ(m.at("lr"), "0.05");
  try {
    parse_config_text("task anomaly\n", "x.conf");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("x.conf:1"), std::string::npos);
  }
  EXPECT_THROW(load_config_file("/nonexistent/rdp.conf"), Error);
}

TEST(Config, TaskDefaults) {
  const auto a = resolve_config({{"task", "anomaly"}, {"input", "x.csv"}});
  EXPECT_EQ(a.m, 50u);
  EXPECT_EQ(a.k, 50u);
  EXPECT_EQ(a.epochs, 200u);
  EXPECT_EQ(a.batch_size, 192u);
  EXPECT_EQ(a.lr, 0.1);
  EXPECT_EQ(a.members, 30u);
  EXPECT_EQ(a.filter_fraction, 0.05);
  EXPECT_EQ(a.source, Source::kRff);
  EXPECT_NE(std::find(a.defaulted.begin(), a.defaulted.end(), "epochs"), a.defaulted.end());
  EXPECT_EQ(std::find(a.defaulted.begin(), a.defaulted.end(), "input"), a.defaulted.end());

  const auto c = resolve_config({{"task", "cluster"}, {"input", "x.csv"}, {"label", "y"}});
  EXPECT_EQ(c.m, 1024u);
  EXPECT_EQ(c.k, 1024u);
  EXPECT_EQ(c.epochs, 1000u);
  EXPECT_EQ(c.restarts, 30u);
  EXPECT_EQ(c.label, "y");

  EXPECT_EQ(resolve_config({{"task", "eval"}, {"input", "x.csv"}}).label, "label");
}

TEST(Config, ReportsEveryProblemAtOnce) {
  const auto msg = expect_config_error({{"task", "cluster"},
                                        {"lr", "-1"},
                                        {"epochs", "abc"},
                                        {"source", "magic"},
                                        {"colour", "blue"}});
  for (const char* part : {"input is required", "lr must be > 0", "epochs", "unknown source", "colour",
                           "label"}) {
    EXPECT_NE(msg.find(part), std::string::npos) << part << " missing from:\n" << msg;
  }
}

TEST(Config, Conflicts) {
  EXPECT_NE(expect_config_error({{"task", "anomaly"}, {"input", "x"}, {"m", "10"}, {"k", "20"}}).find("m == k"),
            std::string::npos);
  EXPECT_NO_THROW(resolve_config({{"task", "anomaly"}, {"input", "x"}, {"m", "10"}, {"source", "identity"}}));
  EXPECT_NE(expect_config_error({{"task", "cluster"}, {"input", "x"}, {"label", "y"}, {"ablation", "no_boosting"}})
                .find("no_boosting"),
            std::string::npos);
  EXPECT_NE(expect_config_error({{"task", "project"}, {"input", "x"}}).find("output"), std::string::npos);
  EXPECT_NE(expect_config_error({{"task", "sing"}, {"input", "x"}}).find("task must be"), std::string::npos);
  EXPECT_NE(expect_config_error({{"task", "anomaly"}, {"input", "x"}, {"filter_fraction", "0.7"}}).find("filter_fraction"),
            std::string::npos);
}

TEST(Config, EchoRoundTripsThroughConfigText) {
  const auto c = resolve_config({{"task", "anomaly"}, {"input", "x.csv"}, {"seed", "7"}, {"lr", "0.2"}});
  const auto echo = c.echo();
  EXPECT_EQ(echo["seed"], 7);
  EXPECT_EQ(echo["lr"], 0.2);
  EXPECT_EQ(echo["bandwidth"], "median_heuristic");
  EXPECT_EQ(echo.size(), config_keys().size());
}

TEST_F(HarnessTest, AnomalyRunIsDeterministicApartFromTiming) {
  auto d = synth_anomaly(200, 10, 6, 3);
  write_csv(path("a.csv"), d);
  ConfigMap raw{{"task", "anomaly"}, {"input", path("a.csv")}, {"label", "label"}, {"members", "2"},
                {"epochs", "10"},    {"batch_size", "32"},     {"m", "8"},           {"k", "8"},
                {"report", path("report.json")}, {"scores_out", path("scores.csv")}, {"model_out", path("m.rdpe")}};
  const auto c = resolve_config(raw);
  const auto a = run(c);
  const auto b = run(c);
  EXPECT_EQ(deterministic_part(a), deterministic_part(b));
  EXPECT_TRUE(a.contains("timing"));
  EXPECT_FALSE(deterministic_part(a).contains("timing"));
  EXPECT_GT(a["metrics"]["auc_roc"].get<double>(), 0.5);
  EXPECT_EQ(a["seeds"]["members"].size(), 2u);
  EXPECT_EQ(a["effective"]["training_sizes"], nlohmann::json({210, 199}));

  std::ifstream rep(path("report.json"));
  EXPECT_EQ(deterministic_part(nlohmann::json::parse(rep)), deterministic_part(a));
  const auto scores = load_csv(path("scores.csv"), LabelSelector(std::string("label")));
  EXPECT_EQ(scores.n(), 210u);
  EXPECT_EQ(scores.feature_names, (std::vector<std::string>{"index", "score"}));
  EXPECT_EQ(load_ensemble(path("m.rdpe")).members.size(), 2u);

  ConfigMap ev{{"task", "eval"}, {"input", path("scores.csv")}};
  const auto e = run(resolve_config(ev));
  EXPECT_DOUBLE_EQ(e["metrics"]["auc_roc"].get<double>(), a["metrics"]["auc_roc"].get<double>());
  EXPECT_DOUBLE_EQ(e["metrics"]["auc_pr"].get<double>(), a["metrics"]["auc_pr"].get<double>());
}

TEST_F(HarnessTest, ClusterRunWritesAssignments) {
  auto d = synth_blobs(3, 20, 4, 1.0, 8);
  write_csv(path("b.csv"), d);
  ConfigMap raw{{"task", "cluster"}, {"input", path("b.csv")}, {"label", "label"}, {"restarts", "3"},
                {"epochs", "20"},    {"batch_size", "16"},     {"m", "8"},           {"k", "8"},
                {"assignments_out", path("assign.csv")}, {"model_out", path("m.rdpm")}};
  const auto c = resolve_config(raw);
  const auto a = run(c);
  EXPECT_EQ(deterministic_part(a), deterministic_part(run(c)));
  EXPECT_EQ(a["metrics"]["k"], 3);
  EXPECT_EQ(a["metrics"]["nmi_per_restart"].size(), 3u);
  EXPECT_TRUE(load_model(path("m.rdpm")).has_decoder());

  const auto e = run(resolve_config({{"task", "eval"}, {"input", path("assign.csv")}}));
  const auto assigned = load_csv(path("assign.csv"), LabelSelector(std::string("label")));
  std::vector<int> clusters(assigned.n());
  for (std::size_t i = 0; i < assigned.n(); ++i) clusters[i] = static_cast<int>(assigned.features(static_cast<Eigen::Index>(i), 1));
  EXPECT_DOUBLE_EQ(e["metrics"]["nmi"].get<double>(), nmi(*d.labels, clusters));
  EXPECT_DOUBLE_EQ(e["metrics"]["pairwise_f"].get<double>(), pairwise_f(*d.labels, clusters));
}

TEST_F(HarnessTest, IdentityProjectionReturnsStandardizedInput) {
  auto d = synth_blobs(2, 15, 3, 1.0, 4);
  write_csv(path("in.csv"), d);
  const auto rep = run(resolve_config({{"task", "project"}, {"input", path("in.csv")}, {"label", "label"},
                                       {"source", "identity"}, {"output", path("out.csv")}}));
  EXPECT_EQ(rep["effective"]["out_dim"], 3);
  const auto out = load_csv(path("out.csv"), LabelSelector(std::string("label")));
  const auto expected = standardize(load_csv(path("in.csv"), LabelSelector(std::string("label")))).first;
  EXPECT_TRUE(out.features == expected.features);
  EXPECT_EQ(out.labels, d.labels);
}

TEST_F(HarnessTest, RffProjectionShape) {
  auto d = synth_blobs(2, 15, 3, 1.0, 4);
  write_csv(path("in.csv"), d);
  run(resolve_config({{"task", "project"}, {"input", path("in.csv")}, {"label", "label"}, {"k", "7"},
                      {"output", path("out.csv")}}));
  const auto out = load_csv(path("out.csv"), LabelSelector(std::string("label")));
  EXPECT_EQ(out.d(), 7u);
  EXPECT_EQ(out.n(), 30u);
}

TEST_F(HarnessTest, EvalNeedsScoreColumn) {
  std::ofstream(path("e.csv")) << "a,label\n1,0\n2,1\n";
  try {
    run(resolve_config({{"task", "eval"}, {"input", path("e.csv")}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kFormat);
  }
}

TEST_F(HarnessTest, MissingInputIsIoError) {
  try {
    run(resolve_config({{"task", "anomaly"}, {"input", path("missing.csv")}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
  }
}

TEST(Selftest, AllChecksPass) {
  const auto results = run_selftest();
  EXPECT_GE(results.size(), 6u);
  for (const auto& r : results) EXPECT_TRUE(r.passed) << r.name << ": " << r.detail;
}

}  // namespace
}  // namespace rdp
