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
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "rdp/anomaly.hpp"
#include "rdp/clustering.hpp"
#include "rdp/dataset.hpp"
#include "rdp/model_io.hpp"

namespace rdp {

inline constexpr const char* kVersion = "1.0.0";

/// Raw key -> value settings, from a config file and/or command-line flags.
using ConfigMap = std::map<std::string, std::string>;

/// Every key the harness understands.
inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "task",         "input",        "label",          "header",          "source",
      "m",            "k",            "bandwidth",      "density",         "epochs",
      "batch_size",   "lr",           "aux_weight",     "leaky_slope",   "grad_clip",     "ablation",
      "members",      "filter_fraction", "filter_rounds", "restarts",      "max_iters",
      "seed",         "workers",      "standardize",    "normalize_embeddings", "nmi_norm",
      "report",       "scores_out",   "assignments_out", "output",         "model_out"};
  return keys;
}

/// Parses `key = value` lines; '#' starts a comment.
inline ConfigMap parse_config_text(const std::string& text, const std::string& source = "config") {
  ConfigMap out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto t = detail::trim(line);
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorKind::kConfig, source + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    out[std::string(detail::trim(t.substr(0, eq)))] = std::string(detail::trim(t.substr(eq + 1)));
  }
  return out;
}

inline ConfigMap load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

/// Fully resolved run settings. `defaulted` lists every key filled from a
/// task default rather than from the user.
struct RunConfig {
  std::string task;
  std::string input;
  std::optional<std::string> label;
  bool header = true;
  Source source = Source::kRff;
  std::size_t m = 0;
  std::size_t k = 0;
  std::optional<double> bandwidth;
  std::optional<double> density;
  std::size_t epochs = 0;
  std::size_t batch_size = 0;
  double lr = 0.0;
  double aux_weight = 0.0;
  double leaky_slope = 0.0;
  double grad_clip = 0.0;
  Ablation ablation = Ablation::kNone;
  std::size_t members = 0;
  double filter_fraction = 0.0;
  std::size_t filter_rounds = 0;
  std::size_t restarts = 0;
  std::size_t max_iters = 0;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  bool standardize = true;
  bool normalize_embeddings = false;
  NmiNorm nmi_norm = NmiNorm::kGeometric;
  std::string report;
  std::string scores_out;
  std::string assignments_out;
  std::string output;
  std::string model_out;

  std::vector<std::string> defaulted;

  nlohmann::json echo() const {
    nlohmann::json j;
    j["task"] = task;
    j["input"] = input;
    j["label"] = label ? nlohmann::json(*label) : nlohmann::json(nullptr);
    j["header"] = header;
    j["source"] = to_string(source);
    j["m"] = m;
    j["k"] = k;
    j["bandwidth"] = bandwidth ? nlohmann::json(*bandwidth) : nlohmann::json("median_heuristic");
    j["density"] = density ? nlohmann::json(*density) : nlohmann::json("1/sqrt(d)");
    j["epochs"] = epochs;
    j["batch_size"] = batch_size;
    j["lr"] = lr;
    j["aux_weight"] = aux_weight;
    j["leaky_slope"] = leaky_slope;
    j["grad_clip"] = grad_clip;
    j["ablation"] = to_string(ablation);
    j["members"] = members;
    j["filter_fraction"] = filter_fraction;
    j["filter_rounds"] = filter_rounds;
    j["restarts"] = restarts;
    j["max_iters"] = max_iters;
    j["seed"] = seed;
    j["workers"] = workers;
    j["standardize"] = standardize;
    j["normalize_embeddings"] = normalize_embeddings;
    j["nmi_norm"] = nmi_norm == NmiNorm::kGeometric ? "geometric" : "arithmetic";
    j["report"] = report;
    j["scores_out"] = scores_out;
    j["assignments_out"] = assignments_out;
    j["output"] = output;
    j["model_out"] = model_out;
    return j;
  }
};

namespace detail {

class Resolver {
 public:
  explicit Resolver(const ConfigMap& raw) : raw_(raw) {
    const std::set<std::string> known(config_keys().begin(), config_keys().end());
    for (const auto& [key, value] : raw) {
      if (!known.count(key)) errors.push_back("unknown key '" + key + "'");
    }
  }

  std::string str(const std::string& key, const std::string& def) {
    if (auto it = raw_.find(key); it != raw_.end()) return it->second;
    defaulted.push_back(key);
    return def;
  }

  std::optional<std::string> opt_str(const std::string& key) {
    if (auto it = raw_.find(key); it != raw_.end() && !it->second.empty()) return it->second;
    return std::nullopt;
  }

  std::size_t count(const std::string& key, std::size_t def) {
    auto it = raw_.find(key);
    if (it == raw_.end()) {
      defaulted.push_back(key);
      return def;
    }
    std::size_t v = 0;
    const auto& s = it->second;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) errors.push_back(key + ": expected a nonnegative integer, got '" + s + "'");
    return v;
  }

  std::uint64_t u64(const std::string& key, std::uint64_t def) {
    auto it = raw_.find(key);
    if (it == raw_.end()) {
      defaulted.push_back(key);
      return def;
    }
    std::uint64_t v = 0;
    const auto& s = it->second;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) errors.push_back(key + ": expected an unsigned integer, got '" + s + "'");
    return v;
  }

  double real(const std::string& key, double def) {
    auto it = raw_.find(key);
    if (it == raw_.end()) {
      defaulted.push_back(key);
      return def;
    }
    auto v = parse_double(it->second);
    if (!v) errors.push_back(key + ": expected a number, got '" + it->second + "'");
    return v.value_or(def);
  }

  std::optional<double> opt_real(const std::string& key) {
    auto it = raw_.find(key);
    if (it == raw_.end()) return std::nullopt;
    auto v = parse_double(it->second);
    if (!v) errors.push_back(key + ": expected a number, got '" + it->second + "'");
    return v;
  }

  bool flag(const std::string& key, bool def) {
    auto it = raw_.find(key);
    if (it == raw_.end()) {
      defaulted.push_back(key);
      return def;
    }
    const auto& s = it->second;
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    errors.push_back(key + ": expected true or false, got '" + s + "'");
    return def;
  }

  template <typename T>
  T parsed(const std::string& key, const std::string& def, T (*parse)(const std::string&), T fallback) {
    const auto s = str(key, def);
    try {
      return parse(s);
    } catch (const Error& e) {
      errors.push_back(e.what());
      return fallback;
    }
  }

  std::vector<std::string> errors;
  std::vector<std::string> defaulted;

 private:
  const ConfigMap& raw_;
};

inline NmiNorm parse_nmi_norm(const std::string& s) {
  if (s == "geometric") return NmiNorm::kGeometric;
  if (s == "arithmetic") return NmiNorm::kArithmetic;
  fail(ErrorKind::kConfig, "unknown nmi_norm '" + s + "' (expected geometric or arithmetic)");
}

}  // namespace detail

/// Fills task defaults and validates. All problems are reported together.
inline RunConfig resolve_config(const ConfigMap& raw) {
  detail::Resolver r(raw);
  RunConfig c;
  c.task = r.str("task", "");
  const bool anomaly = c.task == "anomaly";
  const bool cluster = c.task == "cluster";
  if (!anomaly && !cluster && c.task != "project" && c.task != "eval") {
    r.errors.push_back("task must be one of anomaly, cluster, project, eval (got '" + c.task + "')");
  }
  const TrainConfig defaults = cluster ? TrainConfig::clustering_defaults() : TrainConfig::anomaly_defaults();

  c.input = r.str("input", "");
  c.label = r.opt_str("label");
  c.header = r.flag("header", true);
  c.source = r.parsed<Source>("source", "rff", &parse_source, Source::kRff);
  c.m = r.count("m", defaults.m);
  c.k = r.count("k", defaults.m);
  c.bandwidth = r.opt_real("bandwidth");
  c.density = r.opt_real("density");
  c.epochs = r.count("epochs", defaults.epochs);
  c.batch_size = r.count("batch_size", defaults.batch_size);
  c.lr = r.real("lr", defaults.learning_rate);
  c.aux_weight = r.real("aux_weight", defaults.aux_weight);
  c.leaky_slope = r.real("leaky_slope", defaults.leaky_slope);
  c.grad_clip = r.real("grad_clip", defaults.grad_clip);
  c.ablation = r.parsed<Ablation>("ablation", "none", &parse_ablation, Ablation::kNone);
  c.members = r.count("members", 30);
  c.filter_fraction = r.real("filter_fraction", 0.05);
  c.filter_rounds = r.count("filter_rounds", 1);
  c.restarts = r.count("restarts", 30);
  c.max_iters = r.count("max_iters", 300);
  c.seed = r.u64("seed", 42);
  c.workers = r.count("workers", 1);
  c.standardize = r.flag("standardize", true);
  c.normalize_embeddings = r.flag("normalize_embeddings", false);
  c.nmi_norm = r.parsed<NmiNorm>("nmi_norm", "geometric", &detail::parse_nmi_norm, NmiNorm::kGeometric);
  c.report = r.str("report", "");
  c.scores_out = r.str("scores_out", "");
  c.assignments_out = r.str("assignments_out", "");
  c.output = r.str("output", "");
  c.model_out = r.str("model_out", "");

  auto& e = r.errors;
  if (c.input.empty()) e.emplace_back("input is required");
  if (c.epochs < 1) e.emplace_back("epochs must be >= 1");
  if (c.batch_size < 2) e.emplace_back("batch_size must be >= 2");
  if (!(c.lr > 0.0)) e.emplace_back("lr must be > 0");
  if (!(c.aux_weight >= 0.0)) e.emplace_back("aux_weight must be >= 0");
  if (!(c.grad_clip >= 0.0)) e.emplace_back("grad_clip must be >= 0 (0 disables clipping)");
  if (c.m < 1) e.emplace_back("m must be >= 1");
  if (c.k < 1) e.emplace_back("k must be >= 1");
  if (c.bandwidth && !(*c.bandwidth > 0.0)) e.emplace_back("bandwidth must be > 0");
  if (c.density && !(*c.density > 0.0 && *c.density <= 1.0)) e.emplace_back("density must lie in (0, 1]");
  if (c.members < 1) e.emplace_back("members must be >= 1");
  if (!(c.filter_fraction >= 0.0 && c.filter_fraction < 0.5)) e.emplace_back("filter_fraction must lie in [0, 0.5)");
  if (c.restarts < 1) e.emplace_back("restarts must be >= 1");
  if (c.workers < 1) e.emplace_back("workers must be >= 1");
  if (anomaly && c.source != Source::kIdentity && c.m != c.k) {
    e.emplace_back("anomaly task scores with the novelty loss, which needs m == k (got m=" + std::to_string(c.m) +
                   ", k=" + std::to_string(c.k) + ")");
  }
  if (cluster && c.ablation == Ablation::kNoBoosting) e.emplace_back("ablation no_boosting does not apply to clustering");
  if (cluster && !c.label) e.emplace_back("cluster task needs a label column");
  if (c.task == "eval" && !c.label) c.label = "label";
  if (c.task == "project" && c.output.empty()) e.emplace_back("project task needs an output path");

  if (!e.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& s : e) msg += "\n  - " + s;
    fail(ErrorKind::kConfig, msg);
  }
  c.defaulted = std::move(r.defaulted);
  return c;
}

namespace detail {

inline nlohmann::json loss_summary(const std::vector<const LossTrace*>& traces) {
  nlohmann::json j;
  if (traces.empty() || traces.front()->total.empty()) return j;
  const auto epochs = traces.front()->total.size();
  std::vector<double> total(epochs, 0.0), rdp(epochs, 0.0), aux(epochs, 0.0);
  for (const auto* t : traces) {
    for (std::size_t e = 0; e < epochs && e < t->total.size(); ++e) {
      total[e] += t->total[e];
      rdp[e] += t->rdp[e];
      aux[e] += t->aux[e];
    }
  }
  const double n = static_cast<double>(traces.size());
  for (std::size_t e = 0; e < epochs; ++e) {
    total[e] /= n;
    rdp[e] /= n;
    aux[e] /= n;
  }
  j["epochs"] = epochs;
  j["first_total"] = total.front();
  j["last_total"] = total.back();
  j["per_epoch_total"] = total;
  j["per_epoch_rdp"] = rdp;
  j["per_epoch_aux"] = aux;
  return j;
}

inline void write_rows_csv(const std::string& path, const std::string& value_name, const std::vector<std::string>& values,
                           const std::optional<std::vector<int>>& labels) {
  std::ostringstream os;
  os << "index," << value_name << (labels ? ",label" : "") << '\n';
  for (std::size_t i = 0; i < values.size(); ++i) {
    os << i << ',' << values[i];
    if (labels) os << ',' << (*labels)[i];
    os << '\n';
  }
  write_file_atomic(path, os.str());
}

inline std::size_t find_column(const Dataset& ds, const std::string& name) {
  for (std::size_t c = 0; c < ds.feature_names.size(); ++c) {
    if (ds.feature_names[c] == name) return c;
  }
  return ds.d();
}

}  // namespace detail

/// Writes scores as `index,score[,label]`.
inline void write_scores_csv(const std::string& path, const std::vector<double>& scores,
                             const std::optional<std::vector<int>>& labels) {
  std::vector<std::string> v;
  v.reserve(scores.size());
  for (double s : scores) v.push_back(format_double(s));
  detail::write_rows_csv(path, "score", v, labels);
}

/// Writes assignments as `index,cluster[,label]`.
inline void write_assignments_csv(const std::string& path, const std::vector<int>& clusters,
                                  const std::optional<std::vector<int>>& labels) {
  std::vector<std::string> v;
  v.reserve(clusters.size());
  for (int c : clusters) v.push_back(std::to_string(c));
  detail::write_rows_csv(path, "cluster", v, labels);
}

/// The report minus wall-clock timings, i.e. the part that must repeat
/// bit-for-bit for a fixed config.
inline nlohmann::json deterministic_part(nlohmann::json report) {
  report.erase("timing");
  return report;
}

inline nlohmann::json run(const RunConfig& c) {
  using clock = std::chrono::steady_clock;
  const auto t_start = clock::now();
  nlohmann::json report;
  report["tool"] = "rdp";
  report["version"] = kVersion;
  report["task"] = c.task;
  report["config"] = c.echo();
  report["defaults_filled"] = c.defaulted;

  std::optional<LabelSelector> label;
  if (c.label) label = LabelSelector(*c.label);
  const auto t_load = clock::now();
  Dataset raw = load_csv(c.input, label, c.header);
  Dataset data = c.standardize && c.task != "eval" ? standardize(raw).first : raw;
  report["data"] = {{"n", data.n()}, {"d", data.d()}, {"labels", data.has_labels()}, {"standardized", c.standardize && c.task != "eval"}};
  nlohmann::json timing;
  timing["load_seconds"] = std::chrono::duration<double>(clock::now() - t_load).count();

  if (c.task == "anomaly") {
    AnomalyRunConfig cfg;
    cfg.seed = c.seed;
    cfg.boost.members = c.members;
    cfg.boost.filter_fraction = c.filter_fraction;
    cfg.boost.filter_rounds = c.filter_rounds;
    cfg.boost.workers = c.workers;
    cfg.boost.map = MapSpec{c.source, c.k, c.bandwidth, c.density};
    cfg.boost.base.epochs = c.epochs;
    cfg.boost.base.batch_size = c.batch_size;
    cfg.boost.base.learning_rate = c.lr;
    cfg.boost.base.aux_weight = c.aux_weight;
    cfg.boost.base.leaky_slope = c.leaky_slope;
    cfg.boost.base.grad_clip = c.grad_clip;
    cfg.boost.base.m = c.m;
    auto res = run_anomaly(data, cfg, c.ablation, c.source);
    nlohmann::json metrics;
    if (res.auc_roc) {
      metrics["auc_roc"] = *res.auc_roc;
      metrics["auc_pr"] = *res.auc_pr;
    }
    report["metrics"] = metrics;
    nlohmann::json seeds = {{"run", c.seed}};
    for (const auto& m : res.ensemble.members) seeds["members"].push_back(m.seed);
    report["seeds"] = seeds;
    report["effective"] = {{"m", res.effective.base.m},
                           {"use_rdp_loss", res.effective.base.use_rdp_loss},
                           {"use_aux_loss", res.effective.base.use_aux_loss},
                           {"filter_rounds", res.effective.filter_rounds},
                           {"training_sizes", res.ensemble.members.front().training_sizes},
                           {"bandwidth", res.ensemble.members.front().model.map->bandwidth}};
    std::vector<const LossTrace*> traces;
    for (const auto& m : res.ensemble.members) traces.push_back(&m.trace);
    report["loss"] = detail::loss_summary(traces);
    timing["train_seconds"] = res.train_seconds;
    timing["score_seconds"] = res.score_seconds;
    if (!c.scores_out.empty()) write_scores_csv(c.scores_out, res.scores, data.labels);
    if (!c.model_out.empty()) save_ensemble(c.model_out, res.ensemble);
  } else if (c.task == "cluster") {
    ClusterRunConfig cfg;
    cfg.seed = c.seed;
    cfg.restarts = c.restarts;
    cfg.max_iters = c.max_iters;
    cfg.workers = c.workers;
    cfg.normalize_embeddings = c.normalize_embeddings;
    cfg.map = MapSpec{c.source, c.k, c.bandwidth, c.density};
    cfg.base.epochs = c.epochs;
    cfg.base.batch_size = c.batch_size;
    cfg.base.learning_rate = c.lr;
    cfg.base.aux_weight = c.aux_weight;
    cfg.base.leaky_slope = c.leaky_slope;
    cfg.base.grad_clip = c.grad_clip;
    cfg.base.m = c.m;
    auto res = run_clustering(data, cfg, c.ablation, c.source);
    report["metrics"] = {{"k", res.k},
                         {"nmi_mean", res.nmi.mean},
                         {"nmi_std", res.nmi.std},
                         {"f_mean", res.f_score.mean},
                         {"f_std", res.f_score.std},
                         {"nmi_per_restart", res.nmi_per_restart},
                         {"f_per_restart", res.f_per_restart}};
    report["seeds"] = {{"run", c.seed}, {"map", derive_seed(c.seed, 1)}, {"train", res.effective.seed}};
    report["effective"] = {{"m", res.effective.m},
                           {"k", res.model.map->out_dim},
                           {"use_rdp_loss", res.effective.use_rdp_loss},
                           {"use_aux_loss", res.effective.use_aux_loss},
                           {"bandwidth", res.model.map->bandwidth}};
    report["loss"] = detail::loss_summary({&res.trace});
    timing["train_seconds"] = res.train_seconds;
    timing["cluster_seconds"] = res.cluster_seconds;
    if (!c.assignments_out.empty()) write_assignments_csv(c.assignments_out, res.best_assignments, data.labels);
    if (!c.model_out.empty()) save_model(c.model_out, res.model);
  } else if (c.task == "project") {
    const auto t0 = clock::now();
    const RandomMap map = make_map(MapSpec{c.source, c.k, c.bandwidth, c.density}, data.features, c.seed);
    Dataset out;
    out.features = apply(map, data.features);
    out.labels = data.labels;
    for (std::size_t j = 0; j < map.out_dim; ++j) out.feature_names.push_back("p" + std::to_string(j));
    write_csv(c.output, out);
    report["metrics"] = nlohmann::json::object();
    report["seeds"] = {{"run", c.seed}, {"map", c.seed}};
    report["effective"] = {{"kind", to_string(map.kind)}, {"out_dim", map.out_dim}, {"bandwidth", map.bandwidth},
                           {"density", map.density}};
    timing["project_seconds"] = std::chrono::duration<double>(clock::now() - t0).count();
  } else {
    if (!data.labels) fail(ErrorKind::kConfig, "eval needs a label column");
    nlohmann::json metrics;
    if (auto col = detail::find_column(data, "score"); col < data.d()) {
      std::vector<double> scores(data.n());
      for (std::size_t i = 0; i < data.n(); ++i) scores[i] = data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col));
      metrics["auc_roc"] = auc_roc(scores, *data.labels);
      metrics["auc_pr"] = auc_pr(scores, *data.labels);
    } else if (auto ccol = detail::find_column(data, "cluster"); ccol < data.d()) {
      std::vector<int> clusters(data.n());
      for (std::size_t i = 0; i < data.n(); ++i) {
        clusters[i] = static_cast<int>(data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(ccol)));
      }
      metrics["nmi"] = nmi(*data.labels, clusters, c.nmi_norm);
      metrics["pairwise_f"] = pairwise_f(*data.labels, clusters);
    } else {
      fail(ErrorKind::kFormat, "eval input needs a 'score' or 'cluster' column");
    }
    report["metrics"] = metrics;
    report["seeds"] = {{"run", c.seed}};
  }
  timing["total_seconds"] = std::chrono::duration<double>(clock::now() - t_start).count();
  report["timing"] = timing;
  if (!c.report.empty()) write_file_atomic(c.report, report.dump(2) + "\n");
  return report;
}

}  // namespace rdp
