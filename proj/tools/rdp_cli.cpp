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

// Command-line front end: rdp {anomaly|cluster|project|eval|selftest}.

#include <algorithm>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rdp/harness.hpp"
#include "rdp/selftest.hpp"

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfigError = 2, kIoError = 3, kNumericError = 4 };

int exit_code_for(rdp::ErrorKind kind) {
  switch (kind) {
    case rdp::ErrorKind::kConfig: return kConfigError;
    case rdp::ErrorKind::kIo:
    case rdp::ErrorKind::kFormat: return kIoError;
    case rdp::ErrorKind::kNumeric: return kNumericError;
  }
  return kFailure;
}

std::string flag_name(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return "--" + key;
}

struct TaskOptions {
  std::string config_file;
  std::vector<std::string> overrides;
  std::map<std::string, std::string> values;
};

void add_task_options(CLI::App* sub, TaskOptions& opts) {
  sub->add_option("-c,--config", opts.config_file, "Key-value config file; flags override its entries");
  sub->add_option("--set", opts.overrides, "Extra key=value override (repeatable)");
  for (const auto& key : rdp::config_keys()) {
    if (key == "task") continue;
    sub->add_option(flag_name(key), opts.values[key], "Sets '" + key + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random distance prediction: representation learning for anomaly detection and clustering"};
  app.require_subcommand(1);
  app.set_version_flag("--version", rdp::kVersion);

  std::map<std::string, TaskOptions> task_opts;
  for (const char* task : {"anomaly", "cluster", "project", "eval"}) {
    auto* sub = app.add_subcommand(task, std::string("Run the ") + task + " task");
    add_task_options(sub, task_opts[task]);
  }
  app.add_subcommand("selftest", "Run the built-in invariant checks");

  CLI11_PARSE(app, argc, argv);

  try {
    auto* sub = app.get_subcommands().front();
    if (sub->get_name() == "selftest") {
      bool all = true;
      for (const auto& r : rdp::run_selftest()) {
        std::cout << (r.passed ? "PASS  " : "FAIL  ") << r.name << " (" << r.detail << ")\n";
        all = all && r.passed;
      }
      return all ? kOk : kFailure;
    }

    auto& opts = task_opts[sub->get_name()];
    rdp::ConfigMap raw;
    if (!opts.config_file.empty()) raw = rdp::load_config_file(opts.config_file);
    for (const auto& key : rdp::config_keys()) {
      if (key == "task") continue;
      if (sub->count(flag_name(key)) > 0) raw[key] = opts.values[key];
    }
    for (const auto& kv : opts.overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) rdp::fail(rdp::ErrorKind::kConfig, "--set expects key=value, got '" + kv + "'");
      raw[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    raw["task"] = sub->get_name();

    const auto config = rdp::resolve_config(raw);
    const auto report = rdp::run(config);
    std::cout << report.dump(2) << std::endl;
    return kOk;
  } catch (const rdp::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}
