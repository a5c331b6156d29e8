// Copyright 2026 The mrg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// mrg: command-line front end for the experiment harness.
//
//   mrg <kernel|single|multipoint|field|theta|she|strong> --config FILE
//       [--seed S] [--threads T] [--out DIR]

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "mrg/error.hpp"
#include "mrg/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Marginally relevant disorder experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string seed;
  std::string threads;
  std::string out;
  for (const char* name : {"kernel", "single", "multipoint", "field", "theta", "she", "strong"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "key=value config file")->required();
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--threads", threads, "worker threads (<= 0: all cores)");
    sub->add_option("--out", out, "output directory");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  mrg::ExperimentConfig config;
  try {
    config = mrg::load_config(config_path);
    mrg::set_config_value(config, "experiment", app.get_subcommands().front()->get_name());
    if (!seed.empty()) mrg::set_config_value(config, "seed", seed);
    if (!threads.empty()) mrg::set_config_value(config, "threads", threads);
    if (!out.empty()) mrg::set_config_value(config, "out", out);
    mrg::validate_config(config);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "mrg: %s\n", e.what());
    return 2;
  }

  try {
    const mrg::RunReport report = mrg::run_experiment(config);
    for (const auto& cell : report.cells) {
      std::fprintf(stderr, "%-40s %s %.3fs%s%s\n", cell.name.c_str(), cell.ok ? "ok  " : "FAIL",
                   cell.runtime_seconds, cell.ok ? "" : "  ", cell.error.c_str());
    }
    return report.exit_code;
  } catch (const mrg::Error& e) {
    std::fprintf(stderr, "mrg: %s\n", e.what());
    return e.kind() == mrg::ErrorKind::kConfig ? 2 : 3;
  }
}
