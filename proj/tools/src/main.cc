// Copyright 2026 The rpdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// rpdp curves|fit|run --config <path> [--seed N] [--out DIR]
//      [--threat server|client] [--threads N] [--compare-binary-search]

#include <CLI11.hpp>
#include <cstdint>
#include <exception>
#include <iostream>
#include <map>
#include <string>

#include "commands.h"
#include "config.h"

int main(int argc, char** argv) {
  CLI::App app{"Personalized-DP federated learning simulator"};
  app.require_subcommand(1);

  std::string config_path;
  rpdp::cli::Overrides overrides;
  std::uint64_t seed = 0;
  std::string out_dir;
  int threads = 1;
  rpdp::ThreatModel threat = rpdp::ThreatModel::kServer;
  bool compare = false;
  const std::map<std::string, rpdp::ThreatModel> threats{
      {"server", rpdp::ThreatModel::kServer},
      {"client", rpdp::ThreatModel::kClientOrThirdParty}};

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Experiment config (JSON)")
        ->required();
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--threat", threat, "Threat model")
        ->transform(CLI::CheckedTransformer(threats, CLI::ignore_case));
    sub->add_option("--threads", threads, "Worker threads")
        ->check(CLI::PositiveNumber);
  };
  CLI::App* curves = app.add_subcommand("curves", "Dump RDP/DP curves");
  CLI::App* fit = app.add_subcommand("fit", "Simulate and fit eps(q)");
  CLI::App* run = app.add_subcommand("run", "Train every mode and seed");
  for (CLI::App* sub : {curves, fit, run}) add_common(sub);
  run->add_option("--seed", seed, "Single seed, replaces run.seeds");
  run->add_flag("--compare-binary-search", compare,
                "Time SCF against binary search on 1,000 budgets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CLI::App* used = app.get_subcommands().front();
  if (used->count("--out")) overrides.out_dir = out_dir;
  if (used->count("--threat")) overrides.threat = threat;
  if (used->count("--threads")) overrides.threads = threads;
  if (used == run && run->count("--seed")) overrides.seed = seed;

  try {
    rpdp::cli::ExperimentConfig config = rpdp::cli::LoadConfig(config_path);
    rpdp::cli::ApplyOverrides(overrides, config);
    if (used == curves) {
      rpdp::cli::CmdCurves(config, config.output_dir);
    } else if (used == fit) {
      rpdp::cli::CmdFit(config, config.output_dir, std::cout);
    } else {
      rpdp::cli::CmdRun(config, config.output_dir, compare, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return rpdp::cli::ExitCodeFor(e);
  }
  return 0;
}
