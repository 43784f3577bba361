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

// The `curves`, `fit` and `run` subcommands. Each writes its artifacts into
// an output directory and throws rpdp::Error subclasses on failure.

#ifndef RPDP_TOOLS_COMMANDS_H_
#define RPDP_TOOLS_COMMANDS_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "config.h"
#include "rpdp/scf.h"

namespace rpdp::cli {

// Command-line flags that override the config file.
struct Overrides {
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<ThreatModel> threat;
  std::optional<int> threads;
};

void ApplyOverrides(const Overrides& overrides, ExperimentConfig& config);

// Maps an exception to the process exit code: 2 config or domain error,
// 3 fit failure, 4 data error, 5 invariant breach or anything else.
int ExitCodeFor(const std::exception& e);

// rdp_curve.csv (sigma,q,alpha,rho), dp_curve.csv (sigma,q,alpha,eps) and
// opt_eps_vs_q.csv (sigma,q,eps_star,alpha_star) for every sigma of the
// sweep and every q.
void CmdCurves(const ExperimentConfig& config,
               const std::filesystem::path& out);

// Observations from fit.observations_csv, or simulated on the fit grid.
std::vector<Observation> LoadOrSimulateObservations(
    const ExperimentConfig& config);

// scf_fit.json and scf_observations.csv; prints R^2 to `log`.
ExpFit CmdFit(const ExperimentConfig& config, const std::filesystem::path& out,
              std::ostream& log);

// The dataset for one seed, with per-record budgets attached.
FederatedDataset BuildDataset(const ExperimentConfig& config,
                              std::uint64_t seed);

struct SummaryRow {
  TrainingMode mode;
  std::uint64_t seed;
  double final_mean_accuracy;
};

// Per seed and mode: metrics_<mode>_seed<s>.jsonl, ledger_<mode>_seed<s>.csv
// and model_<mode>_seed<s>.txt; then summary.csv. With
// `compare_binary_search`, also timing.csv comparing SCF and binary search
// on 1,000 sampled budgets.
std::vector<SummaryRow> CmdRun(const ExperimentConfig& config,
                               const std::filesystem::path& out,
                               bool compare_binary_search, std::ostream& log);

}  // namespace rpdp::cli

#endif  // RPDP_TOOLS_COMMANDS_H_
