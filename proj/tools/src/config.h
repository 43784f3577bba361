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

// Experiment configuration file (JSON). Every section is optional and falls
// back to the defaults below; unknown keys are rejected.
//
//   {
//     "mechanism": {"sigma", "clip", "delta", "tau", "rounds", "client_prob",
//                   "alpha_max" | "alpha_grid", "threat": "server"|"client"},
//     "curves":    {"q_values": [...], "sigmas": [...]},
//     "fit":       {"q_grid": [...], "observations_csv": path},
//     "budgets":   {"kind": "three_levels"|"bounded_pareto"|
//                           "bounded_mix_gauss"|"per_label"|"csv", ...},
//     "dataset":   {"kind": "synthetic"|"csv", ...},
//     "run":       {"modes", "seeds", "learning_rate", "eval_every",
//                   "threads", "ledger_snapshots"},
//     "output_dir": path
//   }

#ifndef RPDP_TOOLS_CONFIG_H_
#define RPDP_TOOLS_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rpdp/accountant.h"
#include "rpdp/datagen.h"
#include "rpdp/flsim.h"
#include "rpdp/prefs.h"

namespace rpdp::cli {

struct CurvesSpec {
  std::vector<double> q_values;  // empty: DefaultQGrid()
  std::vector<double> sigmas;    // empty: the mechanism's sigma only
};

struct FitSpec {
  std::vector<double> q_grid;    // empty: DefaultQGrid()
  std::string observations_csv;  // when set, observations are read from it
};

struct DatasetSpec {
  enum class Kind { kSynthetic, kCsv };
  Kind kind = Kind::kSynthetic;
  SyntheticSpec synthetic;
  // Synthetic only: pool all records and re-partition.
  std::optional<PartitionMode> partition;
  std::vector<std::string> paths;
  std::string label_column = "target";
  std::uint64_t split_seed = 0;
};

struct RunSpec {
  std::vector<TrainingMode> modes{TrainingMode::kRpdp, TrainingMode::kMinimum,
                                  TrainingMode::kDropout,
                                  TrainingMode::kPrivacyFree};
  std::vector<std::uint64_t> seeds{0};
  double learning_rate = 0.5;
  int eval_every = 1;
  int threads = 1;
  bool ledger_snapshots = false;
};

struct ExperimentConfig {
  MechanismParams mechanism;
  CurvesSpec curves;
  FitSpec fit;
  // Unset means budgets come from the dataset's epsilon column.
  std::optional<DistSpec> budgets = BoundedMixGauss{};
  DatasetSpec dataset;
  RunSpec run;
  std::string output_dir = "out";
};

// Throws ConfigError (malformed or unknown keys) or DomainError (values
// outside their domain).
ExperimentConfig ParseConfig(const std::string& json_text);
ExperimentConfig LoadConfig(const std::string& path);

}  // namespace rpdp::cli

#endif  // RPDP_TOOLS_CONFIG_H_
