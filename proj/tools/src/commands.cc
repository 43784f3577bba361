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

#include "commands.h"

#include <chrono>
#include <fstream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <string>

#include "rpdp/csv_util.h"
#include "rpdp/errors.h"
#include "rpdp/flsim.h"
#include "rpdp/prefs.h"
#include "rpdp/sampling.h"

namespace rpdp::cli {
namespace {

namespace fs = std::filesystem;

constexpr std::size_t kTimingBudgets = 1000;

std::ofstream OpenOutput(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

void EnsureDirectory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw DataError("cannot create output directory " + dir.string() + ": " +
                    ec.message());
  }
}

std::vector<Observation> ReadObservationsCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open observations file " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": file is empty");
  const std::vector<std::string> header = SplitCsvLine(line);
  if (header.size() < 2 || Trim(header[0]) != "q" ||
      Trim(header[1]) != "eps_star") {
    throw DataError(path + ":1: expected header q,eps_star");
  }
  std::vector<Observation> obs;
  for (int line_no = 2; std::getline(in, line); ++line_no) {
    if (Trim(line).empty()) continue;
    const std::vector<std::string> cells = SplitCsvLine(line);
    Observation o;
    if (cells.size() != header.size() || !ParseDouble(cells[0], o.q) ||
        !ParseDouble(cells[1], o.eps_star)) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": malformed observation row");
    }
    obs.push_back(o);
  }
  return obs;
}

std::string ArtifactName(std::string_view kind, TrainingMode mode,
                         std::uint64_t seed, std::string_view ext) {
  return std::string(kind) + "_" + std::string(TrainingModeName(mode)) +
         "_seed" + std::to_string(seed) + std::string(ext);
}

// Budgets for the timing comparison: the configured distribution when it
// can be sampled without labels, else the mixture defaults.
std::vector<double> TimingBudgets(const ExperimentConfig& config) {
  DistSpec spec = BoundedMixGauss{};
  if (config.budgets && !std::holds_alternative<PerLabel>(*config.budgets)) {
    spec = *config.budgets;
  }
  RngStream stream = DeriveStream(config.run.seeds.front(), {"timing"});
  return SampleBudgets(spec, kTimingBudgets, stream);
}

void WriteTiming(const ExperimentConfig& config, const fs::path& out,
                 std::ostream& log) {
  using Clock = std::chrono::steady_clock;
  const std::vector<double> budgets = TimingBudgets(config);

  const auto scf_start = Clock::now();
  const ExpFit fit = FitExponential(LoadOrSimulateObservations(config));
  double scf_checksum = 0.0;
  for (double eps : budgets) scf_checksum += EstimateQ(fit, eps).q;
  const double scf_seconds =
      std::chrono::duration<double>(Clock::now() - scf_start).count();

  const auto bs_start = Clock::now();
  BinarySearchOptions options;
  options.q_floor = fit.q_floor;
  const double eps_floor = FlEpsilon(options.q_floor, config.mechanism).epsilon;
  double bs_checksum = 0.0;
  for (double eps : budgets) {
    // Below the achievable range both methods exclude the record.
    if (eps >= eps_floor) {
      bs_checksum += BinarySearchQ(eps, config.mechanism, options);
    }
  }
  const double bs_seconds =
      std::chrono::duration<double>(Clock::now() - bs_start).count();

  std::ofstream csv = OpenOutput(out / "timing.csv");
  csv << "method,budgets,seconds,sum_q\n";
  csv << "scf," << budgets.size() << ',' << FormatDouble(scf_seconds) << ','
      << FormatDouble(scf_checksum) << '\n';
  csv << "binary_search," << budgets.size() << ',' << FormatDouble(bs_seconds)
      << ',' << FormatDouble(bs_checksum) << '\n';
  log << "q assignment for " << budgets.size() << " budgets: SCF "
      << scf_seconds << " s, binary search " << bs_seconds << " s ("
      << bs_seconds / scf_seconds << "x)\n";
}

nlohmann::json MetricsRecord(const RoundMetrics& m,
                             const std::string& snapshot) {
  nlohmann::json j;
  j["round"] = m.round;
  j["selected_clients"] = m.selected_clients;
  j["active_records"] = m.active_records;
  j["evaluated"] = m.evaluated;
  if (m.evaluated) {
    j["client_accuracy"] = m.client_accuracy;
    j["mean_accuracy"] = m.mean_accuracy;
  } else {
    j["client_accuracy"] = nullptr;
    j["mean_accuracy"] = nullptr;
  }
  j["ledger_snapshot"] =
      snapshot.empty() ? nlohmann::json(nullptr) : nlohmann::json(snapshot);
  return j;
}

void WriteLedgers(const fs::path& path,
                  const std::vector<ClientLedger>& ledgers) {
  std::ofstream csv = OpenOutput(path);
  ClientLedger::WriteCsvHeader(csv);
  for (const ClientLedger& ledger : ledgers) ledger.WriteCsvRows(csv);
}

}  // namespace

void ApplyOverrides(const Overrides& overrides, ExperimentConfig& config) {
  if (overrides.out_dir) config.output_dir = *overrides.out_dir;
  if (overrides.seed) config.run.seeds = {*overrides.seed};
  if (overrides.threat) config.mechanism.threat = *overrides.threat;
  if (overrides.threads) {
    if (*overrides.threads < 1) throw ConfigError("--threads must be >= 1");
    config.run.threads = *overrides.threads;
  }
}

int ExitCodeFor(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) ||
      dynamic_cast<const DomainError*>(&e)) {
    return 2;
  }
  if (dynamic_cast<const FitError*>(&e)) return 3;
  if (dynamic_cast<const DataError*>(&e)) return 4;
  return 5;
}

void CmdCurves(const ExperimentConfig& config, const fs::path& out) {
  EnsureDirectory(out);
  const std::vector<double> q_values =
      config.curves.q_values.empty() ? DefaultQGrid() : config.curves.q_values;
  const std::vector<double> sigmas = config.curves.sigmas.empty()
                                         ? std::vector{config.mechanism.sigma}
                                         : config.curves.sigmas;

  std::ofstream rdp = OpenOutput(out / "rdp_curve.csv");
  std::ofstream dp = OpenOutput(out / "dp_curve.csv");
  std::ofstream opt = OpenOutput(out / "opt_eps_vs_q.csv");
  rdp << "sigma,q,alpha,rho\n";
  dp << "sigma,q,alpha,eps\n";
  opt << "sigma,q,eps_star,alpha_star\n";
  for (double sigma : sigmas) {
    MechanismParams params = config.mechanism;
    params.sigma = sigma;
    const std::string s = FormatDouble(sigma);
    for (double q : q_values) {
      const RdpCurve curve = FederatedCurve(q, params);
      const std::vector<double> eps = DpCurve(curve, params.delta);
      const std::string qs = FormatDouble(q);
      for (std::size_t i = 0; i < curve.size(); ++i) {
        rdp << s << ',' << qs << ',' << curve.orders()[i] << ','
            << FormatDouble(curve.values()[i]) << '\n';
        dp << s << ',' << qs << ',' << curve.orders()[i] << ','
           << FormatDouble(eps[i]) << '\n';
      }
      const DpPoint best = RdpToDp(curve, params.delta);
      opt << s << ',' << qs << ',' << FormatDouble(best.epsilon) << ','
          << best.alpha_star << '\n';
    }
  }
}

std::vector<Observation> LoadOrSimulateObservations(
    const ExperimentConfig& config) {
  if (!config.fit.observations_csv.empty()) {
    return ReadObservationsCsv(config.fit.observations_csv);
  }
  const std::vector<double> grid =
      config.fit.q_grid.empty() ? DefaultQGrid() : config.fit.q_grid;
  return SimulateObservations(config.mechanism, grid, config.run.threads);
}

ExpFit CmdFit(const ExperimentConfig& config, const fs::path& out,
              std::ostream& log) {
  EnsureDirectory(out);
  const std::vector<Observation> obs = LoadOrSimulateObservations(config);
  {
    std::ofstream csv = OpenOutput(out / "scf_observations.csv");
    WriteObservationsCsv(csv, obs);
  }
  const ExpFit fit = FitExponential(obs);
  std::ofstream json = OpenOutput(out / "scf_fit.json");
  WriteFitJson(json, fit);
  log << "R^2 = " << FormatDouble(fit.r_squared) << '\n';
  return fit;
}

FederatedDataset BuildDataset(const ExperimentConfig& config,
                              std::uint64_t seed) {
  const DatasetSpec& spec = config.dataset;
  FederatedDataset data;
  if (spec.kind == DatasetSpec::Kind::kCsv) {
    data = LoadCsv(spec.paths, spec.label_column, spec.split_seed,
                   spec.synthetic.train_fraction);
  } else {
    RngStream stream = DeriveStream(seed, {"dataset"});
    if (spec.partition) {
      const SyntheticSpec& s = spec.synthetic;
      if (s.clients < 1 || s.records_per_client < 1) {
        throw DomainError("synthetic dataset needs positive counts");
      }
      RngStream pool_stream = stream.Derive({"pool"});
      const DataPool pool = GeneratePool(
          static_cast<std::size_t>(s.clients) * s.records_per_client,
          s.features, s.classes, s.separation, pool_stream);
      data =
          Partition(pool, s.clients, *spec.partition, stream, s.train_fraction);
    } else {
      data = GenerateSynthetic(spec.synthetic, stream);
    }
  }

  if (config.budgets) {
    for (std::size_t i = 0; i < data.clients.size(); ++i) {
      RngStream stream =
          DeriveStream(seed, {"budgets", static_cast<std::int64_t>(i)});
      data.clients[i].budgets =
          AssignBudgets(*config.budgets, data.clients[i].labels, stream);
    }
  } else {
    for (const ClientShard& shard : data.clients) {
      if (shard.budgets.empty()) {
        throw DataError(
            "budgets.kind is csv but the data has no epsilon column");
      }
    }
  }
  data.Validate();
  return data;
}

std::vector<SummaryRow> CmdRun(const ExperimentConfig& config,
                               const fs::path& out, bool compare_binary_search,
                               std::ostream& log) {
  EnsureDirectory(out);
  const ExpFit fit = FitExponential(LoadOrSimulateObservations(config));
  log << "fit: a=" << FormatDouble(fit.a) << " b=" << FormatDouble(fit.b)
      << " c=" << FormatDouble(fit.c) << " R^2=" << FormatDouble(fit.r_squared)
      << '\n';

  std::vector<SummaryRow> summary;
  for (std::uint64_t seed : config.run.seeds) {
    const FederatedDataset data = BuildDataset(config, seed);
    for (TrainingMode mode : config.run.modes) {
      RunConfig run;
      run.params = config.mechanism;
      run.learning_rate = config.run.learning_rate;
      run.mode = mode;
      run.seed = seed;
      run.eval_every = config.run.eval_every;
      run.threads = config.run.threads;
      run.fit = fit;

      std::ofstream metrics =
          OpenOutput(out / ArtifactName("metrics", mode, seed, ".jsonl"));
      const RoundObserver observer = [&](const RoundMetrics& m,
                                         const std::vector<ClientLedger>& l) {
        std::string snapshot;
        if (config.run.ledger_snapshots) {
          snapshot = ArtifactName("ledger", mode, seed,
                                  "_round" + std::to_string(m.round) + ".csv");
          WriteLedgers(out / snapshot, l);
        }
        metrics << MetricsRecord(m, snapshot).dump() << '\n';
      };
      const RunResult result = mode == TrainingMode::kRpdp
                                   ? RunRpdpFl(run, data, observer)
                                   : RunBaseline(run, data, mode, observer);

      WriteLedgers(out / ArtifactName("ledger", mode, seed, ".csv"),
                   result.ledgers);
      std::ofstream model =
          OpenOutput(out / ArtifactName("model", mode, seed, ".txt"));
      for (double w : result.model.weights()) model << FormatDouble(w) << '\n';

      const double accuracy = result.rounds.back().mean_accuracy;
      summary.push_back({mode, seed, accuracy});
      log << TrainingModeName(mode) << " seed " << seed
          << ": final mean accuracy " << FormatDouble(accuracy) << '\n';
    }
  }

  std::ofstream csv = OpenOutput(out / "summary.csv");
  csv << "mode,seed,final_mean_accuracy\n";
  for (const SummaryRow& row : summary) {
    csv << TrainingModeName(row.mode) << ',' << row.seed << ','
        << FormatDouble(row.final_mean_accuracy) << '\n';
  }
  if (compare_binary_search) WriteTiming(config, out, log);
  return summary;
}

}  // namespace rpdp::cli
