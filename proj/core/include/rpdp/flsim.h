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

// FedAvg with DP-SGD local updates and two-stage Poisson sampling: clients
// are sampled uniformly with probability lambda each round, and inside a
// selected client every local step samples records independently with their
// own probabilities.

#ifndef RPDP_FLSIM_H_
#define RPDP_FLSIM_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rpdp/accountant.h"
#include "rpdp/datagen.h"
#include "rpdp/ledger.h"
#include "rpdp/scf.h"

namespace rpdp {

// Logistic regression. Two classes use a single sigmoid unit (d + 1
// weights); more classes use softmax (K * (d + 1) weights, row k holds
// class k's coefficients followed by its bias).
class Model {
 public:
  Model() = default;
  static Model Zeros(int num_features, int num_classes);

  int num_features() const { return num_features_; }
  int num_classes() const { return num_classes_; }
  std::size_t dimension() const { return weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  std::vector<double>& mutable_weights() { return weights_; }

  int Predict(std::span<const double> x) const;
  // Cross-entropy gradient for one example, written to `grad`
  // (size dimension()).
  void Gradient(std::span<const double> x, int label,
                std::span<double> grad) const;

 private:
  int num_features_ = 0;
  int num_classes_ = 0;
  std::vector<double> weights_;
};

enum class TrainingMode { kRpdp, kMinimum, kDropout, kPrivacyFree };

std::string_view TrainingModeName(TrainingMode mode);
// Accepts "rpdp", "minimum", "dropout", "privacy_free". Throws ConfigError.
TrainingMode ParseTrainingMode(std::string_view name);

struct LocalTrainingParams {
  int tau = 5;
  double learning_rate = 0.1;
  double sigma = 1.0;
  // Infinity disables clipping (only valid with sigma = 0).
  double clip = 1.0;
};

// Identifies the random streams of one client's local update.
struct UpdateKey {
  std::uint64_t seed = 0;
  int client = 0;
  int round = 0;
};

// tau DP-SGD steps on the client's train split. Each step Poisson-samples a
// batch from records with active[j] set (probabilities probs[j], both over
// shard.train), clips every per-example gradient to l2 norm `clip`, adds
// N(0, (sigma * clip)^2) per coordinate to the sum, divides by the realized
// batch size and takes one step of size learning_rate. Empty batches are
// skipped. Returns x_after - x_before.
std::vector<double> LocalUpdate(const Model& model, const ClientShard& shard,
                                std::span<const double> probs,
                                const std::vector<bool>& active,
                                const LocalTrainingParams& params,
                                const UpdateKey& key);

// Coordinate-wise mean; zero vector of size `dimension` when empty.
std::vector<double> Aggregate(std::span<const std::vector<double>> deltas,
                              std::size_t dimension);

// Fraction of correct predictions on the shard's test split.
double Evaluate(const Model& model, const ClientShard& shard);
double Evaluate(const Model& model, std::span<const double> features,
                std::span<const int> labels);

struct RunConfig {
  MechanismParams params;
  double learning_rate = 0.1;
  TrainingMode mode = TrainingMode::kRpdp;
  std::uint64_t seed = 0;
  int eval_every = 1;
  int threads = 1;
  // Estimator used to map budgets to probabilities.
  std::optional<ExpFit> fit;
  // Per-client, per-train-record probabilities; overrides `fit` in rPDP
  // mode when non-empty.
  std::vector<std::vector<double>> explicit_probs;
};

struct RoundMetrics {
  int round = 0;
  std::vector<int> selected_clients;
  std::vector<std::size_t> active_records;  // per client, after precheck
  bool evaluated = false;
  std::vector<double> client_accuracy;  // per client when evaluated
  double mean_accuracy = 0.0;
};

struct RunResult {
  std::vector<RoundMetrics> rounds;
  Model model;
  std::vector<ClientLedger> ledgers;
};

// Called after each round with the round's metrics and the ledgers.
using RoundObserver =
    std::function<void(const RoundMetrics&, const std::vector<ClientLedger>&)>;

// Per-train-record probabilities for `mode` (index [client][train record]).
// Records that must not participate get 0. `fit` is required for every mode
// but PrivacyFree.
std::vector<std::vector<double>> AssignProbabilities(
    const FederatedDataset& data, TrainingMode mode,
    const std::optional<ExpFit>& fit);

// Trains with personalized per-record probabilities.
RunResult RunRpdpFl(const RunConfig& config, const FederatedDataset& data,
                    const RoundObserver& observer = {});

// Minimum, Dropout or PrivacyFree baseline.
RunResult RunBaseline(const RunConfig& config, const FederatedDataset& data,
                      TrainingMode mode, const RoundObserver& observer = {});

}  // namespace rpdp

#endif  // RPDP_FLSIM_H_
