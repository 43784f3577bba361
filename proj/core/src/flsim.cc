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

#include "rpdp/flsim.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "parallel.h"
#include "rpdp/errors.h"
#include "rpdp/sampling.h"

namespace rpdp {
namespace {

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void CheckFinite(std::span<const double> v, const char* what,
                 const UpdateKey& key) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw InvariantError(std::string("non-finite ") + what + " in client " +
                           std::to_string(key.client) + ", round " +
                           std::to_string(key.round));
    }
  }
}

bool IsPrivacyFree(const LocalTrainingParams& p) { return p.sigma == 0.0; }

}  // namespace

Model Model::Zeros(int num_features, int num_classes) {
  if (num_features < 1) throw DomainError("model needs >= 1 feature");
  if (num_classes < 2) throw DomainError("model needs >= 2 classes");
  Model m;
  m.num_features_ = num_features;
  m.num_classes_ = num_classes;
  const std::size_t width = static_cast<std::size_t>(num_features) + 1;
  m.weights_.assign(num_classes == 2 ? width : width * num_classes, 0.0);
  return m;
}

int Model::Predict(std::span<const double> x) const {
  const std::size_t d = static_cast<std::size_t>(num_features_);
  if (num_classes_ == 2) {
    double z = weights_[d];
    for (std::size_t k = 0; k < d; ++k) z += weights_[k] * x[k];
    return z > 0.0 ? 1 : 0;
  }
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < num_classes_; ++c) {
    const double* w = weights_.data() + c * (d + 1);
    double z = w[d];
    for (std::size_t k = 0; k < d; ++k) z += w[k] * x[k];
    if (z > best_score) {
      best_score = z;
      best = c;
    }
  }
  return best;
}

void Model::Gradient(std::span<const double> x, int label,
                     std::span<double> grad) const {
  const std::size_t d = static_cast<std::size_t>(num_features_);
  if (num_classes_ == 2) {
    double z = weights_[d];
    for (std::size_t k = 0; k < d; ++k) z += weights_[k] * x[k];
    const double r = Sigmoid(z) - (label == 1 ? 1.0 : 0.0);
    for (std::size_t k = 0; k < d; ++k) grad[k] = r * x[k];
    grad[d] = r;
    return;
  }
  std::vector<double> logits(static_cast<std::size_t>(num_classes_));
  double max_logit = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < num_classes_; ++c) {
    const double* w = weights_.data() + c * (d + 1);
    double z = w[d];
    for (std::size_t k = 0; k < d; ++k) z += w[k] * x[k];
    logits[c] = z;
    max_logit = std::max(max_logit, z);
  }
  double total = 0.0;
  for (double& z : logits) {
    z = std::exp(z - max_logit);
    total += z;
  }
  for (int c = 0; c < num_classes_; ++c) {
    const double r = logits[c] / total - (c == label ? 1.0 : 0.0);
    double* g = grad.data() + c * (d + 1);
    for (std::size_t k = 0; k < d; ++k) g[k] = r * x[k];
    g[d] = r;
  }
}

std::string_view TrainingModeName(TrainingMode mode) {
  switch (mode) {
    case TrainingMode::kRpdp:
      return "rpdp";
    case TrainingMode::kMinimum:
      return "minimum";
    case TrainingMode::kDropout:
      return "dropout";
    case TrainingMode::kPrivacyFree:
      return "privacy_free";
  }
  return "unknown";
}

TrainingMode ParseTrainingMode(std::string_view name) {
  for (TrainingMode m : {TrainingMode::kRpdp, TrainingMode::kMinimum,
                         TrainingMode::kDropout, TrainingMode::kPrivacyFree}) {
    if (TrainingModeName(m) == name) return m;
  }
  throw ConfigError("unknown training mode '" + std::string(name) + "'");
}

std::vector<double> LocalUpdate(const Model& model, const ClientShard& shard,
                                std::span<const double> probs,
                                const std::vector<bool>& active,
                                const LocalTrainingParams& params,
                                const UpdateKey& key) {
  const std::size_t n = shard.train.size();
  if (probs.size() != n || active.size() != n) {
    throw DomainError("probabilities and mask must cover the train split");
  }
  if (params.tau < 1) throw DomainError("tau must be >= 1");
  if (!(params.sigma >= 0.0)) throw DomainError("sigma must be >= 0");
  if (!(params.clip > 0.0)) throw DomainError("clip must be > 0");
  if (params.sigma > 0.0 && !std::isfinite(params.clip)) {
    throw DomainError("noise requires a finite clipping norm");
  }

  Model local = model;
  std::vector<double>& w = local.mutable_weights();
  const std::size_t dim = w.size();
  std::vector<double> effective(n);
  for (std::size_t j = 0; j < n; ++j) effective[j] = active[j] ? probs[j] : 0.0;

  std::vector<double> sum(dim), grad(dim);
  for (int step = 0; step < params.tau; ++step) {
    RngStream stream = DeriveStream(
        key.seed, {"client", std::int64_t{key.client}, "round",
                   std::int64_t{key.round}, "step", std::int64_t{step}});
    const std::vector<std::size_t> batch = PoissonSelect(effective, stream);
    if (batch.empty()) continue;

    std::fill(sum.begin(), sum.end(), 0.0);
    for (std::size_t j : batch) {
      const std::size_t row = shard.train[j];
      local.Gradient(shard.Row(row, model.num_features()), shard.labels[row],
                     grad);
      double scale = 1.0;
      if (std::isfinite(params.clip)) {
        double norm2 = 0.0;
        for (double g : grad) norm2 += g * g;
        const double norm = std::sqrt(norm2);
        if (norm > params.clip) scale = params.clip / norm;
      }
      for (std::size_t k = 0; k < dim; ++k) sum[k] += scale * grad[k];
    }
    if (!IsPrivacyFree(params)) {
      const double stddev = params.sigma * params.clip;
      for (double& s : sum) s += stddev * stream.NextGaussian();
    }
    const double step_size =
        params.learning_rate / static_cast<double>(batch.size());
    for (std::size_t k = 0; k < dim; ++k) w[k] -= step_size * sum[k];
    CheckFinite(w, "weights", key);
  }

  std::vector<double> delta(dim);
  for (std::size_t k = 0; k < dim; ++k) delta[k] = w[k] - model.weights()[k];
  return delta;
}

std::vector<double> Aggregate(std::span<const std::vector<double>> deltas,
                              std::size_t dimension) {
  std::vector<double> mean(dimension, 0.0);
  if (deltas.empty()) return mean;
  for (const std::vector<double>& d : deltas) {
    if (d.size() != dimension) {
      throw DomainError("client update has the wrong dimension");
    }
    for (std::size_t k = 0; k < dimension; ++k) mean[k] += d[k];
  }
  const double inv = 1.0 / static_cast<double>(deltas.size());
  for (double& m : mean) m *= inv;
  return mean;
}

double Evaluate(const Model& model, std::span<const double> features,
                std::span<const int> labels) {
  const std::size_t d = static_cast<std::size_t>(model.num_features());
  if (labels.empty()) throw DataError("cannot evaluate on an empty split");
  if (features.size() != labels.size() * d) {
    throw DataError("feature matrix does not match the label count");
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (model.Predict(features.subspan(i * d, d)) == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

double Evaluate(const Model& model, const ClientShard& shard) {
  if (shard.test.empty()) throw DataError("cannot evaluate on an empty split");
  std::size_t correct = 0;
  for (std::size_t i : shard.test) {
    if (model.Predict(shard.Row(i, model.num_features())) == shard.labels[i]) {
      ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(shard.test.size());
}

std::vector<std::vector<double>> AssignProbabilities(
    const FederatedDataset& data, TrainingMode mode,
    const std::optional<ExpFit>& fit) {
  std::vector<std::vector<double>> probs(data.clients.size());
  if (mode == TrainingMode::kPrivacyFree) {
    for (std::size_t i = 0; i < data.clients.size(); ++i) {
      probs[i].assign(data.clients[i].train.size(), 1.0);
    }
    return probs;
  }
  if (!fit)
    throw ConfigError("a curve fit is required to assign probabilities");

  double min_eps = std::numeric_limits<double>::infinity();
  double sum_eps = 0.0;
  std::size_t count = 0;
  for (const ClientShard& shard : data.clients) {
    if (shard.budgets.size() != shard.size()) {
      throw DataError("every record needs a privacy budget");
    }
    for (std::size_t j : shard.train) {
      min_eps = std::min(min_eps, shard.budgets[j]);
      sum_eps += shard.budgets[j];
      ++count;
    }
  }
  if (count == 0) throw DataError("no training records");
  const double mean_eps = sum_eps / static_cast<double>(count);

  for (std::size_t i = 0; i < data.clients.size(); ++i) {
    const ClientShard& shard = data.clients[i];
    probs[i].resize(shard.train.size());
    for (std::size_t j = 0; j < shard.train.size(); ++j) {
      const double eps = shard.budgets[shard.train[j]];
      switch (mode) {
        case TrainingMode::kRpdp:
          probs[i][j] = EstimateQ(*fit, eps).q;
          break;
        case TrainingMode::kMinimum:
          probs[i][j] = EstimateQ(*fit, min_eps).q;
          break;
        case TrainingMode::kDropout:
          probs[i][j] = eps < mean_eps ? 0.0 : EstimateQ(*fit, mean_eps).q;
          break;
        case TrainingMode::kPrivacyFree:
          break;
      }
    }
  }
  return probs;
}

namespace {

RunResult RunFederated(const RunConfig& config, const FederatedDataset& data,
                       TrainingMode mode, const RoundObserver& observer) {
  const MechanismParams& params = config.params;
  params.Validate();
  data.Validate();
  if (data.clients.empty()) throw DataError("dataset has no clients");
  if (config.eval_every < 1) throw ConfigError("eval_every must be >= 1");
  if (!(config.learning_rate > 0.0)) {
    throw ConfigError("learning_rate must be > 0");
  }
  const bool privacy_free = mode == TrainingMode::kPrivacyFree;
  const std::size_t n_clients = data.clients.size();

  std::vector<std::vector<double>> probs;
  if (mode == TrainingMode::kRpdp && !config.explicit_probs.empty()) {
    probs = config.explicit_probs;
    if (probs.size() != n_clients) {
      throw ConfigError("explicit probabilities must cover every client");
    }
    for (std::size_t i = 0; i < n_clients; ++i) {
      if (probs[i].size() != data.clients[i].train.size()) {
        throw ConfigError("explicit probabilities must cover every record");
      }
      for (double q : probs[i]) {
        if (!(q >= 0.0 && q <= 1.0)) {
          throw ConfigError("explicit probabilities must lie in [0, 1]");
        }
      }
    }
  } else {
    probs = AssignProbabilities(data, mode, config.fit);
  }

  // PrivacyFree keeps ledgers for reporting but never charges them.
  RunResult result;
  result.ledgers.reserve(n_clients);
  for (std::size_t i = 0; i < n_clients; ++i) {
    const ClientShard& shard = data.clients[i];
    std::vector<double> budgets(shard.train.size(),
                                std::numeric_limits<double>::infinity());
    if (!shard.budgets.empty()) {
      for (std::size_t j = 0; j < shard.train.size(); ++j) {
        budgets[j] = shard.budgets[shard.train[j]];
      }
    } else if (!privacy_free) {
      throw DataError("every record needs a privacy budget");
    }
    ClientLedger& ledger = result.ledgers.emplace_back(
        static_cast<int>(i), budgets, probs[i], params);
    for (std::size_t j = 0; j < probs[i].size(); ++j) {
      if (probs[i][j] == 0.0) ledger.Deactivate(j);
    }
  }

  LocalTrainingParams local;
  local.tau = params.tau;
  local.learning_rate = config.learning_rate;
  local.sigma = privacy_free ? 0.0 : params.sigma;
  local.clip =
      privacy_free ? std::numeric_limits<double>::infinity() : params.clip;

  result.model = Model::Zeros(data.num_features, data.num_classes);
  const std::size_t dim = result.model.dimension();
  std::vector<std::vector<bool>> masks(n_clients);
  for (std::size_t i = 0; i < n_clients; ++i) {
    masks[i].assign(data.clients[i].train.size(), true);
  }

  for (int t = 0; t < params.rounds; ++t) {
    RoundMetrics metrics;
    metrics.round = t + 1;
    RngStream client_stream =
        DeriveStream(config.seed, {"clients", "round", std::int64_t{t}});
    const std::vector<std::size_t> selected =
        PoissonSelectUniform(n_clients, params.client_prob, client_stream);
    for (std::size_t i : selected) {
      metrics.selected_clients.push_back(static_cast<int>(i));
    }

    if (!privacy_free) {
      if (params.threat == ThreatModel::kClientOrThirdParty) {
        for (std::size_t i = 0; i < n_clients; ++i) {
          masks[i] = result.ledgers[i].PrecheckRound();
        }
      } else {
        for (std::size_t i : selected) {
          masks[i] = result.ledgers[i].PrecheckRound();
        }
      }
    }
    metrics.active_records.resize(n_clients);
    for (std::size_t i = 0; i < n_clients; ++i) {
      metrics.active_records[i] = result.ledgers[i].ActiveCount();
    }

    std::vector<std::vector<double>> deltas(selected.size());
    internal::ParallelFor(selected.size(), config.threads, [&](std::size_t s) {
      const std::size_t i = selected[s];
      deltas[s] = LocalUpdate(result.model, data.clients[i], probs[i], masks[i],
                              local, {config.seed, static_cast<int>(i), t});
    });
    const std::vector<double> step = Aggregate(deltas, dim);
    std::vector<double>& w = result.model.mutable_weights();
    for (std::size_t k = 0; k < dim; ++k) w[k] += step[k];

    if (!privacy_free) {
      if (params.threat == ThreatModel::kClientOrThirdParty) {
        for (ClientLedger& ledger : result.ledgers) ledger.ChargeRound();
      } else {
        for (std::size_t i : selected) result.ledgers[i].ChargeRound();
      }
      for (const ClientLedger& ledger : result.ledgers) {
        ledger.VerifyCompliance();
      }
    }

    const bool last = t + 1 == params.rounds;
    if (last || (t + 1) % config.eval_every == 0) {
      metrics.evaluated = true;
      metrics.client_accuracy.resize(n_clients);
      internal::ParallelFor(n_clients, config.threads, [&](std::size_t i) {
        metrics.client_accuracy[i] = Evaluate(result.model, data.clients[i]);
      });
      metrics.mean_accuracy =
          std::accumulate(metrics.client_accuracy.begin(),
                          metrics.client_accuracy.end(), 0.0) /
          static_cast<double>(n_clients);
    }
    if (observer) observer(metrics, result.ledgers);
    result.rounds.push_back(std::move(metrics));
  }
  return result;
}

}  // namespace

RunResult RunRpdpFl(const RunConfig& config, const FederatedDataset& data,
                    const RoundObserver& observer) {
  return RunFederated(config, data, TrainingMode::kRpdp, observer);
}

RunResult RunBaseline(const RunConfig& config, const FederatedDataset& data,
                      TrainingMode mode, const RoundObserver& observer) {
  if (mode == TrainingMode::kRpdp) {
    throw ConfigError("rPDP is not a baseline; use RunRpdpFl");
  }
  return RunFederated(config, data, mode, observer);
}

}  // namespace rpdp
