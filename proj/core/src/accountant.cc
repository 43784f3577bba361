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

#include "rpdp/accountant.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "rpdp/errors.h"

namespace rpdp {
namespace {

// Above this exponent expm1 overflows; switch to the shifted form.
constexpr double kExpm1Limit = 700.0;

double LogSumExp(std::span<const double> terms) {
  double max_term = -std::numeric_limits<double>::infinity();
  for (double t : terms) max_term = std::max(max_term, t);
  if (!std::isfinite(max_term)) return max_term;
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - max_term);
  return max_term + std::log(sum);
}

void CheckAlpha(int alpha) {
  if (alpha < 2) {
    throw DomainError("Renyi order must be an integer >= 2, got " +
                      std::to_string(alpha));
  }
}

}  // namespace

std::vector<int> AlphaRange(int first, int last) {
  std::vector<int> orders;
  for (int a = first; a <= last; ++a) orders.push_back(a);
  return orders;
}

std::vector<int> DefaultAlphaGrid() { return AlphaRange(2, 64); }

RdpCurve::RdpCurve(std::vector<int> orders, std::vector<double> values)
    : orders_(std::move(orders)), values_(std::move(values)) {
  if (orders_.size() != values_.size()) {
    throw DomainError("RdpCurve: orders and values differ in length");
  }
  for (std::size_t i = 0; i < orders_.size(); ++i) {
    CheckAlpha(orders_[i]);
    if (i > 0 && orders_[i] <= orders_[i - 1]) {
      throw DomainError("RdpCurve: orders must be strictly increasing");
    }
    if (!std::isfinite(values_[i]) || values_[i] < 0.0) {
      throw DomainError("RdpCurve: value at order " +
                        std::to_string(orders_[i]) +
                        " is negative or non-finite");
    }
  }
}

RdpCurve RdpCurve::Zero(std::vector<int> orders) {
  std::vector<double> values(orders.size(), 0.0);
  return RdpCurve(std::move(orders), std::move(values));
}

bool RdpCurve::IsZero() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return v == 0.0; });
}

RdpCurve& RdpCurve::operator+=(const RdpCurve& other) {
  if (orders_ != other.orders_) {
    throw DomainError("RdpCurve: cannot add curves on different order grids");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    values_[i] += other.values_[i];
  }
  return *this;
}

std::string_view ThreatModelName(ThreatModel threat) {
  switch (threat) {
    case ThreatModel::kServer:
      return "server";
    case ThreatModel::kClientOrThirdParty:
      return "client";
  }
  return "unknown";
}

void MechanismParams::Validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DomainError("sigma must be > 0");
  }
  if (!(clip > 0.0)) throw DomainError("clip must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw DomainError("delta must lie in (0, 1)");
  }
  if (tau < 1) throw DomainError("tau must be >= 1");
  if (rounds < 1) throw DomainError("rounds must be >= 1");
  if (!(client_prob > 0.0 && client_prob <= 1.0)) {
    throw DomainError("client_prob must lie in (0, 1]");
  }
  if (alpha_grid.empty()) throw DomainError("alpha grid is empty");
  for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
    CheckAlpha(alpha_grid[i]);
    if (i > 0 && alpha_grid[i] <= alpha_grid[i - 1]) {
      throw DomainError("alpha grid must be strictly increasing");
    }
  }
}

double GaussianRdp(int alpha, double sigma, double clip) {
  CheckAlpha(alpha);
  if (!(sigma > 0.0)) throw DomainError("sigma must be > 0");
  if (!(clip > 0.0)) throw DomainError("clip must be > 0");
  return alpha * clip * clip / (2.0 * sigma * sigma);
}

double SubsampledGaussianRdp(int alpha, double q, double sigma) {
  CheckAlpha(alpha);
  if (!(q >= 0.0 && q <= 1.0)) {
    throw DomainError("sampling probability must lie in [0, 1]");
  }
  if (!(sigma > 0.0)) throw DomainError("sigma must be > 0");
  if (q == 0.0) return 0.0;
  if (q == 1.0) return GaussianRdp(alpha, sigma, 1.0);

  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  const double inv_two_var = 1.0 / (2.0 * sigma * sigma);

  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(alpha));
  // l = 0 and l = 1 folded together: (1-q)^(a-1) (1 + (a-1) q).
  terms.push_back((alpha - 1) * log_1mq + std::log1p((alpha - 1) * q));
  // ln C(a, l) accumulated incrementally; lgamma touches global signgam.
  double log_binom = std::log(static_cast<double>(alpha));
  for (int l = 2; l <= alpha; ++l) {
    log_binom += std::log(static_cast<double>(alpha - l + 1)) -
                 std::log(static_cast<double>(l));
    const double log_pair = static_cast<double>(l - 1) * l * inv_two_var;
    terms.push_back(log_binom + (alpha - l) * log_1mq + l * log_q + log_pair);
  }
  return std::max(0.0, LogSumExp(terms) / (alpha - 1));
}

RdpCurve SubsampledGaussianCurve(std::span<const int> orders, double q,
                                 double sigma) {
  std::vector<double> values;
  values.reserve(orders.size());
  for (int a : orders) values.push_back(SubsampledGaussianRdp(a, q, sigma));
  return RdpCurve(std::vector<int>(orders.begin(), orders.end()),
                  std::move(values));
}

RdpCurve ComposeRounds(const RdpCurve& curve, std::int64_t k) {
  if (k < 0) throw DomainError("composition count must be >= 0");
  std::vector<double> values = curve.values();
  for (double& v : values) v *= static_cast<double>(k);
  return RdpCurve(curve.orders(), std::move(values));
}

RdpCurve ClientAmplify(const RdpCurve& curve, double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw DomainError("client sampling probability must lie in (0, 1]");
  }
  if (lambda == 1.0) return curve;
  std::vector<double> values = curve.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double rho = values[i];
    if (rho == 0.0) continue;
    const double am1 = curve.orders()[i] - 1.0;
    const double x = am1 * rho;
    double amplified;
    if (x < kExpm1Limit) {
      amplified = std::log1p(lambda * std::expm1(x)) / am1;
    } else {
      amplified = (x + std::log(lambda + (1.0 - lambda) * std::exp(-x))) / am1;
    }
    values[i] = std::clamp(amplified, 0.0, rho);
  }
  return RdpCurve(curve.orders(), std::move(values));
}

std::vector<double> DpCurve(const RdpCurve& curve, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw DomainError("delta must lie in (0, 1)");
  }
  const double log_inv_delta = -std::log(delta);
  std::vector<double> eps(curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i) {
    eps[i] = curve.values()[i] + log_inv_delta / (curve.orders()[i] - 1);
  }
  return eps;
}

DpPoint RdpToDp(const RdpCurve& curve, double delta) {
  if (curve.empty()) throw DomainError("cannot convert an empty RDP curve");
  const std::vector<double> eps = DpCurve(curve, delta);
  DpPoint best{eps[0], curve.orders()[0]};
  for (std::size_t i = 1; i < eps.size(); ++i) {
    if (eps[i] < best.epsilon) best = {eps[i], curve.orders()[i]};
  }
  return best;
}

RdpCurve LocalStepsCurve(double q, const MechanismParams& params) {
  return ComposeRounds(
      SubsampledGaussianCurve(params.alpha_grid, q, params.sigma), params.tau);
}

std::int64_t ServerChargedRounds(const MechanismParams& params) {
  // The small offset absorbs products like 0.1 * 30 = 3.0000000000000004.
  return static_cast<std::int64_t>(
      std::ceil(params.client_prob * params.rounds - 1e-9));
}

RdpCurve FederatedCurve(double q, const MechanismParams& params) {
  params.Validate();
  const RdpCurve local = LocalStepsCurve(q, params);
  switch (params.threat) {
    case ThreatModel::kClientOrThirdParty:
      return ComposeRounds(ClientAmplify(local, params.client_prob),
                           params.rounds);
    case ThreatModel::kServer:
      return ComposeRounds(local, ServerChargedRounds(params));
  }
  throw DomainError("unknown threat model");
}

DpPoint FlEpsilon(double q, const MechanismParams& params) {
  return RdpToDp(FederatedCurve(q, params), params.delta);
}

}  // namespace rpdp
