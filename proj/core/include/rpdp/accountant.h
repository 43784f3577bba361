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

// Renyi-DP accounting for the Poisson-subsampled Gaussian mechanism inside a
// two-stage (client, record) sampled federated training loop.
//
// All functions are pure and thread-safe. Costs are in nats.

#ifndef RPDP_ACCOUNTANT_H_
#define RPDP_ACCOUNTANT_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace rpdp {

// Integer orders {first, ..., last}.
std::vector<int> AlphaRange(int first, int last);

// The default order grid {2, ..., 64}.
std::vector<int> DefaultAlphaGrid();

// RDP cost as a function of the Renyi order, sampled on an integer grid.
class RdpCurve {
 public:
  RdpCurve() = default;
  // Throws DomainError unless orders are strictly increasing integers >= 2
  // and every value is finite and non-negative.
  RdpCurve(std::vector<int> orders, std::vector<double> values);

  // All-zero curve on `orders`.
  static RdpCurve Zero(std::vector<int> orders);

  const std::vector<int>& orders() const { return orders_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return orders_.size(); }
  bool empty() const { return orders_.empty(); }
  bool IsZero() const;

  // Pointwise sum; throws DomainError when the order grids differ.
  RdpCurve& operator+=(const RdpCurve& other);
  friend RdpCurve operator+(RdpCurve lhs, const RdpCurve& rhs) {
    lhs += rhs;
    return lhs;
  }
  friend bool operator==(const RdpCurve&, const RdpCurve&) = default;

 private:
  std::vector<int> orders_;
  std::vector<double> values_;
};

enum class ThreatModel {
  // Type I: honest-but-curious server that observes local updates.
  kServer,
  // Type II: untrusted clients or third parties that observe global models.
  kClientOrThirdParty,
};

std::string_view ThreatModelName(ThreatModel threat);

struct MechanismParams {
  double sigma = 1.0;  // noise multiplier
  double clip = 1.0;   // per-example l2 clipping bound L
  double delta = 1e-3;
  int tau = 5;               // local steps per round
  int rounds = 20;           // global rounds T
  double client_prob = 0.5;  // client sampling probability lambda
  std::vector<int> alpha_grid = DefaultAlphaGrid();
  ThreatModel threat = ThreatModel::kServer;

  // Throws DomainError on any out-of-range field.
  void Validate() const;
};

struct DpPoint {
  double epsilon = 0.0;
  int alpha_star = 0;
};

// alpha * clip^2 / (2 sigma^2).
double GaussianRdp(int alpha, double sigma, double clip);

// Upper bound on the order-`alpha` RDP of one Poisson-subsampled Gaussian
// step with unit sensitivity. Evaluated in log space so it stays finite for
// large orders. Exactly 0 at q = 0 and exactly GaussianRdp at q = 1.
double SubsampledGaussianRdp(int alpha, double q, double sigma);

// Per-order SubsampledGaussianRdp on `orders`.
RdpCurve SubsampledGaussianCurve(std::span<const int> orders, double q,
                                 double sigma);

// k-fold composition: every value times k.
RdpCurve ComposeRounds(const RdpCurve& curve, std::int64_t k);

// Amplification by uniform client sampling with probability lambda:
// (1/(a-1)) * ln(1 - lambda + lambda * exp((a-1) * rho)) per order.
RdpCurve ClientAmplify(const RdpCurve& curve, double lambda);

// Tightest (epsilon, delta)-DP over the order grid; ties go to the smaller
// order.
DpPoint RdpToDp(const RdpCurve& curve, double delta);

// Per-order epsilon before minimization: rho + ln(1/delta)/(alpha - 1).
std::vector<double> DpCurve(const RdpCurve& curve, double delta);

// Cost of one round of `local_steps` subsampled Gaussian steps for a record
// with sampling probability q (before client-level handling).
RdpCurve LocalStepsCurve(double q, const MechanismParams& params);

// Number of composed rounds charged by the static Type I bound:
// ceil(lambda * T).
std::int64_t ServerChargedRounds(const MechanismParams& params);

// RDP curve of the whole training run for one record with probability q.
RdpCurve FederatedCurve(double q, const MechanismParams& params);

// Epsilon a record with sampling probability q ends with after a full run.
DpPoint FlEpsilon(double q, const MechanismParams& params);

}  // namespace rpdp

#endif  // RPDP_ACCOUNTANT_H_
