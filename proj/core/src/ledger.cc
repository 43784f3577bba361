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

#include "rpdp/ledger.h"

#include <map>
#include <ostream>
#include <string>
#include <utility>

#include "rpdp/csv_util.h"
#include "rpdp/errors.h"

namespace rpdp {

RecordState MakeRecordState(double budget_eps, double q,
                            const std::vector<int>& alpha_grid) {
  if (!(budget_eps > 0.0)) throw DomainError("privacy budget must be > 0");
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("q must lie in [0, 1]");
  RecordState state;
  state.budget_eps = budget_eps;
  state.q = q;
  state.accumulated = RdpCurve::Zero(alpha_grid);
  return state;
}

double SpentEpsilon(const RdpCurve& accumulated, double delta) {
  if (accumulated.IsZero()) return 0.0;
  return RdpToDp(accumulated, delta).epsilon;
}

RdpCurve RoundIncrement(const MechanismParams& params, double q) {
  params.Validate();
  RdpCurve local = LocalStepsCurve(q, params);
  if (params.threat == ThreatModel::kClientOrThirdParty) {
    return ClientAmplify(local, params.client_prob);
  }
  return local;
}

bool Precheck(RecordState& state, const RdpCurve& increment, double delta) {
  state.cleared = false;
  if (!state.active) return false;
  if (SpentEpsilon(state.accumulated + increment, delta) <= state.budget_eps) {
    state.cleared = true;
    return true;
  }
  state.active = false;
  return false;
}

RecordState Charge(RecordState state, const RdpCurve& increment, double delta) {
  if (!state.cleared) {
    throw InvariantError("charge without a passing precheck");
  }
  state.accumulated += increment;
  state.spent_eps = SpentEpsilon(state.accumulated, delta);
  state.cleared = false;
  return state;
}

ClientLedger::ClientLedger(int client_id, std::span<const double> budgets,
                           std::span<const double> probs,
                           const MechanismParams& params)
    : client_id_(client_id), delta_(params.delta) {
  if (budgets.size() != probs.size()) {
    throw DomainError("ledger: budgets and probabilities differ in length");
  }
  params.Validate();
  std::map<double, std::size_t> by_q;
  records_.reserve(budgets.size());
  increment_index_.reserve(budgets.size());
  for (std::size_t j = 0; j < budgets.size(); ++j) {
    records_.push_back(
        MakeRecordState(budgets[j], probs[j], params.alpha_grid));
    auto [it, inserted] = by_q.try_emplace(probs[j], increments_.size());
    if (inserted) increments_.push_back(RoundIncrement(params, probs[j]));
    increment_index_.push_back(it->second);
  }
}

std::vector<bool> ClientLedger::PrecheckRound() {
  std::vector<bool> mask(records_.size());
  for (std::size_t j = 0; j < records_.size(); ++j) {
    mask[j] = Precheck(records_[j], increments_[increment_index_[j]], delta_);
  }
  return mask;
}

void ClientLedger::ChargeRound() {
  for (std::size_t j = 0; j < records_.size(); ++j) {
    if (!records_[j].cleared) continue;
    records_[j] = Charge(std::move(records_[j]),
                         increments_[increment_index_[j]], delta_);
  }
}

void ClientLedger::Deactivate(std::size_t record) {
  records_.at(record).active = false;
  records_[record].cleared = false;
}

std::size_t ClientLedger::ActiveCount() const {
  std::size_t n = 0;
  for (const RecordState& r : records_) n += r.active ? 1 : 0;
  return n;
}

void ClientLedger::VerifyCompliance() const {
  for (std::size_t j = 0; j < records_.size(); ++j) {
    const RecordState& r = records_[j];
    if (r.spent_eps > r.budget_eps) {
      throw InvariantError("client " + std::to_string(client_id_) + " record " +
                           std::to_string(j) + " spent " +
                           FormatDouble(r.spent_eps) + " > budget " +
                           FormatDouble(r.budget_eps));
    }
  }
}

void ClientLedger::WriteCsvHeader(std::ostream& out) {
  out << "client_id,record_id,budget_eps,q,spent_eps,active\n";
}

void ClientLedger::WriteCsvRows(std::ostream& out) const {
  for (std::size_t j = 0; j < records_.size(); ++j) {
    const RecordState& r = records_[j];
    out << client_id_ << ',' << j << ',' << FormatDouble(r.budget_eps) << ','
        << FormatDouble(r.q) << ',' << FormatDouble(r.spent_eps) << ','
        << (r.active ? 1 : 0) << '\n';
  }
}

}  // namespace rpdp
