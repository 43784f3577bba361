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

// Per-record privacy budget accounting.
//
// Spending is tracked in RDP space (per order) and converted to epsilon only
// for checks and reports. Each round a record is first pre-checked: if the
// round's increment would push its converted epsilon above its budget, the
// record is deactivated for the rest of training. Otherwise it is cleared to
// participate and charged when the round ends.

#ifndef RPDP_LEDGER_H_
#define RPDP_LEDGER_H_

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "rpdp/accountant.h"

namespace rpdp {

struct RecordState {
  double budget_eps = 0.0;
  double q = 0.0;
  RdpCurve accumulated;
  bool active = true;
  double spent_eps = 0.0;
  // Set by a passing Precheck, consumed by Charge.
  bool cleared = false;
};

RecordState MakeRecordState(double budget_eps, double q,
                            const std::vector<int>& alpha_grid);

// Converted epsilon of an accumulated curve. A record whose curve is zero at
// every order has released nothing and reports 0.
double SpentEpsilon(const RdpCurve& accumulated, double delta);

// Cost charged per round. Type II: client-amplified tau-step cost, charged
// every round. Type I: the raw tau-step cost, charged only on rounds where the
// record's client was selected.
RdpCurve RoundIncrement(const MechanismParams& params, double q);

// True iff the record is active and accumulated + increment still converts
// to at most budget_eps. A failure deactivates the record permanently.
bool Precheck(RecordState& state, const RdpCurve& increment, double delta);

// accumulated += increment. Throws InvariantError unless Precheck passed for
// this round.
RecordState Charge(RecordState state, const RdpCurve& increment, double delta);

// All records held by one client.
class ClientLedger {
 public:
  ClientLedger(int client_id, std::span<const double> budgets,
               std::span<const double> probs, const MechanismParams& params);

  int client_id() const { return client_id_; }
  std::size_t size() const { return records_.size(); }
  const std::vector<RecordState>& records() const { return records_; }

  // Prechecks every record; returns the per-record participation mask.
  std::vector<bool> PrecheckRound();
  // Charges every record cleared by the last PrecheckRound.
  void ChargeRound();
  // Permanently excludes a record (e.g. dropped by a baseline policy).
  void Deactivate(std::size_t record);

  std::size_t ActiveCount() const;
  // Throws InvariantError if any record has spent more than its budget.
  void VerifyCompliance() const;

  static void WriteCsvHeader(std::ostream& out);
  void WriteCsvRows(std::ostream& out) const;

 private:
  int client_id_;
  double delta_;
  std::vector<RecordState> records_;
  // Index into increments_ per record; records with equal q share a curve.
  std::vector<std::size_t> increment_index_;
  std::vector<RdpCurve> increments_;
};

}  // namespace rpdp

#endif  // RPDP_LEDGER_H_
