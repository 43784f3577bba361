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

#include <gtest/gtest.h>

#include <sstream>
#include <vector>

#include "rpdp/errors.h"
#include "rpdp/scf.h"

namespace rpdp {
namespace {

MechanismParams Fig4Params(ThreatModel threat = ThreatModel::kServer) {
  MechanismParams p;
  p.sigma = 1.0;
  p.delta = 1e-3;
  p.tau = 5;
  p.rounds = 20;
  p.client_prob = 0.5;
  p.threat = threat;
  return p;
}

// Rounds that consume the record's static bound under each threat model.
int CalibratedRounds(const MechanismParams& p) {
  return p.threat == ThreatModel::kServer
             ? static_cast<int>(ServerChargedRounds(p))
             : p.rounds;
}

TEST(RoundIncrementTest, Examples) {
  for (ThreatModel t :
       {ThreatModel::kServer, ThreatModel::kClientOrThirdParty}) {
    EXPECT_TRUE(RoundIncrement(Fig4Params(t), 0.0).IsZero());
  }
  MechanismParams one = Fig4Params(ThreatModel::kServer);
  one.client_prob = 1.0;
  MechanismParams two = one;
  two.threat = ThreatModel::kClientOrThirdParty;
  EXPECT_EQ(RoundIncrement(one, 0.4), RoundIncrement(two, 0.4));

  const RdpCurve server = RoundIncrement(Fig4Params(ThreatModel::kServer), 0.5);
  const RdpCurve client =
      RoundIncrement(Fig4Params(ThreatModel::kClientOrThirdParty), 0.5);
  EXPECT_LT(client.values()[0], server.values()[0]);
  EXPECT_EQ(server, LocalStepsCurve(0.5, Fig4Params()));
}

TEST(SpentEpsilonTest, ZeroCurveSpendsNothing) {
  EXPECT_EQ(SpentEpsilon(RdpCurve::Zero(DefaultAlphaGrid()), 1e-3), 0.0);
  const RdpCurve c = LocalStepsCurve(0.3, Fig4Params());
  EXPECT_EQ(SpentEpsilon(c, 1e-3), RdpToDp(c, 1e-3).epsilon);
}

TEST(PrecheckTest, FreshRecordWithFittedProbabilityPasses) {
  for (ThreatModel t :
       {ThreatModel::kServer, ThreatModel::kClientOrThirdParty}) {
    const MechanismParams p = Fig4Params(t);
    const ExpFit fit = FitExponential(SimulateObservations(p, DefaultQGrid()));
    for (double eps : {1.0, 2.0, 5.0, 20.0}) {
      const double q = EstimateQ(fit, eps).q;
      RecordState s = MakeRecordState(eps, q, p.alpha_grid);
      EXPECT_TRUE(Precheck(s, RoundIncrement(p, q), p.delta)) << eps;
      EXPECT_TRUE(s.active);
    }
  }
}

TEST(PrecheckTest, ZeroProbabilityAlwaysPasses) {
  const MechanismParams p = Fig4Params();
  RecordState s = MakeRecordState(0.1, 0.0, p.alpha_grid);
  const RdpCurve inc = RoundIncrement(p, 0.0);
  for (int t = 0; t < 100; ++t) {
    ASSERT_TRUE(Precheck(s, inc, p.delta));
    s = Charge(s, inc, p.delta);
  }
  EXPECT_EQ(s.spent_eps, 0.0);
}

TEST(PrecheckTest, OverspendDeactivatesPermanently) {
  const MechanismParams p = Fig4Params();
  const double q = 0.3;
  const RdpCurve inc = RoundIncrement(p, q);
  const int rounds = CalibratedRounds(p);
  // Budget chosen so exactly `rounds` increments fit.
  const double budget = SpentEpsilon(ComposeRounds(inc, rounds), p.delta);
  RecordState s = MakeRecordState(budget, q, p.alpha_grid);
  for (int t = 0; t < rounds; ++t) {
    ASSERT_TRUE(Precheck(s, inc, p.delta)) << "round " << t;
    s = Charge(s, inc, p.delta);
  }
  EXPECT_FALSE(Precheck(s, inc, p.delta));
  EXPECT_FALSE(s.active);
  EXPECT_FALSE(Precheck(s, RdpCurve::Zero(p.alpha_grid), p.delta));
  EXPECT_LE(s.spent_eps, s.budget_eps);
}

TEST(ChargeTest, RequiresPrecheck) {
  const MechanismParams p = Fig4Params();
  RecordState s = MakeRecordState(10.0, 0.2, p.alpha_grid);
  const RdpCurve inc = RoundIncrement(p, 0.2);
  EXPECT_THROW(Charge(s, inc, p.delta), InvariantError);
  ASSERT_TRUE(Precheck(s, inc, p.delta));
  s = Charge(s, inc, p.delta);
  // The clearance is consumed by the charge.
  EXPECT_THROW(Charge(s, inc, p.delta), InvariantError);
}

TEST(ChargeTest, ZeroIncrementAndLinearity) {
  const MechanismParams p = Fig4Params();
  RecordState s = MakeRecordState(50.0, 0.2, p.alpha_grid);
  const RdpCurve inc = RoundIncrement(p, 0.2);
  ASSERT_TRUE(Precheck(s, inc, p.delta));
  s = Charge(s, inc, p.delta);
  const double before = s.spent_eps;
  ASSERT_TRUE(Precheck(s, RdpCurve::Zero(p.alpha_grid), p.delta));
  s = Charge(s, RdpCurve::Zero(p.alpha_grid), p.delta);
  EXPECT_EQ(s.spent_eps, before);

  for (int k = 2; k <= 6; ++k) {
    ASSERT_TRUE(Precheck(s, inc, p.delta));
    s = Charge(s, inc, p.delta);
    const RdpCurve want = ComposeRounds(inc, k);
    for (std::size_t i = 0; i < inc.size(); ++i) {
      EXPECT_NEAR(s.accumulated.values()[i], want.values()[i],
                  1e-12 * want.values()[i]);
    }
    EXPECT_EQ(s.spent_eps, RdpToDp(s.accumulated, p.delta).epsilon);
  }
}

TEST(ChargeTest, CalibratedRoundsStayWithinFitSlack) {
  for (ThreatModel t :
       {ThreatModel::kServer, ThreatModel::kClientOrThirdParty}) {
    const MechanismParams p = Fig4Params(t);
    const ExpFit fit = FitExponential(SimulateObservations(p, DefaultQGrid()));
    for (double eps : {1.0, 3.0, 8.0, 25.0}) {
      const double q = EstimateQ(fit, eps).q;
      const RdpCurve inc = RoundIncrement(p, q);
      const double spent =
          SpentEpsilon(ComposeRounds(inc, CalibratedRounds(p)), p.delta);
      EXPECT_LE(spent, 1.05 * eps) << ThreatModelName(t) << " eps=" << eps;
    }
  }
}

TEST(ClientLedgerTest, RoundTripAndCsv) {
  const MechanismParams p = Fig4Params();
  const std::vector<double> budgets{0.5, 100.0, 3.0};
  const std::vector<double> probs{0.0, 0.4, 0.4};
  ClientLedger ledger(7, budgets, probs, p);
  EXPECT_EQ(ledger.size(), 3u);
  EXPECT_EQ(ledger.ActiveCount(), 3u);
  double prev_spent = 0.0;
  for (int t = 0; t < 30; ++t) {
    const std::vector<bool> mask = ledger.PrecheckRound();
    EXPECT_TRUE(mask[0]);
    EXPECT_TRUE(mask[1]);
    ledger.ChargeRound();
    ledger.VerifyCompliance();
    EXPECT_GE(ledger.records()[2].spent_eps, prev_spent);
    prev_spent = ledger.records()[2].spent_eps;
  }
  EXPECT_FALSE(ledger.records()[2].active);
  EXPECT_EQ(ledger.ActiveCount(), 2u);
  ledger.Deactivate(0);
  EXPECT_FALSE(ledger.PrecheckRound()[0]);

  std::ostringstream csv;
  ClientLedger::WriteCsvHeader(csv);
  ledger.WriteCsvRows(csv);
  std::istringstream lines(csv.str());
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "client_id,record_id,budget_eps,q,spent_eps,active");
  std::getline(lines, line);
  EXPECT_EQ(line, "7,0,0.5,0,0,0");
  int rows = 1;
  while (std::getline(lines, line)) ++rows;
  EXPECT_EQ(rows, 3);
}

TEST(ClientLedgerTest, RejectsMismatchedInputs) {
  const MechanismParams p = Fig4Params();
  EXPECT_THROW(ClientLedger(0, std::vector<double>{1.0},
                            std::vector<double>{0.1, 0.2}, p),
               DomainError);
  EXPECT_THROW(
      ClientLedger(0, std::vector<double>{0.0}, std::vector<double>{0.1}, p),
      DomainError);
}

}  // namespace
}  // namespace rpdp
