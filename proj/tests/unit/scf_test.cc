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

#include "rpdp/scf.h"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "rpdp/errors.h"

namespace rpdp {
namespace {

MechanismParams Fig4Params() {
  MechanismParams p;
  p.sigma = 1.0;
  p.delta = 1e-3;
  p.tau = 5;
  p.rounds = 20;
  p.client_prob = 0.5;
  return p;
}

std::vector<Observation> ExactModel(double a, double b, double c, int n) {
  std::vector<Observation> obs;
  for (int i = 1; i <= n; ++i) {
    const double q = static_cast<double>(i) / n;
    obs.push_back({q, std::exp(a * q + b) + c, 0});
  }
  return obs;
}

TEST(QGridTest, DefaultShape) {
  const std::vector<double> grid = DefaultQGrid();
  ASSERT_EQ(grid.size(), 100u);
  EXPECT_DOUBLE_EQ(grid.front(), 1e-3);
  EXPECT_EQ(grid.back(), 1.0);
  EXPECT_EQ(grid[50], 0.1);
  for (std::size_t i = 1; i < grid.size(); ++i) EXPECT_GT(grid[i], grid[i - 1]);
  // Geometric half has a constant ratio.
  for (std::size_t i = 2; i < 50; ++i) {
    EXPECT_NEAR(grid[i] / grid[i - 1], grid[1] / grid[0], 1e-12);
  }
}

TEST(SimulateObservationsTest, Fig4GridIsStrictlyIncreasing) {
  const std::vector<Observation> obs =
      SimulateObservations(Fig4Params(), DefaultQGrid());
  ASSERT_EQ(obs.size(), 100u);
  for (std::size_t i = 1; i < obs.size(); ++i) {
    EXPECT_GT(obs[i].eps_star, obs[i - 1].eps_star);
  }
  for (const Observation& o : obs) {
    EXPECT_EQ(o.eps_star, FlEpsilon(o.q, Fig4Params()).epsilon);
  }
}

TEST(SimulateObservationsTest, EndpointOnly) {
  const std::vector<double> grid{1.0};
  const std::vector<Observation> obs = SimulateObservations(Fig4Params(), grid);
  ASSERT_EQ(obs.size(), 1u);
  EXPECT_EQ(obs[0].eps_star, FlEpsilon(1.0, Fig4Params()).epsilon);
}

TEST(SimulateObservationsTest, RejectsBadGrids) {
  const MechanismParams p = Fig4Params();
  EXPECT_THROW(SimulateObservations(p, std::vector<double>{}), DomainError);
  EXPECT_THROW(SimulateObservations(p, std::vector<double>{0.2, 0.5}),
               DomainError);
  EXPECT_THROW(SimulateObservations(p, std::vector<double>{0.5, 0.5, 1.0}),
               DomainError);
  EXPECT_THROW(SimulateObservations(p, std::vector<double>{0.0, 1.0}),
               DomainError);
}

TEST(SimulateObservationsTest, ThreadCountDoesNotMatter) {
  const std::vector<Observation> a =
      SimulateObservations(Fig4Params(), DefaultQGrid(), 1);
  const std::vector<Observation> b =
      SimulateObservations(Fig4Params(), DefaultQGrid(), 4);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].eps_star, b[i].eps_star);
    EXPECT_EQ(a[i].alpha_star, b[i].alpha_star);
  }
}

TEST(FitExponentialTest, RecoversGeneratingModel) {
  const ExpFit fit = FitExponential(ExactModel(2.0, 0.5, 0.1, 50));
  EXPECT_NEAR(fit.a, 2.0, 1e-6);
  EXPECT_NEAR(fit.b, 0.5, 1e-6);
  EXPECT_NEAR(fit.c, 0.1, 1e-6);
  EXPECT_GE(fit.r_squared, 1.0 - 1e-9);
  EXPECT_EQ(fit.q_floor, 0.02);
  EXPECT_EQ(fit.eps_full, std::exp(2.5) + 0.1);
}

TEST(FitExponentialTest, Fig4FitQuality) {
  const ExpFit fit =
      FitExponential(SimulateObservations(Fig4Params(), DefaultQGrid()));
  EXPECT_GE(fit.r_squared, 0.99);
  EXPECT_GT(fit.a, 0.0);
  EXPECT_GT(std::exp(fit.b) + fit.c, 0.0);
  EXPECT_EQ(fit.eps_full, FlEpsilon(1.0, Fig4Params()).epsilon);
}

TEST(FitExponentialTest, RejectsBadObservations) {
  std::vector<Observation> obs = ExactModel(2.0, 0.5, 0.1, 3);
  EXPECT_THROW(FitExponential(obs), FitError);
  obs = ExactModel(2.0, 0.5, 0.1, 10);
  std::swap(obs[2], obs[3]);
  EXPECT_THROW(FitExponential(obs), FitError);
  obs = ExactModel(2.0, 0.5, 0.1, 10);
  obs.pop_back();
  EXPECT_THROW(FitExponential(obs), FitError);
  // Decreasing in q.
  obs = ExactModel(-2.0, 0.5, 0.1, 10);
  EXPECT_THROW(FitExponential(obs), FitError);
}

TEST(RSquaredTest, Definition) {
  const std::vector<Observation> obs = ExactModel(1.0, 0.0, 0.0, 20);
  ExpFit perfect{1.0, 0.0, 0.0, 0.0, 0.0, 0.05};
  EXPECT_DOUBLE_EQ(RSquared(obs, perfect), 1.0);

  double mean = 0.0;
  for (const Observation& o : obs) mean += o.eps_star;
  mean /= obs.size();
  // a = 0 makes the model the constant e^b + c.
  ExpFit flat{0.0, 0.0, mean - 1.0, 0.0, 0.0, 0.05};
  EXPECT_NEAR(RSquared(obs, flat), 0.0, 1e-12);

  const std::vector<Observation> constant{{0.5, 1.0, 0}, {1.0, 1.0, 0}};
  EXPECT_THROW(RSquared(constant, perfect), FitError);
}

TEST(EstimateQTest, Examples) {
  const ExpFit fit = FitExponential(ExactModel(2.0, 0.5, 0.1, 50));
  EXPECT_EQ(EstimateQ(fit, 2.0 * fit.eps_full).q, 1.0);
  EXPECT_FALSE(EstimateQ(fit, 2.0 * fit.eps_full).never_sampled);
  const QEstimate mid = EstimateQ(fit, std::exp(2.0 * 0.3 + 0.5) + 0.1);
  EXPECT_NEAR(mid.q, 0.3, 1e-6);
  EXPECT_FALSE(mid.never_sampled);
  const QEstimate low = EstimateQ(fit, fit.c);
  EXPECT_EQ(low.q, 0.0);
  EXPECT_TRUE(low.never_sampled);
  EXPECT_THROW(EstimateQ(fit, 0.0), DomainError);
}

TEST(EstimateQTest, NondecreasingInBudget) {
  const ExpFit fit =
      FitExponential(SimulateObservations(Fig4Params(), DefaultQGrid()));
  double prev = 0.0;
  for (double eps = 0.01; eps < 1.5 * fit.eps_full; eps *= 1.01) {
    const double q = EstimateQ(fit, eps).q;
    EXPECT_GE(q, prev);
    EXPECT_GE(q, 0.0);
    EXPECT_LE(q, 1.0);
    prev = q;
  }
}

TEST(BinarySearchQTest, Examples) {
  const MechanismParams p = Fig4Params();
  const double eps = FlEpsilon(0.5, p).epsilon;
  EXPECT_NEAR(BinarySearchQ(eps, p, {1e-3, 1e-4}), 0.5, 1e-4);
  EXPECT_EQ(BinarySearchQ(FlEpsilon(1.0, p).epsilon, p), 1.0);
  EXPECT_EQ(BinarySearchQ(1e6, p), 1.0);
  BinarySearchOptions options;
  options.q_floor = 1e-4;
  EXPECT_THROW(BinarySearchQ(FlEpsilon(1e-4, p).epsilon * 0.5, p, options),
               DomainError);
}

TEST(BinarySearchQTest, BracketsTheBudget) {
  const MechanismParams p = Fig4Params();
  const BinarySearchOptions options;
  for (double eps : {1.0, 3.0, 10.0, 30.0}) {
    const double q = BinarySearchQ(eps, p, options);
    EXPECT_LE(FlEpsilon(q, p).epsilon, eps);
    EXPECT_GT(FlEpsilon(std::min(1.0, q + options.tol), p).epsilon, eps);
  }
}

TEST(ScfRoundTripTest, FittedProbabilitiesStayNearBudget) {
  // The exponential family cannot trace the curve exactly; at least 99% of
  // budgets across the fitted range must land within 5% after the inverse.
  const MechanismParams p = Fig4Params();
  const ExpFit fit = FitExponential(SimulateObservations(p, DefaultQGrid()));
  const double lo = fit.Evaluate(fit.q_floor);
  const int n = 1000;
  int within = 0;
  for (int i = 0; i < n; ++i) {
    const double eps = lo * std::pow(fit.eps_full / lo, (i + 0.5) / n);
    const QEstimate est = EstimateQ(fit, eps);
    const double realized = FlEpsilon(est.q, p).epsilon;
    if (est.never_sampled || realized <= 1.05 * eps) ++within;
  }
  EXPECT_GE(within, 990) << "only " << within << " of " << n
                         << " budgets within 5%";
}

TEST(EstimatorAgreementTest, MatchesBinarySearch) {
  const MechanismParams p = Fig4Params();
  const ExpFit fit = FitExponential(SimulateObservations(p, DefaultQGrid()));
  const double lo =
      std::max(fit.Evaluate(fit.q_floor), FlEpsilon(fit.q_floor, p).epsilon);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double eps = lo + (fit.eps_full - lo) * i / 49.0;
    const double diff =
        std::abs(EstimateQ(fit, eps).q - BinarySearchQ(eps, p, {1e-3, 1e-4}));
    worst = std::max(worst, diff);
  }
  EXPECT_LE(worst, 0.02);
}

TEST(ScfExportTest, CsvAndJson) {
  const std::vector<Observation> obs = ExactModel(2.0, 0.5, 0.1, 4);
  std::ostringstream csv;
  WriteObservationsCsv(csv, obs);
  EXPECT_EQ(csv.str().substr(0, 11), "q,eps_star\n");
  EXPECT_NE(csv.str().find("0.25,"), std::string::npos);
  std::ostringstream json;
  WriteFitJson(json, ExpFit{1.5, -2.0, 0.25, 0.5, 3.0, 0.001});
  EXPECT_EQ(json.str(),
            "{\"a\":1.5,\"b\":-2,\"c\":0.25,\"r_squared\":0.5,"
            "\"eps_full\":3,\"q_floor\":0.001}\n");
}

}  // namespace
}  // namespace rpdp
