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

// Simulation + curve fitting for per-record sampling probabilities.
//
// The accountant maps a sampling probability q to the final epsilon of a
// record. That map has no closed-form inverse, so we simulate it on a q grid,
// fit eps(q) ~= exp(a q + b) + c, and invert the fitted model. One fit then
// answers any number of budget queries in constant time. BinarySearchQ is the
// direct numerical inversion, kept as a comparator.

#ifndef RPDP_SCF_H_
#define RPDP_SCF_H_

#include <iosfwd>
#include <span>
#include <vector>

#include "rpdp/accountant.h"

namespace rpdp {

struct Observation {
  double q = 0.0;
  double eps_star = 0.0;
  int alpha_star = 0;
};

struct ExpFit {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double r_squared = 0.0;
  double eps_full = 0.0;  // simulated eps at q = 1
  double q_floor = 0.0;   // smallest grid probability in the fit

  double Evaluate(double q) const;
};

// 50 geometric points in [1e-3, 0.1) followed by 50 linear points in
// [0.1, 1.0]; 100 points, ends at exactly 1.0.
std::vector<double> DefaultQGrid();

// One observation per grid point. The grid must be non-empty, strictly
// increasing, inside (0, 1] and end at 1.0. `threads` > 1 evaluates grid
// points concurrently; the result does not depend on it.
std::vector<Observation> SimulateObservations(const MechanismParams& params,
                                              std::span<const double> q_grid,
                                              int threads = 1);

struct FitOptions {
  // Candidates for c, evenly spaced in [0, min eps).
  int offset_candidates = 200;
  int max_iterations = 200;
  double rel_tol = 1e-9;
};

// Least-squares fit of exp(a q + b) + c. Seeds (a, b, c) with the best
// log-linear regression over a grid of c values, then refines all three with
// damped Gauss-Newton. Requires >= 4 observations with strictly increasing
// q and eps_star; the last observation must be at q = 1. Throws FitError.
ExpFit FitExponential(std::span<const Observation> obs,
                      const FitOptions& options = {});

// 1 - SS_res / SS_tot. Throws FitError when all eps_star are equal.
double RSquared(std::span<const Observation> obs, const ExpFit& fit);

struct QEstimate {
  double q = 0.0;
  // Budget below the fitted range; the record must never be sampled.
  bool never_sampled = false;
};

// Inverse of the fitted model, projected to 1.0 above eps_full and clamped to
// [q_floor, 1]. Budgets at or below fit(q_floor) map to q = 0.
QEstimate EstimateQ(const ExpFit& fit, double eps);

struct BinarySearchOptions {
  double q_floor = 1e-3;
  double tol = 1e-4;
};

// Largest q (to within tol) on [q_floor, 1] whose FlEpsilon stays <= eps.
// Throws DomainError if eps < FlEpsilon(q_floor).
double BinarySearchQ(double eps, const MechanismParams& params,
                     const BinarySearchOptions& options = {});

// `q,eps_star` with a header row.
void WriteObservationsCsv(std::ostream& out, std::span<const Observation> obs);
// {"a":..,"b":..,"c":..,"r_squared":..,"eps_full":..,"q_floor":..}
void WriteFitJson(std::ostream& out, const ExpFit& fit);

}  // namespace rpdp

#endif  // RPDP_SCF_H_
