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

// Numerical Renyi divergence between the mixture (1-q) N(0, s^2) + q N(1, s^2)
// and N(0, s^2), computed straight from the definition by quadrature. It is
// an independent check on the closed-form bound in accountant.h and is only
// linked by tests and benchmarks.

#ifndef RPDP_DIVERGENCE_ORACLE_H_
#define RPDP_DIVERGENCE_ORACLE_H_

namespace rpdp {

enum class Direction {
  kMixtureFromBase,  // D_a(P || Q), P the mixture
  kBaseFromMixture,  // D_a(Q || P)
};

struct QuadratureOptions {
  // Stop once two successive Simpson estimates agree to this relative
  // tolerance.
  double rel_tol = 1e-8;
  // Tails beyond this many standard deviations are dropped.
  double tail_sigmas = 20.0;
  int initial_intervals = 64;
  int max_doublings = 22;
};

double DirectedRenyiDivergence(int alpha, double q, double sigma,
                               Direction direction,
                               const QuadratureOptions& options = {});

// max of both directions. Throws rpdp::Error when the quadrature does not
// converge within options.max_doublings.
double DivergenceOracle(int alpha, double q, double sigma,
                        const QuadratureOptions& options = {});

}  // namespace rpdp

#endif  // RPDP_DIVERGENCE_ORACLE_H_
