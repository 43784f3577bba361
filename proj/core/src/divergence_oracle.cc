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

#include "rpdp/divergence_oracle.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rpdp/errors.h"

namespace rpdp {
namespace {

double LogAddExp(double a, double b) {
  if (a == -INFINITY) return b;
  if (b == -INFINITY) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace

double DirectedRenyiDivergence(int alpha, double q, double sigma,
                               Direction direction,
                               const QuadratureOptions& options) {
  if (alpha < 2) throw DomainError("Renyi order must be >= 2");
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("q must lie in [0, 1]");
  if (!(sigma > 0.0)) throw DomainError("sigma must be > 0");

  const double var2 = 2.0 * sigma * sigma;
  const double log_norm = -std::log(sigma * std::sqrt(2.0 * std::numbers::pi));
  const double log_q = q > 0.0 ? std::log(q) : -INFINITY;
  const double log_1mq = q < 1.0 ? std::log1p(-q) : -INFINITY;
  // Exponent multiplying log(P/Q) in the integrand, relative to Q.
  const double power =
      direction == Direction::kMixtureFromBase ? alpha : 1.0 - alpha;

  auto integrand = [&](double x) {
    const double log_base = -x * x / var2 + log_norm;
    const double log_ratio = LogAddExp(log_1mq, log_q + (2.0 * x - 1.0) / var2);
    return std::exp(log_base + power * log_ratio);
  };

  // The heaviest term of (P/Q)^a Q is a Gaussian centred at x = alpha, so the
  // upper limit has to follow alpha, not just the mixture mean.
  const double lo = -options.tail_sigmas * sigma;
  const double hi =
      std::max(1.0, static_cast<double>(alpha)) + options.tail_sigmas * sigma;

  // Simpson estimates from successive trapezoid refinements.
  long n = options.initial_intervals;
  double h = (hi - lo) / n;
  double edge_sum = 0.5 * (integrand(lo) + integrand(hi));
  double interior = 0.0;
  for (long i = 1; i < n; ++i) interior += integrand(lo + i * h);
  double trapezoid = h * (edge_sum + interior);
  double simpson = NAN;

  for (int d = 0; d < options.max_doublings; ++d) {
    double midpoints = 0.0;
    for (long i = 0; i < n; ++i) midpoints += integrand(lo + (i + 0.5) * h);
    interior += midpoints;
    n *= 2;
    h *= 0.5;
    const double refined = h * (edge_sum + interior);
    const double next = (4.0 * refined - trapezoid) / 3.0;
    trapezoid = refined;
    if (std::isfinite(simpson) &&
        std::abs(next - simpson) < options.rel_tol * std::abs(next)) {
      return std::max(0.0, std::log(next) / (alpha - 1));
    }
    simpson = next;
  }
  throw Error("divergence quadrature did not converge for alpha=" +
              std::to_string(alpha) + " q=" + std::to_string(q) +
              " sigma=" + std::to_string(sigma));
}

double DivergenceOracle(int alpha, double q, double sigma,
                        const QuadratureOptions& options) {
  return std::max(DirectedRenyiDivergence(alpha, q, sigma,
                                          Direction::kMixtureFromBase, options),
                  DirectedRenyiDivergence(
                      alpha, q, sigma, Direction::kBaseFromMixture, options));
}

}  // namespace rpdp
