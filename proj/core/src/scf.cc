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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "parallel.h"
#include "rpdp/csv_util.h"
#include "rpdp/errors.h"

namespace rpdp {
namespace {

struct Params3 {
  double a, b, c;
};

double SumSquaredResiduals(std::span<const Observation> obs, const Params3& p) {
  double ssr = 0.0;
  for (const Observation& o : obs) {
    const double r = std::exp(p.a * o.q + p.b) + p.c - o.eps_star;
    ssr += r * r;
  }
  return ssr;
}

// Ordinary least squares of ln(eps - c) on q. Returns false when some
// eps <= c.
bool LogLinearSeed(std::span<const Observation> obs, double c, Params3& out) {
  const double n = static_cast<double>(obs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const Observation& o : obs) {
    const double rest = o.eps_star - c;
    if (!(rest > 0.0)) return false;
    const double y = std::log(rest);
    sx += o.q;
    sy += y;
    sxx += o.q * o.q;
    sxy += o.q * y;
  }
  const double denom = n * sxx - sx * sx;
  if (!(std::abs(denom) > 0.0)) return false;
  out.a = (n * sxy - sx * sy) / denom;
  out.b = (sy - out.a * sx) / n;
  out.c = c;
  return std::isfinite(out.a) && std::isfinite(out.b);
}

void ValidateObservations(std::span<const Observation> obs) {
  if (obs.size() < 4) {
    throw FitError("curve fit needs at least 4 observations, got " +
                   std::to_string(obs.size()));
  }
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const Observation& o = obs[i];
    if (!(o.q > 0.0 && o.q <= 1.0) || !std::isfinite(o.eps_star) ||
        !(o.eps_star > 0.0)) {
      throw FitError("observation " + std::to_string(i) +
                     " is outside q in (0,1], eps > 0");
    }
    if (i > 0 && (o.q <= obs[i - 1].q || o.eps_star <= obs[i - 1].eps_star)) {
      throw FitError(
          "observations must be strictly increasing in q and eps_star");
    }
  }
  if (obs.back().q != 1.0) {
    throw FitError("observations must end at q = 1.0");
  }
}

}  // namespace

double ExpFit::Evaluate(double q) const { return std::exp(a * q + b) + c; }

std::vector<double> DefaultQGrid() {
  std::vector<double> grid;
  grid.reserve(100);
  const double lo = 1e-3, hi = 0.1;
  for (int i = 0; i < 50; ++i) {
    grid.push_back(lo * std::pow(hi / lo, i / 50.0));
  }
  for (int i = 0; i < 50; ++i) {
    grid.push_back(i == 49 ? 1.0 : 0.1 + i * (0.9 / 49.0));
  }
  return grid;
}

std::vector<Observation> SimulateObservations(const MechanismParams& params,
                                              std::span<const double> q_grid,
                                              int threads) {
  params.Validate();
  if (q_grid.empty()) throw DomainError("q grid is empty");
  for (std::size_t i = 0; i < q_grid.size(); ++i) {
    if (!(q_grid[i] > 0.0 && q_grid[i] <= 1.0)) {
      throw DomainError("q grid values must lie in (0, 1]");
    }
    if (i > 0 && q_grid[i] <= q_grid[i - 1]) {
      throw DomainError(
          "q grid must be strictly increasing without duplicates");
    }
  }
  if (q_grid.back() != 1.0) {
    throw DomainError("q grid must include the endpoint 1.0");
  }

  std::vector<Observation> obs(q_grid.size());
  internal::ParallelFor(q_grid.size(), threads, [&](std::size_t i) {
    const DpPoint point = FlEpsilon(q_grid[i], params);
    obs[i] = {q_grid[i], point.epsilon, point.alpha_star};
  });
  for (std::size_t i = 1; i < obs.size(); ++i) {
    if (!(obs[i].eps_star > obs[i - 1].eps_star)) {
      throw InvariantError("simulated eps* is not strictly increasing at q=" +
                           FormatDouble(obs[i].q));
    }
  }
  return obs;
}

ExpFit FitExponential(std::span<const Observation> obs,
                      const FitOptions& options) {
  ValidateObservations(obs);

  const double eps_min = obs.front().eps_star;
  Params3 best{};
  double best_ssr = std::numeric_limits<double>::infinity();
  for (int k = 0; k < options.offset_candidates; ++k) {
    const double c = eps_min * k / options.offset_candidates;
    Params3 seed{};
    if (!LogLinearSeed(obs, c, seed)) continue;
    const double ssr = SumSquaredResiduals(obs, seed);
    if (std::isfinite(ssr) && ssr < best_ssr) {
      best_ssr = ssr;
      best = seed;
    }
  }
  if (!std::isfinite(best_ssr)) {
    throw FitError("ln(eps - c) is undefined for every offset candidate");
  }

  // Levenberg-Marquardt on (a, b, c).
  Params3 p = best;
  double ssr = best_ssr;
  double damping = 1e-3;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
    Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
    for (const Observation& o : obs) {
      const double e = std::exp(p.a * o.q + p.b);
      const Eigen::Vector3d row(o.q * e, e, 1.0);
      const double r = e + p.c - o.eps_star;
      jtj += row * row.transpose();
      jtr += row * r;
    }
    Eigen::Vector3d step;
    Params3 candidate{};
    double candidate_ssr = ssr;
    bool improved = false;
    while (damping < 1e12) {
      Eigen::Matrix3d lhs = jtj;
      lhs.diagonal() += damping * jtj.diagonal();
      step = lhs.ldlt().solve(-jtr);
      candidate = {p.a + step(0), p.b + step(1), p.c + step(2)};
      candidate_ssr = SumSquaredResiduals(obs, candidate);
      if (std::isfinite(candidate_ssr) && candidate_ssr < ssr) {
        improved = true;
        damping = std::max(damping * 0.1, 1e-12);
        break;
      }
      damping *= 10.0;
    }
    if (!improved) break;  // no descent direction left: at a minimum

    const double rel_change =
        std::max({std::abs(step(0)) / std::max(std::abs(p.a), 1e-12),
                  std::abs(step(1)) / std::max(std::abs(p.b), 1e-12),
                  std::abs(step(2)) / std::max(std::abs(p.c), 1e-12)});
    p = candidate;
    ssr = candidate_ssr;
    if (!std::isfinite(p.a) || !std::isfinite(p.b) || !std::isfinite(p.c)) {
      throw FitError("curve fit refinement diverged");
    }
    if (rel_change < options.rel_tol) break;
  }

  ExpFit fit;
  fit.a = p.a;
  fit.b = p.b;
  fit.c = p.c;
  fit.eps_full = obs.back().eps_star;
  fit.q_floor = obs.front().q;
  if (!(fit.a > 0.0)) {
    throw FitError("fitted slope a must be positive");
  }
  // The model is increasing, so its infimum on (0, 1] is the value at 0.
  if (!(std::exp(fit.b) + fit.c > 0.0)) {
    throw FitError("fitted model is not positive on (0, 1]");
  }
  fit.r_squared = RSquared(obs, fit);
  return fit;
}

double RSquared(std::span<const Observation> obs, const ExpFit& fit) {
  if (obs.empty()) throw FitError("R^2 of an empty observation set");
  double mean = 0.0;
  for (const Observation& o : obs) mean += o.eps_star;
  mean /= static_cast<double>(obs.size());
  double ss_tot = 0.0, ss_res = 0.0;
  for (const Observation& o : obs) {
    ss_tot += (o.eps_star - mean) * (o.eps_star - mean);
    const double r = o.eps_star - fit.Evaluate(o.q);
    ss_res += r * r;
  }
  if (ss_tot == 0.0) {
    throw FitError("R^2 is undefined for constant observations");
  }
  return 1.0 - ss_res / ss_tot;
}

QEstimate EstimateQ(const ExpFit& fit, double eps) {
  if (!(eps > 0.0)) throw DomainError("privacy budget must be > 0");
  if (eps >= fit.eps_full) return {1.0, false};
  if (eps > fit.Evaluate(fit.q_floor)) {
    const double q = (std::log(eps - fit.c) - fit.b) / fit.a;
    return {std::clamp(q, fit.q_floor, 1.0), false};
  }
  return {0.0, true};
}

double BinarySearchQ(double eps, const MechanismParams& params,
                     const BinarySearchOptions& options) {
  if (!(options.tol > 0.0)) throw DomainError("tolerance must be > 0");
  if (!(options.q_floor > 0.0 && options.q_floor <= 1.0)) {
    throw DomainError("q_floor must lie in (0, 1]");
  }
  if (eps >= FlEpsilon(1.0, params).epsilon) return 1.0;
  if (eps < FlEpsilon(options.q_floor, params).epsilon) {
    throw DomainError("budget " + FormatDouble(eps) +
                      " is below the achievable range at q_floor=" +
                      FormatDouble(options.q_floor));
  }
  double lo = options.q_floor, hi = 1.0;
  while (hi - lo > options.tol) {
    const double mid = 0.5 * (lo + hi);
    if (FlEpsilon(mid, params).epsilon <= eps) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

void WriteObservationsCsv(std::ostream& out, std::span<const Observation> obs) {
  out << "q,eps_star\n";
  for (const Observation& o : obs) {
    out << FormatDouble(o.q) << ',' << FormatDouble(o.eps_star) << '\n';
  }
}

void WriteFitJson(std::ostream& out, const ExpFit& fit) {
  out << "{\"a\":" << FormatDouble(fit.a) << ",\"b\":" << FormatDouble(fit.b)
      << ",\"c\":" << FormatDouble(fit.c)
      << ",\"r_squared\":" << FormatDouble(fit.r_squared)
      << ",\"eps_full\":" << FormatDouble(fit.eps_full)
      << ",\"q_floor\":" << FormatDouble(fit.q_floor) << "}\n";
}

}  // namespace rpdp
