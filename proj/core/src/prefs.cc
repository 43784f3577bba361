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

#include "rpdp/prefs.h"

#include <cmath>
#include <string>

#include "rpdp/errors.h"

namespace rpdp {
namespace {

constexpr int kMaxRejections = 1'000'000;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void CheckWeights(const std::array<double, 3>& weights) {
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ConfigError("mixture weights must be >= 0");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("mixture weights must sum to 1");
  }
}

int PickComponent(const std::array<double, 3>& weights, RngStream& stream) {
  const double u = stream.NextUniform();
  if (u < weights[0]) return 0;
  if (u < weights[0] + weights[1]) return 1;
  return 2;
}

void CheckBounds(double lower, double upper) {
  if (!(lower > 0.0)) throw ConfigError("lower bound must be > 0");
  if (!(lower < upper)) throw ConfigError("lower bound must be < upper bound");
}

}  // namespace

void ValidateDistSpec(const DistSpec& spec) {
  std::visit(Overloaded{
                 [](const ThreeLevels& s) {
                   CheckWeights(s.weights);
                   for (int i = 0; i < 3; ++i) {
                     if (!(s.levels[i] > 0.0)) {
                       throw ConfigError("budget levels must be > 0");
                     }
                     if (i > 0 && !(s.levels[i] > s.levels[i - 1])) {
                       throw ConfigError("budget levels must be ascending");
                     }
                   }
                 },
                 [](const BoundedPareto& s) {
                   if (!(s.shape > 0.0))
                     throw ConfigError("Pareto shape must be > 0");
                   CheckBounds(s.lower, s.upper);
                 },
                 [](const BoundedMixGauss& s) {
                   CheckWeights(s.weights);
                   CheckBounds(s.lower, s.upper);
                   for (int i = 0; i < 3; ++i) {
                     if (!(s.means[i] > 0.0)) {
                       throw ConfigError("mixture means must be > 0");
                     }
                     if (!(s.spreads[i] > 0.0)) {
                       throw ConfigError("mixture spreads must be > 0");
                     }
                   }
                 },
                 [](const PerLabel& s) {
                   if (s.mapping.empty())
                     throw ConfigError("label mapping is empty");
                   for (const auto& [label, eps] : s.mapping) {
                     if (!(eps > 0.0)) {
                       throw ConfigError("budget for label " +
                                         std::to_string(label) +
                                         " must be > 0");
                     }
                   }
                 },
             },
             spec);
}

std::vector<double> SampleBudgets(const DistSpec& spec, std::size_t n,
                                  RngStream& stream) {
  ValidateDistSpec(spec);
  if (n == 0) throw ConfigError("number of budgets must be >= 1");
  std::vector<double> out;
  out.reserve(n);
  std::visit(Overloaded{
                 [&](const ThreeLevels& s) {
                   for (std::size_t i = 0; i < n; ++i) {
                     out.push_back(s.levels[PickComponent(s.weights, stream)]);
                   }
                 },
                 [&](const BoundedPareto& s) {
                   for (std::size_t i = 0; i < n; ++i) {
                     double x = 0.0;
                     int tries = 0;
                     do {
                       if (++tries > kMaxRejections) {
                         throw ConfigError("Pareto bounds reject every draw");
                       }
                       // 1 - U lies in (0, 1], so x >= lower and finite.
                       x = s.lower *
                           std::pow(1.0 - stream.NextUniform(), -1.0 / s.shape);
                     } while (x > s.upper);
                     out.push_back(x);
                   }
                 },
                 [&](const BoundedMixGauss& s) {
                   for (std::size_t i = 0; i < n; ++i) {
                     const int k = PickComponent(s.weights, stream);
                     const double sd = s.spread_is_variance
                                           ? std::sqrt(s.spreads[k])
                                           : s.spreads[k];
                     double x = 0.0;
                     int tries = 0;
                     do {
                       if (++tries > kMaxRejections) {
                         throw ConfigError("mixture bounds reject every draw");
                       }
                       x = s.means[k] + sd * stream.NextGaussian();
                     } while (x < s.lower || x > s.upper);
                     out.push_back(x);
                   }
                 },
                 [&](const PerLabel&) {
                   throw ConfigError(
                       "per-label budgets need labels; use AssignBudgets");
                 },
             },
             spec);
  return out;
}

std::vector<double> AssignByLabel(std::span<const int> labels,
                                  const std::map<int, double>& mapping) {
  std::vector<double> out;
  out.reserve(labels.size());
  for (int label : labels) {
    auto it = mapping.find(label);
    if (it == mapping.end()) {
      throw ConfigError("no privacy budget for label " + std::to_string(label));
    }
    out.push_back(it->second);
  }
  return out;
}

std::vector<double> AssignBudgets(const DistSpec& spec,
                                  std::span<const int> labels,
                                  RngStream& stream) {
  if (const auto* per_label = std::get_if<PerLabel>(&spec)) {
    ValidateDistSpec(spec);
    return AssignByLabel(labels, per_label->mapping);
  }
  return SampleBudgets(spec, labels.size(), stream);
}

}  // namespace rpdp
