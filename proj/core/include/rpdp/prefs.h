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

// Generators for personalized privacy budgets.

#ifndef RPDP_PREFS_H_
#define RPDP_PREFS_H_

#include <array>
#include <map>
#include <span>
#include <variant>
#include <vector>

#include "rpdp/sampling.h"

namespace rpdp {

// Each record picks one of three budgets (strong, moderate, weak privacy).
struct ThreeLevels {
  std::array<double, 3> levels{0.1, 1.0, 5.0};
  std::array<double, 3> weights{0.7, 0.2, 0.1};
};

// Pareto(shape, scale = lower), rejected until the draw is <= upper.
struct BoundedPareto {
  double shape = 1.0;
  double lower = 0.1;
  double upper = 10.0;
};

// Three-component Gaussian mixture; each component is redrawn until its
// sample lands in [lower, upper].
struct BoundedMixGauss {
  std::array<double, 3> means{0.1, 1.0, 5.0};
  // Second parameter of each component. Read as a variance unless
  // spread_is_variance is false, in which case it is a standard deviation.
  std::array<double, 3> spreads{0.01, 0.05, 0.5};
  std::array<double, 3> weights{0.7, 0.2, 0.1};
  double lower = 0.1;
  double upper = 10.0;
  bool spread_is_variance = true;
};

// Budget determined by the record's class label.
struct PerLabel {
  std::map<int, double> mapping;
};

using DistSpec =
    std::variant<ThreeLevels, BoundedPareto, BoundedMixGauss, PerLabel>;

// Throws ConfigError on malformed specs.
void ValidateDistSpec(const DistSpec& spec);

// n independent draws. PerLabel cannot be sampled without labels and is
// rejected; use AssignBudgets.
std::vector<double> SampleBudgets(const DistSpec& spec, std::size_t n,
                                  RngStream& stream);

// Elementwise lookup. Throws ConfigError naming the first missing label.
std::vector<double> AssignByLabel(std::span<const int> labels,
                                  const std::map<int, double>& mapping);

// PerLabel -> AssignByLabel, anything else -> SampleBudgets(labels.size()).
std::vector<double> AssignBudgets(const DistSpec& spec,
                                  std::span<const int> labels,
                                  RngStream& stream);

}  // namespace rpdp

#endif  // RPDP_PREFS_H_
