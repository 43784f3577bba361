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

// Seed-derived random streams and Poisson (independent Bernoulli) selection.
//
// A stream is a counter-based generator: draw i is a hash of (key, i). Keys
// are derived from a master seed and a label path, e.g.
// (seed, "client", 3, "round", 7, "step", 2), so every logical task owns its
// own stream and results do not depend on thread scheduling. Draw sequences
// are identical across runs and platforms.

#ifndef RPDP_SAMPLING_H_
#define RPDP_SAMPLING_H_

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace rpdp {

using StreamLabel = std::variant<std::int64_t, std::string_view>;

class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : key_(key) {}

  std::uint64_t key() const { return key_; }
  std::uint64_t position() const { return position_; }

  std::uint64_t NextU64();
  // Uniform double in [0, 1) with 53 random bits.
  double NextUniform();
  // Standard normal via Box-Muller; the spare variate is cached.
  double NextGaussian();
  // Uniform integer in [0, n); n > 0.
  std::uint64_t NextBelow(std::uint64_t n);

  // A child stream keyed by this stream's key and `labels`.
  RngStream Derive(std::initializer_list<StreamLabel> labels) const;

  // Fisher-Yates shuffle.
  template <typename T>
  void Shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(NextBelow(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t key_;
  std::uint64_t position_ = 0;
  double spare_gaussian_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t HashLabels(std::uint64_t seed,
                         std::span<const StreamLabel> labels);

RngStream DeriveStream(std::uint64_t master_seed,
                       std::initializer_list<StreamLabel> labels);
RngStream DeriveStream(std::uint64_t master_seed,
                       std::span<const StreamLabel> labels);

// Indices i (ascending) whose independent Bernoulli(probs[i]) draw succeeds.
// Exactly one uniform is consumed per index. Throws DomainError on any
// probability outside [0, 1].
std::vector<std::size_t> PoissonSelect(std::span<const double> probs,
                                       RngStream& stream);

// Same with one shared probability for n items.
std::vector<std::size_t> PoissonSelectUniform(std::size_t n, double prob,
                                              RngStream& stream);

}  // namespace rpdp

#endif  // RPDP_SAMPLING_H_
