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

#include "rpdp/sampling.h"

#include <cmath>
#include <numbers>
#include <type_traits>

#include "rpdp/errors.h"

namespace rpdp {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer.
std::uint64_t Mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t Fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t Absorb(std::uint64_t state, const StreamLabel& label) {
  // Tag integers and strings differently so "3" and 3 give distinct keys.
  std::uint64_t word = std::visit(
      [](const auto& v) -> std::uint64_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, std::int64_t>) {
          return Mix64(static_cast<std::uint64_t>(v) ^ 0x1ULL);
        } else {
          return Mix64(Fnv1a(v) ^ 0x2ULL);
        }
      },
      label);
  return Mix64(state + kGolden + word);
}

void CheckProbability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("sampling probability outside [0, 1]");
  }
}

}  // namespace

std::uint64_t RngStream::NextU64() {
  ++position_;
  return Mix64(key_ + position_ * kGolden);
}

double RngStream::NextUniform() {
  return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
}

double RngStream::NextGaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_gaussian_;
  }
  double u1 = NextUniform();
  while (u1 == 0.0) u1 = NextUniform();
  const double u2 = NextUniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_gaussian_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::uint64_t RngStream::NextBelow(std::uint64_t n) {
  // Rejection keeps the result exactly uniform.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x = NextU64();
  while (x >= limit) x = NextU64();
  return x % n;
}

RngStream RngStream::Derive(std::initializer_list<StreamLabel> labels) const {
  return RngStream(HashLabels(
      key_, std::span<const StreamLabel>(labels.begin(), labels.size())));
}

std::uint64_t HashLabels(std::uint64_t seed,
                         std::span<const StreamLabel> labels) {
  std::uint64_t state = Mix64(seed ^ 0x5bd1e9955bd1e995ULL);
  for (const StreamLabel& label : labels) state = Absorb(state, label);
  return state;
}

RngStream DeriveStream(std::uint64_t master_seed,
                       std::initializer_list<StreamLabel> labels) {
  return DeriveStream(
      master_seed, std::span<const StreamLabel>(labels.begin(), labels.size()));
}

RngStream DeriveStream(std::uint64_t master_seed,
                       std::span<const StreamLabel> labels) {
  return RngStream(HashLabels(master_seed, labels));
}

std::vector<std::size_t> PoissonSelect(std::span<const double> probs,
                                       RngStream& stream) {
  for (double p : probs) CheckProbability(p);
  std::vector<std::size_t> selected;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (stream.NextUniform() < probs[i]) selected.push_back(i);
  }
  return selected;
}

std::vector<std::size_t> PoissonSelectUniform(std::size_t n, double prob,
                                              RngStream& stream) {
  CheckProbability(prob);
  std::vector<std::size_t> selected;
  for (std::size_t i = 0; i < n; ++i) {
    if (stream.NextUniform() < prob) selected.push_back(i);
  }
  return selected;
}

}  // namespace rpdp
