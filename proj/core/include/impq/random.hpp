// Copyright 2026 The IMPQ Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IMPQ_RANDOM_HPP_
#define IMPQ_RANDOM_HPP_

#include <cstdint>
#include <random>
#include <span>

namespace impq {

// splitmix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t x) noexcept;

// Seed for sub-stream `stream` of a run seeded with `seed`. Streams are
// independent of one another and of the order in which they are consumed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

// Portable random source. The engine is std::mt19937_64 (output fully
// specified by the standard); the transforms below are written out so that
// every platform produces the same doubles for the same seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);
  // Standard normal (Box-Muller, no cached second value).
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  // Unbiased integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  // Fisher-Yates, back to front.
  void shuffle(std::span<int> values);

 private:
  std::mt19937_64 engine_;
};

}  // namespace impq

#endif  // IMPQ_RANDOM_HPP_
