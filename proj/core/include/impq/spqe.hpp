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

#ifndef IMPQ_SPQE_HPP_
#define IMPQ_SPQE_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "impq/oracle.hpp"

namespace impq {

inline constexpr int kMaxEnumeratedLayers = 7;

/// One progressive-demotion pass. Starting from the all-high coalition,
/// layers are demoted to low precision in `order`; payoffs[l] is the payoff
/// after the first l demotions, so payoffs.front() = v(T) and
/// payoffs.back() = v(empty). marginals[order[l]] = payoffs[l+1] - payoffs[l].
struct PermutationTrace {
  std::vector<int> order;
  std::vector<double> payoffs;
  Eigen::VectorXd marginals;
};

PermutationTrace trace_permutation(const ValueOracle& oracle, std::span<const int> order);

enum class SamplingMode { kSampled, kEnumerated };

std::string_view to_string(SamplingMode mode) noexcept;
SamplingMode parse_sampling_mode(std::string_view text);

/// Per-permutation marginal loss increases, one row per permutation.
struct MarginalMatrix {
  Eigen::MatrixXd rows;                 // M x L
  std::vector<std::vector<int>> orders;  // demotion order of each row
  int b_high = 4;
  int b_low = 2;
  std::uint64_t seed = 0;
  std::string oracle_fingerprint;
  SamplingMode mode = SamplingMode::kSampled;

  int samples() const { return static_cast<int>(rows.rows()); }
  int layer_count() const { return static_cast<int>(rows.cols()); }
};

struct SpqeOptions {
  int threads = 1;
  int b_high = 4;
  int b_low = 2;
};

/// Demotion order of permutation `index` in a run seeded with `seed`.
/// Depends only on (layers, seed, index), so a run with M samples is the
/// prefix of any longer run with the same seed.
std::vector<int> sample_permutation(int layers, std::uint64_t seed, std::int64_t index);

/// Monte-Carlo permutation sampling with progressive demotion. Payoffs are
/// memoized per coalition for the duration of the run. Any oracle failure
/// aborts the run; no partial matrix is returned.
MarginalMatrix run_spqe(const ValueOracle& oracle, int samples, std::uint64_t seed,
                        const SpqeOptions& options = {});

/// All L! demotion orders in lexicographic order (L <= kMaxEnumeratedLayers).
MarginalMatrix enumerate_permutations_mode(const ValueOracle& oracle,
                                           const SpqeOptions& options = {});

struct ShapleyEstimate {
  Eigen::VectorXd phi_hat;
  Eigen::VectorXd per_layer_variance;  // unbiased; zero when M = 1
  int samples = 0;
};

ShapleyEstimate estimate(const MarginalMatrix& matrix);

}  // namespace impq

#endif  // IMPQ_SPQE_HPP_
