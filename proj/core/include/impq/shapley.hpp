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

#ifndef IMPQ_SHAPLEY_HPP_
#define IMPQ_SHAPLEY_HPP_

#include <Eigen/Dense>

#include "impq/oracle.hpp"

namespace impq {

inline constexpr int kMaxExactShapleyLayers = 20;
inline constexpr int kMaxPermutationShapleyLayers = 8;

// Sign convention used throughout the library: a layer's marginal is the
// loss increase v(S \ {i}) - v(S) caused by demoting it, so important layers
// get large positive values and sum(phi) = v(empty) - v(full).
struct ExactShapleyResult {
  Eigen::VectorXd phi;
  double v_full = 0.0;
  double v_empty = 0.0;
};

/// Subset-weighted Shapley values from all 2^L coalitions.
/// Throws LayerCountTooLarge when L > kMaxExactShapleyLayers.
ExactShapleyResult exact_shapley(const ValueOracle& oracle);

/// Permutation-average Shapley values over all L! demotion orders.
/// Throws LayerCountTooLarge when L > kMaxPermutationShapleyLayers.
ExactShapleyResult full_permutation_shapley(const ValueOracle& oracle);

}  // namespace impq

#endif  // IMPQ_SHAPLEY_HPP_
