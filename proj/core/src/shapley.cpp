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

#include "impq/shapley.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <string>
#include <vector>

#include "impq/error.hpp"

namespace impq {

namespace {

void check_layers(const ValueOracle& oracle, int limit, const char* what) {
  const int layers = oracle.layer_count();
  if (layers > limit) {
    fail(ErrorCode::kLayerCountTooLarge, std::string(what) + " supports at most " +
                                             std::to_string(limit) + " layers, got " +
                                             std::to_string(layers));
  }
}

}  // namespace

ExactShapleyResult exact_shapley(const ValueOracle& oracle) {
  check_layers(oracle, kMaxExactShapleyLayers, "exact_shapley");
  const int layers = oracle.layer_count();
  const std::uint64_t count = std::uint64_t{1} << layers;

  std::vector<double> value(count);
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    value[mask] = evaluate_checked(oracle, Coalition(layers, mask));
  }

  // weight(s) = s! (L - s - 1)! / L! = 1 / (L * C(L - 1, s))
  std::vector<double> weight(static_cast<std::size_t>(layers));
  double binom = 1.0;
  for (int s = 0; s < layers; ++s) {
    weight[s] = 1.0 / (layers * binom);
    binom = binom * (layers - 1 - s) / (s + 1);
  }

  ExactShapleyResult result;
  result.phi = Eigen::VectorXd::Zero(layers);
  for (int i = 0; i < layers; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    double acc = 0.0;
    for (std::uint64_t mask = 0; mask < count; ++mask) {
      if (mask & bit) continue;
      acc += weight[std::popcount(mask)] * (value[mask] - value[mask | bit]);
    }
    result.phi[i] = acc;
  }
  result.v_full = value[count - 1];
  result.v_empty = value[0];
  return result;
}

ExactShapleyResult full_permutation_shapley(const ValueOracle& oracle) {
  check_layers(oracle, kMaxPermutationShapleyLayers, "full_permutation_shapley");
  const int layers = oracle.layer_count();

  std::vector<int> order(static_cast<std::size_t>(layers));
  std::iota(order.begin(), order.end(), 0);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(layers);
  std::int64_t permutations = 0;
  do {
    Coalition state = Coalition::full(layers);
    double previous = evaluate_checked(oracle, state);
    for (int layer : order) {
      state = state.without(layer);
      const double current = evaluate_checked(oracle, state);
      sum[layer] += current - previous;
      previous = current;
    }
    ++permutations;
  } while (std::next_permutation(order.begin(), order.end()));

  ExactShapleyResult result;
  result.phi = sum / static_cast<double>(permutations);
  result.v_full = evaluate_checked(oracle, Coalition::full(layers));
  result.v_empty = evaluate_checked(oracle, Coalition::empty(layers));
  return result;
}

}  // namespace impq
