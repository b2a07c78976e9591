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

#ifndef IMPQ_SURROGATE_HPP_
#define IMPQ_SURROGATE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "impq/oracle.hpp"

namespace impq {

/// Closed-form second-order loss model. With D the set of demoted layers,
///
///   v(S) = base_loss + sum_{i in D} g_eff[i] + sum_{i in D} sum_{j in D} h_eff(i, j)
///
/// g_eff[i] is the gradient-perturbation product of demoting layer i and
/// h_eff(i, j) the curvature coupling of demoting i and j together, both
/// folded to scalars. param_counts give each layer's weight count so the
/// allocator can price promotions.
struct QuadraticSurrogate {
  double base_loss = 0.0;
  Eigen::VectorXd g_eff;
  Eigen::MatrixXd h_eff;
  std::vector<std::int64_t> param_counts;
  double interaction_strength = 0.0;
  std::uint64_t seed = 0;

  int layer_count() const { return static_cast<int>(g_eff.size()); }
};

/// Throws DimensionMismatch on inconsistent shapes and InvalidParameter if
/// h_eff is not exactly symmetric, values are non-finite or a parameter
/// count is not positive.
void validate(const QuadraticSurrogate& model);

double quad_oracle_value(const QuadraticSurrogate& model, const Coalition& coalition);

class QuadraticOracle final : public ValueOracle {
 public:
  explicit QuadraticOracle(QuadraticSurrogate model, std::string fingerprint = {});

  int layer_count() const override { return model_.layer_count(); }
  double evaluate(const Coalition& coalition) const override;
  std::string fingerprint() const override { return fingerprint_; }

  const QuadraticSurrogate& model() const { return model_; }

 private:
  QuadraticSurrogate model_;
  std::string fingerprint_;
};

}  // namespace impq

#endif  // IMPQ_SURROGATE_HPP_
