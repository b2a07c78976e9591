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

#include "impq/surrogate.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "impq/error.hpp"

namespace impq {

void validate(const QuadraticSurrogate& model) {
  const int layers = model.layer_count();
  if (layers < 1 || layers > kMaxLayers) {
    fail(ErrorCode::kInvalidParameter, "surrogate must have between 1 and 64 layers");
  }
  if (model.h_eff.rows() != layers || model.h_eff.cols() != layers) {
    fail(ErrorCode::kDimensionMismatch, "h_eff must be L x L");
  }
  if (static_cast<int>(model.param_counts.size()) != layers) {
    fail(ErrorCode::kDimensionMismatch, "param_counts must have L entries");
  }
  if (!std::isfinite(model.base_loss) || !model.g_eff.allFinite() || !model.h_eff.allFinite()) {
    fail(ErrorCode::kInvalidParameter, "surrogate coefficients must be finite");
  }
  if (model.h_eff != model.h_eff.transpose()) {
    fail(ErrorCode::kInvalidParameter, "h_eff must be exactly symmetric");
  }
  for (auto n : model.param_counts) {
    if (n <= 0) fail(ErrorCode::kInvalidParameter, "param counts must be positive");
  }
}

double quad_oracle_value(const QuadraticSurrogate& model, const Coalition& coalition) {
  const int layers = model.layer_count();
  if (coalition.layer_count() != layers) {
    fail(ErrorCode::kDimensionMismatch, "coalition has " + std::to_string(coalition.layer_count()) +
                                            " layers, surrogate has " + std::to_string(layers));
  }
  double value = model.base_loss;
  for (int i = 0; i < layers; ++i) {
    if (coalition.contains(i)) continue;
    value += model.g_eff[i];
  }
  for (int i = 0; i < layers; ++i) {
    if (coalition.contains(i)) continue;
    for (int j = 0; j < layers; ++j) {
      if (coalition.contains(j)) continue;
      value += model.h_eff(i, j);
    }
  }
  return value;
}

QuadraticOracle::QuadraticOracle(QuadraticSurrogate model, std::string fingerprint)
    : model_(std::move(model)), fingerprint_(std::move(fingerprint)) {
  validate(model_);
}

double QuadraticOracle::evaluate(const Coalition& coalition) const {
  return quad_oracle_value(model_, coalition);
}

}  // namespace impq
