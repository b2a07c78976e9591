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

#include "impq/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "impq/error.hpp"

namespace impq {

bool is_supported_bit_width(int bits) noexcept { return bits == 2 || bits == 4; }

int max_level(int bits) {
  if (!is_supported_bit_width(bits)) {
    fail(ErrorCode::kUnsupportedBitWidth, "bit width must be 2 or 4, got " + std::to_string(bits));
  }
  return (1 << (bits - 1)) - 1;
}

double quantization_scale(const Eigen::MatrixXd& weights, int bits) {
  const int levels = max_level(bits);
  if (weights.size() == 0) return 0.0;
  if (!weights.allFinite()) fail(ErrorCode::kInvalidParameter, "cannot quantize non-finite weights");
  return weights.cwiseAbs().maxCoeff() / levels;
}

double round_half_even(double x) noexcept {
  const double floor = std::floor(x);
  const double diff = x - floor;
  if (diff < 0.5) return floor;
  if (diff > 0.5) return floor + 1.0;
  return std::fmod(floor, 2.0) == 0.0 ? floor : floor + 1.0;
}

Eigen::MatrixXd fake_quantize(const Eigen::MatrixXd& weights, int bits) {
  const double scale = quantization_scale(weights, bits);
  if (scale == 0.0) return weights;
  const double levels = max_level(bits);
  return weights.unaryExpr([scale, levels](double w) {
    return std::clamp(round_half_even(w / scale), -levels, levels) * scale;
  });
}

}  // namespace impq
