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

#ifndef IMPQ_QUANTIZE_HPP_
#define IMPQ_QUANTIZE_HPP_

#include <Eigen/Dense>

namespace impq {

// Per-tensor symmetric uniform fake quantization:
//   scale = max|w| / (2^(bits-1) - 1)
//   w'    = clamp(round_half_even(w / scale), -(2^(bits-1)-1), 2^(bits-1)-1) * scale
// Only 2- and 4-bit grids are supported; anything else throws
// UnsupportedBitWidth. An all-zero tensor is returned unchanged.

bool is_supported_bit_width(int bits) noexcept;

/// Largest quantization level 2^(bits-1) - 1.
int max_level(int bits);

/// Grid step for `weights` at `bits`; zero for an all-zero tensor.
double quantization_scale(const Eigen::MatrixXd& weights, int bits);

/// Ties go to the even neighbour, independently of the FP rounding mode.
double round_half_even(double x) noexcept;

Eigen::MatrixXd fake_quantize(const Eigen::MatrixXd& weights, int bits);

}  // namespace impq

#endif  // IMPQ_QUANTIZE_HPP_
