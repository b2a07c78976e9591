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

#include "impq/coalition.hpp"

#include <bit>
#include <string>

#include "impq/error.hpp"

namespace impq {

namespace {

std::uint64_t full_mask(int layer_count) {
  return layer_count == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << layer_count) - 1;
}

}  // namespace

Coalition::Coalition(int layer_count, std::uint64_t mask)
    : layer_count_(layer_count), mask_(mask) {
  if (layer_count < 1 || layer_count > kMaxLayers) {
    fail(ErrorCode::kInvalidParameter,
         "coalition layer count must be in [1, 64], got " + std::to_string(layer_count));
  }
  if ((mask & ~full_mask(layer_count)) != 0) {
    fail(ErrorCode::kDimensionMismatch, "coalition mask has members outside [0, L)");
  }
}

Coalition Coalition::full(int layer_count) {
  if (layer_count < 1 || layer_count > kMaxLayers) return Coalition(layer_count);
  return Coalition(layer_count, full_mask(layer_count));
}

Coalition Coalition::from_members(int layer_count, const std::vector<int>& members) {
  Coalition c(layer_count);
  for (int m : members) {
    if (c.contains(m)) {
      fail(ErrorCode::kInvalidParameter, "duplicate coalition member " + std::to_string(m));
    }
    c = c.with(m);
  }
  return c;
}

int Coalition::size() const noexcept { return std::popcount(mask_); }

void Coalition::check_index(int layer) const {
  if (layer < 0 || layer >= layer_count_) {
    fail(ErrorCode::kDimensionMismatch, "layer index " + std::to_string(layer) +
                                            " outside [0, " + std::to_string(layer_count_) + ")");
  }
}

bool Coalition::contains(int layer) const {
  check_index(layer);
  return (mask_ >> layer) & 1U;
}

Coalition Coalition::with(int layer) const {
  check_index(layer);
  return Coalition(layer_count_, mask_ | (std::uint64_t{1} << layer));
}

Coalition Coalition::without(int layer) const {
  check_index(layer);
  return Coalition(layer_count_, mask_ & ~(std::uint64_t{1} << layer));
}

std::vector<int> Coalition::members() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(size()));
  for (int i = 0; i < layer_count_; ++i) {
    if ((mask_ >> i) & 1U) out.push_back(i);
  }
  return out;
}

}  // namespace impq
