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

#ifndef IMPQ_COALITION_HPP_
#define IMPQ_COALITION_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace impq {

inline constexpr int kMaxLayers = 64;

/// Set of layer indices kept at high precision. Every layer outside the set
/// is demoted to low precision. Stored as a fixed-width bit set, so
/// membership is O(1) and the mask doubles as a canonical hash key.
class Coalition {
 public:
  /// Throws InvalidParameter unless 1 <= layer_count <= kMaxLayers, and
  /// DimensionMismatch if `mask` has bits at or above layer_count.
  explicit Coalition(int layer_count, std::uint64_t mask = 0);

  static Coalition full(int layer_count);
  static Coalition empty(int layer_count) { return Coalition(layer_count); }
  static Coalition from_members(int layer_count, const std::vector<int>& members);

  int layer_count() const noexcept { return layer_count_; }
  std::uint64_t mask() const noexcept { return mask_; }
  int size() const noexcept;
  bool contains(int layer) const;

  Coalition with(int layer) const;
  Coalition without(int layer) const;

  /// Members in increasing index order.
  std::vector<int> members() const;

  friend bool operator==(const Coalition&, const Coalition&) = default;

 private:
  void check_index(int layer) const;

  int layer_count_;
  std::uint64_t mask_;
};

struct CoalitionHash {
  std::size_t operator()(const Coalition& c) const noexcept {
    return std::hash<std::uint64_t>{}(c.mask() ^ (static_cast<std::uint64_t>(c.layer_count()) << 58));
  }
};

}  // namespace impq

#endif  // IMPQ_COALITION_HPP_
