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

#ifndef IMPQ_INSTANCE_HPP_
#define IMPQ_INSTANCE_HPP_

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "impq/layered_net.hpp"
#include "impq/oracle.hpp"
#include "impq/surrogate.hpp"

namespace impq {

enum class InstanceKind { kQuadratic, kNetwork };

std::string_view to_string(InstanceKind kind) noexcept;
InstanceKind parse_instance_kind(std::string_view text);

struct NetShape {
  int layers = 8;
  int width = 16;
  int classes = 8;
  int samples = 512;
};

struct NetworkInstance {
  LayeredNet net;
  SyntheticCorpus corpus;
  double interaction_strength = 0.0;
};

using Instance = std::variant<QuadraticSurrogate, NetworkInstance>;

/// Planted Taylor-form instance. g_eff >= 0; the coupling matrix is the
/// Gram matrix of random curvature directions with its off-diagonal scaled
/// by interaction_strength, so strength 0 leaves a purely additive game.
QuadraticSurrogate generate_quadratic(int layers, std::uint64_t seed, double interaction_strength);

/// Random residual net plus a teacher-labelled corpus. Layer matrices share
/// a common component with weight s / (1 + s), s = interaction_strength.
NetworkInstance generate_network(const NetShape& shape, std::uint64_t seed,
                                 double interaction_strength);

/// Deterministic in all arguments. Throws InvalidParameter on L < 1,
/// L > kMaxLayers or a negative strength.
Instance generate_instance(InstanceKind kind, int layers, std::uint64_t seed,
                           double interaction_strength, const NetShape& shape = {});

InstanceKind kind_of(const Instance& instance) noexcept;
int layer_count(const Instance& instance) noexcept;
std::vector<std::int64_t> param_counts(const Instance& instance);

/// Hex FNV-1a digest of the instance's canonical document.
std::string instance_fingerprint(const Instance& instance);

/// Oracle for the instance. For networks the returned oracle references
/// `instance`, which must outlive it.
std::unique_ptr<ValueOracle> make_oracle(const Instance& instance, int b_high = 4, int b_low = 2);

}  // namespace impq

#endif  // IMPQ_INSTANCE_HPP_
