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

#include "impq/instance.hpp"

#include <cmath>
#include <string>

#include "impq/error.hpp"
#include "impq/random.hpp"
#include "impq/serialize.hpp"

namespace impq {

namespace {

// Generator constants. Quadratic: curvature seen through kCurvatureRank
// shared directions. Network: per-entry weight std kWeightGain / sqrt(d).
constexpr int kCurvatureRank = 3;
constexpr double kCurvatureScale = 0.75;
constexpr double kWeightGain = 0.5;
constexpr double kHeadGain = 1.0;
constexpr double kBiasStd = 0.1;
constexpr std::int64_t kMinParams = 512;
constexpr std::int64_t kMaxParams = 2048;

void check_common(int layers, double interaction_strength) {
  if (layers < 1 || layers > kMaxLayers) {
    fail(ErrorCode::kInvalidParameter, "layer count must be in [1, 64], got " + std::to_string(layers));
  }
  if (!(interaction_strength >= 0.0) || !std::isfinite(interaction_strength)) {
    fail(ErrorCode::kInvalidParameter, "interaction strength must be finite and >= 0");
  }
}

// Uniform with unit variance.
double unit_uniform(Rng& rng) { return rng.uniform(-std::sqrt(3.0), std::sqrt(3.0)); }

}  // namespace

std::string_view to_string(InstanceKind kind) noexcept {
  return kind == InstanceKind::kQuadratic ? "quadratic" : "network";
}

InstanceKind parse_instance_kind(std::string_view text) {
  if (text == "quadratic") return InstanceKind::kQuadratic;
  if (text == "network") return InstanceKind::kNetwork;
  fail(ErrorCode::kInvalidParameter, "unknown instance kind '" + std::string(text) + "'");
}

QuadraticSurrogate generate_quadratic(int layers, std::uint64_t seed, double interaction_strength) {
  check_common(layers, interaction_strength);
  Rng rng(derive_seed(seed, 0x71));

  QuadraticSurrogate model;
  model.seed = seed;
  model.interaction_strength = interaction_strength;
  model.base_loss = rng.uniform(0.5, 1.5);
  model.g_eff.resize(layers);
  for (int i = 0; i < layers; ++i) model.g_eff[i] = rng.uniform(0.25, 1.0);

  Eigen::MatrixXd directions(layers, kCurvatureRank);
  const double spread = kCurvatureScale / std::sqrt(static_cast<double>(kCurvatureRank));
  for (int i = 0; i < layers; ++i) {
    for (int k = 0; k < kCurvatureRank; ++k) directions(i, k) = spread * rng.normal();
  }
  model.h_eff.resize(layers, layers);
  for (int i = 0; i < layers; ++i) {
    for (int j = i; j < layers; ++j) {
      double gram = 0.0;
      for (int k = 0; k < kCurvatureRank; ++k) gram += directions(i, k) * directions(j, k);
      if (i != j) gram *= interaction_strength;
      model.h_eff(i, j) = gram;
      model.h_eff(j, i) = gram;
    }
  }
  model.param_counts.resize(static_cast<std::size_t>(layers));
  for (auto& n : model.param_counts) {
    n = kMinParams + static_cast<std::int64_t>(rng.below(kMaxParams - kMinParams + 1));
  }
  return model;
}

NetworkInstance generate_network(const NetShape& shape, std::uint64_t seed,
                                 double interaction_strength) {
  check_common(shape.layers, interaction_strength);
  if (shape.width < 1 || shape.classes < 2 || shape.samples < 1) {
    fail(ErrorCode::kInvalidParameter, "net needs width >= 1, classes >= 2 and samples >= 1");
  }
  const int d = shape.width;
  Rng rng(derive_seed(seed, 0x6e));

  NetworkInstance instance;
  instance.interaction_strength = interaction_strength;
  LayeredNet& net = instance.net;
  net.seed = seed;

  const double shared_weight = interaction_strength / (1.0 + interaction_strength);
  const double own = std::sqrt(1.0 - shared_weight);
  const double common = std::sqrt(shared_weight);
  const double gain = kWeightGain / std::sqrt(static_cast<double>(d));

  Eigen::MatrixXd shared(d, d);
  for (Eigen::Index k = 0; k < shared.size(); ++k) shared.data()[k] = unit_uniform(rng);
  for (int t = 0; t < shape.layers; ++t) {
    Eigen::MatrixXd w(d, d);
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) w(r, c) = gain * (own * unit_uniform(rng) + common * shared(r, c));
    }
    net.weights.push_back(std::move(w));
    Eigen::VectorXd b(d);
    for (int r = 0; r < d; ++r) b[r] = kBiasStd * rng.normal();
    net.biases.push_back(std::move(b));
  }
  net.head.resize(shape.classes, d);
  const double head_gain = kHeadGain / std::sqrt(static_cast<double>(d));
  for (int r = 0; r < shape.classes; ++r) {
    for (int c = 0; c < d; ++c) net.head(r, c) = head_gain * unit_uniform(rng);
  }

  SyntheticCorpus& corpus = instance.corpus;
  corpus.seed = seed;
  corpus.inputs.resize(shape.samples, d);
  for (int r = 0; r < shape.samples; ++r) {
    for (int c = 0; c < d; ++c) corpus.inputs(r, c) = rng.normal();
  }
  const Eigen::MatrixXd logits = forward_from(net, net.weights, 0, corpus.inputs);
  corpus.labels.resize(static_cast<std::size_t>(shape.samples));
  for (int r = 0; r < shape.samples; ++r) {
    Eigen::Index best = 0;
    logits.row(r).maxCoeff(&best);
    corpus.labels[static_cast<std::size_t>(r)] = static_cast<int>(best);
  }
  validate(net, corpus);
  return instance;
}

Instance generate_instance(InstanceKind kind, int layers, std::uint64_t seed,
                           double interaction_strength, const NetShape& shape) {
  if (kind == InstanceKind::kQuadratic) return generate_quadratic(layers, seed, interaction_strength);
  NetShape s = shape;
  s.layers = layers;
  return generate_network(s, seed, interaction_strength);
}

InstanceKind kind_of(const Instance& instance) noexcept {
  return std::holds_alternative<QuadraticSurrogate>(instance) ? InstanceKind::kQuadratic
                                                               : InstanceKind::kNetwork;
}

int layer_count(const Instance& instance) noexcept {
  if (const auto* q = std::get_if<QuadraticSurrogate>(&instance)) return q->layer_count();
  return std::get<NetworkInstance>(instance).net.layer_count();
}

std::vector<std::int64_t> param_counts(const Instance& instance) {
  if (const auto* q = std::get_if<QuadraticSurrogate>(&instance)) return q->param_counts;
  const auto& net = std::get<NetworkInstance>(instance).net;
  std::vector<std::int64_t> counts;
  for (const auto& w : net.weights) counts.push_back(static_cast<std::int64_t>(w.size()));
  return counts;
}

std::string instance_fingerprint(const Instance& instance) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_document(instance)) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kHex[hash & 0xf];
    hash >>= 4;
  }
  return out;
}

std::unique_ptr<ValueOracle> make_oracle(const Instance& instance, int b_high, int b_low) {
  const std::string fp = instance_fingerprint(instance);
  if (const auto* q = std::get_if<QuadraticSurrogate>(&instance)) {
    return std::make_unique<QuadraticOracle>(*q, fp);
  }
  const auto& n = std::get<NetworkInstance>(instance);
  return std::make_unique<NetOracle>(n.net, n.corpus, b_high, b_low, fp);
}

}  // namespace impq
