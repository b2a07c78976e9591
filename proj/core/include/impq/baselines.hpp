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

#ifndef IMPQ_BASELINES_HPP_
#define IMPQ_BASELINES_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "impq/allocator.hpp"
#include "impq/layered_net.hpp"

namespace impq {

// Layer-importance heuristics used as comparison points for IMPQ. Higher
// scores mean "more important", so allocation promotes the top scores.

enum class BaselineMethod { kZd, kLim, kLlmMq, kActivation };

std::string_view to_string(BaselineMethod method) noexcept;
BaselineMethod parse_baseline_method(std::string_view text);

struct LayerScoreReport {
  BaselineMethod method = BaselineMethod::kZd;
  Eigen::VectorXd scores;
  std::uint64_t calibration_seed = 0;
  std::map<std::string, std::string> notes;
};

inline constexpr int kCalibrationSamples = 128;
inline constexpr double kGradientStep = 1e-4;

/// Fraction of entries with (w - mean) / sigma > 1, population sigma.
/// A constant matrix scores 0. Throws InvalidParameter below two entries.
double zd_score(const Eigen::MatrixXd& weights);

/// Mean over rows of -cos(input_k, output_k). Throws ShapeMismatch on
/// unequal batches and ZeroVector if any row has zero norm.
double lim_score(const Eigen::MatrixXd& layer_inputs, const Eigen::MatrixXd& layer_outputs);

/// |<g, W - Q_b(W)>| over the flattened matrices.
double llm_mq_sensitivity(const Eigen::MatrixXd& gradient, const Eigen::MatrixXd& weights,
                          int bits);

/// s_i = 100 * min_j norm_j / norm_i. Throws ZeroNorm on a non-positive norm.
Eigen::VectorXd activation_score(const Eigen::VectorXd& hidden_norms);

/// Seeded subset of min(count, N) corpus rows.
SyntheticCorpus calibration_batch(const SyntheticCorpus& corpus, int count, std::uint64_t seed);

/// d NLL / d W_t for every block, by central differences of step `step`.
std::vector<Eigen::MatrixXd> nll_weight_gradients_fd(const LayeredNet& net,
                                                     const SyntheticCorpus& batch,
                                                     double step = kGradientStep);

/// Scores every layer of the full-precision net on a calibration batch.
/// `bits` is the low width used by LLM-MQ.
LayerScoreReport score_layers(BaselineMethod method, const LayeredNet& net,
                              const SyntheticCorpus& corpus, std::uint64_t calibration_seed,
                              int bits = 2);

/// LLM-MQ: exact allocator with a = s and K = 0. Others: solve_greedy.
Allocation allocate_baseline(const LayerScoreReport& report, const Eigen::VectorXd& costs,
                             double budget, int b_low = 2, int b_high = 4);

}  // namespace impq

#endif  // IMPQ_BASELINES_HPP_
