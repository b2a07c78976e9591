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

#include "impq/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "impq/error.hpp"
#include "impq/quantize.hpp"
#include "impq/random.hpp"

namespace impq {

std::string_view to_string(BaselineMethod method) noexcept {
  switch (method) {
    case BaselineMethod::kZd:
      return "zd";
    case BaselineMethod::kLim:
      return "lim";
    case BaselineMethod::kLlmMq:
      return "llm_mq";
    case BaselineMethod::kActivation:
      return "activation";
  }
  return "unknown";
}

BaselineMethod parse_baseline_method(std::string_view text) {
  for (auto method : {BaselineMethod::kZd, BaselineMethod::kLim, BaselineMethod::kLlmMq,
                      BaselineMethod::kActivation}) {
    if (to_string(method) == text) return method;
  }
  fail(ErrorCode::kParseError, "unknown baseline method '" + std::string(text) + "'");
}

double zd_score(const Eigen::MatrixXd& weights) {
  const Eigen::Index n = weights.size();
  if (n < 2) fail(ErrorCode::kInvalidParameter, "ZD needs at least two entries");
  const double mean = weights.mean();
  const double variance = (weights.array() - mean).square().sum() / static_cast<double>(n);
  const double sigma = std::sqrt(variance);
  if (!(sigma > 0.0)) return 0.0;
  Eigen::Index above = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    if ((weights.data()[k] - mean) / sigma > 1.0) ++above;
  }
  return static_cast<double>(above) / static_cast<double>(n);
}

double lim_score(const Eigen::MatrixXd& layer_inputs, const Eigen::MatrixXd& layer_outputs) {
  if (layer_inputs.rows() != layer_outputs.rows() || layer_inputs.cols() != layer_outputs.cols()) {
    fail(ErrorCode::kShapeMismatch, "LIM input and output batches differ in shape");
  }
  if (layer_inputs.rows() < 1) fail(ErrorCode::kInvalidParameter, "LIM batch is empty");
  double total = 0.0;
  for (Eigen::Index k = 0; k < layer_inputs.rows(); ++k) {
    const double in_norm = layer_inputs.row(k).norm();
    const double out_norm = layer_outputs.row(k).norm();
    if (in_norm == 0.0 || out_norm == 0.0) {
      fail(ErrorCode::kZeroVector, "LIM sample " + std::to_string(k) + " has a zero vector");
    }
    total -= layer_inputs.row(k).dot(layer_outputs.row(k)) / (in_norm * out_norm);
  }
  return total / static_cast<double>(layer_inputs.rows());
}

double llm_mq_sensitivity(const Eigen::MatrixXd& gradient, const Eigen::MatrixXd& weights,
                          int bits) {
  if (gradient.rows() != weights.rows() || gradient.cols() != weights.cols()) {
    fail(ErrorCode::kShapeMismatch, "gradient and weights differ in shape");
  }
  const Eigen::MatrixXd residual = weights - fake_quantize(weights, bits);
  return std::abs((gradient.array() * residual.array()).sum());
}

Eigen::VectorXd activation_score(const Eigen::VectorXd& hidden_norms) {
  if (hidden_norms.size() == 0) fail(ErrorCode::kInvalidParameter, "no activation norms");
  for (Eigen::Index i = 0; i < hidden_norms.size(); ++i) {
    if (!(hidden_norms[i] > 0.0) || !std::isfinite(hidden_norms[i])) {
      fail(ErrorCode::kZeroNorm, "activation norm of layer " + std::to_string(i) +
                                     " is not positive");
    }
  }
  const double smallest = hidden_norms.minCoeff();
  Eigen::VectorXd scores(hidden_norms.size());
  for (Eigen::Index i = 0; i < hidden_norms.size(); ++i) {
    scores[i] = 100.0 * (smallest / hidden_norms[i]);  // exactly 100 at the minimum
  }
  return scores;
}

SyntheticCorpus calibration_batch(const SyntheticCorpus& corpus, int count, std::uint64_t seed) {
  if (count < 1) fail(ErrorCode::kInvalidParameter, "calibration batch must be non-empty");
  std::vector<int> rows(corpus.size());
  std::iota(rows.begin(), rows.end(), 0);
  Rng rng(derive_seed(seed, 0x63616c));
  rng.shuffle(rows);
  const int take = std::min(count, corpus.size());
  SyntheticCorpus batch;
  batch.seed = seed;
  batch.inputs.resize(take, corpus.inputs.cols());
  batch.labels.resize(take);
  for (int k = 0; k < take; ++k) {
    batch.inputs.row(k) = corpus.inputs.row(rows[k]);
    batch.labels[k] = corpus.labels[rows[k]];
  }
  return batch;
}

std::vector<Eigen::MatrixXd> nll_weight_gradients_fd(const LayeredNet& net,
                                                     const SyntheticCorpus& batch, double step) {
  validate(net, batch);
  if (!(step > 0.0)) fail(ErrorCode::kInvalidParameter, "finite-difference step must be positive");
  std::vector<Eigen::MatrixXd> weights = net.weights;
  const ForwardTrace trace = forward(net, weights, batch.inputs);
  std::vector<Eigen::MatrixXd> gradients;
  gradients.reserve(weights.size());
  for (int t = 0; t < net.layer_count(); ++t) {
    Eigen::MatrixXd grad(weights[t].rows(), weights[t].cols());
    for (Eigen::Index c = 0; c < grad.cols(); ++c) {
      for (Eigen::Index r = 0; r < grad.rows(); ++r) {
        const double original = weights[t](r, c);
        weights[t](r, c) = original + step;
        const double plus = mean_nll(forward_from(net, weights, t, trace.hidden[t]), batch.labels);
        weights[t](r, c) = original - step;
        const double minus = mean_nll(forward_from(net, weights, t, trace.hidden[t]), batch.labels);
        weights[t](r, c) = original;
        grad(r, c) = (plus - minus) / (2.0 * step);
      }
    }
    gradients.push_back(std::move(grad));
  }
  return gradients;
}

LayerScoreReport score_layers(BaselineMethod method, const LayeredNet& net,
                              const SyntheticCorpus& corpus, std::uint64_t calibration_seed,
                              int bits) {
  validate(net, corpus);
  const int layers = net.layer_count();
  LayerScoreReport report;
  report.method = method;
  report.calibration_seed = calibration_seed;
  report.scores.resize(layers);

  if (method == BaselineMethod::kZd) {
    for (int t = 0; t < layers; ++t) report.scores[t] = zd_score(net.weights[t]);
    report.notes["sigma"] = "population";
    return report;
  }

  const SyntheticCorpus batch = calibration_batch(corpus, kCalibrationSamples, calibration_seed);
  report.notes["calibration_samples"] = std::to_string(batch.size());
  switch (method) {
    case BaselineMethod::kLim: {
      const ForwardTrace trace = forward(net, net.weights, batch.inputs);
      for (int t = 0; t < layers; ++t) {
        report.scores[t] = lim_score(trace.hidden[t], trace.hidden[t + 1]);
      }
      report.notes["aggregation"] = "mean_per_sample_cosine";
      break;
    }
    case BaselineMethod::kActivation: {
      const ForwardTrace trace = forward(net, net.weights, batch.inputs);
      Eigen::VectorXd norms(layers);
      for (int t = 0; t < layers; ++t) norms[t] = trace.hidden[t + 1].norm();
      report.scores = activation_score(norms);
      report.notes["mask"] = "all_ones";
      break;
    }
    case BaselineMethod::kLlmMq: {
      if (!is_supported_bit_width(bits)) {
        fail(ErrorCode::kUnsupportedBitWidth, "LLM-MQ bit width must be 2 or 4");
      }
      const auto gradients = nll_weight_gradients_fd(net, batch, kGradientStep);
      for (int t = 0; t < layers; ++t) {
        report.scores[t] = llm_mq_sensitivity(gradients[t], net.weights[t], bits);
      }
      report.notes["bits"] = std::to_string(bits);
      report.notes["gradient"] = "central_difference";
      report.notes["step"] = "1e-4";
      break;
    }
    case BaselineMethod::kZd:
      break;
  }
  return report;
}

Allocation allocate_baseline(const LayerScoreReport& report, const Eigen::VectorXd& costs,
                             double budget, int b_low, int b_high) {
  if (report.scores.size() != costs.size()) {
    fail(ErrorCode::kDimensionMismatch, "score and cost vectors differ in length");
  }
  for (Eigen::Index i = 0; i < report.scores.size(); ++i) {
    if (!std::isfinite(report.scores[i])) {
      fail(ErrorCode::kInvalidParameter, "baseline scores must be finite");
    }
  }
  if (report.method == BaselineMethod::kLlmMq) {
    AllocationProblem problem;
    problem.linear = report.scores;
    problem.interaction = Eigen::MatrixXd::Zero(costs.size(), costs.size());
    problem.costs = costs;
    problem.budget = budget;
    problem.b_low = b_low;
    problem.b_high = b_high;
    return solve_exact(problem);
  }
  return solve_greedy(report.scores, costs, budget, b_low, b_high);
}

}  // namespace impq
