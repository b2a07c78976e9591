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

#include "impq/layered_net.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "impq/error.hpp"
#include "impq/quantize.hpp"

namespace impq {

void validate(const LayeredNet& net) {
  const int layers = net.layer_count();
  if (layers < 1 || layers > kMaxLayers) {
    fail(ErrorCode::kInvalidParameter, "net must have between 1 and 64 layers");
  }
  const int d = net.width();
  if (d < 1 || net.classes() < 2) {
    fail(ErrorCode::kInvalidParameter, "net needs width >= 1 and at least 2 classes");
  }
  if (static_cast<int>(net.biases.size()) != layers) {
    fail(ErrorCode::kDimensionMismatch, "one bias per layer required");
  }
  for (int t = 0; t < layers; ++t) {
    if (net.weights[t].rows() != d || net.weights[t].cols() != d || net.biases[t].size() != d) {
      fail(ErrorCode::kDimensionMismatch, "layer " + std::to_string(t) + " is not d x d");
    }
    if (!net.weights[t].allFinite() || !net.biases[t].allFinite()) {
      fail(ErrorCode::kInvalidParameter, "layer " + std::to_string(t) + " has non-finite entries");
    }
  }
  if (!net.head.allFinite()) fail(ErrorCode::kInvalidParameter, "head has non-finite entries");
}

void validate(const LayeredNet& net, const SyntheticCorpus& corpus) {
  validate(net);
  if (corpus.size() < 1) fail(ErrorCode::kInvalidParameter, "corpus is empty");
  if (corpus.inputs.cols() != net.width()) {
    fail(ErrorCode::kDimensionMismatch, "corpus inputs must have the net's width");
  }
  if (static_cast<int>(corpus.labels.size()) != corpus.size()) {
    fail(ErrorCode::kDimensionMismatch, "one label per corpus sample required");
  }
  for (int label : corpus.labels) {
    if (label < 0 || label >= net.classes()) {
      fail(ErrorCode::kInvalidParameter, "corpus label outside [0, V)");
    }
  }
}

namespace {

void check_weights(const LayeredNet& net, std::span<const Eigen::MatrixXd> layer_weights) {
  if (static_cast<int>(layer_weights.size()) != net.layer_count()) {
    fail(ErrorCode::kDimensionMismatch, "expected one weight matrix per layer");
  }
}

void apply_block(const Eigen::MatrixXd& w, const Eigen::VectorXd& b, Eigen::MatrixXd& h) {
  Eigen::MatrixXd pre = h * w.transpose();
  pre.rowwise() += b.transpose();
  h += pre.array().tanh().matrix();
}

}  // namespace

ForwardTrace forward(const LayeredNet& net, std::span<const Eigen::MatrixXd> layer_weights,
                     const Eigen::MatrixXd& inputs) {
  check_weights(net, layer_weights);
  if (inputs.cols() != net.width()) fail(ErrorCode::kDimensionMismatch, "input width mismatch");
  ForwardTrace trace;
  trace.hidden.reserve(layer_weights.size() + 1);
  trace.hidden.push_back(inputs);
  Eigen::MatrixXd h = inputs;
  for (int t = 0; t < net.layer_count(); ++t) {
    apply_block(layer_weights[t], net.biases[t], h);
    trace.hidden.push_back(h);
  }
  trace.logits = h * net.head.transpose();
  return trace;
}

Eigen::MatrixXd forward_from(const LayeredNet& net, std::span<const Eigen::MatrixXd> layer_weights,
                             int first_layer, const Eigen::MatrixXd& hidden) {
  check_weights(net, layer_weights);
  if (first_layer < 0 || first_layer > net.layer_count()) {
    fail(ErrorCode::kDimensionMismatch, "first layer out of range");
  }
  Eigen::MatrixXd h = hidden;
  for (int t = first_layer; t < net.layer_count(); ++t) {
    apply_block(layer_weights[t], net.biases[t], h);
  }
  return h * net.head.transpose();
}

double mean_nll(const Eigen::MatrixXd& logits, std::span<const int> labels) {
  if (logits.rows() != static_cast<Eigen::Index>(labels.size()) || logits.rows() == 0) {
    fail(ErrorCode::kDimensionMismatch, "need one label per logit row");
  }
  if (!logits.allFinite()) fail(ErrorCode::kNonFiniteLoss, "non-finite logit");
  double total = 0.0;
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const int label = labels[static_cast<std::size_t>(r)];
    if (label < 0 || label >= logits.cols()) {
      fail(ErrorCode::kDimensionMismatch, "label outside [0, V)");
    }
    const double peak = logits.row(r).maxCoeff();
    const double lse = peak + std::log((logits.row(r).array() - peak).exp().sum());
    total += lse - logits(r, label);
  }
  const double nll = total / static_cast<double>(logits.rows());
  if (!std::isfinite(nll)) fail(ErrorCode::kNonFiniteLoss, "non-finite NLL");
  return nll;
}

double net_nll(const LayeredNet& net, const SyntheticCorpus& corpus,
               std::span<const Eigen::MatrixXd> layer_weights) {
  return mean_nll(forward_from(net, layer_weights, 0, corpus.inputs), corpus.labels);
}

double net_oracle_value(const LayeredNet& net, const SyntheticCorpus& corpus,
                        const Coalition& coalition, int b_high, int b_low) {
  return NetOracle(net, corpus, b_high, b_low).evaluate(coalition);
}

NetOracle::NetOracle(const LayeredNet& net, const SyntheticCorpus& corpus, int b_high, int b_low,
                     std::string fingerprint)
    : net_(net), corpus_(corpus), b_high_(b_high), b_low_(b_low),
      fingerprint_(std::move(fingerprint)) {
  validate(net, corpus);
  max_level(b_high);
  max_level(b_low);
  high_.reserve(net.weights.size());
  low_.reserve(net.weights.size());
  for (const auto& w : net.weights) {
    high_.push_back(fake_quantize(w, b_high));
    low_.push_back(fake_quantize(w, b_low));
  }
}

std::vector<Eigen::MatrixXd> NetOracle::coalition_weights(const Coalition& coalition) const {
  if (coalition.layer_count() != net_.layer_count()) {
    fail(ErrorCode::kDimensionMismatch, "coalition width does not match the net");
  }
  std::vector<Eigen::MatrixXd> weights;
  weights.reserve(high_.size());
  for (int t = 0; t < net_.layer_count(); ++t) {
    weights.push_back(coalition.contains(t) ? high_[t] : low_[t]);
  }
  return weights;
}

double NetOracle::evaluate(const Coalition& coalition) const {
  return net_nll(net_, corpus_, coalition_weights(coalition));
}

}  // namespace impq
