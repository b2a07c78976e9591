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

#ifndef IMPQ_LAYERED_NET_HPP_
#define IMPQ_LAYERED_NET_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "impq/oracle.hpp"

namespace impq {

/// Stack of L residual blocks h <- h + tanh(W_t h + b_t) followed by a
/// linear head producing class logits. Only the square W_t take part in
/// quantization; biases and the head always stay in full precision.
struct LayeredNet {
  std::vector<Eigen::MatrixXd> weights;  // L matrices, d x d
  std::vector<Eigen::VectorXd> biases;   // L vectors, d
  Eigen::MatrixXd head;                  // V x d
  std::uint64_t seed = 0;

  int layer_count() const { return static_cast<int>(weights.size()); }
  int width() const { return static_cast<int>(head.cols()); }
  int classes() const { return static_cast<int>(head.rows()); }
};

/// Inputs are rows (N x d); labels are the reference net's argmax classes.
struct SyntheticCorpus {
  Eigen::MatrixXd inputs;
  std::vector<int> labels;
  std::uint64_t seed = 0;

  int size() const { return static_cast<int>(inputs.rows()); }
};

void validate(const LayeredNet& net);
void validate(const LayeredNet& net, const SyntheticCorpus& corpus);

/// hidden[0] is the input batch and hidden[t + 1] the output of block t.
struct ForwardTrace {
  std::vector<Eigen::MatrixXd> hidden;
  Eigen::MatrixXd logits;
};

/// Forward pass with the given per-layer weights in place of net.weights.
ForwardTrace forward(const LayeredNet& net, std::span<const Eigen::MatrixXd> layer_weights,
                     const Eigen::MatrixXd& inputs);

/// Runs blocks [first_layer, L) starting from `hidden` and returns logits.
Eigen::MatrixXd forward_from(const LayeredNet& net, std::span<const Eigen::MatrixXd> layer_weights,
                             int first_layer, const Eigen::MatrixXd& hidden);

/// Mean of -log softmax(logits)[label] over rows. Throws NonFiniteLoss if a
/// logit is not finite and DimensionMismatch on shape disagreement.
double mean_nll(const Eigen::MatrixXd& logits, std::span<const int> labels);

/// NLL of the net evaluated with explicit per-layer weights.
double net_nll(const LayeredNet& net, const SyntheticCorpus& corpus,
               std::span<const Eigen::MatrixXd> layer_weights);

/// Payoff of a coalition: layers in S use b_high-bit weights, the rest b_low.
double net_oracle_value(const LayeredNet& net, const SyntheticCorpus& corpus,
                        const Coalition& coalition, int b_high = 4, int b_low = 2);

/// Oracle over a net and corpus. Quantized weights for both bit widths are
/// computed once at construction; evaluation is read-only.
class NetOracle final : public ValueOracle {
 public:
  NetOracle(const LayeredNet& net, const SyntheticCorpus& corpus, int b_high = 4, int b_low = 2,
            std::string fingerprint = {});

  int layer_count() const override { return net_.layer_count(); }
  double evaluate(const Coalition& coalition) const override;
  std::string fingerprint() const override { return fingerprint_; }

  int high_bits() const { return b_high_; }
  int low_bits() const { return b_low_; }

  /// Weights the forward pass uses for `coalition`.
  std::vector<Eigen::MatrixXd> coalition_weights(const Coalition& coalition) const;

 private:
  const LayeredNet& net_;
  const SyntheticCorpus& corpus_;
  int b_high_;
  int b_low_;
  std::vector<Eigen::MatrixXd> high_;
  std::vector<Eigen::MatrixXd> low_;
  std::string fingerprint_;
};

}  // namespace impq

#endif  // IMPQ_LAYERED_NET_HPP_
