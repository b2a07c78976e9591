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

#include "impq/interaction.hpp"

#include <string>

#include "impq/error.hpp"

namespace impq {

Eigen::MatrixXd covariance(const MarginalMatrix& matrix, const ShapleyEstimate& estimate) {
  const int samples = matrix.samples();
  const int layers = matrix.layer_count();
  if (samples < 1) fail(ErrorCode::kInvalidParameter, "marginal matrix has no rows");
  if (estimate.phi_hat.size() != layers) {
    fail(ErrorCode::kDimensionMismatch, "estimate has " + std::to_string(estimate.phi_hat.size()) +
                                            " layers, matrix has " + std::to_string(layers));
  }
  const Eigen::MatrixXd dev = matrix.rows.rowwise() - estimate.phi_hat.transpose();
  Eigen::MatrixXd c(layers, layers);
  for (int i = 0; i < layers; ++i) {
    for (int j = i; j < layers; ++j) {
      const double v = dev.col(i).dot(dev.col(j)) / samples;
      c(i, j) = v;
      c(j, i) = v;
    }
  }
  return c;
}

Eigen::MatrixXd shrink(const Eigen::MatrixXd& c, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    fail(ErrorCode::kAlphaOutOfRange, "alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
  if (c.rows() != c.cols()) fail(ErrorCode::kDimensionMismatch, "covariance must be square");
  Eigen::MatrixXd k = (1.0 - alpha) * c;
  k.diagonal() = c.diagonal();
  return k;
}

Eigen::VectorXd extract_sensitivities(const ShapleyEstimate& estimate, const Eigen::MatrixXd& k) {
  const auto layers = estimate.phi_hat.size();
  if (k.rows() != layers || k.cols() != layers) {
    fail(ErrorCode::kDimensionMismatch, "interaction matrix must be L x L");
  }
  Eigen::VectorXd a(layers);
  for (Eigen::Index i = 0; i < layers; ++i) {
    double off = 0.0;
    for (Eigen::Index j = 0; j < layers; ++j) {
      if (j != i) off += k(i, j);
    }
    a[i] = estimate.phi_hat[i] - off;
  }
  return a;
}

InteractionModel build_interaction_model(const MarginalMatrix& matrix, double alpha) {
  const ShapleyEstimate est = estimate(matrix);
  InteractionModel model;
  model.alpha = alpha;
  model.source_samples = matrix.samples();
  model.covariance = covariance(matrix, est);
  model.shrunk = shrink(model.covariance, alpha);
  model.sensitivities = extract_sensitivities(est, model.shrunk);
  return model;
}

}  // namespace impq
