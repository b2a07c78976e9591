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

#ifndef IMPQ_INTERACTION_HPP_
#define IMPQ_INTERACTION_HPP_

#include <Eigen/Dense>

#include "impq/spqe.hpp"

namespace impq {

inline constexpr double kDefaultAlpha = 0.5;

/// Interaction model derived from SPQE marginals.
///   covariance  C = (1/M) D^T D,  D[m][i] = marginal[m][i] - phi_hat[i]
///   shrunk      K = (1 - alpha) C + alpha diag(C)
///   sensitivity a[i] = phi_hat[i] - sum_{j != i} K[i][j]
struct InteractionModel {
  Eigen::MatrixXd covariance;
  Eigen::MatrixXd shrunk;
  Eigen::VectorXd sensitivities;
  double alpha = kDefaultAlpha;
  int source_samples = 0;
};

/// L x L deviation covariance with 1/M normalisation; exactly symmetric.
Eigen::MatrixXd covariance(const MarginalMatrix& matrix, const ShapleyEstimate& estimate);

/// Throws AlphaOutOfRange unless 0 <= alpha <= 1. The diagonal is copied
/// from `c` unchanged.
Eigen::MatrixXd shrink(const Eigen::MatrixXd& c, double alpha);

Eigen::VectorXd extract_sensitivities(const ShapleyEstimate& estimate, const Eigen::MatrixXd& k);

InteractionModel build_interaction_model(const MarginalMatrix& matrix, double alpha);

}  // namespace impq

#endif  // IMPQ_INTERACTION_HPP_
