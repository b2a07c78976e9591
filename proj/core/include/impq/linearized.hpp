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

#ifndef IMPQ_LINEARIZED_HPP_
#define IMPQ_LINEARIZED_HPP_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "impq/allocator.hpp"

namespace impq {

// 0-1 linear program equivalent to an AllocationProblem. Variables are
// x = (q_0 .. q_{L-1}, y_0 .. y_{P-1}) where y_p stands for q_i * q_j of
// pair p. Since q_i^2 = q_i the diagonal K_ii folds into q_i's coefficient;
// y_p carries K_ij + K_ji. Each y_p has three linking rows:
//   q_i + q_j - y_p <= 1,   y_p - q_i <= 0,   y_p - q_j <= 0.

struct PairVariable {
  int i = 0;
  int j = 0;
  double coefficient = 0.0;
};

struct LinearRow {
  std::vector<std::pair<int, double>> terms;
  double upper = 0.0;
};

struct LinearizedProgram {
  int layer_count = 0;
  Eigen::VectorXd q_coefficients;
  std::vector<PairVariable> pairs;
  std::vector<LinearRow> rows;
  Eigen::VectorXd costs;
  double budget = 0.0;

  int variable_count() const { return layer_count + static_cast<int>(pairs.size()); }
};

/// Pairs whose combined coefficient is zero are omitted.
LinearizedProgram linearize(const AllocationProblem& problem);

double linear_objective(const LinearizedProgram& program, std::span<const int> x);
bool is_feasible(const LinearizedProgram& program, std::span<const int> x);

struct BinaryProgramSolution {
  std::vector<int> x;
  double objective = 0.0;
  std::int64_t nodes = 0;
};

/// General 0-1 branch and bound over x in index order, pruning on row
/// activity and the budget. It knows nothing about the quadratic form.
BinaryProgramSolution solve_binary_program(const LinearizedProgram& program);

}  // namespace impq

#endif  // IMPQ_LINEARIZED_HPP_
