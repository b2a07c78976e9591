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

#ifndef IMPQ_ALLOCATOR_HPP_
#define IMPQ_ALLOCATOR_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace impq {

inline constexpr int kMaxExhaustiveLayers = 20;

/// min_q  a^T q + q^T K q   s.t.  sum_i c_i (1 - q_i) <= budget,  q in {0,1}^L
///
/// q_i = 1 keeps layer i at b_low, q_i = 0 promotes it to b_high at a cost
/// of c_i bytes. param_counts, when present, weight the achieved average
/// bit width; otherwise the costs (which are proportional) are used.
struct AllocationProblem {
  Eigen::VectorXd linear;
  Eigen::MatrixXd interaction;
  Eigen::VectorXd costs;
  double budget = 0.0;
  std::vector<std::int64_t> param_counts;
  int b_low = 2;
  int b_high = 4;

  int layer_count() const { return static_cast<int>(linear.size()); }
};

/// DimensionMismatch on inconsistent shapes; InvalidParameter on
/// non-positive costs or non-finite coefficients; Infeasible on a negative
/// budget.
void validate(const AllocationProblem& problem);

struct Allocation {
  std::vector<int> demoted;  // q
  std::vector<int> bits;
  double objective = 0.0;
  double promoted_bytes = 0.0;
  double average_bits = 0.0;
  std::int64_t nodes = 0;
  std::optional<double> wall_seconds;
};

/// c_i = n_i (b_high - b_low) / 8 bytes.
Eigen::VectorXd promotion_costs(std::span<const std::int64_t> param_counts, int b_low, int b_high);

/// Budget f * sum(c) with f = (target - b_low) / (b_high - b_low). Throws
/// TargetOutOfRange unless b_low <= target <= b_high.
double budget_from_target_bits(const Eigen::VectorXd& costs,
                               std::span<const std::int64_t> param_counts,
                               double target_avg_bits, int b_low, int b_high);

/// a^T q + q^T K q, summed in index order. Every solver scores leaves with
/// this function so optimal values compare exactly.
double evaluate_objective(const AllocationProblem& problem, std::span<const int> q);

/// sum_i c_i (1 - q_i), summed in index order.
double promoted_bytes(const Eigen::VectorXd& costs, std::span<const int> q);

double average_bits(std::span<const std::int64_t> param_counts, const Eigen::VectorXd& costs,
                    std::span<const int> q, int b_low, int b_high);

/// Fills bits, objective, promoted bytes and average bits for `q`.
Allocation make_allocation(const AllocationProblem& problem, std::vector<int> q);

/// Visited branch-and-bound node: q[0, depth) are fixed to `prefix`.
struct NodeVisit {
  int depth = 0;
  std::span<const int> prefix;
  double lower_bound = 0.0;
  double incumbent = 0.0;
};

struct SolveOptions {
  bool warm_start = true;
  std::function<void(const NodeVisit&)> on_node;
};

/// Exact depth-first branch and bound (L <= 64). Returns the optimal q with
/// the lexicographically smallest q among ties.
Allocation solve_exact(const AllocationProblem& problem, const SolveOptions& options = {});

/// Full 2^L scan (L <= 20) with the same tie-break as solve_exact.
Allocation solve_exhaustive(const AllocationProblem& problem);

/// Promote layers by descending score (ties by lower index) while the
/// cumulative cost fits; layers that do not fit are skipped. The returned
/// objective is the summed score of the layers left at b_low.
Allocation solve_greedy(const Eigen::VectorXd& scores, const Eigen::VectorXd& costs, double budget,
                        int b_low = 2, int b_high = 4);

}  // namespace impq

#endif  // IMPQ_ALLOCATOR_HPP_
