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

#include "impq/allocator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "impq/coalition.hpp"
#include "impq/error.hpp"

namespace impq {

void validate(const AllocationProblem& problem) {
  const int layers = problem.layer_count();
  if (layers < 1 || layers > kMaxLayers) {
    fail(ErrorCode::kLayerCountTooLarge, "allocation supports 1..64 layers, got " +
                                             std::to_string(layers));
  }
  if (problem.interaction.rows() != layers || problem.interaction.cols() != layers ||
      problem.costs.size() != layers) {
    fail(ErrorCode::kDimensionMismatch, "a, K and costs must agree on L");
  }
  if (!problem.param_counts.empty() && static_cast<int>(problem.param_counts.size()) != layers) {
    fail(ErrorCode::kDimensionMismatch, "param_counts must be empty or have L entries");
  }
  if (!problem.linear.allFinite() || !problem.interaction.allFinite() ||
      !std::isfinite(problem.budget)) {
    fail(ErrorCode::kInvalidParameter, "allocation coefficients must be finite");
  }
  for (Eigen::Index i = 0; i < problem.costs.size(); ++i) {
    if (!(problem.costs[i] > 0.0) || !std::isfinite(problem.costs[i])) {
      fail(ErrorCode::kInvalidParameter, "promotion costs must be positive");
    }
  }
  if (problem.b_low >= problem.b_high) {
    fail(ErrorCode::kInvalidParameter, "b_low must be below b_high");
  }
  if (problem.budget < 0.0) fail(ErrorCode::kInfeasible, "budget is negative");
}

Eigen::VectorXd promotion_costs(std::span<const std::int64_t> param_counts, int b_low,
                                int b_high) {
  if (b_low >= b_high) fail(ErrorCode::kInvalidParameter, "b_low must be below b_high");
  Eigen::VectorXd costs(static_cast<Eigen::Index>(param_counts.size()));
  for (std::size_t i = 0; i < param_counts.size(); ++i) {
    if (param_counts[i] <= 0) fail(ErrorCode::kInvalidParameter, "param counts must be positive");
    costs[static_cast<Eigen::Index>(i)] =
        static_cast<double>(param_counts[i]) * (b_high - b_low) / 8.0;
  }
  return costs;
}

double budget_from_target_bits(const Eigen::VectorXd& costs,
                               std::span<const std::int64_t> param_counts,
                               double target_avg_bits, int b_low, int b_high) {
  if (b_low >= b_high) fail(ErrorCode::kInvalidParameter, "b_low must be below b_high");
  if (!(target_avg_bits >= b_low && target_avg_bits <= b_high)) {
    fail(ErrorCode::kTargetOutOfRange, "target " + std::to_string(target_avg_bits) +
                                           " bits outside [" + std::to_string(b_low) + ", " +
                                           std::to_string(b_high) + "]");
  }
  if (!param_counts.empty() && static_cast<Eigen::Index>(param_counts.size()) != costs.size()) {
    fail(ErrorCode::kDimensionMismatch, "param_counts and costs disagree on L");
  }
  const double fraction = (target_avg_bits - b_low) / (b_high - b_low);
  return fraction * costs.sum();
}

double evaluate_objective(const AllocationProblem& problem, std::span<const int> q) {
  const int layers = problem.layer_count();
  if (static_cast<int>(q.size()) != layers || problem.interaction.rows() != layers ||
      problem.interaction.cols() != layers) {
    fail(ErrorCode::kDimensionMismatch, "q must have one entry per layer");
  }
  double value = 0.0;
  for (int i = 0; i < layers; ++i) {
    if (q[i]) value += problem.linear[i];
  }
  for (int i = 0; i < layers; ++i) {
    if (!q[i]) continue;
    for (int j = 0; j < layers; ++j) {
      if (q[j]) value += problem.interaction(i, j);
    }
  }
  return value;
}

double promoted_bytes(const Eigen::VectorXd& costs, std::span<const int> q) {
  if (static_cast<Eigen::Index>(q.size()) != costs.size()) {
    fail(ErrorCode::kDimensionMismatch, "q must have one entry per layer");
  }
  double bytes = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!q[i]) bytes += costs[static_cast<Eigen::Index>(i)];
  }
  return bytes;
}

double average_bits(std::span<const std::int64_t> param_counts, const Eigen::VectorXd& costs,
                    std::span<const int> q, int b_low, int b_high) {
  double weighted = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double w = param_counts.empty() ? costs[static_cast<Eigen::Index>(i)]
                                          : static_cast<double>(param_counts[i]);
    weighted += w * (q[i] ? b_low : b_high);
    total += w;
  }
  return total > 0.0 ? weighted / total : 0.0;
}

Allocation make_allocation(const AllocationProblem& problem, std::vector<int> q) {
  Allocation out;
  out.objective = evaluate_objective(problem, q);
  out.promoted_bytes = promoted_bytes(problem.costs, q);
  out.average_bits = average_bits(problem.param_counts, problem.costs, q, problem.b_low,
                                  problem.b_high);
  out.bits.reserve(q.size());
  for (int v : q) out.bits.push_back(v ? problem.b_low : problem.b_high);
  out.demoted = std::move(q);
  return out;
}

namespace {

// Pruning slack: a node is cut only when its bound beats the incumbent by
// more than rounding noise, so tied optima are always reached.
double prune_slack(double incumbent) { return 1e-9 * std::max(1.0, std::abs(incumbent)); }

class BranchAndBound {
 public:
  BranchAndBound(const AllocationProblem& problem, const SolveOptions& options)
      : problem_(problem), options_(options), layers_(problem.layer_count()) {
    lin_.resize(layers_);
    pair_ = Eigen::MatrixXd::Zero(layers_, layers_);
    for (int i = 0; i < layers_; ++i) {
      lin_[i] = problem.linear[i] + problem.interaction(i, i);
      for (int j = 0; j < layers_; ++j) {
        if (i != j) pair_(i, j) = problem.interaction(i, j) + problem.interaction(j, i);
      }
    }
    suffix_neg_.assign(layers_, 0.0);
    for (int k = 0; k < layers_; ++k) {
      for (int j = k + 1; j < layers_; ++j) suffix_neg_[k] += std::min(0.0, pair_(k, j));
    }
    ext_ = lin_;
    q_.assign(layers_, 1);
  }

  void seed_incumbent(std::vector<int> q) {
    // Greedy accumulates costs in score order; re-check in index order.
    if (promoted_bytes(problem_.costs, q) > problem_.budget) return;
    best_objective_ = evaluate_objective(problem_, q);
    best_ = std::move(q);
  }

  void run() {
    fixed_value_ = 0.0;
    promoted_ = 0.0;
    dfs(0);
  }

  const std::vector<int>& best() const { return best_; }
  std::int64_t nodes() const { return nodes_; }

 private:
  double lower_bound(int depth) const {
    double bound = fixed_value_;
    double positive_cost = 0.0;
    scratch_.clear();
    for (int k = depth; k < layers_; ++k) {
      const double lb = ext_[k] + suffix_neg_[k];
      if (lb <= 0.0) {
        bound += lb;
      } else {
        positive_cost += problem_.costs[k];
        scratch_.emplace_back(lb / problem_.costs[k], k);
      }
    }
    // Layers with a positive floor want promotion; whatever the remaining
    // budget cannot cover must stay low. Fractional cover of that excess.
    double excess = positive_cost - (problem_.budget - promoted_);
    if (excess > 0.0) {
      std::sort(scratch_.begin(), scratch_.end());
      for (const auto& [ratio, k] : scratch_) {
        const double take = std::min(excess, problem_.costs[k]);
        bound += ratio * take;
        excess -= take;
        if (excess <= 0.0) break;
      }
    }
    return bound;
  }

  bool lex_less(const std::vector<int>& a, const std::vector<int>& b) const {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }

  void dfs(int depth) {
    ++nodes_;
    const double bound = lower_bound(depth);
    if (options_.on_node) {
      options_.on_node(NodeVisit{depth, std::span<const int>(q_.data(), depth), bound,
                                 best_.empty() ? std::numeric_limits<double>::infinity()
                                               : best_objective_});
    }
    if (!best_.empty() && bound > best_objective_ + prune_slack(best_objective_)) return;

    if (depth == layers_) {
      const double value = evaluate_objective(problem_, q_);
      if (best_.empty() || value < best_objective_ ||
          (value == best_objective_ && lex_less(q_, best_))) {
        best_objective_ = value;
        best_ = q_;
      }
      return;
    }

    // Branch q = 0 (promote) first so the first optimum found is the
    // lexicographically smallest.
    const double cost = problem_.costs[depth];
    if (promoted_ + cost <= problem_.budget) {
      const double saved = promoted_;
      promoted_ += cost;
      q_[depth] = 0;
      dfs(depth + 1);
      promoted_ = saved;
    }

    q_[depth] = 1;
    const double saved_value = fixed_value_;
    fixed_value_ += ext_[depth];
    // Restore from a copy rather than subtracting, so rounding never drifts.
    const std::vector<double> saved_ext(ext_.begin() + depth + 1, ext_.end());
    for (int k = depth + 1; k < layers_; ++k) ext_[k] += pair_(depth, k);
    dfs(depth + 1);
    std::copy(saved_ext.begin(), saved_ext.end(), ext_.begin() + depth + 1);
    fixed_value_ = saved_value;
  }

  const AllocationProblem& problem_;
  const SolveOptions& options_;
  int layers_;
  std::vector<double> lin_;
  Eigen::MatrixXd pair_;
  std::vector<double> suffix_neg_;
  std::vector<double> ext_;
  std::vector<int> q_;
  double fixed_value_ = 0.0;
  double promoted_ = 0.0;
  std::vector<int> best_;
  double best_objective_ = 0.0;
  std::int64_t nodes_ = 0;
  mutable std::vector<std::pair<double, int>> scratch_;
};

}  // namespace

Allocation solve_exact(const AllocationProblem& problem, const SolveOptions& options) {
  validate(problem);
  BranchAndBound search(problem, options);
  if (options.warm_start) {
    Eigen::VectorXd scores = problem.linear + problem.interaction.diagonal();
    search.seed_incumbent(
        solve_greedy(scores, problem.costs, problem.budget, problem.b_low, problem.b_high).demoted);
  }
  search.run();
  Allocation out = make_allocation(problem, search.best());
  out.nodes = search.nodes();
  return out;
}

Allocation solve_exhaustive(const AllocationProblem& problem) {
  validate(problem);
  const int layers = problem.layer_count();
  if (layers > kMaxExhaustiveLayers) {
    fail(ErrorCode::kLayerCountTooLarge, "exhaustive allocation supports at most 20 layers, got " +
                                             std::to_string(layers));
  }
  // Counting up with q_0 as the most significant bit visits q in
  // lexicographic order, so keeping the first strict minimum breaks ties
  // toward the smallest q.
  std::vector<int> q(static_cast<std::size_t>(layers));
  std::vector<int> best;
  double best_value = 0.0;
  const std::uint64_t count = std::uint64_t{1} << layers;
  for (std::uint64_t code = 0; code < count; ++code) {
    for (int i = 0; i < layers; ++i) q[i] = static_cast<int>((code >> (layers - 1 - i)) & 1U);
    if (promoted_bytes(problem.costs, q) > problem.budget) continue;
    const double value = evaluate_objective(problem, q);
    if (best.empty() || value < best_value) {
      best = q;
      best_value = value;
    }
  }
  Allocation out = make_allocation(problem, best);
  out.nodes = static_cast<std::int64_t>(count);
  return out;
}

Allocation solve_greedy(const Eigen::VectorXd& scores, const Eigen::VectorXd& costs, double budget,
                        int b_low, int b_high) {
  if (scores.size() != costs.size()) {
    fail(ErrorCode::kDimensionMismatch, "scores and costs disagree on L");
  }
  const auto layers = static_cast<int>(scores.size());
  std::vector<int> order(static_cast<std::size_t>(layers));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return scores[a] > scores[b]; });

  std::vector<int> q(static_cast<std::size_t>(layers), 1);
  double used = 0.0;
  for (int i : order) {
    if (used + costs[i] <= budget) {
      used += costs[i];
      q[i] = 0;
    }
  }
  Allocation out;
  out.promoted_bytes = promoted_bytes(costs, q);
  out.average_bits = average_bits({}, costs, q, b_low, b_high);
  for (int i = 0; i < layers; ++i) {
    if (q[i]) out.objective += scores[i];
    out.bits.push_back(q[i] ? b_low : b_high);
  }
  out.demoted = std::move(q);
  return out;
}

}  // namespace impq
