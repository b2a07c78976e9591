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

#include "impq/linearized.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "impq/error.hpp"

namespace impq {

LinearizedProgram linearize(const AllocationProblem& problem) {
  validate(problem);
  const int layers = problem.layer_count();
  LinearizedProgram program;
  program.layer_count = layers;
  program.costs = problem.costs;
  program.budget = problem.budget;
  program.q_coefficients.resize(layers);
  for (int i = 0; i < layers; ++i) {
    program.q_coefficients[i] = problem.linear[i] + problem.interaction(i, i);
  }
  for (int i = 0; i < layers; ++i) {
    for (int j = i + 1; j < layers; ++j) {
      const double coefficient = problem.interaction(i, j) + problem.interaction(j, i);
      if (coefficient == 0.0) continue;
      const int y = layers + static_cast<int>(program.pairs.size());
      program.pairs.push_back({i, j, coefficient});
      program.rows.push_back({{{i, 1.0}, {j, 1.0}, {y, -1.0}}, 1.0});
      program.rows.push_back({{{y, 1.0}, {i, -1.0}}, 0.0});
      program.rows.push_back({{{y, 1.0}, {j, -1.0}}, 0.0});
    }
  }
  return program;
}

double linear_objective(const LinearizedProgram& program, std::span<const int> x) {
  if (static_cast<int>(x.size()) != program.variable_count()) {
    fail(ErrorCode::kDimensionMismatch, "assignment has the wrong number of variables");
  }
  double value = 0.0;
  for (int i = 0; i < program.layer_count; ++i) {
    if (x[i]) value += program.q_coefficients[i];
  }
  for (std::size_t p = 0; p < program.pairs.size(); ++p) {
    if (x[program.layer_count + p]) value += program.pairs[p].coefficient;
  }
  return value;
}

bool is_feasible(const LinearizedProgram& program, std::span<const int> x) {
  if (static_cast<int>(x.size()) != program.variable_count()) {
    fail(ErrorCode::kDimensionMismatch, "assignment has the wrong number of variables");
  }
  for (const auto& row : program.rows) {
    double activity = 0.0;
    for (const auto& [var, coef] : row.terms) activity += coef * x[var];
    if (activity > row.upper) return false;
  }
  double promoted = 0.0;
  for (int i = 0; i < program.layer_count; ++i) {
    if (!x[i]) promoted += program.costs[i];
  }
  return promoted <= program.budget;
}

namespace {

class BinarySearch {
 public:
  explicit BinarySearch(const LinearizedProgram& program)
      : program_(program), vars_(program.variable_count()), x_(vars_, 0), fixed_(vars_, 0) {
    coef_.resize(vars_);
    for (int i = 0; i < program.layer_count; ++i) coef_[i] = program.q_coefficients[i];
    for (std::size_t p = 0; p < program.pairs.size(); ++p) {
      coef_[program.layer_count + p] = program.pairs[p].coefficient;
    }
    rows_of_.resize(vars_);
    for (std::size_t r = 0; r < program.rows.size(); ++r) {
      for (const auto& term : program.rows[r].terms) rows_of_[term.first].push_back(r);
    }
  }

  void run() { dfs(0, 0.0, 0.0); }

  BinaryProgramSolution solution() const { return {best_, best_value_, nodes_}; }

 private:
  // Smallest activity row `r` can still reach given the fixed variables.
  bool row_satisfiable(std::size_t r) const {
    double activity = 0.0;
    for (const auto& [var, coef] : program_.rows[r].terms) {
      activity += fixed_[var] ? coef * x_[var] : std::min(0.0, coef);
    }
    return activity <= program_.rows[r].upper;
  }

  bool consistent(int var) const {
    for (std::size_t r : rows_of_[var]) {
      if (!row_satisfiable(r)) return false;
    }
    return true;
  }

  void dfs(int var, double fixed_value, double promoted) {
    ++nodes_;
    double bound = fixed_value;
    for (int v = var; v < vars_; ++v) bound += std::min(0.0, coef_[v]);
    if (!best_.empty() && bound > best_value_ + 1e-9 * std::max(1.0, std::abs(best_value_))) return;

    if (var == vars_) {
      const double value = linear_objective(program_, x_);
      if (best_.empty() || value < best_value_) {
        best_ = x_;
        best_value_ = value;
      }
      return;
    }
    for (int value : {0, 1}) {
      double next_promoted = promoted;
      if (var < program_.layer_count && value == 0) {
        next_promoted += program_.costs[var];
        if (next_promoted > program_.budget) continue;
      }
      x_[var] = value;
      fixed_[var] = 1;
      if (consistent(var)) dfs(var + 1, fixed_value + (value ? coef_[var] : 0.0), next_promoted);
      fixed_[var] = 0;
      x_[var] = 0;
    }
  }

  const LinearizedProgram& program_;
  int vars_;
  std::vector<int> x_;
  std::vector<int> fixed_;
  std::vector<double> coef_;
  std::vector<std::vector<std::size_t>> rows_of_;
  std::vector<int> best_;
  double best_value_ = 0.0;
  std::int64_t nodes_ = 0;
};

}  // namespace

BinaryProgramSolution solve_binary_program(const LinearizedProgram& program) {
  if (program.layer_count < 1) fail(ErrorCode::kInvalidParameter, "program has no variables");
  if (program.budget < 0.0) fail(ErrorCode::kInfeasible, "budget is negative");
  BinarySearch search(program);
  search.run();
  return search.solution();
}

}  // namespace impq
