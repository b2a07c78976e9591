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

#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "impq/allocator.hpp"
#include "impq/error.hpp"
#include "impq/linearized.hpp"
#include "impq/random.hpp"
#include "test_support.hpp"

namespace impq {
namespace {

AllocationProblem small_problem() {
  AllocationProblem p;
  p.linear = Eigen::Vector2d(1.0, 2.0);
  p.interaction.resize(2, 2);
  p.interaction << 0.5, 0.25, 0.25, 0.5;
  p.costs = Eigen::Vector2d(1.0, 1.0);
  p.budget = 1.0;
  return p;
}

// Coefficients on a 1/8 grid with integer costs: sums are exact, so many
// instances have several optimal q and exercise the tie-break.
AllocationProblem dyadic_problem(int layers, std::uint64_t seed) {
  Rng rng(seed);
  AllocationProblem p;
  p.linear.resize(layers);
  p.costs.resize(layers);
  p.interaction.resize(layers, layers);
  for (int i = 0; i < layers; ++i) {
    p.linear[i] = (static_cast<int>(rng.below(17)) - 8) / 8.0;
    p.costs[i] = 1.0 + static_cast<double>(rng.below(3));
    for (int j = 0; j <= i; ++j) {
      p.interaction(i, j) = p.interaction(j, i) = (static_cast<int>(rng.below(9)) - 4) / 8.0;
    }
  }
  p.budget = static_cast<double>(rng.below(static_cast<std::uint64_t>(p.costs.sum()) + 1));
  return p;
}

TEST(BudgetTest, EndpointsAndEqualCosts) {
  const std::vector<std::int64_t> counts(10, 400);
  const Eigen::VectorXd c = promotion_costs(counts, 2, 4);
  EXPECT_EQ(c[0], 100.0);
  EXPECT_EQ(budget_from_target_bits(c, counts, 2.0, 2, 4), 0.0);
  EXPECT_EQ(budget_from_target_bits(c, counts, 4.0, 2, 4), c.sum());
  const double b = budget_from_target_bits(c, counts, 2.5, 2, 4);
  EXPECT_EQ(b, 0.25 * c.sum());
  // 2.5 promoted-layer equivalents: two whole layers fit, three do not.
  EXPECT_LE(2 * c[0], b);
  EXPECT_GT(3 * c[0], b);
}

TEST(BudgetTest, TargetOutOfRangeThrows) {
  const std::vector<std::int64_t> counts{8, 8};
  const Eigen::VectorXd c = promotion_costs(counts, 2, 4);
  for (double t : {1.9, 4.1}) {
    try {
      budget_from_target_bits(c, counts, t, 2, 4);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kTargetOutOfRange);
    }
  }
}

TEST(BudgetTest, MeetingTheBudgetHitsTheTarget) {
  const std::vector<std::int64_t> counts{1000, 3000, 2000, 2000};
  const Eigen::VectorXd c = promotion_costs(counts, 2, 4);
  const double b = budget_from_target_bits(c, counts, 3.0, 2, 4);
  const std::vector<int> q{0, 0, 1, 1};  // promotes exactly half the weights
  EXPECT_EQ(promoted_bytes(c, q), b);
  EXPECT_EQ(average_bits(counts, c, q, 2, 4), 3.0);
}

TEST(ObjectiveTest, HandExamples) {
  const AllocationProblem p = small_problem();
  EXPECT_EQ(evaluate_objective(p, std::vector<int>{0, 0}), 0.0);
  EXPECT_EQ(evaluate_objective(p, std::vector<int>{1, 1}), 3.0 + 1.5);
  EXPECT_EQ(evaluate_objective(p, std::vector<int>{1, 0}), 1.5);
  EXPECT_THROW(evaluate_objective(p, std::vector<int>{1}), Error);
}

TEST(SolveExactTest, ZeroBudgetKeepsEverythingLow) {
  AllocationProblem p = testing::random_problem(8, 3, true);
  p.budget = 0.0;
  const Allocation a = solve_exact(p);
  EXPECT_EQ(a.demoted, std::vector<int>(8, 1));
  EXPECT_EQ(a.objective, evaluate_objective(p, a.demoted));
  EXPECT_EQ(a.bits, std::vector<int>(8, 2));
}

TEST(SolveExactTest, FullBudgetWithNonnegativeTermsPromotesAll) {
  AllocationProblem p = testing::random_problem(9, 4, false);
  p.linear = p.linear.cwiseAbs();
  p.interaction = p.interaction.cwiseAbs();
  p.budget = p.costs.sum();
  const Allocation a = solve_exact(p);
  EXPECT_EQ(a.demoted, std::vector<int>(9, 0));
  EXPECT_EQ(a.objective, 0.0);
  EXPECT_EQ(a.average_bits, 4.0);
}

TEST(SolveExactTest, NegativeBudgetIsInfeasible) {
  AllocationProblem p = small_problem();
  p.budget = -1.0;
  try {
    solve_exact(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInfeasible);
  }
}

TEST(SolveExactTest, ValidationErrors) {
  AllocationProblem p = small_problem();
  p.costs[1] = 0.0;
  EXPECT_THROW(solve_exact(p), Error);
  p = small_problem();
  p.interaction.resize(3, 3);
  EXPECT_THROW(solve_exact(p), Error);
}

TEST(SolveExhaustiveTest, SingleLayerWithNegativeSensitivity) {
  for (double k00 : {0.5, 2.0}) {
    AllocationProblem p;
    p.linear = Eigen::VectorXd::Constant(1, -1.0);
    p.interaction = Eigen::MatrixXd::Constant(1, 1, k00);
    p.costs = Eigen::VectorXd::Ones(1);
    p.budget = 1.0;
    const int expected = (-1.0 + k00 < 0.0) ? 1 : 0;
    EXPECT_EQ(solve_exhaustive(p).demoted, std::vector<int>{expected});
    EXPECT_EQ(solve_exact(p).demoted, std::vector<int>{expected});
  }
}

TEST(SolveExhaustiveTest, RejectsTooManyLayers) {
  AllocationProblem p = testing::random_problem(21, 1, true);
  EXPECT_THROW(solve_exhaustive(p), Error);
}

class ExactnessTest : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(ExactnessTest, MatchesIndependentEnumeration) {
  const std::uint64_t seed = GetParam();
  const int layers = 1 + static_cast<int>(seed % 12);
  for (bool indefinite : {false, true}) {
    const AllocationProblem p = testing::random_problem(layers, seed, indefinite);
    const testing::BruteAllocation brute = testing::brute_allocate(p);
    const Allocation exact = solve_exact(p);
    const Allocation scan = solve_exhaustive(p);
    EXPECT_EQ(exact.demoted, brute.q);
    EXPECT_EQ(scan.demoted, brute.q);
    EXPECT_EQ(exact.objective, scan.objective);
    EXPECT_NEAR(exact.objective, brute.objective, 1e-12);
    EXPECT_LE(exact.promoted_bytes, p.budget);
  }
}

TEST_P(ExactnessTest, TieBreakOnDyadicInstances) {
  const AllocationProblem p = dyadic_problem(2 + static_cast<int>(GetParam() % 9), GetParam());
  const testing::BruteAllocation brute = testing::brute_allocate(p);
  EXPECT_EQ(solve_exact(p).demoted, brute.q);
  EXPECT_EQ(solve_exact(p, {.warm_start = false, .on_node = {}}).demoted, brute.q);
  EXPECT_EQ(solve_exhaustive(p).demoted, brute.q);
}

TEST_P(ExactnessTest, BudgetMonotonicity) {
  AllocationProblem p = testing::random_problem(10, GetParam(), true);
  double previous = std::numeric_limits<double>::infinity();
  for (double f = 0.0; f <= 1.0; f += 0.125) {
    p.budget = f * p.costs.sum();
    const double value = solve_exact(p).objective;
    EXPECT_LE(value, previous);
    previous = value;
  }
}

// Replays every visited node against the exhaustive optimum of its subtree.
TEST_P(ExactnessTest, NodeBoundsAreAdmissible) {
  const AllocationProblem p = testing::random_problem(9, GetParam(), GetParam() % 2 == 0);
  const int n = p.layer_count();
  int checked = 0;
  SolveOptions options;
  options.on_node = [&](const NodeVisit& node) {
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> q(n);
    for (int i = 0; i < node.depth; ++i) q[i] = node.prefix[i];
    const int free = n - node.depth;
    for (std::uint64_t code = 0; code < (1ull << free); ++code) {
      for (int k = 0; k < free; ++k) q[node.depth + k] = static_cast<int>((code >> k) & 1u);
      if (promoted_bytes(p.costs, q) > p.budget) continue;
      best = std::min(best, evaluate_objective(p, q));
    }
    if (std::isfinite(best)) {
      EXPECT_LE(node.lower_bound, best + 1e-12) << "depth " << node.depth;
      ++checked;
    }
  };
  solve_exact(p, options);
  EXPECT_GT(checked, 0);
}

TEST_P(ExactnessTest, WarmStartDoesNotChangeTheAnswer) {
  const AllocationProblem p = testing::random_problem(14, GetParam(), true);
  const Allocation warm = solve_exact(p);
  const Allocation cold = solve_exact(p, {.warm_start = false, .on_node = {}});
  EXPECT_EQ(warm.demoted, cold.demoted);
  EXPECT_EQ(warm.objective, cold.objective);
}

INSTANTIATE_TEST_SUITE_P(Seeds, ExactnessTest, ::testing::Range<std::uint64_t>(0, 40));

TEST(SolveExactTest, HandlesSixtyFourLayers) {
  // Weak non-negative couplings keep the search small at the maximum size.
  Rng rng(8);
  AllocationProblem p;
  p.linear.resize(64);
  p.costs.resize(64);
  p.interaction = Eigen::MatrixXd::Zero(64, 64);
  for (int i = 0; i < 64; ++i) {
    p.linear[i] = rng.uniform(0.1, 1.0);
    p.costs[i] = 1.0 + static_cast<double>(rng.below(8));
    for (int j = 0; j < i; ++j) p.interaction(i, j) = p.interaction(j, i) = 1e-3 * rng.uniform();
  }
  p.budget = 0.3 * p.costs.sum();
  const Allocation a = solve_exact(p);
  EXPECT_LE(a.promoted_bytes, p.budget);
  EXPECT_EQ(a.objective, evaluate_objective(p, a.demoted));
  // Any single swap of a promoted and a low layer that stays feasible is no better.
  for (int i = 0; i < 64; ++i) {
    for (int j = 0; j < 64; ++j) {
      if (a.demoted[i] != 0 || a.demoted[j] != 1) continue;
      std::vector<int> q = a.demoted;
      q[i] = 1;
      q[j] = 0;
      if (promoted_bytes(p.costs, q) <= p.budget) {
        EXPECT_GE(evaluate_objective(p, q), a.objective - 1e-12);
      }
    }
  }
  p.linear = Eigen::VectorXd::Ones(65);
  p.costs = Eigen::VectorXd::Ones(65);
  p.interaction = Eigen::MatrixXd::Zero(65, 65);
  try {
    solve_exact(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLayerCountTooLarge);
  }
}

TEST(GreedyTest, HandExamples) {
  const Eigen::Vector3d costs(1, 1, 1);
  EXPECT_EQ(solve_greedy(Eigen::Vector3d(3, 1, 2), costs, 0.0).demoted,
            (std::vector<int>{1, 1, 1}));
  EXPECT_EQ(solve_greedy(Eigen::Vector3d(3, 1, 2), costs, 2.0).demoted,
            (std::vector<int>{0, 1, 0}));
  EXPECT_EQ(solve_greedy(Eigen::Vector3d(1, 1, 1), costs, 2.0).demoted,
            (std::vector<int>{0, 0, 1}));
}

TEST(GreedyTest, SkipsLayersThatDoNotFit) {
  const Eigen::Vector3d costs(5, 3, 1);
  const Allocation a = solve_greedy(Eigen::Vector3d(3, 2, 1), costs, 4.0);
  EXPECT_EQ(a.demoted, (std::vector<int>{1, 0, 0}));
  EXPECT_EQ(a.promoted_bytes, 4.0);
}

TEST(LinearizeTest, DiagonalInteractionHasNoPairs) {
  AllocationProblem p = small_problem();
  p.interaction(0, 1) = p.interaction(1, 0) = 0.0;
  const LinearizedProgram lp = linearize(p);
  EXPECT_TRUE(lp.pairs.empty());
  EXPECT_TRUE(lp.rows.empty());
  EXPECT_EQ(lp.q_coefficients, Eigen::Vector2d(1.5, 2.5));
}

TEST(LinearizeTest, TwoLayerDenseHasOnePair) {
  const LinearizedProgram lp = linearize(small_problem());
  ASSERT_EQ(lp.pairs.size(), 1u);
  EXPECT_EQ(lp.pairs[0].coefficient, 0.5);
  EXPECT_EQ(lp.rows.size(), 3u);
  EXPECT_EQ(lp.variable_count(), 3);
}

TEST(LinearizeTest, LinearObjectiveMatchesQuadratic) {
  const AllocationProblem p = testing::random_problem(10, 77, true);
  const LinearizedProgram lp = linearize(p);
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> x(lp.variable_count());
    for (int i = 0; i < 10; ++i) x[i] = static_cast<int>(rng.below(2));
    for (std::size_t k = 0; k < lp.pairs.size(); ++k) {
      x[10 + k] = x[lp.pairs[k].i] * x[lp.pairs[k].j];
    }
    const std::vector<int> q(x.begin(), x.begin() + 10);
    EXPECT_NEAR(linear_objective(lp, x), evaluate_objective(p, q), 1e-12);
    EXPECT_EQ(is_feasible(lp, x), promoted_bytes(p.costs, q) <= p.budget);
  }
}

TEST(LinearizeTest, LinkingRowsForceProducts) {
  const LinearizedProgram lp = linearize(small_problem());
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int y = 0; y < 2; ++y) {
        std::vector<int> x{a, b, y};
        bool rows_ok = true;
        for (const auto& row : lp.rows) {
          double act = 0.0;
          for (const auto& [v, c] : row.terms) act += c * x[v];
          rows_ok = rows_ok && act <= row.upper;
        }
        EXPECT_EQ(rows_ok, y == a * b);
      }
    }
  }
}

TEST_P(ExactnessTest, LinearizedOptimumMatchesQuadratic) {
  const AllocationProblem p = dyadic_problem(2 + static_cast<int>(GetParam() % 7), GetParam() + 500);
  const LinearizedProgram lp = linearize(p);
  const BinaryProgramSolution sol = solve_binary_program(lp);
  const Allocation exact = solve_exact(p);
  EXPECT_EQ(sol.objective, exact.objective);
  for (const auto& pair : lp.pairs) {
    const int y = sol.x[lp.layer_count + (&pair - lp.pairs.data())];
    EXPECT_EQ(y, sol.x[pair.i] * sol.x[pair.j]);
  }
  EXPECT_TRUE(is_feasible(lp, sol.x));
}

}  // namespace
}  // namespace impq
