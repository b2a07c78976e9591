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
#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "impq/coalition.hpp"
#include "impq/error.hpp"
#include "impq/instance.hpp"
#include "impq/oracle.hpp"
#include "impq/random.hpp"
#include "impq/shapley.hpp"
#include "test_support.hpp"

namespace impq {
namespace {

// Oracle defined directly on the demoted mask.
FunctionOracle demotion_oracle(int layers, testing::DemotionGame game) {
  const std::uint64_t all = (1ull << layers) - 1;
  return FunctionOracle(layers, [game, all](const Coalition& c) { return game(all & ~c.mask()); });
}

// A generic random game: independent value per coalition.
FunctionOracle random_game(int layers, std::uint64_t seed) {
  auto table = std::make_shared<std::vector<double>>(1u << layers);
  Rng rng(seed);
  for (double& v : *table) v = rng.uniform(-2.0, 2.0);
  return FunctionOracle(layers, [table](const Coalition& c) { return (*table)[c.mask()]; });
}

TEST(CoalitionTest, MembershipAndSize) {
  const Coalition c = Coalition::from_members(5, {0, 3});
  EXPECT_EQ(c.size(), 2);
  EXPECT_TRUE(c.contains(3));
  EXPECT_FALSE(c.contains(1));
  EXPECT_EQ(c.with(1).size(), 3);
  EXPECT_EQ(c.without(0), Coalition::from_members(5, {3}));
  EXPECT_EQ(Coalition::full(5).size(), 5);
  EXPECT_EQ(Coalition::empty(5).size(), 0);
  EXPECT_EQ(c.members(), (std::vector<int>{0, 3}));
  EXPECT_EQ(Coalition::full(64).size(), 64);
}

TEST(CoalitionTest, RejectsInvalidLayers) {
  EXPECT_THROW(Coalition(0), Error);
  EXPECT_THROW(Coalition(65), Error);
  EXPECT_THROW(Coalition::from_members(4, {4}), Error);
  EXPECT_THROW(Coalition(3, 0b1000), Error);
}

TEST(OracleTest, CheckedEvaluationWrapsFailures) {
  FunctionOracle throws(2, [](const Coalition&) -> double { throw std::runtime_error("boom"); });
  FunctionOracle nan(2, [](const Coalition&) { return std::nan(""); });
  FunctionOracle fine(2, [](const Coalition& c) { return c.size(); });
  try {
    evaluate_checked(throws, Coalition::full(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOracleFailure);
  }
  try {
    evaluate_checked(nan, Coalition::full(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOracleFailure);
  }
  try {
    evaluate_checked(fine, Coalition::full(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
}

TEST(OracleTest, MemoizationIsInvisibleAndCountsCalls) {
  const FunctionOracle base = random_game(4, 3);
  MemoizedOracle memo(base);
  for (int round = 0; round < 3; ++round) {
    for (std::uint64_t m = 0; m < 16; ++m) {
      EXPECT_EQ(memo.evaluate(Coalition(4, m)), base.evaluate(Coalition(4, m)));
    }
  }
  EXPECT_EQ(memo.inner_evaluations(), 16);
  EXPECT_EQ(memo.cache_size(), 16u);
}

TEST(ExactShapleyTest, SinglePlayerGame) {
  FunctionOracle o(1, [](const Coalition& c) { return c.contains(0) ? 1.0 : 3.0; });
  const auto r = exact_shapley(o);
  EXPECT_DOUBLE_EQ(r.phi[0], 2.0);
  EXPECT_DOUBLE_EQ(r.v_full, 1.0);
  EXPECT_DOUBLE_EQ(r.v_empty, 3.0);
}

TEST(ExactShapleyTest, SymmetricTwoPlayerGame) {
  FunctionOracle o(2, [](const Coalition& c) { return 4.0 - 2.0 * c.size(); });
  const auto r = exact_shapley(o);
  EXPECT_DOUBLE_EQ(r.phi[0], 2.0);
  EXPECT_DOUBLE_EQ(r.phi[1], 2.0);
}

TEST(ExactShapleyTest, QuadraticMatchesBruteForceAndClosedForm) {
  const QuadraticSurrogate model = generate_quadratic(4, 21, 1.0);
  const QuadraticOracle oracle(model);
  const auto r = exact_shapley(oracle);
  const Eigen::VectorXd brute = testing::brute_shapley(
      4, [&](std::uint64_t d) { return testing::brute_quadratic(model, d); });
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(r.phi[i], brute[i], 1e-12);
    // Every pair term, including the diagonal H_ii, is shared with i.
    EXPECT_NEAR(brute[i], model.g_eff[i] + model.h_eff.row(i).sum(), 1e-12);
  }
}

TEST(ExactShapleyTest, RejectsTooManyLayers) {
  FunctionOracle big(21, [](const Coalition&) { return 0.0; });
  try {
    exact_shapley(big);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLayerCountTooLarge);
  }
  FunctionOracle nine(9, [](const Coalition&) { return 0.0; });
  EXPECT_THROW(full_permutation_shapley(nine), Error);
}

TEST(ExactShapleyTest, OracleFailurePropagates) {
  FunctionOracle bad(3, [](const Coalition& c) { return c.size() == 1 ? std::nan("") : 0.0; });
  try {
    exact_shapley(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOracleFailure);
  }
}

TEST(PermutationShapleyTest, AdditiveGame) {
  const std::vector<double> w{1.0, 2.0, 3.0};
  auto o = demotion_oracle(3, [&](std::uint64_t d) {
    double v = 0.0;
    for (int i = 0; i < 3; ++i) v += ((d >> i) & 1u) ? w[i] : 0.0;
    return v;
  });
  const auto r = full_permutation_shapley(o);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(r.phi[i], w[i], 1e-12);
}

TEST(PermutationShapleyTest, AgreesWithSubsetFormOnRandomGames) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    for (int layers : {3, 5}) {
      const auto game = random_game(layers, seed);
      const auto a = exact_shapley(game);
      const auto b = full_permutation_shapley(game);
      for (int i = 0; i < layers; ++i) EXPECT_NEAR(a.phi[i], b.phi[i], 1e-9);
    }
  }
  const QuadraticOracle quad(generate_quadratic(5, 8, 1.0));
  const auto a = exact_shapley(quad);
  const auto b = full_permutation_shapley(quad);
  EXPECT_LT((a.phi - b.phi).cwiseAbs().maxCoeff(), 1e-9);
}

// Shapley axioms on random games.
class ShapleyAxiomsTest : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(ShapleyAxiomsTest, Efficiency) {
  const auto game = random_game(6, GetParam());
  for (const auto& r : {exact_shapley(game), full_permutation_shapley(game)}) {
    const double target = r.v_empty - r.v_full;
    EXPECT_LE(std::abs(r.phi.sum() - target), 1e-9 * std::max(1.0, std::abs(target)));
  }
}

TEST_P(ShapleyAxiomsTest, SymmetryOfExchangeableLayers) {
  // Payoff depends on layers 1 and 3 only through their count.
  Rng rng(GetParam());
  std::vector<double> table(1u << 5);
  for (double& v : table) v = rng.uniform();
  auto o = FunctionOracle(5, [table](const Coalition& c) {
    std::uint64_t m = c.mask();
    const bool b1 = (m >> 1) & 1u, b3 = (m >> 3) & 1u;
    m &= ~((1ull << 1) | (1ull << 3));
    if (b1 || b3) m |= 1ull << 1;
    if (b1 && b3) m |= 1ull << 3;
    return table[m];
  });
  const auto r = exact_shapley(o);
  EXPECT_NEAR(r.phi[1], r.phi[3], 1e-9);
}

TEST_P(ShapleyAxiomsTest, DummyLayerGetsZero) {
  const auto inner = random_game(4, GetParam());
  // Layer 4 is ignored by the payoff.
  FunctionOracle o(5, [&inner](const Coalition& c) {
    return inner.evaluate(Coalition(4, c.mask() & 0xf));
  });
  EXPECT_NEAR(exact_shapley(o).phi[4], 0.0, 1e-12);
}

TEST_P(ShapleyAxiomsTest, Linearity) {
  const auto g1 = random_game(5, GetParam());
  const auto g2 = random_game(5, GetParam() + 1000);
  FunctionOracle sum(5, [&](const Coalition& c) { return g1.evaluate(c) + g2.evaluate(c); });
  const Eigen::VectorXd lhs = exact_shapley(sum).phi;
  const Eigen::VectorXd rhs = exact_shapley(g1).phi + exact_shapley(g2).phi;
  EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-9);
}

INSTANTIATE_TEST_SUITE_P(Seeds, ShapleyAxiomsTest, ::testing::Range<std::uint64_t>(0, 8));

}  // namespace
}  // namespace impq
