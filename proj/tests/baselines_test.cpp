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
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "impq/allocator.hpp"
#include "impq/baselines.hpp"
#include "impq/error.hpp"
#include "impq/instance.hpp"
#include "impq/quantize.hpp"
#include "impq/random.hpp"

namespace impq {
namespace {

// Reverse-mode gradient of the mean NLL of the residual net, written out
// by hand as an independent check of the finite-difference gradients.
std::vector<Eigen::MatrixXd> analytic_gradients(const LayeredNet& net, const SyntheticCorpus& c) {
  const int layers = net.layer_count();
  std::vector<Eigen::MatrixXd> h{c.inputs};
  std::vector<Eigen::MatrixXd> act;
  for (int t = 0; t < layers; ++t) {
    Eigen::MatrixXd pre = h[t] * net.weights[t].transpose();
    pre.rowwise() += net.biases[t].transpose();
    act.push_back(pre.array().tanh().matrix());
    h.push_back(h[t] + act[t]);
  }
  const Eigen::MatrixXd logits = h[layers] * net.head.transpose();
  const double n = static_cast<double>(c.size());
  Eigen::MatrixXd dlogits(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double m = logits.row(r).maxCoeff();
    const Eigen::RowVectorXd e = (logits.row(r).array() - m).exp().matrix();
    dlogits.row(r) = e / e.sum();
    dlogits(r, c.labels[r]) -= 1.0;
  }
  dlogits /= n;
  Eigen::MatrixXd dh = dlogits * net.head;
  std::vector<Eigen::MatrixXd> grads(layers);
  for (int t = layers - 1; t >= 0; --t) {
    const Eigen::MatrixXd dpre = (dh.array() * (1.0 - act[t].array().square())).matrix();
    grads[t] = dpre.transpose() * h[t];
    dh += dpre * net.weights[t];
  }
  return grads;
}

TEST(ZdTest, ConstantMatrixScoresZero) {
  EXPECT_EQ(zd_score(Eigen::MatrixXd::Constant(3, 3, 0.7)), 0.0);
}

TEST(ZdTest, HandExample) {
  Eigen::MatrixXd w(1, 5);
  w << 0, 0, 0, 0, 10;
  EXPECT_DOUBLE_EQ(zd_score(w), 0.2);
}

TEST(ZdTest, GaussianTailFraction) {
  Rng rng(3);
  Eigen::MatrixXd w(200, 200);
  for (Eigen::Index k = 0; k < w.size(); ++k) w.data()[k] = rng.normal();
  EXPECT_NEAR(zd_score(w), 0.1587, 0.02);
}

TEST(ZdTest, NeedsTwoEntries) {
  EXPECT_THROW(zd_score(Eigen::MatrixXd::Ones(1, 1)), Error);
}

TEST(LimTest, IdentityNegationAndOrthogonal) {
  Eigen::MatrixXd x(2, 3);
  x << 1, 2, 3, -1, 0.5, 2;
  EXPECT_NEAR(lim_score(x, x), -1.0, 1e-15);
  EXPECT_NEAR(lim_score(x, -x), 1.0, 1e-15);
  Eigen::MatrixXd a(2, 2), b(2, 2);
  a << 1, 0, 0, 2;
  b << 0, 3, -1, 0;
  EXPECT_EQ(lim_score(a, b), 0.0);
}

TEST(LimTest, Errors) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(2, 3);
  Eigen::MatrixXd z = x;
  z.row(1).setZero();
  try {
    lim_score(x, z);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroVector);
  }
  try {
    lim_score(x, Eigen::MatrixXd::Ones(3, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
}

TEST(LlmMqTest, OnGridWeightsScoreZero) {
  Eigen::MatrixXd w(2, 2);
  w << 3, -3, 0, 3;
  EXPECT_EQ(llm_mq_sensitivity(Eigen::MatrixXd::Ones(2, 2), w, 2), 0.0);
}

TEST(LlmMqTest, ResidualDirectionIsPositive) {
  Rng rng(8);
  Eigen::MatrixXd w(4, 4);
  for (Eigen::Index k = 0; k < w.size(); ++k) w.data()[k] = rng.normal();
  const Eigen::MatrixXd r = w - fake_quantize(w, 2);
  const Eigen::MatrixXd g = r / r.norm();
  EXPECT_NEAR(llm_mq_sensitivity(g, w, 2), r.norm(), 1e-12);
  EXPECT_GT(llm_mq_sensitivity(g, w, 2), 0.0);
}

TEST(LlmMqTest, ShapeMismatchThrows) {
  try {
    llm_mq_sensitivity(Eigen::MatrixXd::Ones(2, 3), Eigen::MatrixXd::Ones(3, 2), 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
}

TEST(LlmMqTest, FiniteDifferencesMatchBackprop) {
  const auto inst = generate_network({4, 6, 4, 64}, 12, 0.5);
  const auto batch = calibration_batch(inst.corpus, 32, 1);
  const auto fd = nll_weight_gradients_fd(inst.net, batch);
  const auto exact = analytic_gradients(inst.net, batch);
  for (int t = 0; t < 4; ++t) {
    EXPECT_LT((fd[t] - exact[t]).cwiseAbs().maxCoeff(), 1e-7 * std::max(1.0, exact[t].norm()));
  }
}

TEST(LlmMqTest, ScoresMatchRecomputationFromGradients) {
  const auto inst = generate_network({4, 6, 4, 200}, 4, 1.0);
  const LayerScoreReport report = score_layers(BaselineMethod::kLlmMq, inst.net, inst.corpus, 9);
  const auto grads =
      nll_weight_gradients_fd(inst.net, calibration_batch(inst.corpus, kCalibrationSamples, 9));
  for (int t = 0; t < 4; ++t) {
    const Eigen::MatrixXd& w = inst.net.weights[t];
    const Eigen::MatrixXd q = fake_quantize(w, 2);
    double dot = 0.0;
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) dot += grads[t](r, c) * (w(r, c) - q(r, c));
    }
    EXPECT_NEAR(report.scores[t], std::abs(dot), 1e-9);
  }
  EXPECT_EQ(report.notes.at("bits"), "2");
}

TEST(ActivationTest, Examples) {
  EXPECT_EQ(activation_score(Eigen::Vector3d(2, 2, 2)), Eigen::Vector3d(100, 100, 100));
  EXPECT_EQ(activation_score(Eigen::Vector3d(1, 2, 4)), Eigen::Vector3d(100, 50, 25));
  const Eigen::VectorXd s = activation_score(Eigen::Vector4d(0.3, 1.7, 0.9, 5.0));
  EXPECT_GT(s[0], s[2]);
  EXPECT_GT(s[2], s[1]);
  EXPECT_GT(s[1], s[3]);
  // The smallest norm scores exactly 100 even when 100 * n / n would round up.
  Rng rng(5);
  for (int k = 0; k < 1000; ++k) {
    const Eigen::VectorXd n = Eigen::Vector2d(rng.uniform(0.1, 50.0), 60.0);
    EXPECT_EQ(activation_score(n).maxCoeff(), 100.0);
  }
  try {
    activation_score(Eigen::Vector2d(1, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroNorm);
  }
}

TEST(CalibrationTest, SeededDistinctRows) {
  const auto inst = generate_network({2, 4, 3, 300}, 1, 0.0);
  const auto a = calibration_batch(inst.corpus, 128, 5);
  const auto b = calibration_batch(inst.corpus, 128, 5);
  ASSERT_EQ(a.size(), 128);
  EXPECT_EQ(a.inputs, b.inputs);
  std::set<std::vector<double>> rows;
  for (int k = 0; k < a.size(); ++k) {
    const Eigen::RowVectorXd row = a.inputs.row(k);
    rows.insert(std::vector<double>(row.data(), row.data() + row.size()));
  }
  EXPECT_EQ(rows.size(), 128u);
  EXPECT_EQ(calibration_batch(inst.corpus, 1000, 5).size(), 300);
}

TEST(AllocateBaselineTest, Examples) {
  LayerScoreReport zd{BaselineMethod::kZd, Eigen::Vector3d(0.2, 0.1, 0.3), 0, {}};
  EXPECT_EQ(allocate_baseline(zd, Eigen::Vector3d(1, 1, 1), 0.0).bits, (std::vector<int>{2, 2, 2}));

  LayerScoreReport act{BaselineMethod::kActivation, Eigen::Vector3d(100, 50, 25), 0, {}};
  EXPECT_EQ(allocate_baseline(act, Eigen::Vector3d(1, 1, 1), 1.0).demoted,
            (std::vector<int>{0, 1, 1}));

  LayerScoreReport mq{BaselineMethod::kLlmMq, Eigen::Vector4d(0.3, 0.05, 0.2, 0.4), 0, {}};
  const Eigen::Vector4d costs(2, 1, 1, 3);
  AllocationProblem p;
  p.linear = mq.scores;
  p.interaction = Eigen::MatrixXd::Zero(4, 4);
  p.costs = costs;
  p.budget = 4.0;
  EXPECT_EQ(allocate_baseline(mq, costs, 4.0).demoted, solve_exact(p).demoted);
}

TEST(AllocateBaselineTest, RankingIsScaleInvariant) {
  Rng rng(6);
  for (auto method : {BaselineMethod::kZd, BaselineMethod::kLim, BaselineMethod::kLlmMq,
                      BaselineMethod::kActivation}) {
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::VectorXd scores(7), costs(7);
      for (int i = 0; i < 7; ++i) {
        scores[i] = rng.uniform(0.01, 1.0);
        costs[i] = 1.0 + static_cast<double>(rng.below(4));
      }
      const double budget = rng.uniform(0.0, costs.sum());
      LayerScoreReport a{method, scores, 0, {}};
      LayerScoreReport b{method, 3.7 * scores, 0, {}};
      EXPECT_EQ(allocate_baseline(a, costs, budget).demoted,
                allocate_baseline(b, costs, budget).demoted);
    }
  }
}

TEST(ScoreLayersTest, RangesOnGeneratedNets) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto inst = generate_network({}, seed, 1.0);
    const auto zd = score_layers(BaselineMethod::kZd, inst.net, inst.corpus, 0);
    const auto lim = score_layers(BaselineMethod::kLim, inst.net, inst.corpus, 0);
    const auto act = score_layers(BaselineMethod::kActivation, inst.net, inst.corpus, 0);
    EXPECT_GE(zd.scores.minCoeff(), 0.0);
    EXPECT_LE(zd.scores.maxCoeff(), 1.0);
    EXPECT_GE(lim.scores.minCoeff(), -1.0);
    EXPECT_LE(lim.scores.maxCoeff(), 1.0);
    EXPECT_GT(act.scores.minCoeff(), 0.0);
    EXPECT_EQ(act.scores.maxCoeff(), 100.0);
  }
}

TEST(BaselineMethodTest, NamesRoundTrip) {
  for (auto m : {BaselineMethod::kZd, BaselineMethod::kLim, BaselineMethod::kLlmMq,
                 BaselineMethod::kActivation}) {
    EXPECT_EQ(parse_baseline_method(to_string(m)), m);
  }
  EXPECT_THROW(parse_baseline_method("hawq"), Error);
}

}  // namespace
}  // namespace impq
