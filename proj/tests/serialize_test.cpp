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

#include <bit>
#include <cstring>
#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "impq/baselines.hpp"
#include "impq/error.hpp"
#include "impq/instance.hpp"
#include "impq/interaction.hpp"
#include "impq/random.hpp"
#include "impq/serialize.hpp"
#include "impq/spqe.hpp"
#include "test_support.hpp"

namespace impq {
namespace {

void expect_parse_error(auto&& call) {
  try {
    call();
    FAIL() << "expected ParseError";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError) << e.what();
  }
}

TEST(SerializeTest, QuadraticInstanceRoundTrip) {
  const Instance inst = generate_quadratic(6, 4, 1.0);
  const std::string doc = to_document(inst);
  const Instance back = parse_instance(doc);
  const auto& a = std::get<QuadraticSurrogate>(inst);
  const auto& b = std::get<QuadraticSurrogate>(back);
  EXPECT_EQ(a.g_eff, b.g_eff);
  EXPECT_EQ(a.h_eff, b.h_eff);
  EXPECT_EQ(a.base_loss, b.base_loss);
  EXPECT_EQ(a.param_counts, b.param_counts);
  EXPECT_EQ(a.seed, b.seed);
  EXPECT_EQ(to_document(back), doc);
  EXPECT_EQ(canonicalize(doc), doc);
  EXPECT_EQ(document_format(doc), "impq.instance");
}

TEST(SerializeTest, NetworkInstanceRoundTrip) {
  const Instance inst = generate_network({3, 5, 4, 20}, 8, 0.5);
  const std::string doc = to_document(inst);
  const Instance back = parse_instance(doc);
  const auto& a = std::get<NetworkInstance>(inst);
  const auto& b = std::get<NetworkInstance>(back);
  for (int t = 0; t < 3; ++t) {
    EXPECT_EQ(a.net.weights[t], b.net.weights[t]);
    EXPECT_EQ(a.net.biases[t], b.net.biases[t]);
  }
  EXPECT_EQ(a.net.head, b.net.head);
  EXPECT_EQ(a.corpus.inputs, b.corpus.inputs);
  EXPECT_EQ(a.corpus.labels, b.corpus.labels);
  EXPECT_EQ(to_document(back), doc);
  EXPECT_EQ(instance_fingerprint(inst), instance_fingerprint(back));
}

TEST(SerializeTest, ArbitraryDoublesSurviveExactly) {
  Rng rng(31);
  MarginalMatrix m;
  m.rows.resize(40, 3);
  for (Eigen::Index k = 0; k < m.rows.size(); ++k) {
    double x;
    do {
      x = std::bit_cast<double>(rng.next());
    } while (!std::isfinite(x));
    m.rows.data()[k] = x;
  }
  m.orders.assign(40, {2, 0, 1});
  m.seed = ~0ull;
  m.oracle_fingerprint = "abc";
  const std::string doc = to_document(m);
  const MarginalMatrix back = parse_marginal_matrix(doc);
  for (Eigen::Index k = 0; k < m.rows.size(); ++k) {
    EXPECT_EQ(std::bit_cast<std::uint64_t>(m.rows.data()[k]),
              std::bit_cast<std::uint64_t>(back.rows.data()[k]));
  }
  EXPECT_EQ(back.seed, ~0ull);
  EXPECT_EQ(to_document(back), doc);
}

TEST(SerializeTest, ShortestNumberFormatting) {
  ShapleyEstimate e;
  e.phi_hat = Eigen::Vector2d(0.1, 1.0 / 3.0);
  e.per_layer_variance = Eigen::Vector2d(2.0, 0.0);
  e.samples = 5;
  const std::string doc = to_document(e);
  EXPECT_NE(doc.find("0.1,"), std::string::npos) << doc;
  EXPECT_NE(doc.find("0.3333333333333333"), std::string::npos);
  EXPECT_EQ(doc.back(), '\n');
}

TEST(SerializeTest, PipelineDocumentsRoundTrip) {
  const auto oracle = make_oracle(generate_quadratic(5, 2, 1.0));
  const MarginalMatrix m = run_spqe(*oracle, 12, 3);
  const ShapleyEstimate e = estimate(m);
  const InteractionModel model = build_interaction_model(m, 0.5);
  AllocationProblem p = testing::random_problem(5, 9, true);
  p.param_counts = {10, 20, 30, 40, 50};
  Allocation a = solve_exact(p);
  a.wall_seconds = 0.125;

  for (const std::string& doc :
       {to_document(m), to_document(e), to_document(model), to_document(p), to_document(a)}) {
    EXPECT_EQ(canonicalize(doc), doc);
  }
  EXPECT_EQ(to_document(parse_marginal_matrix(to_document(m))), to_document(m));
  EXPECT_EQ(to_document(parse_shapley_estimate(to_document(e))), to_document(e));
  EXPECT_EQ(to_document(parse_interaction_model(to_document(model))), to_document(model));
  EXPECT_EQ(to_document(parse_allocation_problem(to_document(p))), to_document(p));
  const Allocation back = parse_allocation(to_document(a));
  EXPECT_EQ(back.demoted, a.demoted);
  EXPECT_EQ(back.wall_seconds, a.wall_seconds);
  EXPECT_EQ(to_document(back), to_document(a));

  a.wall_seconds.reset();
  EXPECT_EQ(to_document(a).find("wall_seconds"), std::string::npos);

  LayerScoreReport r{BaselineMethod::kLlmMq, Eigen::Vector3d(0.5, 0.25, 1e-300), 12,
                     {{"bits", "2"}, {"step", "1e-4"}}};
  EXPECT_EQ(to_document(parse_score_report(to_document(r))), to_document(r));
}

TEST(SerializeTest, RejectsMalformedDocuments) {
  const std::string good = to_document(estimate(run_spqe(
      *make_oracle(generate_quadratic(3, 1, 1.0)), 4, 1)));
  expect_parse_error([&] { parse_shapley_estimate("{not json"); });
  expect_parse_error([&] { parse_marginal_matrix(good); });
  std::string wrong_version = good;
  wrong_version.replace(wrong_version.find("\"version\": 1"), 12, "\"version\": 9");
  expect_parse_error([&] { parse_shapley_estimate(wrong_version); });
  std::string missing = good;
  missing.replace(missing.find("\"samples\""), 9, "\"sample_\"");
  expect_parse_error([&] { parse_shapley_estimate(missing); });
  expect_parse_error([&] { document_format("[1, 2]"); });
}

TEST(SerializeTest, NonFiniteValuesAreRejected) {
  ShapleyEstimate e;
  e.phi_hat = Eigen::Vector2d(1.0, std::nan(""));
  e.per_layer_variance = Eigen::Vector2d::Zero();
  EXPECT_THROW(to_document(e), Error);
}

TEST(SerializeTest, FileHelpers) {
  const auto dir = std::filesystem::temp_directory_path() / "impq_serialize_test";
  std::filesystem::remove_all(dir);
  write_text_file(dir / "nested" / "a.json", "{}\n");
  EXPECT_EQ(read_text_file(dir / "nested" / "a.json"), "{}\n");
  try {
    read_text_file(dir / "missing.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIoError);
  }
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace impq
