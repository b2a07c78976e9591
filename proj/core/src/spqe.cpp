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

#include "impq/spqe.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <string>
#include <numeric>
#include <thread>

#include "impq/error.hpp"
#include "impq/random.hpp"

namespace impq {

std::string_view to_string(SamplingMode mode) noexcept {
  return mode == SamplingMode::kSampled ? "sampled" : "enumerated";
}

SamplingMode parse_sampling_mode(std::string_view text) {
  if (text == "sampled") return SamplingMode::kSampled;
  if (text == "enumerated") return SamplingMode::kEnumerated;
  fail(ErrorCode::kParseError, "unknown sampling mode '" + std::string(text) + "'");
}

PermutationTrace trace_permutation(const ValueOracle& oracle, std::span<const int> order) {
  const int layers = oracle.layer_count();
  if (static_cast<int>(order.size()) != layers) {
    fail(ErrorCode::kDimensionMismatch, "permutation length must equal the layer count");
  }
  PermutationTrace trace;
  trace.order.assign(order.begin(), order.end());
  trace.payoffs.reserve(order.size() + 1);
  trace.marginals = Eigen::VectorXd::Zero(layers);

  Coalition state = Coalition::full(layers);
  trace.payoffs.push_back(evaluate_checked(oracle, state));
  for (int layer : order) {
    if (!state.contains(layer)) {
      fail(ErrorCode::kInvalidParameter, "order is not a permutation of [0, L)");
    }
    state = state.without(layer);
    trace.payoffs.push_back(evaluate_checked(oracle, state));
    trace.marginals[layer] = trace.payoffs.back() - trace.payoffs[trace.payoffs.size() - 2];
  }
  return trace;
}

std::vector<int> sample_permutation(int layers, std::uint64_t seed, std::int64_t index) {
  std::vector<int> order(static_cast<std::size_t>(layers));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(index)));
  rng.shuffle(order);
  return order;
}

namespace {

MarginalMatrix trace_all(const ValueOracle& oracle, std::vector<std::vector<int>> orders,
                         const SpqeOptions& options) {
  const int layers = oracle.layer_count();
  const auto count = static_cast<std::int64_t>(orders.size());
  MemoizedOracle memo(oracle);

  MarginalMatrix matrix;
  matrix.rows = Eigen::MatrixXd::Zero(count, layers);
  matrix.b_high = options.b_high;
  matrix.b_low = options.b_low;
  matrix.oracle_fingerprint = oracle.fingerprint();

  // Rows are keyed by permutation index, so the result does not depend on
  // which worker finishes first.
  std::atomic<std::int64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (!failed.load()) {
      const std::int64_t m = next.fetch_add(1);
      if (m >= count) return;
      try {
        const PermutationTrace trace = trace_permutation(memo, orders[static_cast<std::size_t>(m)]);
        matrix.rows.row(m) = trace.marginals.transpose();
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
      }
    }
  };

  const int threads = std::max(1, options.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  matrix.orders = std::move(orders);
  return matrix;
}

}  // namespace

MarginalMatrix run_spqe(const ValueOracle& oracle, int samples, std::uint64_t seed,
                        const SpqeOptions& options) {
  if (samples < 1) fail(ErrorCode::kInvalidParameter, "SPQE needs at least one sample");
  const int layers = oracle.layer_count();
  if (layers < 1) fail(ErrorCode::kInvalidParameter, "oracle has no layers");
  std::vector<std::vector<int>> orders;
  orders.reserve(static_cast<std::size_t>(samples));
  for (int m = 0; m < samples; ++m) orders.push_back(sample_permutation(layers, seed, m));
  MarginalMatrix matrix = trace_all(oracle, std::move(orders), options);
  matrix.seed = seed;
  matrix.mode = SamplingMode::kSampled;
  return matrix;
}

MarginalMatrix enumerate_permutations_mode(const ValueOracle& oracle, const SpqeOptions& options) {
  const int layers = oracle.layer_count();
  if (layers > kMaxEnumeratedLayers) {
    fail(ErrorCode::kLayerCountTooLarge, "enumeration supports at most 7 layers, got " +
                                             std::to_string(layers));
  }
  std::vector<int> order(static_cast<std::size_t>(layers));
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::vector<int>> orders;
  do {
    orders.push_back(order);
  } while (std::next_permutation(order.begin(), order.end()));
  MarginalMatrix matrix = trace_all(oracle, std::move(orders), options);
  matrix.mode = SamplingMode::kEnumerated;
  return matrix;
}

ShapleyEstimate estimate(const MarginalMatrix& matrix) {
  const int samples = matrix.samples();
  if (samples < 1) fail(ErrorCode::kInvalidParameter, "marginal matrix has no rows");
  ShapleyEstimate est;
  est.samples = samples;
  // Mean of deviations from the first row: exact when all rows agree, so
  // order-independent games yield a covariance of exactly zero.
  const Eigen::RowVectorXd first = matrix.rows.row(0);
  est.phi_hat = (first + (matrix.rows.rowwise() - first).colwise().sum() / samples).transpose();
  est.per_layer_variance = Eigen::VectorXd::Zero(matrix.layer_count());
  if (samples > 1) {
    for (int i = 0; i < matrix.layer_count(); ++i) {
      const double ss = (matrix.rows.col(i).array() - est.phi_hat[i]).square().sum();
      est.per_layer_variance[i] = ss / (samples - 1);
    }
  }
  return est;
}

}  // namespace impq
