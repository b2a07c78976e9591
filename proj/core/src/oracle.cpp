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

#include "impq/oracle.hpp"

#include <cmath>
#include <exception>
#include <string>
#include <utility>

#include "impq/error.hpp"

namespace impq {

double evaluate_checked(const ValueOracle& oracle, const Coalition& coalition) {
  if (coalition.layer_count() != oracle.layer_count()) {
    fail(ErrorCode::kDimensionMismatch,
         "coalition has " + std::to_string(coalition.layer_count()) + " layers, oracle has " +
             std::to_string(oracle.layer_count()));
  }
  double value = 0.0;
  try {
    value = oracle.evaluate(coalition);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(ErrorCode::kOracleFailure, e.what());
  }
  if (!std::isfinite(value)) {
    fail(ErrorCode::kOracleFailure, "oracle returned a non-finite payoff");
  }
  return value;
}

FunctionOracle::FunctionOracle(int layer_count, Payoff payoff, std::string fingerprint)
    : layer_count_(layer_count), payoff_(std::move(payoff)), fingerprint_(std::move(fingerprint)) {
  if (layer_count < 1 || layer_count > kMaxLayers) {
    fail(ErrorCode::kInvalidParameter, "oracle layer count must be in [1, 64]");
  }
}

double FunctionOracle::evaluate(const Coalition& coalition) const { return payoff_(coalition); }

double MemoizedOracle::evaluate(const Coalition& coalition) const {
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(coalition.mask()); it != cache_.end()) return it->second;
  }
  // Evaluate outside the lock; a racing duplicate computes the same value.
  const double value = evaluate_checked(inner_, coalition);
  std::lock_guard lock(mutex_);
  auto [it, inserted] = cache_.emplace(coalition.mask(), value);
  ++inner_evaluations_;
  return it->second;
}

std::int64_t MemoizedOracle::inner_evaluations() const {
  std::lock_guard lock(mutex_);
  return inner_evaluations_;
}

std::size_t MemoizedOracle::cache_size() const {
  std::lock_guard lock(mutex_);
  return cache_.size();
}

}  // namespace impq
