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

#ifndef IMPQ_ORACLE_HPP_
#define IMPQ_ORACLE_HPP_

#include <cstdint>
#include <functional>
#include <mutex>
#include <string>
#include <unordered_map>

#include "impq/coalition.hpp"

namespace impq {

/// Payoff contract v(S). Implementations must be deterministic and free of
/// side effects so that evaluations can run concurrently and be memoized.
/// Payoffs are losses: lower is better.
class ValueOracle {
 public:
  virtual ~ValueOracle() = default;

  virtual int layer_count() const = 0;
  virtual double evaluate(const Coalition& coalition) const = 0;

  /// Stable identifier of the underlying instance; empty if unknown.
  virtual std::string fingerprint() const { return {}; }
};

/// Evaluates `oracle` at `coalition`, checking the coalition width and
/// converting foreign exceptions (and non-finite payoffs) into OracleFailure.
double evaluate_checked(const ValueOracle& oracle, const Coalition& coalition);

/// Oracle backed by an arbitrary callable. Handy for closed-form games.
class FunctionOracle final : public ValueOracle {
 public:
  using Payoff = std::function<double(const Coalition&)>;

  FunctionOracle(int layer_count, Payoff payoff, std::string fingerprint = {});

  int layer_count() const override { return layer_count_; }
  double evaluate(const Coalition& coalition) const override;
  std::string fingerprint() const override { return fingerprint_; }

 private:
  int layer_count_;
  Payoff payoff_;
  std::string fingerprint_;
};

/// Thread-safe per-coalition cache in front of another oracle. Caching is
/// invisible to callers because the wrapped oracle is deterministic.
class MemoizedOracle final : public ValueOracle {
 public:
  explicit MemoizedOracle(const ValueOracle& inner) : inner_(inner) {}

  int layer_count() const override { return inner_.layer_count(); }
  double evaluate(const Coalition& coalition) const override;
  std::string fingerprint() const override { return inner_.fingerprint(); }

  /// Number of calls forwarded to the wrapped oracle.
  std::int64_t inner_evaluations() const;
  std::size_t cache_size() const;

 private:
  const ValueOracle& inner_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<std::uint64_t, double> cache_;
  mutable std::int64_t inner_evaluations_ = 0;
};

}  // namespace impq

#endif  // IMPQ_ORACLE_HPP_
