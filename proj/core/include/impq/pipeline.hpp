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

#ifndef IMPQ_PIPELINE_HPP_
#define IMPQ_PIPELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "impq/allocator.hpp"
#include "impq/coalition.hpp"
#include "impq/instance.hpp"
#include "impq/interaction.hpp"
#include "impq/spqe.hpp"

namespace impq {

// End-to-end orchestration behind the command-line tool. Every command is
// deterministic in its RunConfig and writes canonical documents into
// RunConfig::out_dir.

struct RunConfig {
  InstanceKind kind = InstanceKind::kQuadratic;
  int layers = 8;
  int width = 16;
  int classes = 8;
  int corpus_size = 512;
  std::optional<std::uint64_t> seed;
  double interaction_strength = 1.0;
  int samples = 100;
  std::uint64_t spqe_seed = 1;
  double alpha = kDefaultAlpha;
  int b_low = 2;
  int b_high = 4;
  double target_avg_bits = 3.0;
  std::optional<double> budget;  // bytes; overrides target_avg_bits
  std::vector<double> compare_targets = {2.5, 3.0, 3.5};
  std::filesystem::path out_dir = "impq_out";
  std::vector<std::string> methods;  // empty: every method valid for the kind
  bool enumerate = false;
  int threads = 1;
  bool record_wall_time = false;
  std::uint64_t calibration_seed = 0;
};

/// Throws InvalidParameter (or a more specific code) on out-of-range fields.
void validate(const RunConfig& config);
/// Config as a versioned key-value document; parse_run_config accepts any
/// subset of the keys and leaves the rest at their defaults.
std::string to_document(const RunConfig& config);
RunConfig parse_run_config(std::string_view text);

inline constexpr std::string_view kImpqMethod = "impq";
inline constexpr std::string_view kDiagonalMethod = "diag";
std::vector<std::string> default_methods(InstanceKind kind);

/// Requires config.seed.
Instance generate_from_config(const RunConfig& config);

/// Layers with q_i = 0 are in the high-precision coalition.
Coalition coalition_from_demotions(std::span<const int> q);

/// Payoff of the instance at the coalition selected by q.
double true_payoff(const Instance& instance, std::span<const int> q, int b_high = 4,
                   int b_low = 2);

/// Budget in bytes: config.budget if set, otherwise from target_avg_bits.
double config_budget(const RunConfig& config, const Eigen::VectorXd& costs,
                     std::span<const std::int64_t> counts, double target_avg_bits);

/// a = sensitivities, K = shrunk covariance, costs from the parameter counts.
AllocationProblem make_problem(const InteractionModel& model,
                               std::span<const std::int64_t> param_counts, double budget,
                               int b_low, int b_high);

/// SPQE matrix (or the full enumeration) for the config's oracle.
MarginalMatrix run_marginals(const Instance& instance, const RunConfig& config);

struct EstimateSummary {
  int layers = 0;
  int samples = 0;
  double phi_sum = 0.0;
  double efficiency_target = 0.0;  // v(empty) - v(T)
  double max_variance = 0.0;
  std::optional<double> exact_residual;  // max |phi_hat - phi| when enumerated
};

/// Writes instance.json, marginals.json and estimate.json.
EstimateSummary run_estimate(const RunConfig& config);

struct AllocateSummary {
  Allocation allocation;
  double budget = 0.0;
  double payoff = 0.0;
};

/// Reads instance.json and marginals.json from `estimate_dir`; writes
/// interaction.json, problem.json and allocation.json into config.out_dir.
AllocateSummary run_allocate(const RunConfig& config, const std::filesystem::path& estimate_dir);

struct CompareRow {
  std::string method;
  double target_avg_bits = 0.0;
  double average_bits = 0.0;
  double promoted_bytes = 0.0;
  double payoff = 0.0;
  std::optional<double> perplexity;  // exp(payoff) for network instances
  std::vector<int> bits;
};

/// Rows ordered by target, then by method in config order. Writes
/// compare.csv and one scores_<method>.json per baseline.
std::vector<CompareRow> run_compare(const RunConfig& config);
std::string compare_csv(std::span<const CompareRow> rows);

enum class SweepKind { kSamples, kAlpha };
SweepKind parse_sweep_kind(std::string_view text);
std::string_view to_string(SweepKind kind) noexcept;

struct SweepRow {
  double value = 0.0;  // M or alpha
  double payoff = 0.0;
  double relative_delta = 0.0;  // vs the first grid point
  std::optional<double> shapley_error;
  std::vector<int> bits;
};

inline constexpr int kSampleGridStart = 10;
inline constexpr int kSampleGridEnd = 640;
std::vector<int> sample_grid();
std::vector<double> alpha_grid();

/// Sample sweeps reuse one SPQE run: the run for M is the M-row prefix of
/// the longest run. Writes ablate_<kind>.csv.
std::vector<SweepRow> run_ablation(const RunConfig& config, SweepKind kind);
std::string sweep_csv(SweepKind kind, std::span<const SweepRow> rows);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Re-checks the stored documents in `dir`: byte-canonical form, efficiency
/// of every marginal row, estimate and interaction model consistency, and
/// feasibility and optimality of stored allocations.
std::vector<CheckResult> verify_artifacts(const std::filesystem::path& dir);

}  // namespace impq

#endif  // IMPQ_PIPELINE_HPP_
