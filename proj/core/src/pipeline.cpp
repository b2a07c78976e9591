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

#include "impq/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "impq/baselines.hpp"
#include "impq/error.hpp"
#include "impq/quantize.hpp"
#include "impq/serialize.hpp"
#include "impq/shapley.hpp"

namespace impq {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr char kConfigFormat[] = "impq.config";

constexpr char kInstanceFile[] = "instance.json";
constexpr char kMarginalsFile[] = "marginals.json";
constexpr char kEstimateFile[] = "estimate.json";
constexpr char kInteractionFile[] = "interaction.json";
constexpr char kProblemFile[] = "problem.json";
constexpr char kAllocationFile[] = "allocation.json";

std::string format_number(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::string join_bits(const std::vector<int>& bits) {
  std::string out;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (i > 0) out += ';';
    out += std::to_string(bits[i]);
  }
  return out;
}

bool is_baseline(std::string_view method) {
  return method != kImpqMethod && method != kDiagonalMethod;
}

const std::vector<std::string>& resolved_methods(const RunConfig& config,
                                                 std::vector<std::string>& storage) {
  if (!config.methods.empty()) return config.methods;
  storage = default_methods(config.kind);
  return storage;
}

// Efficiency of one marginal row against v(empty) - v(T), relative.
bool efficiency_holds(double row_sum, double target) {
  return std::abs(row_sum - target) <= 1e-9 * std::abs(target) ||
         (target == 0.0 && std::abs(row_sum) <= 1e-12);
}

Allocation timed_solve(const AllocationProblem& problem, bool record_wall_time) {
  const auto start = std::chrono::steady_clock::now();
  Allocation allocation = solve_exact(problem);
  if (record_wall_time) {
    allocation.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return allocation;
}

MarginalMatrix prefix_rows(const MarginalMatrix& matrix, int samples) {
  MarginalMatrix prefix = matrix;
  prefix.rows = matrix.rows.topRows(samples);
  prefix.orders.resize(samples);
  return prefix;
}

}  // namespace

void validate(const RunConfig& config) {
  if (config.layers < 1 || config.layers > kMaxLayers) {
    fail(ErrorCode::kInvalidParameter, "layers must lie in [1, 64]");
  }
  if (config.kind == InstanceKind::kNetwork &&
      (config.width < 1 || config.classes < 2 || config.corpus_size < 1)) {
    fail(ErrorCode::kInvalidParameter, "network needs width >= 1, classes >= 2 and samples >= 1");
  }
  if (!(config.interaction_strength >= 0.0) || !std::isfinite(config.interaction_strength)) {
    fail(ErrorCode::kInvalidParameter, "interaction strength must be finite and non-negative");
  }
  if (config.samples < 1) fail(ErrorCode::kInvalidParameter, "sample count must be positive");
  if (!(config.alpha >= 0.0 && config.alpha <= 1.0)) {
    fail(ErrorCode::kAlphaOutOfRange, "alpha must lie in [0, 1]");
  }
  if (!is_supported_bit_width(config.b_low) || !is_supported_bit_width(config.b_high) ||
      config.b_low >= config.b_high) {
    fail(ErrorCode::kUnsupportedBitWidth, "bit widths must be b_low = 2 and b_high = 4");
  }
  auto check_target = [&](double target) {
    if (!(target >= config.b_low && target <= config.b_high)) {
      fail(ErrorCode::kTargetOutOfRange, "target average bits " + format_number(target) +
                                             " is outside [b_low, b_high]");
    }
  };
  check_target(config.target_avg_bits);
  for (double target : config.compare_targets) check_target(target);
  if (config.compare_targets.empty()) {
    fail(ErrorCode::kInvalidParameter, "at least one comparison target is required");
  }
  if (config.budget && !(*config.budget >= 0.0 && std::isfinite(*config.budget))) {
    fail(ErrorCode::kInfeasible, "budget must be finite and non-negative");
  }
  if (config.threads < 1) fail(ErrorCode::kInvalidParameter, "threads must be positive");
  if (config.enumerate && config.layers > kMaxEnumeratedLayers) {
    fail(ErrorCode::kLayerCountTooLarge, "enumeration supports at most 7 layers");
  }
  for (const auto& method : config.methods) {
    if (!is_baseline(method)) continue;
    parse_baseline_method(method);
    if (config.kind != InstanceKind::kNetwork) {
      fail(ErrorCode::kInvalidParameter, "method " + method + " needs a network instance");
    }
  }
}

std::string to_document(const RunConfig& config) {
  json j{{"format", kConfigFormat}, {"version", kDocumentVersion}};
  j["kind"] = std::string(to_string(config.kind));
  j["layers"] = config.layers;
  j["width"] = config.width;
  j["classes"] = config.classes;
  j["corpus_size"] = config.corpus_size;
  if (config.seed) j["seed"] = *config.seed;
  j["interaction_strength"] = config.interaction_strength;
  j["samples"] = config.samples;
  j["spqe_seed"] = config.spqe_seed;
  j["alpha"] = config.alpha;
  j["b_low"] = config.b_low;
  j["b_high"] = config.b_high;
  j["target_avg_bits"] = config.target_avg_bits;
  if (config.budget) j["budget"] = *config.budget;
  j["compare_targets"] = config.compare_targets;
  j["out_dir"] = config.out_dir.generic_string();
  j["methods"] = config.methods;
  j["enumerate"] = config.enumerate;
  j["threads"] = config.threads;
  j["record_wall_time"] = config.record_wall_time;
  j["calibration_seed"] = config.calibration_seed;
  return j.dump(2) + "\n";
}

RunConfig parse_run_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    fail(ErrorCode::kParseError, std::string("malformed config: ") + e.what());
  }
  if (!j.is_object() || j.value("format", std::string()) != kConfigFormat) {
    fail(ErrorCode::kParseError, "config document must have format impq.config");
  }
  if (j.value("version", 0) != kDocumentVersion) {
    fail(ErrorCode::kParseError, "unsupported config version");
  }
  RunConfig config;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "format" || key == "version") continue;
      if (key == "kind") config.kind = parse_instance_kind(value.get<std::string>());
      else if (key == "layers") config.layers = value.get<int>();
      else if (key == "width") config.width = value.get<int>();
      else if (key == "classes") config.classes = value.get<int>();
      else if (key == "corpus_size") config.corpus_size = value.get<int>();
      else if (key == "seed") config.seed = value.get<std::uint64_t>();
      else if (key == "interaction_strength") config.interaction_strength = value.get<double>();
      else if (key == "samples") config.samples = value.get<int>();
      else if (key == "spqe_seed") config.spqe_seed = value.get<std::uint64_t>();
      else if (key == "alpha") config.alpha = value.get<double>();
      else if (key == "b_low") config.b_low = value.get<int>();
      else if (key == "b_high") config.b_high = value.get<int>();
      else if (key == "target_avg_bits") config.target_avg_bits = value.get<double>();
      else if (key == "budget") config.budget = value.get<double>();
      else if (key == "compare_targets") config.compare_targets = value.get<std::vector<double>>();
      else if (key == "out_dir") config.out_dir = value.get<std::string>();
      else if (key == "methods") config.methods = value.get<std::vector<std::string>>();
      else if (key == "enumerate") config.enumerate = value.get<bool>();
      else if (key == "threads") config.threads = value.get<int>();
      else if (key == "record_wall_time") config.record_wall_time = value.get<bool>();
      else if (key == "calibration_seed") config.calibration_seed = value.get<std::uint64_t>();
      else fail(ErrorCode::kParseError, "unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kParseError, std::string("invalid config value: ") + e.what());
  }
  return config;
}

std::vector<std::string> default_methods(InstanceKind kind) {
  if (kind == InstanceKind::kQuadratic) return {"impq", "diag"};
  return {"impq", "diag", "zd", "lim", "llm_mq", "activation"};
}

Instance generate_from_config(const RunConfig& config) {
  if (!config.seed) fail(ErrorCode::kInvalidParameter, "a seed is required to generate instances");
  const NetShape shape{config.layers, config.width, config.classes, config.corpus_size};
  return generate_instance(config.kind, config.layers, *config.seed, config.interaction_strength,
                           shape);
}

Coalition coalition_from_demotions(std::span<const int> q) {
  const int layers = static_cast<int>(q.size());
  Coalition coalition(layers);
  for (int i = 0; i < layers; ++i) {
    if (q[i] == 0) coalition = coalition.with(i);
  }
  return coalition;
}

double true_payoff(const Instance& instance, std::span<const int> q, int b_high, int b_low) {
  if (static_cast<int>(q.size()) != layer_count(instance)) {
    fail(ErrorCode::kDimensionMismatch, "assignment length differs from the layer count");
  }
  const auto oracle = make_oracle(instance, b_high, b_low);
  return evaluate_checked(*oracle, coalition_from_demotions(q));
}

double config_budget(const RunConfig& config, const Eigen::VectorXd& costs,
                     std::span<const std::int64_t> counts, double target_avg_bits) {
  if (config.budget) return *config.budget;
  return budget_from_target_bits(costs, counts, target_avg_bits, config.b_low, config.b_high);
}

AllocationProblem make_problem(const InteractionModel& model,
                               std::span<const std::int64_t> param_counts, double budget,
                               int b_low, int b_high) {
  AllocationProblem problem;
  problem.linear = model.sensitivities;
  problem.interaction = model.shrunk;
  problem.costs = promotion_costs(param_counts, b_low, b_high);
  problem.budget = budget;
  problem.param_counts.assign(param_counts.begin(), param_counts.end());
  problem.b_low = b_low;
  problem.b_high = b_high;
  validate(problem);
  return problem;
}

MarginalMatrix run_marginals(const Instance& instance, const RunConfig& config) {
  const auto oracle = make_oracle(instance, config.b_high, config.b_low);
  const SpqeOptions options{config.threads, config.b_high, config.b_low};
  if (config.enumerate) return enumerate_permutations_mode(*oracle, options);
  return run_spqe(*oracle, config.samples, config.spqe_seed, options);
}

EstimateSummary run_estimate(const RunConfig& config) {
  validate(config);
  const Instance instance = generate_from_config(config);
  const MarginalMatrix matrix = run_marginals(instance, config);
  const ShapleyEstimate est = estimate(matrix);
  write_text_file(config.out_dir / kInstanceFile, to_document(instance));
  write_text_file(config.out_dir / kMarginalsFile, to_document(matrix));
  write_text_file(config.out_dir / kEstimateFile, to_document(est));

  const auto oracle = make_oracle(instance, config.b_high, config.b_low);
  const int layers = layer_count(instance);
  EstimateSummary summary;
  summary.layers = layers;
  summary.samples = matrix.samples();
  summary.phi_sum = est.phi_hat.sum();
  summary.efficiency_target = evaluate_checked(*oracle, Coalition::empty(layers)) -
                              evaluate_checked(*oracle, Coalition::full(layers));
  summary.max_variance = est.per_layer_variance.maxCoeff();
  if (config.enumerate) {
    const ExactShapleyResult exact = exact_shapley(*oracle);
    summary.exact_residual = (est.phi_hat - exact.phi).cwiseAbs().maxCoeff();
  }
  return summary;
}

AllocateSummary run_allocate(const RunConfig& config, const fs::path& estimate_dir) {
  validate(config);
  const Instance instance = parse_instance(read_text_file(estimate_dir / kInstanceFile));
  const MarginalMatrix matrix = parse_marginal_matrix(read_text_file(estimate_dir / kMarginalsFile));
  if (matrix.layer_count() != layer_count(instance)) {
    fail(ErrorCode::kDimensionMismatch, "marginals and instance disagree on the layer count");
  }
  if (matrix.b_high != config.b_high || matrix.b_low != config.b_low) {
    fail(ErrorCode::kInvalidParameter, "marginals were estimated with different bit widths");
  }
  const InteractionModel model = build_interaction_model(matrix, config.alpha);
  const auto counts = param_counts(instance);
  const Eigen::VectorXd costs = promotion_costs(counts, config.b_low, config.b_high);
  AllocateSummary summary;
  summary.budget = config_budget(config, costs, counts, config.target_avg_bits);
  const AllocationProblem problem =
      make_problem(model, counts, summary.budget, config.b_low, config.b_high);
  summary.allocation = timed_solve(problem, config.record_wall_time);
  summary.payoff = true_payoff(instance, summary.allocation.demoted, config.b_high, config.b_low);
  write_text_file(config.out_dir / kInteractionFile, to_document(model));
  write_text_file(config.out_dir / kProblemFile, to_document(problem));
  write_text_file(config.out_dir / kAllocationFile, to_document(summary.allocation));
  return summary;
}

std::vector<CompareRow> run_compare(const RunConfig& config) {
  validate(config);
  std::vector<std::string> storage;
  const auto& methods = resolved_methods(config, storage);
  const Instance instance = generate_from_config(config);
  const MarginalMatrix matrix = run_marginals(instance, config);
  write_text_file(config.out_dir / kInstanceFile, to_document(instance));
  write_text_file(config.out_dir / kMarginalsFile, to_document(matrix));

  const auto counts = param_counts(instance);
  const Eigen::VectorXd costs = promotion_costs(counts, config.b_low, config.b_high);
  std::map<std::string, InteractionModel> models;
  std::map<std::string, LayerScoreReport> reports;
  for (const auto& method : methods) {
    if (method == kImpqMethod) {
      models[method] = build_interaction_model(matrix, config.alpha);
    } else if (method == kDiagonalMethod) {
      models[method] = build_interaction_model(matrix, 1.0);
    } else {
      const auto* network = std::get_if<NetworkInstance>(&instance);
      if (network == nullptr) {
        fail(ErrorCode::kInvalidParameter, "method " + method + " needs a network instance");
      }
      LayerScoreReport report = score_layers(parse_baseline_method(method), network->net,
                                             network->corpus, config.calibration_seed,
                                             config.b_low);
      write_text_file(config.out_dir / ("scores_" + method + ".json"), to_document(report));
      reports.emplace(method, std::move(report));
    }
  }

  const auto oracle = make_oracle(instance, config.b_high, config.b_low);
  const bool network = kind_of(instance) == InstanceKind::kNetwork;
  std::vector<CompareRow> rows;
  for (double target : config.compare_targets) {
    const double budget = config_budget(config, costs, counts, target);
    for (const auto& method : methods) {
      Allocation allocation;
      if (auto it = models.find(method); it != models.end()) {
        allocation = solve_exact(make_problem(it->second, counts, budget, config.b_low,
                                              config.b_high));
      } else {
        allocation =
            allocate_baseline(reports.at(method), costs, budget, config.b_low, config.b_high);
      }
      CompareRow row;
      row.method = method;
      row.target_avg_bits = target;
      row.average_bits =
          average_bits(counts, costs, allocation.demoted, config.b_low, config.b_high);
      row.promoted_bytes = allocation.promoted_bytes;
      row.payoff = evaluate_checked(*oracle, coalition_from_demotions(allocation.demoted));
      if (network) row.perplexity = std::exp(row.payoff);
      row.bits = allocation.bits;
      rows.push_back(std::move(row));
    }
  }
  write_text_file(config.out_dir / "compare.csv", compare_csv(rows));
  return rows;
}

std::string compare_csv(std::span<const CompareRow> rows) {
  std::ostringstream out;
  out << "method,target_avg_bits,average_bits,promoted_bytes,payoff,perplexity,bits\n";
  for (const auto& row : rows) {
    out << row.method << ',' << format_number(row.target_avg_bits) << ','
        << format_number(row.average_bits) << ',' << format_number(row.promoted_bytes) << ','
        << format_number(row.payoff) << ','
        << (row.perplexity ? format_number(*row.perplexity) : std::string()) << ','
        << join_bits(row.bits) << '\n';
  }
  return out.str();
}

SweepKind parse_sweep_kind(std::string_view text) {
  if (text == "samples") return SweepKind::kSamples;
  if (text == "alpha") return SweepKind::kAlpha;
  fail(ErrorCode::kParseError, "sweep must be 'samples' or 'alpha'");
}

std::string_view to_string(SweepKind kind) noexcept {
  return kind == SweepKind::kSamples ? "samples" : "alpha";
}

std::vector<int> sample_grid() {
  std::vector<int> grid;
  for (int m = kSampleGridStart; m <= kSampleGridEnd; m *= 2) grid.push_back(m);
  return grid;
}

std::vector<double> alpha_grid() { return {0.0, 0.5, 1.0}; }

std::vector<SweepRow> run_ablation(const RunConfig& config, SweepKind kind) {
  validate(config);
  const Instance instance = generate_from_config(config);
  const auto oracle = make_oracle(instance, config.b_high, config.b_low);
  const auto counts = param_counts(instance);
  const Eigen::VectorXd costs = promotion_costs(counts, config.b_low, config.b_high);
  const double budget = config_budget(config, costs, counts, config.target_avg_bits);
  const SpqeOptions options{config.threads, config.b_high, config.b_low};

  std::optional<Eigen::VectorXd> exact_phi;
  if (layer_count(instance) <= kMaxExactShapleyLayers) exact_phi = exact_shapley(*oracle).phi;

  auto evaluate_row = [&](double value, const MarginalMatrix& matrix, double alpha) {
    const InteractionModel model = build_interaction_model(matrix, alpha);
    const Allocation allocation =
        solve_exact(make_problem(model, counts, budget, config.b_low, config.b_high));
    SweepRow row;
    row.value = value;
    row.payoff = evaluate_checked(*oracle, coalition_from_demotions(allocation.demoted));
    row.bits = allocation.bits;
    if (exact_phi) {
      row.shapley_error = (estimate(matrix).phi_hat - *exact_phi).cwiseAbs().maxCoeff();
    }
    return row;
  };

  std::vector<SweepRow> rows;
  if (kind == SweepKind::kSamples) {
    const auto grid = sample_grid();
    const MarginalMatrix longest = run_spqe(*oracle, grid.back(), config.spqe_seed, options);
    for (int m : grid) rows.push_back(evaluate_row(m, prefix_rows(longest, m), config.alpha));
  } else {
    const MarginalMatrix matrix = run_marginals(instance, config);
    for (double alpha : alpha_grid()) rows.push_back(evaluate_row(alpha, matrix, alpha));
  }
  const double reference = rows.front().payoff;
  for (auto& row : rows) {
    row.relative_delta = reference != 0.0 ? (row.payoff - reference) / std::abs(reference)
                                          : row.payoff - reference;
  }
  write_text_file(config.out_dir / ("ablate_" + std::string(to_string(kind)) + ".csv"),
                  sweep_csv(kind, rows));
  return rows;
}

std::string sweep_csv(SweepKind kind, std::span<const SweepRow> rows) {
  std::ostringstream out;
  out << (kind == SweepKind::kSamples ? "samples" : "alpha")
      << ",payoff,relative_delta,shapley_error,bits\n";
  for (const auto& row : rows) {
    out << format_number(row.value) << ',' << format_number(row.payoff) << ','
        << format_number(row.relative_delta) << ','
        << (row.shapley_error ? format_number(*row.shapley_error) : std::string()) << ','
        << join_bits(row.bits) << '\n';
  }
  return out.str();
}

std::vector<CheckResult> verify_artifacts(const fs::path& dir) {
  if (!fs::is_directory(dir)) fail(ErrorCode::kIoError, dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  std::vector<CheckResult> results;
  auto record = [&](std::string name, bool passed, std::string detail = {}) {
    results.push_back({std::move(name), passed, std::move(detail)});
  };
  // Runs `body`; library errors become a failed check instead of aborting.
  auto check = [&](const std::string& name, auto&& body) {
    try {
      body();
    } catch (const Error& e) {
      record(name, false, e.what());
    }
  };
  if (files.empty()) {
    record("documents present", false, "no .json documents in " + dir.string());
    return results;
  }

  std::map<std::string, std::string> texts;
  for (const auto& path : files) {
    const std::string name = path.filename().string();
    texts[name] = read_text_file(path);
    check("canonical " + name, [&] {
      const bool same = canonicalize(texts[name]) == texts[name];
      record("canonical " + name, same, same ? "" : "re-serialization differs");
    });
  }

  std::optional<Instance> instance;
  std::optional<MarginalMatrix> matrix;
  std::optional<AllocationProblem> problem;
  if (texts.count(kInstanceFile)) {
    check("instance", [&] {
      instance = parse_instance(texts[kInstanceFile]);
      record("instance", true);
    });
  }
  if (texts.count(kMarginalsFile)) {
    check("marginals", [&] {
      matrix = parse_marginal_matrix(texts[kMarginalsFile]);
      for (const auto& order : matrix->orders) {
        std::vector<int> sorted = order;
        std::sort(sorted.begin(), sorted.end());
        for (int i = 0; i < matrix->layer_count(); ++i) {
          if (sorted[i] != i) fail(ErrorCode::kParseError, "demotion order is not a permutation");
        }
      }
      record("marginals", true);
    });
  }
  if (instance && matrix) {
    check("efficiency", [&] {
      const auto oracle = make_oracle(*instance, matrix->b_high, matrix->b_low);
      const int layers = layer_count(*instance);
      if (matrix->oracle_fingerprint != oracle->fingerprint()) {
        record("efficiency", false, "marginals were produced by a different instance");
        return;
      }
      const double target = evaluate_checked(*oracle, Coalition::empty(layers)) -
                            evaluate_checked(*oracle, Coalition::full(layers));
      int bad = 0;
      for (int m = 0; m < matrix->samples(); ++m) {
        if (!efficiency_holds(matrix->rows.row(m).sum(), target)) ++bad;
      }
      record("efficiency", bad == 0,
             bad == 0 ? "" : std::to_string(bad) + " rows violate efficiency");
    });
  }
  if (matrix && texts.count(kEstimateFile)) {
    check("estimate", [&] {
      parse_shapley_estimate(texts[kEstimateFile]);
      const bool same = to_document(estimate(*matrix)) == texts[kEstimateFile];
      record("estimate", same, same ? "" : "estimate does not match the marginals");
    });
  }
  if (texts.count(kInteractionFile)) {
    check("interaction", [&] {
      const InteractionModel model = parse_interaction_model(texts[kInteractionFile]);
      std::string problem_text;
      if (!(model.alpha >= 0.0 && model.alpha <= 1.0)) problem_text = "alpha out of range";
      if (model.covariance != model.covariance.transpose() ||
          model.shrunk != model.shrunk.transpose()) {
        problem_text = "interaction matrices are not symmetric";
      }
      if (model.covariance.diagonal() != model.shrunk.diagonal()) {
        problem_text = "shrinkage changed the diagonal";
      }
      if (problem_text.empty() && matrix &&
          to_document(build_interaction_model(*matrix, model.alpha)) !=
              texts[kInteractionFile]) {
        problem_text = "interaction model does not match the marginals";
      }
      record("interaction", problem_text.empty(), problem_text);
    });
  }
  if (texts.count(kProblemFile)) {
    check("problem", [&] {
      problem = parse_allocation_problem(texts[kProblemFile]);
      record("problem", true);
    });
  }
  if (texts.count(kAllocationFile)) {
    check("allocation", [&] {
      const Allocation allocation = parse_allocation(texts[kAllocationFile]);
      if (!problem) {
        record("allocation", true, "no problem document; feasibility not checked");
        return;
      }
      std::string problem_text;
      const auto& q = allocation.demoted;
      if (static_cast<int>(q.size()) != problem->layer_count()) {
        problem_text = "allocation length differs from the problem";
      } else if (promoted_bytes(problem->costs, q) > problem->budget) {
        problem_text = "allocation exceeds the budget";
      } else if (evaluate_objective(*problem, q) != allocation.objective) {
        problem_text = "stored objective differs from the recomputed one";
      } else if (problem->layer_count() <= kMaxExhaustiveLayers &&
                 solve_exhaustive(*problem).demoted != q) {
        problem_text = "allocation differs from the exhaustive optimum";
      }
      record("allocation", problem_text.empty(), problem_text);
    });
  }
  for (const auto& [name, text] : texts) {
    if (name.rfind("scores_", 0) != 0) continue;
    check(name, [&] {
      const LayerScoreReport report = parse_score_report(text);
      bool ok = report.scores.allFinite();
      const Eigen::VectorXd& s = report.scores;
      switch (report.method) {
        case BaselineMethod::kZd:
          ok = ok && s.minCoeff() >= 0.0 && s.maxCoeff() <= 1.0;
          break;
        case BaselineMethod::kLim:
          ok = ok && s.minCoeff() >= -1.0 && s.maxCoeff() <= 1.0;
          break;
        case BaselineMethod::kActivation:
          ok = ok && s.minCoeff() > 0.0 && s.maxCoeff() <= 100.0;
          break;
        case BaselineMethod::kLlmMq:
          ok = ok && s.minCoeff() >= 0.0;
          break;
      }
      record(name, ok, ok ? "" : "scores outside the method's range");
    });
  }
  return results;
}

}  // namespace impq
