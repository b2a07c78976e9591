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

// Command-line front end for the allocation pipeline.
//
//   impq gen-instance --seed 7 --kind network --out run/
//   impq estimate     --seed 7 --samples 100 --out run/
//   impq allocate     --from run/ --target-bits 3 --out run/
//   impq compare      --seed 7 --kind network --out cmp/
//   impq ablate       --seed 7 --sweep samples --out abl/
//   impq verify       run/
//
// Exit status: 0 on success, 1 on a usage error, 2 when the computation
// fails or verification finds a violated invariant.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "impq/error.hpp"
#include "impq/instance.hpp"
#include "impq/pipeline.hpp"
#include "impq/serialize.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitComputation = 2;

// Raw flag values; only flags that were given override the config file.
struct Flags {
  std::string config_path;
  std::string kind;
  int layers = 0;
  int width = 0;
  int classes = 0;
  int corpus_size = 0;
  std::uint64_t seed = 0;
  double strength = 0.0;
  int samples = 0;
  std::uint64_t spqe_seed = 0;
  double alpha = 0.0;
  int b_low = 0;
  int b_high = 0;
  double target_bits = 0.0;
  double budget = 0.0;
  std::vector<double> targets;
  std::string out;
  std::vector<std::string> methods;
  bool enumerate = false;
  int threads = 0;
  bool record_wall_time = false;
  std::uint64_t calibration_seed = 0;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void add_config_flags(CLI::App& cmd, Flags& f) {
  cmd.add_option("--config", f.config_path, "Config document (flags override it)");
  cmd.add_option("--kind", f.kind, "Instance kind: quadratic or network");
  cmd.add_option("--layers,-L", f.layers, "Number of quantizable layers");
  cmd.add_option("--width", f.width, "Hidden width of network instances");
  cmd.add_option("--classes", f.classes, "Output classes of network instances");
  cmd.add_option("--corpus-size", f.corpus_size, "Corpus rows of network instances");
  cmd.add_option("--seed", f.seed, "Instance generation seed");
  cmd.add_option("--strength", f.strength, "Planted interaction strength");
  cmd.add_option("--samples,-M", f.samples, "SPQE permutation samples");
  cmd.add_option("--spqe-seed", f.spqe_seed, "Permutation sampling seed");
  cmd.add_option("--alpha", f.alpha, "Diagonal shrinkage in [0, 1]");
  cmd.add_option("--b-low", f.b_low, "Low bit width");
  cmd.add_option("--b-high", f.b_high, "High bit width");
  cmd.add_option("--target-bits", f.target_bits, "Target average bit width");
  cmd.add_option("--budget", f.budget, "Explicit promotion budget in bytes");
  cmd.add_option("--targets", f.targets, "Target average bit widths for compare")->delimiter(',');
  cmd.add_option("--out,-o", f.out, "Output directory");
  cmd.add_option("--methods", f.methods, "Methods for compare")->delimiter(',');
  cmd.add_flag("--enumerate", f.enumerate, "Enumerate all permutations instead of sampling");
  cmd.add_option("--threads", f.threads, "Worker threads for SPQE");
  cmd.add_flag("--record-wall-time", f.record_wall_time, "Store solver wall time");
  cmd.add_option("--calibration-seed", f.calibration_seed, "Baseline calibration batch seed");
}

bool given(const CLI::App& cmd, const char* name) { return cmd.count(name) > 0; }

impq::RunConfig build_config(const CLI::App& cmd, const Flags& f, bool needs_seed) {
  impq::RunConfig config;
  try {
    if (!f.config_path.empty()) {
      config = impq::parse_run_config(impq::read_text_file(f.config_path));
    }
    if (given(cmd, "--kind")) config.kind = impq::parse_instance_kind(f.kind);
    if (given(cmd, "--layers")) config.layers = f.layers;
    if (given(cmd, "--width")) config.width = f.width;
    if (given(cmd, "--classes")) config.classes = f.classes;
    if (given(cmd, "--corpus-size")) config.corpus_size = f.corpus_size;
    if (given(cmd, "--seed")) config.seed = f.seed;
    if (given(cmd, "--strength")) config.interaction_strength = f.strength;
    if (given(cmd, "--samples")) config.samples = f.samples;
    if (given(cmd, "--spqe-seed")) config.spqe_seed = f.spqe_seed;
    if (given(cmd, "--alpha")) config.alpha = f.alpha;
    if (given(cmd, "--b-low")) config.b_low = f.b_low;
    if (given(cmd, "--b-high")) config.b_high = f.b_high;
    if (given(cmd, "--target-bits")) config.target_avg_bits = f.target_bits;
    if (given(cmd, "--budget")) config.budget = f.budget;
    if (given(cmd, "--targets")) config.compare_targets = f.targets;
    if (given(cmd, "--out")) config.out_dir = f.out;
    if (given(cmd, "--methods")) config.methods = f.methods;
    if (given(cmd, "--enumerate")) config.enumerate = f.enumerate;
    if (given(cmd, "--threads")) config.threads = f.threads;
    if (given(cmd, "--record-wall-time")) config.record_wall_time = f.record_wall_time;
    if (given(cmd, "--calibration-seed")) config.calibration_seed = f.calibration_seed;
    impq::validate(config);
  } catch (const impq::Error& e) {
    throw UsageError(e.what());
  }
  if (needs_seed && !config.seed) throw UsageError("--seed is required for this command");
  return config;
}

void save_config(const impq::RunConfig& config) {
  impq::write_text_file(config.out_dir / "config.json", impq::to_document(config));
}

std::string fmt(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return buffer;
}

std::string bits_text(const std::vector<int>& bits) {
  std::string out;
  for (int b : bits) out += std::to_string(b);
  return out;
}

int cmd_gen_instance(const impq::RunConfig& config) {
  const impq::Instance instance = impq::generate_from_config(config);
  impq::write_text_file(config.out_dir / "instance.json", impq::to_document(instance));
  save_config(config);
  std::cout << "kind=" << impq::to_string(impq::kind_of(instance))
            << " layers=" << impq::layer_count(instance)
            << " fingerprint=" << impq::instance_fingerprint(instance) << "\n";
  return 0;
}

int cmd_estimate(const impq::RunConfig& config) {
  const impq::EstimateSummary s = impq::run_estimate(config);
  save_config(config);
  std::cout << "L=" << s.layers << " M=" << s.samples << "\n"
            << "sum(phi_hat)=" << fmt(s.phi_sum) << " v(empty)-v(T)=" << fmt(s.efficiency_target)
            << " residual=" << fmt(s.phi_sum - s.efficiency_target) << "\n"
            << "max per-layer variance=" << fmt(s.max_variance) << "\n";
  if (s.exact_residual) {
    std::cout << "max |phi_hat - phi_exact|=" << fmt(*s.exact_residual) << "\n";
  }
  return 0;
}

int cmd_allocate(const impq::RunConfig& config, const std::string& from) {
  const std::filesystem::path source = from.empty() ? config.out_dir : std::filesystem::path(from);
  const impq::AllocateSummary s = impq::run_allocate(config, source);
  std::cout << "bits=" << bits_text(s.allocation.bits)
            << " average_bits=" << fmt(s.allocation.average_bits)
            << " promoted_bytes=" << fmt(s.allocation.promoted_bytes) << "/" << fmt(s.budget)
            << "\nobjective=" << fmt(s.allocation.objective) << " payoff=" << fmt(s.payoff)
            << " nodes=" << s.allocation.nodes << "\n";
  return 0;
}

int cmd_compare(const impq::RunConfig& config) {
  const auto rows = impq::run_compare(config);
  save_config(config);
  std::printf("%-12s %7s %7s %14s %10s\n", "method", "target", "avg", "payoff", "ppl");
  for (const auto& row : rows) {
    std::printf("%-12s %7.3f %7.3f %14.8f %10s  %s\n", row.method.c_str(), row.target_avg_bits,
                row.average_bits, row.payoff,
                row.perplexity ? fmt(*row.perplexity).c_str() : "-", bits_text(row.bits).c_str());
  }
  std::cout << "wrote " << (config.out_dir / "compare.csv").string() << "\n";
  return 0;
}

int cmd_ablate(const impq::RunConfig& config, const std::string& sweep) {
  impq::SweepKind kind;
  try {
    kind = impq::parse_sweep_kind(sweep);
  } catch (const impq::Error& e) {
    throw UsageError(e.what());
  }
  const auto rows = impq::run_ablation(config, kind);
  save_config(config);
  std::cout << impq::sweep_csv(kind, rows);
  return 0;
}

int cmd_verify(const std::string& dir) {
  const auto results = impq::verify_artifacts(dir);
  bool all = true;
  for (const auto& r : results) {
    all = all && r.passed;
    std::cout << (r.passed ? "ok   " : "FAIL ") << r.name;
    if (!r.detail.empty()) std::cout << "  (" << r.detail << ")";
    std::cout << "\n";
  }
  return all ? 0 : kExitComputation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interaction-aware mixed-precision bit allocation"};
  app.require_subcommand(1);

  Flags flags;
  std::string from;
  std::string sweep = "samples";
  std::string verify_dir;

  auto* gen = app.add_subcommand("gen-instance", "Generate and store an instance");
  auto* est = app.add_subcommand("estimate", "Run SPQE and store marginals and estimates");
  auto* alloc = app.add_subcommand("allocate", "Solve the allocation from stored estimates");
  auto* cmp = app.add_subcommand("compare", "Compare IMPQ against baseline allocations");
  auto* abl = app.add_subcommand("ablate", "Sample-count or alpha sweep");
  auto* ver = app.add_subcommand("verify", "Re-check invariants of stored artifacts");
  for (auto* cmd : {gen, est, alloc, cmp, abl}) add_config_flags(*cmd, flags);
  alloc->add_option("--from", from, "Directory written by estimate (default: --out)");
  abl->add_option("--sweep", sweep, "samples or alpha");
  ver->add_option("dir", verify_dir, "Artifact directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (ver->parsed()) return cmd_verify(verify_dir);
    if (gen->parsed()) return cmd_gen_instance(build_config(*gen, flags, true));
    if (est->parsed()) return cmd_estimate(build_config(*est, flags, true));
    if (alloc->parsed()) return cmd_allocate(build_config(*alloc, flags, false), from);
    if (cmp->parsed()) return cmd_compare(build_config(*cmp, flags, true));
    if (abl->parsed()) return cmd_ablate(build_config(*abl, flags, true), sweep);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const impq::Error& e) {
    std::cerr << "error [" << impq::to_string(e.code()) << "]: " << e.what() << "\n";
    return kExitComputation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitComputation;
  }
  return kExitUsage;
}
