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

#include "impq/serialize.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "impq/error.hpp"

namespace impq {
namespace {

using nlohmann::json;

constexpr char kInstanceFormat[] = "impq.instance";
constexpr char kMarginalsFormat[] = "impq.marginals";
constexpr char kEstimateFormat[] = "impq.estimate";
constexpr char kInteractionFormat[] = "impq.interaction";
constexpr char kProblemFormat[] = "impq.problem";
constexpr char kAllocationFormat[] = "impq.allocation";
constexpr char kScoresFormat[] = "impq.scores";

double finite(double value, const char* what) {
  if (!std::isfinite(value)) {
    fail(ErrorCode::kInvalidParameter, std::string("cannot serialize non-finite ") + what);
  }
  return value;
}

json vector_json(const Eigen::VectorXd& v, const char* what) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(finite(v[i], what));
  return out;
}

json matrix_json(const Eigen::MatrixXd& m, const char* what) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(finite(m(r, c), what));
    out.push_back(std::move(row));
  }
  return out;
}

Eigen::VectorXd vector_from(const json& j) {
  if (!j.is_array()) fail(ErrorCode::kParseError, "expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(ErrorCode::kParseError, "expected a number");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Eigen::MatrixXd matrix_from(const json& j, Eigen::Index cols_if_empty = 0) {
  if (!j.is_array()) fail(ErrorCode::kParseError, "expected an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols =
      rows == 0 ? cols_if_empty : static_cast<Eigen::Index>(j[0].is_array() ? j[0].size() : 0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      fail(ErrorCode::kParseError, "matrix rows have unequal lengths");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!row[static_cast<std::size_t>(c)].is_number()) {
        fail(ErrorCode::kParseError, "expected a number");
      }
      m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
  return m;
}

json header(const char* format) { return json{{"format", format}, {"version", kDocumentVersion}}; }

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    fail(ErrorCode::kParseError, std::string("malformed document: ") + e.what());
  }
}

json parse_tagged(std::string_view text, const char* format) {
  json j = parse_json(text);
  if (!j.is_object() || !j.contains("format") || j["format"] != format) {
    fail(ErrorCode::kParseError, std::string("document is not of format ") + format);
  }
  if (!j.contains("version") || j["version"] != kDocumentVersion) {
    fail(ErrorCode::kParseError, "unsupported document version");
  }
  return j;
}

// Wraps the typed-access exceptions of the JSON library (missing keys,
// wrong types) into ParseError.
template <typename F>
auto guarded(F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const json::exception& e) {
    fail(ErrorCode::kParseError, std::string("invalid document: ") + e.what());
  }
}

json quadratic_json(const QuadraticSurrogate& model) {
  json j = header(kInstanceFormat);
  j["kind"] = std::string(to_string(InstanceKind::kQuadratic));
  j["layers"] = model.layer_count();
  j["seed"] = model.seed;
  j["interaction_strength"] = finite(model.interaction_strength, "strength");
  j["base_loss"] = finite(model.base_loss, "base loss");
  j["g_eff"] = vector_json(model.g_eff, "g_eff");
  j["h_eff"] = matrix_json(model.h_eff, "h_eff");
  j["param_counts"] = model.param_counts;
  return j;
}

json network_json(const NetworkInstance& instance) {
  const LayeredNet& net = instance.net;
  json j = header(kInstanceFormat);
  j["kind"] = std::string(to_string(InstanceKind::kNetwork));
  j["layers"] = net.layer_count();
  j["width"] = net.width();
  j["classes"] = net.classes();
  j["seed"] = net.seed;
  j["interaction_strength"] = finite(instance.interaction_strength, "strength");
  json weights = json::array();
  json biases = json::array();
  for (int t = 0; t < net.layer_count(); ++t) {
    weights.push_back(matrix_json(net.weights[t], "weights"));
    biases.push_back(vector_json(net.biases[t], "biases"));
  }
  j["weights"] = std::move(weights);
  j["biases"] = std::move(biases);
  j["head"] = matrix_json(net.head, "head");
  j["corpus"] = json{{"seed", instance.corpus.seed},
                     {"inputs", matrix_json(instance.corpus.inputs, "inputs")},
                     {"labels", instance.corpus.labels}};
  return j;
}

}  // namespace

std::string to_document(const Instance& instance) {
  return std::visit(
      [](const auto& value) -> std::string {
        using T = std::decay_t<decltype(value)>;
        if constexpr (std::is_same_v<T, QuadraticSurrogate>) {
          return dump(quadratic_json(value));
        } else {
          return dump(network_json(value));
        }
      },
      instance);
}

Instance parse_instance(std::string_view text) {
  const json j = parse_tagged(text, kInstanceFormat);
  return guarded([&]() -> Instance {
    const InstanceKind kind = parse_instance_kind(j.at("kind").get<std::string>());
    if (kind == InstanceKind::kQuadratic) {
      QuadraticSurrogate model;
      model.seed = j.at("seed").get<std::uint64_t>();
      model.interaction_strength = j.at("interaction_strength").get<double>();
      model.base_loss = j.at("base_loss").get<double>();
      model.g_eff = vector_from(j.at("g_eff"));
      model.h_eff = matrix_from(j.at("h_eff"));
      model.param_counts = j.at("param_counts").get<std::vector<std::int64_t>>();
      if (j.at("layers").get<int>() != model.layer_count()) {
        fail(ErrorCode::kParseError, "layer count does not match the coefficients");
      }
      validate(model);
      return model;
    }
    NetworkInstance instance;
    instance.interaction_strength = j.at("interaction_strength").get<double>();
    LayeredNet& net = instance.net;
    net.seed = j.at("seed").get<std::uint64_t>();
    for (const json& w : j.at("weights")) net.weights.push_back(matrix_from(w));
    for (const json& b : j.at("biases")) net.biases.push_back(vector_from(b));
    net.head = matrix_from(j.at("head"));
    const json& corpus = j.at("corpus");
    instance.corpus.seed = corpus.at("seed").get<std::uint64_t>();
    instance.corpus.inputs = matrix_from(corpus.at("inputs"), net.width());
    instance.corpus.labels = corpus.at("labels").get<std::vector<int>>();
    if (j.at("layers").get<int>() != net.layer_count() || j.at("width").get<int>() != net.width() ||
        j.at("classes").get<int>() != net.classes()) {
      fail(ErrorCode::kParseError, "declared shape does not match the stored tensors");
    }
    validate(net, instance.corpus);
    return instance;
  });
}

std::string to_document(const MarginalMatrix& matrix) {
  if (static_cast<int>(matrix.orders.size()) != matrix.samples()) {
    fail(ErrorCode::kDimensionMismatch, "one demotion order per row is required");
  }
  json j = header(kMarginalsFormat);
  j["layers"] = matrix.layer_count();
  j["samples"] = matrix.samples();
  j["b_high"] = matrix.b_high;
  j["b_low"] = matrix.b_low;
  j["seed"] = matrix.seed;
  j["oracle_fingerprint"] = matrix.oracle_fingerprint;
  j["mode"] = std::string(to_string(matrix.mode));
  j["orders"] = matrix.orders;
  j["rows"] = matrix_json(matrix.rows, "marginals");
  return dump(j);
}

MarginalMatrix parse_marginal_matrix(std::string_view text) {
  const json j = parse_tagged(text, kMarginalsFormat);
  return guarded([&] {
    MarginalMatrix matrix;
    const int layers = j.at("layers").get<int>();
    matrix.rows = matrix_from(j.at("rows"), layers);
    matrix.orders = j.at("orders").get<std::vector<std::vector<int>>>();
    matrix.b_high = j.at("b_high").get<int>();
    matrix.b_low = j.at("b_low").get<int>();
    matrix.seed = j.at("seed").get<std::uint64_t>();
    matrix.oracle_fingerprint = j.at("oracle_fingerprint").get<std::string>();
    matrix.mode = parse_sampling_mode(j.at("mode").get<std::string>());
    if (matrix.layer_count() != layers || matrix.samples() != j.at("samples").get<int>() ||
        static_cast<int>(matrix.orders.size()) != matrix.samples()) {
      fail(ErrorCode::kParseError, "marginal matrix header does not match its rows");
    }
    for (const auto& order : matrix.orders) {
      if (static_cast<int>(order.size()) != layers) {
        fail(ErrorCode::kParseError, "demotion order has the wrong length");
      }
    }
    return matrix;
  });
}

std::string to_document(const ShapleyEstimate& estimate) {
  json j = header(kEstimateFormat);
  j["layers"] = estimate.phi_hat.size();
  j["samples"] = estimate.samples;
  j["phi_hat"] = vector_json(estimate.phi_hat, "phi_hat");
  j["per_layer_variance"] = vector_json(estimate.per_layer_variance, "variance");
  return dump(j);
}

ShapleyEstimate parse_shapley_estimate(std::string_view text) {
  const json j = parse_tagged(text, kEstimateFormat);
  return guarded([&] {
    ShapleyEstimate estimate;
    estimate.samples = j.at("samples").get<int>();
    estimate.phi_hat = vector_from(j.at("phi_hat"));
    estimate.per_layer_variance = vector_from(j.at("per_layer_variance"));
    if (estimate.phi_hat.size() != j.at("layers").get<Eigen::Index>() ||
        estimate.per_layer_variance.size() != estimate.phi_hat.size()) {
      fail(ErrorCode::kParseError, "estimate vectors have inconsistent lengths");
    }
    return estimate;
  });
}

std::string to_document(const InteractionModel& model) {
  json j = header(kInteractionFormat);
  j["alpha"] = finite(model.alpha, "alpha");
  j["source_samples"] = model.source_samples;
  j["covariance"] = matrix_json(model.covariance, "covariance");
  j["shrunk"] = matrix_json(model.shrunk, "shrunk covariance");
  j["sensitivities"] = vector_json(model.sensitivities, "sensitivities");
  return dump(j);
}

InteractionModel parse_interaction_model(std::string_view text) {
  const json j = parse_tagged(text, kInteractionFormat);
  return guarded([&] {
    InteractionModel model;
    model.alpha = j.at("alpha").get<double>();
    model.source_samples = j.at("source_samples").get<int>();
    model.sensitivities = vector_from(j.at("sensitivities"));
    const Eigen::Index layers = model.sensitivities.size();
    model.covariance = matrix_from(j.at("covariance"), layers);
    model.shrunk = matrix_from(j.at("shrunk"), layers);
    if (model.covariance.rows() != layers || model.covariance.cols() != layers ||
        model.shrunk.rows() != layers || model.shrunk.cols() != layers) {
      fail(ErrorCode::kParseError, "interaction matrices have the wrong shape");
    }
    return model;
  });
}

std::string to_document(const AllocationProblem& problem) {
  validate(problem);
  json j = header(kProblemFormat);
  j["layers"] = problem.layer_count();
  j["linear"] = vector_json(problem.linear, "linear term");
  j["interaction"] = matrix_json(problem.interaction, "interaction");
  j["costs"] = vector_json(problem.costs, "costs");
  j["budget"] = finite(problem.budget, "budget");
  j["param_counts"] = problem.param_counts;
  j["b_low"] = problem.b_low;
  j["b_high"] = problem.b_high;
  return dump(j);
}

AllocationProblem parse_allocation_problem(std::string_view text) {
  const json j = parse_tagged(text, kProblemFormat);
  return guarded([&] {
    AllocationProblem problem;
    problem.linear = vector_from(j.at("linear"));
    problem.interaction = matrix_from(j.at("interaction"), problem.linear.size());
    problem.costs = vector_from(j.at("costs"));
    problem.budget = j.at("budget").get<double>();
    problem.param_counts = j.at("param_counts").get<std::vector<std::int64_t>>();
    problem.b_low = j.at("b_low").get<int>();
    problem.b_high = j.at("b_high").get<int>();
    if (problem.layer_count() != j.at("layers").get<int>()) {
      fail(ErrorCode::kParseError, "layer count does not match the coefficients");
    }
    validate(problem);
    return problem;
  });
}

std::string to_document(const Allocation& allocation) {
  json j = header(kAllocationFormat);
  j["q"] = allocation.demoted;
  j["bits"] = allocation.bits;
  j["objective"] = finite(allocation.objective, "objective");
  j["promoted_bytes"] = finite(allocation.promoted_bytes, "promoted bytes");
  j["average_bits"] = finite(allocation.average_bits, "average bits");
  j["nodes"] = allocation.nodes;
  if (allocation.wall_seconds) j["wall_seconds"] = finite(*allocation.wall_seconds, "wall time");
  return dump(j);
}

Allocation parse_allocation(std::string_view text) {
  const json j = parse_tagged(text, kAllocationFormat);
  return guarded([&] {
    Allocation allocation;
    allocation.demoted = j.at("q").get<std::vector<int>>();
    allocation.bits = j.at("bits").get<std::vector<int>>();
    allocation.objective = j.at("objective").get<double>();
    allocation.promoted_bytes = j.at("promoted_bytes").get<double>();
    allocation.average_bits = j.at("average_bits").get<double>();
    allocation.nodes = j.at("nodes").get<std::int64_t>();
    if (j.contains("wall_seconds")) allocation.wall_seconds = j.at("wall_seconds").get<double>();
    if (allocation.bits.size() != allocation.demoted.size()) {
      fail(ErrorCode::kParseError, "q and bits have different lengths");
    }
    return allocation;
  });
}

std::string to_document(const LayerScoreReport& report) {
  json j = header(kScoresFormat);
  j["method"] = std::string(to_string(report.method));
  j["scores"] = vector_json(report.scores, "scores");
  j["calibration_seed"] = report.calibration_seed;
  j["notes"] = report.notes;
  return dump(j);
}

LayerScoreReport parse_score_report(std::string_view text) {
  const json j = parse_tagged(text, kScoresFormat);
  return guarded([&] {
    LayerScoreReport report;
    report.method = parse_baseline_method(j.at("method").get<std::string>());
    report.scores = vector_from(j.at("scores"));
    report.calibration_seed = j.at("calibration_seed").get<std::uint64_t>();
    report.notes = j.at("notes").get<std::map<std::string, std::string>>();
    return report;
  });
}

std::string document_format(std::string_view text) {
  const json j = parse_json(text);
  if (!j.is_object() || !j.contains("format") || !j["format"].is_string()) {
    fail(ErrorCode::kParseError, "document has no format tag");
  }
  return j["format"].get<std::string>();
}

std::string canonicalize(std::string_view text) { return dump(parse_json(text)); }

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) fail(ErrorCode::kIoError, "cannot read " + path.string());
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) fail(ErrorCode::kIoError, "cannot create " + path.parent_path().string());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIoError, "cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) fail(ErrorCode::kIoError, "cannot write " + path.string());
}

}  // namespace impq
