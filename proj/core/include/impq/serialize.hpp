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

#ifndef IMPQ_SERIALIZE_HPP_
#define IMPQ_SERIALIZE_HPP_

#include <filesystem>
#include <string>
#include <string_view>

#include "impq/allocator.hpp"
#include "impq/baselines.hpp"
#include "impq/instance.hpp"
#include "impq/interaction.hpp"
#include "impq/spqe.hpp"

namespace impq {

// Every artifact is a JSON document with sorted keys, two-space indentation,
// a trailing newline and shortest round-trip number formatting, so a parse
// followed by a re-serialization reproduces the input byte for byte. Each
// document carries "format" and "version" fields checked on parse.

inline constexpr int kDocumentVersion = 1;

std::string to_document(const Instance& instance);
std::string to_document(const MarginalMatrix& matrix);
std::string to_document(const ShapleyEstimate& estimate);
std::string to_document(const InteractionModel& model);
std::string to_document(const AllocationProblem& problem);
std::string to_document(const Allocation& allocation);
std::string to_document(const LayerScoreReport& report);

// Parsers throw ParseError on malformed text, a wrong format tag or an
// unsupported version, and the type's own validation errors otherwise.
Instance parse_instance(std::string_view text);
MarginalMatrix parse_marginal_matrix(std::string_view text);
ShapleyEstimate parse_shapley_estimate(std::string_view text);
InteractionModel parse_interaction_model(std::string_view text);
AllocationProblem parse_allocation_problem(std::string_view text);
Allocation parse_allocation(std::string_view text);
LayerScoreReport parse_score_report(std::string_view text);

/// The "format" tag of a document, e.g. "impq.allocation".
std::string document_format(std::string_view text);

/// Parses any document and writes it back in canonical form.
std::string canonicalize(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace impq

#endif  // IMPQ_SERIALIZE_HPP_
