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

#ifndef IMPQ_ERROR_HPP_
#define IMPQ_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace impq {

enum class ErrorCode {
  kLayerCountTooLarge,
  kOracleFailure,
  kDimensionMismatch,
  kUnsupportedBitWidth,
  kNonFiniteLoss,
  kInvalidParameter,
  kAlphaOutOfRange,
  kTargetOutOfRange,
  kInfeasible,
  kDegenerateWeights,
  kZeroVector,
  kShapeMismatch,
  kZeroNorm,
  kParseError,
  kIoError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so
// callers (and the CLI's exit-code mapping) can dispatch without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace impq

#endif  // IMPQ_ERROR_HPP_
