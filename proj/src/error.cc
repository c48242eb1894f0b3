// Copyright 2026 The plearn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "plearn/error.h"

namespace plearn {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonPositivePayoff: return "NonPositivePayoff";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kMalformedDocument: return "MalformedDocument";
    case ErrorCode::kUnknownGame: return "UnknownGame";
    case ErrorCode::kInvalidParams: return "InvalidParams";
    case ErrorCode::kStepTooLarge: return "StepTooLarge";
    case ErrorCode::kInvalidDelta: return "InvalidDelta";
    case ErrorCode::kInvalidLambda: return "InvalidLambda";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kNotStochastic: return "NotStochastic";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kExcessiveCensoring: return "ExcessiveCensoring";
    case ErrorCode::kIoFailure: return "IoFailure";
  }
  return "Unknown";
}

bool IsValidationError(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotStochastic:
    case ErrorCode::kNoConvergence:
    case ErrorCode::kExcessiveCensoring:
    case ErrorCode::kIoFailure:
      return false;
    default:
      return true;
  }
}

}  // namespace plearn
