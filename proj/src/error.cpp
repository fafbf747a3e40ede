// Copyright 2026 The fbl Authors
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
#include "fbl/error.hpp"

namespace fbl {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "InvalidArgument";
    case ErrorCode::kMalformedDiff:
      return "MalformedDiff";
    case ErrorCode::kNoNegativeAvailable:
      return "NoNegativeAvailable";
    case ErrorCode::kDimensionMismatch:
      return "DimensionMismatch";
    case ErrorCode::kNonFiniteLoss:
      return "NonFiniteLoss";
    case ErrorCode::kInsufficientData:
      return "InsufficientData";
    case ErrorCode::kEmptyIndex:
      return "EmptyIndex";
    case ErrorCode::kEmptyGoldSet:
      return "EmptyGoldSet";
    case ErrorCode::kIo:
      return "IoError";
    case ErrorCode::kFormat:
      return "FormatError";
    case ErrorCode::kConfigMismatch:
      return "ConfigMismatch";
  }
  return "Error";
}

}  // namespace fbl
