// Copyright 2026 The xview Authors
// SPDX-License-Identifier: Apache-2.0
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


#include "xview/error.hpp"

namespace xview {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kMissingKey: return "MissingKey";
    case ErrorCode::kMalformedNumber: return "MalformedNumber";
    case ErrorCode::kWrongArity: return "WrongArity";
    case ErrorCode::kTruncatedRecord: return "TruncatedRecord";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kViewMismatch: return "ViewMismatch";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::kTruncated: return "Truncated";
    case ErrorCode::kInvalidDistribution: return "InvalidDistribution";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kChannelOutOfRange: return "ChannelOutOfRange";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace xview
