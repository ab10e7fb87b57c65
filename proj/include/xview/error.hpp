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


#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace xview {

// Numeric values are shared with the C API status codes in xview.h.
enum class ErrorCode : int {
  kMissingKey = 1,
  kMalformedNumber = 2,
  kWrongArity = 3,
  kTruncatedRecord = 4,
  kNonFiniteValue = 5,
  kViewMismatch = 6,
  kShapeMismatch = 7,
  kBadMagic = 8,
  kChecksumMismatch = 9,
  kTruncated = 10,
  kInvalidDistribution = 11,
  kInvalidArgument = 12,
  kChannelOutOfRange = 13,
  kIo = 14,
};

std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace xview
