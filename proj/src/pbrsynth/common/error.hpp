// Copyright 2026 The pbrsynth Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace pbrsynth {

// Error categories. The numeric values are part of the C ABI (see
// pbrsynth.h) and must stay in sync with pbrs_status.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kFileUnreadable = 2,
  kParse = 3,
  kNonTriangleFace = 4,
  kEmptyGeometry = 5,
  kDegenerate = 6,
  kResolutionMismatch = 7,
  kIo = 8,
  kConfig = 9,
  kUnknownId = 10,
  kInternal = 99,
};

const char* ToString(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace pbrsynth
