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

#include "pbrsynth/common/error.hpp"

namespace pbrsynth {

const char* ToString(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kFileUnreadable: return "unreadable file";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kNonTriangleFace: return "non-triangle face";
    case ErrorCode::kEmptyGeometry: return "empty geometry";
    case ErrorCode::kDegenerate: return "degenerate input";
    case ErrorCode::kResolutionMismatch: return "resolution mismatch";
    case ErrorCode::kIo: return "i/o failure";
    case ErrorCode::kConfig: return "invalid config";
    case ErrorCode::kUnknownId: return "unknown id";
    case ErrorCode::kInternal: return "internal error";
  }
  return "unknown error";
}

}  // namespace pbrsynth
