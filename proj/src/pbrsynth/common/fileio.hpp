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

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace pbrsynth {

// Reads a whole file; throws Error(kFileUnreadable) naming the path.
std::string ReadFileBytes(const std::filesystem::path& path);

// Writes to a sibling temp file and renames it into place, so readers never
// observe a partial file. Parent directories are created as needed. Throws
// Error(kIo) naming the offending path.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view bytes);

inline void WriteFileAtomic(const std::filesystem::path& path, const std::vector<uint8_t>& bytes) {
  WriteFileAtomic(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

inline std::vector<uint8_t> ReadFileBinary(const std::filesystem::path& path) {
  const std::string s = ReadFileBytes(path);
  return {s.begin(), s.end()};
}

}  // namespace pbrsynth
