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

#include "pbrsynth/render/baseline.hpp"

#include <algorithm>
#include <cmath>

#include "pbrsynth/common/error.hpp"

namespace pbrsynth::render {

LdrImage CompositeBaseline(const LdrImage& fg, const std::vector<float>& alpha, const LdrImage& bg) {
  if (fg.width != bg.width || fg.height != bg.height || fg.channels != bg.channels) {
    Fail(ErrorCode::kResolutionMismatch, "foreground " + std::to_string(fg.width) + "x" + std::to_string(fg.height) +
                                             " and background " + std::to_string(bg.width) + "x" +
                                             std::to_string(bg.height) + " differ");
  }
  if (alpha.size() != static_cast<std::size_t>(fg.width) * fg.height) {
    Fail(ErrorCode::kResolutionMismatch, "alpha size does not match the image");
  }
  LdrImage out(fg.width, fg.height, fg.channels);
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const double a = std::clamp(static_cast<double>(alpha[i]), 0.0, 1.0);
    for (int c = 0; c < fg.channels; ++c) {
      const std::size_t k = i * fg.channels + c;
      const double v = a * fg.data[k] + (1.0 - a) * bg.data[k];
      out.data[k] = static_cast<uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
    }
  }
  return out;
}

}  // namespace pbrsynth::render
