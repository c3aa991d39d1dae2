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

#include <vector>

#include "pbrsynth/render/image.hpp"

namespace pbrsynth::render {

// out = alpha * fg + (1 - alpha) * bg per channel, rounded half up. Alpha is
// one value per pixel in [0, 1]. Throws Error(kResolutionMismatch) when the
// sizes differ.
LdrImage CompositeBaseline(const LdrImage& foreground, const std::vector<float>& alpha, const LdrImage& background);

}  // namespace pbrsynth::render
