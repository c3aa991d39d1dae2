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

#include <cstddef>
#include <functional>

namespace pbrsynth {

// Runs body(i) for i in [0, count) on up to `workers` threads. Work items
// are claimed dynamically, so bodies must write only to item-private state.
// The first exception thrown by any body is rethrown after all threads join.
void ParallelFor(std::size_t count, int workers,
                 const std::function<void(std::size_t)>& body);

// Hardware concurrency, at least 1.
int DefaultWorkers();

}  // namespace pbrsynth
