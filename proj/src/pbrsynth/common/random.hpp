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
#include <initializer_list>
#include <string_view>

#include "pbrsynth/common/math.hpp"

namespace pbrsynth {

// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr uint64_t Mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr uint64_t HashCombine(uint64_t seed, uint64_t value) {
  return Mix64(seed ^ Mix64(value + 0x632be59bd9b4e019ULL));
}

// FNV-1a over the bytes of a label, then mixed.
constexpr uint64_t HashLabel(std::string_view label) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return Mix64(h);
}

inline uint64_t HashKey(uint64_t seed, std::initializer_list<uint64_t> values) {
  uint64_t h = Mix64(seed);
  for (uint64_t v : values) h = HashCombine(h, v);
  return h;
}

// Counter-based stream: output i is Mix64(key + i * golden). Cheap to
// construct, so one can be keyed per (seed, pixel, sample) without any
// shared state.
class Rng {
 public:
  explicit Rng(uint64_t key = 0) : state_(key) {}

  uint64_t NextU64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double Uniform() { return static_cast<double>(NextU64() >> 11) * 0x1.0p-53; }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Uniform in [0, n). n must be > 0.
  uint64_t UniformInt(uint64_t n) {
    // Rejection keeps the draw exactly uniform.
    const uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
    uint64_t x;
    do {
      x = NextU64();
    } while (x >= limit);
    return x % n;
  }

  Vec2 Uniform2() {
    const double u = Uniform();
    return {u, Uniform()};
  }

 private:
  uint64_t state_;
};

// Uniformly distributed rotation (Shoemake's subgroup algorithm).
inline Mat3 UniformRotation(Rng& rng) {
  const double u1 = rng.Uniform();
  const double u2 = rng.Uniform();
  const double u3 = rng.Uniform();
  const double a = std::sqrt(1.0 - u1);
  const double b = std::sqrt(u1);
  Quat q(a * std::sin(2.0 * kPi * u2), a * std::cos(2.0 * kPi * u2),
         b * std::sin(2.0 * kPi * u3), b * std::cos(2.0 * kPi * u3));
  q.normalize();
  return q.toRotationMatrix();
}

}  // namespace pbrsynth
