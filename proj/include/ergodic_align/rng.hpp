// Copyright 2026 The ergodic-align Authors.
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
#include <random>

namespace ergodic_align {

/// The one random source used throughout: a 64-bit Mersenne Twister with a
/// portable bounded sampler, so a seed reproduces the same stream on every
/// standard library.
///
/// Split rule: stream i of master seed s is seeded with
/// std::seed_seq{lo32(s), hi32(s), lo32(i), hi32(i)}. Monte Carlo trial i
/// always uses stream i, independent of how trials are spread over workers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  static Rng stream(std::uint64_t master_seed, std::uint64_t index);

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, bound), bound >= 1; rejection sampling, no modulo bias.
  std::uint64_t uniform_below(std::uint64_t bound);
  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  explicit Rng(std::mt19937_64 engine) : engine_(engine) {}
  std::mt19937_64 engine_;
};

}  // namespace ergodic_align
