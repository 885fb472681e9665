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

#include "ergodic_align/rng.hpp"

#include <limits>
#include <stdexcept>

namespace ergodic_align {

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

Rng Rng::stream(std::uint64_t master_seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                    static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(std::mt19937_64(seq));
}

std::uint64_t Rng::uniform_below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_below(0)");
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  // Accept [0, last] where last + 1 = 2^64 - (2^64 mod bound).
  const std::uint64_t last = kMax - (kMax % bound + 1) % bound;
  for (;;) {
    const std::uint64_t x = engine_();
    if (x <= last) return x % bound;
  }
}

}  // namespace ergodic_align
