// Copyright 2026 The mc2mark Authors
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

#ifndef MC2MARK_RNG_HPP_
#define MC2MARK_RNG_HPP_

#include <cstdint>
#include <random>

namespace mc2mark {

// mt19937_64 has a standard-mandated output sequence; the range reductions
// below are spelled out so results do not depend on the standard library's
// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on (0, 1], 53-bit resolution.
  double uniform_open_closed() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  // Unbiased draw from [0, bound), bound >= 1.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t excess = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t v = engine_();
      if (excess == 0 || v < 0 - excess) return v % bound;
    }
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer; derives independent sub-seeds from one base seed.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace mc2mark

#endif  // MC2MARK_RNG_HPP_
