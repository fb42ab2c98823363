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

// Per-(step, layer) key material: segment index, mask and vocabulary
// partition, all drawn from a SHA-256 counter-mode keystream.
//
// Wire format (little-endian throughout):
//
//   digest  = SHA-256(secret || 0x01 || LE64(layer) || LE64(w) || pad || ids)
//   block_i = SHA-256(digest || LE64(i)),  i = 0, 1, 2, ...
//
// ids are the last min(w, available) generated tokens as LE32. pad is
// (w - available) copies of the LE32 sentinel 0xFFFFFFFF and precedes ids.
// The keystream is the concatenation of blocks read as LE64 words.
// uniform(M) rejects words >= floor(2^64 / M) * M and returns word mod M.
//
// Draw order inside derive_step_material:
//   1. segment index  = uniform(g)
//   2. mask bits h_i  = uniform(2), i = 0 .. n'-1
//   3. Fisher-Yates over [0, N): for i = N-1 down to 1 swap(a[i], a[uniform(i+1)])
// The shuffled array is cut into n' contiguous slices; the first N mod n'
// slices hold ceil(N/n') tokens, the rest floor(N/n').

#ifndef MC2MARK_KEYDERIVE_HPP_
#define MC2MARK_KEYDERIVE_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mc2mark/types.hpp"

namespace mc2mark {

using Digest = std::array<std::uint8_t, 32>;
using SubsetIndex = std::uint8_t;

inline constexpr TokenId kContextSentinel = 0xFFFFFFFFu;

Digest sha256(std::span<const std::uint8_t> data);

// context holds the tokens generated so far (prompt excluded); only the last
// min(w, context.size()) enter the hash.
Digest derive_digest(std::span<const std::uint8_t> secret, std::size_t layer,
                     std::span<const TokenId> context, std::size_t w);

class Keystream {
 public:
  explicit Keystream(const Digest& seed) : seed_(seed) {}

  std::uint64_t next_word();
  // Unbiased draw from [0, bound). bound must be >= 1.
  std::uint64_t uniform(std::uint64_t bound);

  std::uint64_t words_consumed() const noexcept { return words_; }

 private:
  void refill();

  Digest seed_;
  Digest block_{};
  std::uint64_t counter_ = 0;
  std::size_t offset_ = sizeof(Digest);
  std::uint64_t words_ = 0;
};

struct StepKeyMaterial {
  std::size_t layer = 0;
  std::size_t segment_index = 0;
  std::vector<std::uint8_t> mask;
  std::vector<SubsetIndex> partition;
};

// Everything the detector needs about one (step, layer): the segment, the mask
// and the subset holding a single observed token. Consumes the keystream in
// the same order as derive_step_material without materializing the shuffle.
struct StepProbe {
  std::size_t segment_index = 0;
  std::vector<std::uint8_t> mask;
  SubsetIndex subset = 0;
};

// Subset sizes implied by the slicing rule.
std::vector<std::size_t> subset_sizes(std::size_t vocab_size, std::size_t segment_bits);

StepKeyMaterial derive_step_material(std::span<const std::uint8_t> secret,
                                     std::size_t layer,
                                     std::span<const TokenId> context,
                                     const WatermarkConfig& cfg);

// Buffer-reusing deriver bound to one config. Not thread-safe; use one per
// thread.
class KeyDeriver {
 public:
  explicit KeyDeriver(const WatermarkConfig& cfg);

  // Result stays valid until the next call.
  const StepKeyMaterial& material(std::size_t layer, std::span<const TokenId> context);
  StepProbe probe(std::size_t layer, std::span<const TokenId> context, TokenId token) const;

  const WatermarkConfig& config() const noexcept { return cfg_; }

 private:
  WatermarkConfig cfg_;
  std::vector<TokenId> shuffle_;
  StepKeyMaterial material_;
};

}  // namespace mc2mark

#endif  // MC2MARK_KEYDERIVE_HPP_
