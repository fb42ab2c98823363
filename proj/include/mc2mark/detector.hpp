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

#ifndef MC2MARK_DETECTOR_HPP_
#define MC2MARK_DETECTOR_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mc2mark/types.hpp"

namespace mc2mark {

// Per-bit evidence. Index v of hit/total refers to the hypothesis q_u = v.
// Counters are additive across disjoint position ranges.
struct EvidenceCounters {
  std::vector<std::uint64_t> hit0, hit1, total0, total1;

  EvidenceCounters() = default;
  explicit EvidenceCounters(std::size_t message_bits)
      : hit0(message_bits), hit1(message_bits), total0(message_bits), total1(message_bits) {}

  std::size_t size() const noexcept { return hit0.size(); }
  EvidenceCounters& operator+=(const EvidenceCounters& other);

  friend bool operator==(const EvidenceCounters&, const EvidenceCounters&) = default;
};

// Scores positions t = 1 .. T-1 (0-based), keyed by the w tokens before t.
EvidenceCounters accumulate(std::span<const TokenId> tokens, const WatermarkConfig& cfg);

// Scores positions [first, last) only. accumulate over [1, T) in pieces and
// summing gives the same counters as one pass.
EvidenceCounters accumulate_range(std::span<const TokenId> tokens, const WatermarkConfig& cfg,
                                  std::size_t first, std::size_t last);

// Bit i is 1 iff hit1/max(1,total1) > hit0/max(1,total0); ties decode to 0.
DecodedMessage decode(const EvidenceCounters& counters);

DecodedMessage detect(std::span<const TokenId> tokens, const WatermarkConfig& cfg);

// Fraction of positions where decoded equals truth.
double bit_accuracy(const Message& decoded, const Message& truth);

}  // namespace mc2mark

#endif  // MC2MARK_DETECTOR_HPP_
