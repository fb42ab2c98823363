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

#include "mc2mark/detector.hpp"

#include <algorithm>
#include <string>

#include "mc2mark/keyderive.hpp"

namespace mc2mark {

EvidenceCounters& EvidenceCounters::operator+=(const EvidenceCounters& other) {
  if (other.size() != size()) {
    throw Error(ErrorKind::kLengthMismatch, "counter widths differ");
  }
  for (std::size_t i = 0; i < size(); ++i) {
    hit0[i] += other.hit0[i];
    hit1[i] += other.hit1[i];
    total0[i] += other.total0[i];
    total1[i] += other.total1[i];
  }
  return *this;
}

EvidenceCounters accumulate_range(std::span<const TokenId> tokens, const WatermarkConfig& cfg,
                                  std::size_t first, std::size_t last) {
  const KeyDeriver deriver(cfg);
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    if (tokens[t] >= cfg.vocab_size) {
      throw Error(ErrorKind::kTokenOutOfRange,
                  "token " + std::to_string(tokens[t]) + " at position " + std::to_string(t) +
                      " outside vocabulary of " + std::to_string(cfg.vocab_size));
    }
  }
  EvidenceCounters counters(cfg.message_bits);
  first = std::max<std::size_t>(first, 1);
  last = std::min(last, tokens.size());
  const std::size_t width = cfg.segment_bits;

  for (std::size_t t = first; t < last; ++t) {
    const auto context = tokens.first(t);
    for (std::size_t layer = 1; layer <= cfg.num_layers; ++layer) {
      const StepProbe probe = deriver.probe(layer, context, tokens[t]);
      const std::size_t base = probe.segment_index * width;
      // A green observation under mask bit 1 supports q = 0, under mask bit 0
      // supports q = 1.
      if (probe.mask[probe.subset]) {
        ++counters.hit0[base + probe.subset];
      } else {
        ++counters.hit1[base + probe.subset];
      }
      for (std::size_t i = 0; i < width; ++i) {
        if (probe.mask[i]) {
          ++counters.total0[base + i];
        } else {
          ++counters.total1[base + i];
        }
      }
    }
  }
  return counters;
}

EvidenceCounters accumulate(std::span<const TokenId> tokens, const WatermarkConfig& cfg) {
  return accumulate_range(tokens, cfg, 1, tokens.size());
}

DecodedMessage decode(const EvidenceCounters& counters) {
  const std::size_t n = counters.size();
  std::vector<std::uint8_t> bits(n, 0);
  DecodedMessage out;
  out.margins.resize(n);
  out.evidence_count.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double rate0 = static_cast<double>(counters.hit0[i]) /
                         static_cast<double>(std::max<std::uint64_t>(1, counters.total0[i]));
    const double rate1 = static_cast<double>(counters.hit1[i]) /
                         static_cast<double>(std::max<std::uint64_t>(1, counters.total1[i]));
    bits[i] = rate1 > rate0 ? 1 : 0;
    out.margins[i] = rate1 - rate0;
    out.evidence_count[i] = counters.total0[i] + counters.total1[i];
  }
  out.bits = Message(std::move(bits));
  return out;
}

DecodedMessage detect(std::span<const TokenId> tokens, const WatermarkConfig& cfg) {
  return decode(accumulate(tokens, cfg));
}

double bit_accuracy(const Message& decoded, const Message& truth) {
  if (decoded.size() != truth.size()) {
    throw Error(ErrorKind::kLengthMismatch, "messages differ in length");
  }
  if (truth.size() == 0) return 1.0;
  std::size_t same = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) same += decoded[i] == truth[i];
  return static_cast<double>(same) / static_cast<double>(truth.size());
}

}  // namespace mc2mark
