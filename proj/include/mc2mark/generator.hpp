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

#ifndef MC2MARK_GENERATOR_HPP_
#define MC2MARK_GENERATOR_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mc2mark/keyderive.hpp"
#include "mc2mark/rng.hpp"
#include "mc2mark/types.hpp"

namespace mc2mark {

// Next-token distribution provider. Must be deterministic in its context for
// reproducible runs.
class LanguageModel {
 public:
  virtual ~LanguageModel() = default;
  virtual std::size_t vocab_size() const = 0;
  virtual TokenDistribution next(std::span<const TokenId> context) const = 0;
};

// Replaces keyed derivation, e.g. to force identity layers in tests.
using MaterialSource =
    std::function<StepKeyMaterial(std::size_t layer, std::span<const TokenId> key_context)>;

// Applies the m reweighting layers of one step. key_context is the sequence
// of generated tokens so far, without the prompt.
class Watermarker {
 public:
  Watermarker(const WatermarkConfig& cfg, Message message);

  void set_material_source(MaterialSource source) { source_ = std::move(source); }

  TokenDistribution step(const TokenDistribution& dist, std::span<const TokenId> key_context);

  const WatermarkConfig& config() const noexcept { return deriver_.config(); }

 private:
  KeyDeriver deriver_;
  Message message_;
  MaterialSource source_;
  std::vector<std::uint8_t> payload_;
};

TokenDistribution watermark_step(const TokenDistribution& dist,
                                 std::span<const TokenId> key_context,
                                 const Message& message, const WatermarkConfig& cfg);

// Inverse-CDF sampling in token-id order from one uniform u in (0, 1].
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}
  TokenId sample(const TokenDistribution& dist);

 private:
  Rng rng_;
};

TokenId sample_inverse_cdf(const TokenDistribution& dist, double u);

struct GenerateOptions {
  // Watermark disabled: sample directly from the LM. Used as the reference
  // stream in identity tests and benchmarks.
  bool unwatermarked = false;
  MaterialSource material_source;
};

// Returns T generated ids (the prompt is not included).
std::vector<TokenId> generate(const LanguageModel& lm, std::span<const TokenId> prompt,
                              const Message& message, std::size_t num_tokens,
                              const WatermarkConfig& cfg,
                              const GenerateOptions& options = {});

}  // namespace mc2mark

#endif  // MC2MARK_GENERATOR_HPP_
