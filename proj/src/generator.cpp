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

#include "mc2mark/generator.hpp"

#include <string>
#include <utility>

#include "mc2mark/mccr.hpp"

namespace mc2mark {

namespace {

void check_message(const Message& message, const WatermarkConfig& cfg) {
  if (message.size() != cfg.message_bits) {
    throw Error(ErrorKind::kLengthMismatch,
                "message has " + std::to_string(message.size()) + " bits, config expects " +
                    std::to_string(cfg.message_bits));
  }
}

}  // namespace

Watermarker::Watermarker(const WatermarkConfig& cfg, Message message)
    : deriver_(cfg), message_(std::move(message)) {
  check_message(message_, deriver_.config());
  payload_.resize(deriver_.config().segment_bits);
}

TokenDistribution Watermarker::step(const TokenDistribution& dist,
                                    std::span<const TokenId> key_context) {
  const WatermarkConfig& cfg = deriver_.config();
  if (dist.size() != cfg.vocab_size) {
    throw Error(ErrorKind::kLengthMismatch,
                "distribution over " + std::to_string(dist.size()) +
                    " tokens, config vocabulary is " + std::to_string(cfg.vocab_size));
  }
  TokenDistribution current = dist;
  StepKeyMaterial injected;
  for (std::size_t layer = 1; layer <= cfg.num_layers; ++layer) {
    const StepKeyMaterial* material;
    if (source_) {
      injected = source_(layer, key_context);
      material = &injected;
    } else {
      material = &deriver_.material(layer, key_context);
    }
    const auto segment = message_.segment(material->segment_index, cfg.segment_bits);
    for (std::size_t i = 0; i < payload_.size(); ++i) {
      payload_[i] = segment[i] ^ material->mask[i];
    }
    current = reweight_layer(current, *material, payload_);
  }
  return current;
}

TokenDistribution watermark_step(const TokenDistribution& dist,
                                 std::span<const TokenId> key_context,
                                 const Message& message, const WatermarkConfig& cfg) {
  Watermarker marker(cfg, message);
  return marker.step(dist, key_context);
}

TokenId sample_inverse_cdf(const TokenDistribution& dist, double u) {
  const auto probs = dist.probs();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t x = 0; x < probs.size(); ++x) {
    if (probs[x] <= 0.0) continue;
    cumulative += probs[x];
    last_positive = x;
    if (cumulative >= u) return static_cast<TokenId>(x);
  }
  // Rounding left the total just below u.
  return static_cast<TokenId>(last_positive);
}

TokenId Sampler::sample(const TokenDistribution& dist) {
  return sample_inverse_cdf(dist, rng_.uniform_open_closed());
}

std::vector<TokenId> generate(const LanguageModel& lm, std::span<const TokenId> prompt,
                              const Message& message, std::size_t num_tokens,
                              const WatermarkConfig& cfg, const GenerateOptions& options) {
  Watermarker marker(cfg, message);
  if (options.material_source) marker.set_material_source(options.material_source);
  Sampler sampler(cfg.sampling_seed);

  std::vector<TokenId> lm_context(prompt.begin(), prompt.end());
  lm_context.reserve(prompt.size() + num_tokens);
  std::vector<TokenId> emitted;
  emitted.reserve(num_tokens);

  for (std::size_t t = 0; t < num_tokens; ++t) {
    TokenDistribution base;
    try {
      base = lm.next(lm_context);
    } catch (const std::exception& e) {
      throw Error(ErrorKind::kProviderFailure,
                  "language model failed at step " + std::to_string(t) + ": " + e.what());
    }
    const TokenDistribution dist = options.unwatermarked ? base : marker.step(base, emitted);
    const TokenId next = sampler.sample(dist);
    emitted.push_back(next);
    lm_context.push_back(next);
  }
  return emitted;
}

}  // namespace mc2mark
