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

#include "mc2mark/keyderive.hpp"

#include <algorithm>
#include <numeric>
#include <utility>

#include "sha256.hpp"

namespace mc2mark {

Digest sha256(std::span<const std::uint8_t> data) {
  return detail::Sha256().update(data).finish();
}

Digest derive_digest(std::span<const std::uint8_t> secret, std::size_t layer,
                     std::span<const TokenId> context, std::size_t w) {
  const std::size_t available = std::min(w, context.size());
  detail::Sha256 h;
  h.update(secret).update_u8(0x01).update_le64(layer).update_le64(w);
  for (std::size_t i = available; i < w; ++i) h.update_le32(kContextSentinel);
  for (TokenId id : context.last(available)) h.update_le32(id);
  return h.finish();
}

void Keystream::refill() {
  detail::Sha256 h;
  h.update(seed_).update_le64(counter_++);
  block_ = h.finish();
  offset_ = 0;
}

std::uint64_t Keystream::next_word() {
  if (offset_ == block_.size()) refill();
  const std::uint64_t v = detail::load_le64(block_.data() + offset_);
  offset_ += 8;
  ++words_;
  return v;
}

std::uint64_t Keystream::uniform(std::uint64_t bound) {
  // 2^64 mod bound, computed without 128-bit arithmetic.
  const std::uint64_t excess = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t v = next_word();
    // Accept v < 2^64 - excess.
    if (excess == 0 || v < 0 - excess) return v % bound;
  }
}

namespace {

struct SliceLayout {
  std::size_t big_size;
  std::size_t big_count;
  std::size_t small_size;

  SliceLayout(std::size_t n, std::size_t parts)
      : big_size((n + parts - 1) / parts),
        big_count(n % parts),
        small_size(n / parts) {}

  SubsetIndex slice_of(std::size_t position) const {
    const std::size_t big_span = big_count * big_size;
    if (position < big_span) return static_cast<SubsetIndex>(position / big_size);
    return static_cast<SubsetIndex>(big_count + (position - big_span) / small_size);
  }
};

void draw_header(Keystream& ks, const WatermarkConfig& cfg, std::size_t& segment,
                 std::vector<std::uint8_t>& mask) {
  segment = static_cast<std::size_t>(ks.uniform(cfg.num_segments));
  mask.resize(cfg.segment_bits);
  for (auto& bit : mask) bit = static_cast<std::uint8_t>(ks.uniform(2));
}

void fill_material(const WatermarkConfig& cfg, std::size_t layer,
                   std::span<const TokenId> context, std::vector<TokenId>& shuffle,
                   StepKeyMaterial& out) {
  Keystream ks(derive_digest(cfg.secret_key, layer, context, cfg.context_window));
  out.layer = layer;
  draw_header(ks, cfg, out.segment_index, out.mask);

  const std::size_t n = cfg.vocab_size;
  shuffle.resize(n);
  std::iota(shuffle.begin(), shuffle.end(), TokenId{0});
  for (std::size_t i = n - 1; i >= 1; --i) {
    const auto j = static_cast<std::size_t>(ks.uniform(i + 1));
    std::swap(shuffle[i], shuffle[j]);
  }

  const SliceLayout layout(n, cfg.segment_bits);
  out.partition.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.partition[shuffle[k]] = layout.slice_of(k);
}

}  // namespace

std::vector<std::size_t> subset_sizes(std::size_t vocab_size, std::size_t segment_bits) {
  const SliceLayout layout(vocab_size, segment_bits);
  std::vector<std::size_t> sizes(segment_bits, layout.small_size);
  for (std::size_t s = 0; s < layout.big_count; ++s) sizes[s] = layout.big_size;
  return sizes;
}

StepKeyMaterial derive_step_material(std::span<const std::uint8_t> secret,
                                     std::size_t layer,
                                     std::span<const TokenId> context,
                                     const WatermarkConfig& cfg) {
  WatermarkConfig keyed = cfg;
  keyed.secret_key.assign(secret.begin(), secret.end());
  std::vector<TokenId> shuffle;
  StepKeyMaterial out;
  fill_material(keyed, layer, context, shuffle, out);
  return out;
}

KeyDeriver::KeyDeriver(const WatermarkConfig& cfg) : cfg_(validate_config(cfg)) {}

const StepKeyMaterial& KeyDeriver::material(std::size_t layer,
                                            std::span<const TokenId> context) {
  fill_material(cfg_, layer, context, shuffle_, material_);
  return material_;
}

StepProbe KeyDeriver::probe(std::size_t layer, std::span<const TokenId> context,
                            TokenId token) const {
  if (token >= cfg_.vocab_size) {
    throw Error(ErrorKind::kTokenOutOfRange,
                "token " + std::to_string(token) + " outside vocabulary of " +
                    std::to_string(cfg_.vocab_size));
  }
  Keystream ks(derive_digest(cfg_.secret_key, layer, context, cfg_.context_window));
  StepProbe out;
  draw_header(ks, cfg_, out.segment_index, out.mask);

  // Follow the token's slot through the same swaps.
  std::size_t pos = token;
  for (std::size_t i = cfg_.vocab_size - 1; i >= 1; --i) {
    const auto j = static_cast<std::size_t>(ks.uniform(i + 1));
    if (pos == i) {
      pos = j;
    } else if (pos == j) {
      pos = i;
    }
  }
  out.subset = SliceLayout(cfg_.vocab_size, cfg_.segment_bits).slice_of(pos);
  return out;
}

}  // namespace mc2mark
