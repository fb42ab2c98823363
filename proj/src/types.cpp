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

#include "mc2mark/types.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace mc2mark {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDivisibility: return "DivisibilityError";
    case ErrorKind::kRange: return "RangeError";
    case ErrorKind::kKeyTooShort: return "KeyTooShort";
    case ErrorKind::kLengthMismatch: return "LengthMismatch";
    case ErrorKind::kInvalidHexDigit: return "InvalidHexDigit";
    case ErrorKind::kInvalidDistribution: return "InvalidDistribution";
    case ErrorKind::kDegenerateWeight: return "DegenerateWeight";
    case ErrorKind::kTokenOutOfRange: return "TokenOutOfRange";
    case ErrorKind::kProviderFailure: return "ProviderFailure";
    case ErrorKind::kEmptyCorpus: return "EmptyCorpus";
    case ErrorKind::kConfigNotFound: return "ConfigNotFound";
    case ErrorKind::kConfigParse: return "ConfigParse";
    case ErrorKind::kIo: return "IoError";
  }
  return "Unknown";
}

WatermarkConfig validate_config(const WatermarkConfig& cfg) {
  if (cfg.secret_key.size() < kMinSecretBytes) {
    throw Error(ErrorKind::kKeyTooShort,
                "secret_key has " + std::to_string(cfg.secret_key.size()) +
                    " bytes, need at least " + std::to_string(kMinSecretBytes));
  }
  if (cfg.vocab_size < 2) {
    throw Error(ErrorKind::kRange, "vocab_size must be >= 2");
  }
  // Sentinel 0xFFFFFFFF pads the key context and must never be a real id.
  if (cfg.vocab_size > std::numeric_limits<TokenId>::max()) {
    throw Error(ErrorKind::kRange, "vocab_size exceeds 32-bit token ids");
  }
  if (cfg.message_bits == 0 || cfg.segment_bits == 0) {
    throw Error(ErrorKind::kRange, "message_bits and segment_bits must be positive");
  }
  if (cfg.message_bits % cfg.segment_bits != 0) {
    throw Error(ErrorKind::kDivisibility,
                "message_bits " + std::to_string(cfg.message_bits) +
                    " is not divisible by segment_bits " +
                    std::to_string(cfg.segment_bits));
  }
  if (cfg.num_segments != cfg.message_bits / cfg.segment_bits) {
    throw Error(ErrorKind::kDivisibility,
                "num_segments must equal message_bits / segment_bits");
  }
  if (cfg.segment_bits > cfg.vocab_size) {
    throw Error(ErrorKind::kRange, "segment_bits exceeds vocab_size");
  }
  if (cfg.segment_bits > kMaxSegmentBits) {
    throw Error(ErrorKind::kRange,
                "segment_bits above " + std::to_string(kMaxSegmentBits) +
                    " is not enumerable");
  }
  if (cfg.num_layers < 1) {
    throw Error(ErrorKind::kRange, "num_layers must be >= 1");
  }
  return cfg;
}

WatermarkConfig make_config(Bytes secret_key, std::size_t vocab_size,
                            std::size_t message_bits, std::size_t segment_bits,
                            std::size_t num_layers, std::size_t context_window,
                            std::uint64_t sampling_seed) {
  WatermarkConfig cfg;
  cfg.secret_key = std::move(secret_key);
  cfg.vocab_size = vocab_size;
  cfg.message_bits = message_bits;
  cfg.segment_bits = segment_bits;
  cfg.num_segments = segment_bits == 0 ? 0 : message_bits / segment_bits;
  cfg.num_layers = num_layers;
  cfg.context_window = context_window;
  cfg.sampling_seed = sampling_seed;
  return validate_config(cfg);
}

Message::Message(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto& b : bits_) {
    if (b > 1) throw Error(ErrorKind::kRange, "message bits must be 0 or 1");
  }
}

std::span<const std::uint8_t> Message::segment(std::size_t index,
                                               std::size_t width) const {
  if ((index + 1) * width > bits_.size()) {
    throw Error(ErrorKind::kLengthMismatch, "segment outside message");
  }
  return std::span<const std::uint8_t>(bits_).subspan(index * width, width);
}

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Bytes bytes_from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) {
    throw Error(ErrorKind::kLengthMismatch, "hex string has odd length");
  }
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int hi = hex_value(hex[2 * i]);
    const int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) {
      throw Error(ErrorKind::kInvalidHexDigit,
                  "invalid hex digit near offset " + std::to_string(2 * i));
    }
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

std::string hex_from_bytes(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xF]);
  }
  return out;
}

Message message_from_hex(std::string_view hex, std::size_t n) {
  // Digits are checked before length so a bad digit is reported as such.
  for (char c : hex) {
    if (hex_value(c) < 0) {
      throw Error(ErrorKind::kInvalidHexDigit, std::string("invalid hex digit '") + c + "'");
    }
  }
  const std::size_t want = (n + 7) / 8;
  if (hex.size() != 2 * want) {
    throw Error(ErrorKind::kLengthMismatch,
                "message of " + std::to_string(n) + " bits needs " +
                    std::to_string(2 * want) + " hex digits, got " +
                    std::to_string(hex.size()));
  }
  const Bytes bytes = bytes_from_hex(hex);
  std::vector<std::uint8_t> bits(n);
  for (std::size_t i = 0; i < n; ++i) {
    bits[i] = (bytes[i / 8] >> (7 - i % 8)) & 1u;
  }
  return Message(std::move(bits));
}

std::string message_to_hex(const Message& message) {
  Bytes bytes((message.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < message.size(); ++i) {
    if (message[i]) bytes[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
  }
  return hex_from_bytes(bytes);
}

TokenDistribution::TokenDistribution(std::vector<double> probs) {
  if (probs.empty()) {
    throw Error(ErrorKind::kInvalidDistribution, "empty distribution");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = probs[i];
    if (!std::isfinite(p) || p < 0.0) {
      throw Error(ErrorKind::kInvalidDistribution,
                  "entry " + std::to_string(i) + " is negative or not finite");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kIngestTolerance) {
    throw Error(ErrorKind::kInvalidDistribution,
                "distribution sums to " + std::to_string(total));
  }
  for (auto& p : probs) p /= total;
  probs_ = std::move(probs);
}

TokenDistribution TokenDistribution::from_normalized(std::vector<double> probs) {
  TokenDistribution d;
  d.probs_ = std::move(probs);
  return d;
}

}  // namespace mc2mark
