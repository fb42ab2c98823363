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

#ifndef MC2MARK_TYPES_HPP_
#define MC2MARK_TYPES_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mc2mark {

using TokenId = std::uint32_t;
using Bytes = std::vector<std::uint8_t>;

enum class ErrorKind {
  kDivisibility,
  kRange,
  kKeyTooShort,
  kLengthMismatch,
  kInvalidHexDigit,
  kInvalidDistribution,
  kDegenerateWeight,
  kTokenOutOfRange,
  kProviderFailure,
  kEmptyCorpus,
  kConfigNotFound,
  kConfigParse,
  kIo,
};

// Stable machine-readable name, e.g. "DivisibilityError". Used in CLI and
// protocol error objects.
std::string_view error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(detail), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view kind_name() const { return error_kind_name(kind_); }

 private:
  ErrorKind kind_;
};

// All scheme parameters. num_segments is stored explicitly so that a config
// file that disagrees with message_bits / segment_bits is rejected instead of
// silently recomputed.
struct WatermarkConfig {
  Bytes secret_key;
  std::size_t vocab_size = 0;
  std::size_t message_bits = 16;
  std::size_t segment_bits = 8;
  std::size_t num_segments = 2;
  std::size_t num_layers = 10;
  std::size_t context_window = 2;
  std::uint64_t sampling_seed = 0;

  friend bool operator==(const WatermarkConfig&, const WatermarkConfig&) = default;
};

inline constexpr std::size_t kMinSecretBytes = 16;
inline constexpr std::size_t kMaxSegmentBits = 20;

// Returns cfg unchanged iff every invariant holds; throws Error otherwise.
WatermarkConfig validate_config(const WatermarkConfig& cfg);

// Builds a config with num_segments derived from n / n'. Still validated.
WatermarkConfig make_config(Bytes secret_key, std::size_t vocab_size,
                            std::size_t message_bits, std::size_t segment_bits,
                            std::size_t num_layers,
                            std::size_t context_window = 2,
                            std::uint64_t sampling_seed = 0);

class Message {
 public:
  Message() = default;
  explicit Message(std::vector<std::uint8_t> bits);

  std::size_t size() const noexcept { return bits_.size(); }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  // Bits [index * width, (index + 1) * width).
  std::span<const std::uint8_t> segment(std::size_t index, std::size_t width) const;

  friend bool operator==(const Message&, const Message&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

// Big-endian bit expansion of ceil(n / 8) bytes, truncated to n bits.
Message message_from_hex(std::string_view hex, std::size_t n);
// Inverse of message_from_hex; pads the trailing byte with zero bits.
std::string message_to_hex(const Message& message);

// Probability vector over the vocabulary.
class TokenDistribution {
 public:
  static constexpr double kIngestTolerance = 1e-6;

  TokenDistribution() = default;
  // Throws kInvalidDistribution on negative/non-finite entries or a sum more
  // than kIngestTolerance away from 1. Accepted input is renormalized.
  explicit TokenDistribution(std::vector<double> probs);

  // Skips the ingestion check. Caller guarantees a valid distribution.
  static TokenDistribution from_normalized(std::vector<double> probs);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const noexcept { return probs_; }

 private:
  std::vector<double> probs_;
};

struct DecodedMessage {
  Message bits;
  std::vector<double> margins;
  std::vector<std::uint64_t> evidence_count;
};

Bytes bytes_from_hex(std::string_view hex);
std::string hex_from_bytes(std::span<const std::uint8_t> bytes);

}  // namespace mc2mark

#endif  // MC2MARK_TYPES_HPP_
