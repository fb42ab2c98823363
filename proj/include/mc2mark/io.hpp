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

#ifndef MC2MARK_IO_HPP_
#define MC2MARK_IO_HPP_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mc2mark/types.hpp"

namespace mc2mark {

// Config JSON uses the WatermarkConfig field names; secret_key is hex.
// num_segments, num_layers, context_window and sampling_seed are optional.
// Unknown keys are rejected.
nlohmann::json config_to_json(const WatermarkConfig& cfg);
WatermarkConfig config_from_json(const nlohmann::json& j);
WatermarkConfig load_config(const std::filesystem::path& path);

// First 16 hex digits of SHA-256 over the canonical (sorted-key) config JSON.
std::string config_hash(const WatermarkConfig& cfg);

// Accepts a JSON integer array or whitespace-separated ids.
std::vector<TokenId> parse_tokens(std::string_view text);
std::vector<TokenId> read_tokens(const std::filesystem::path& path);
// Space-separated ids followed by one newline.
std::string format_tokens(std::span<const TokenId> tokens);
void write_text_file(const std::filesystem::path& path, std::string_view text);

// {"bits_hex", "margins", "evidence_count"}
nlohmann::json decoded_to_json(const DecodedMessage& decoded);

// Known-answer vectors for the key-derivation wire format.
struct KeyVectorCase {
  Bytes secret;
  std::size_t layer = 1;
  std::vector<TokenId> context;
  std::size_t context_window = 2;
  std::size_t vocab_size = 16;
  std::size_t segment_bits = 8;
  std::size_t num_segments = 2;
};

std::vector<KeyVectorCase> default_key_vector_cases();
nlohmann::json key_vector_json(const KeyVectorCase& c);
// {"format": "mc2mark-keyderive-v1", "vectors": [...]}
nlohmann::json key_vectors_document(const std::vector<KeyVectorCase>& cases);

}  // namespace mc2mark

#endif  // MC2MARK_IO_HPP_
