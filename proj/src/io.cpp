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

#include "mc2mark/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "mc2mark/keyderive.hpp"

namespace mc2mark {

using nlohmann::json;

json config_to_json(const WatermarkConfig& cfg) {
  return json{
      {"secret_key", hex_from_bytes(cfg.secret_key)},
      {"vocab_size", cfg.vocab_size},
      {"message_bits", cfg.message_bits},
      {"segment_bits", cfg.segment_bits},
      {"num_segments", cfg.num_segments},
      {"num_layers", cfg.num_layers},
      {"context_window", cfg.context_window},
      {"sampling_seed", cfg.sampling_seed},
  };
}

namespace {

std::uint64_t get_uint(const json& j, const char* key) {
  const auto& v = j.at(key);
  // Values built in code arrive as signed integers; parsed text as unsigned.
  const bool ok = v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
  if (!ok) {
    throw Error(ErrorKind::kConfigParse, std::string(key) + " must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

}  // namespace

WatermarkConfig config_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::kConfigParse, "config must be a JSON object");
  static const std::set<std::string> kKnown = {
      "secret_key",  "vocab_size", "message_bits",   "segment_bits",
      "num_segments", "num_layers", "context_window", "sampling_seed"};
  for (const auto& [key, _] : j.items()) {
    if (!kKnown.count(key)) throw Error(ErrorKind::kConfigParse, "unknown config field " + key);
  }
  for (const char* key : {"secret_key", "vocab_size", "message_bits", "segment_bits"}) {
    if (!j.contains(key)) {
      throw Error(ErrorKind::kConfigParse, std::string("missing config field ") + key);
    }
  }
  if (!j.at("secret_key").is_string()) {
    throw Error(ErrorKind::kConfigParse, "secret_key must be a hex string");
  }
  WatermarkConfig cfg;
  cfg.secret_key = bytes_from_hex(j.at("secret_key").get<std::string>());
  cfg.vocab_size = get_uint(j, "vocab_size");
  cfg.message_bits = get_uint(j, "message_bits");
  cfg.segment_bits = get_uint(j, "segment_bits");
  cfg.num_segments = j.contains("num_segments")
                         ? get_uint(j, "num_segments")
                         : (cfg.segment_bits ? cfg.message_bits / cfg.segment_bits : 0);
  if (j.contains("num_layers")) cfg.num_layers = get_uint(j, "num_layers");
  if (j.contains("context_window")) cfg.context_window = get_uint(j, "context_window");
  if (j.contains("sampling_seed")) cfg.sampling_seed = get_uint(j, "sampling_seed");
  return validate_config(cfg);
}

WatermarkConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kConfigNotFound, "cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kConfigParse, path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

std::string config_hash(const WatermarkConfig& cfg) {
  const std::string canonical = config_to_json(cfg).dump();
  const Digest d = sha256(std::span(reinterpret_cast<const std::uint8_t*>(canonical.data()),
                                    canonical.size()));
  return hex_from_bytes(std::span(d).first(8));
}

std::vector<TokenId> parse_tokens(std::string_view text) {
  const auto start = text.find_first_not_of(" \t\r\n");
  std::vector<TokenId> out;
  if (start == std::string_view::npos) return out;
  if (text[start] == '[') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kConfigParse, std::string("token array: ") + e.what());
    }
    for (const auto& v : j) {
      if (!v.is_number_unsigned() || v.get<std::uint64_t>() >= kContextSentinel) {
        throw Error(ErrorKind::kConfigParse, "token array holds a non-id value");
      }
      out.push_back(v.get<TokenId>());
    }
    return out;
  }
  std::istringstream in{std::string(text)};
  std::string word;
  while (in >> word) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(word, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != word.size() || word.front() == '-' || v >= kContextSentinel) {
      throw Error(ErrorKind::kConfigParse, "bad token id '" + word + "'");
    }
    out.push_back(static_cast<TokenId>(v));
  }
  return out;
}

std::vector<TokenId> read_tokens(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_tokens(buf.str());
}

std::string format_tokens(std::span<const TokenId> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += std::to_string(tokens[i]);
  }
  out.push_back('\n');
  return out;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorKind::kIo, "short write to " + path.string());
}

json decoded_to_json(const DecodedMessage& decoded) {
  return json{
      {"bits_hex", message_to_hex(decoded.bits)},
      {"margins", decoded.margins},
      {"evidence_count", decoded.evidence_count},
  };
}

std::vector<KeyVectorCase> default_key_vector_cases() {
  const Bytes secret = bytes_from_hex("0123456789abcdef0123456789abcdef");
  auto make = [&](std::size_t layer, std::vector<TokenId> context, std::size_t w,
                  std::size_t vocab, std::size_t bits, std::size_t segments) {
    return KeyVectorCase{secret, layer, std::move(context), w, vocab, bits, segments};
  };
  return {
      make(1, {5, 7}, 2, 16, 8, 2),
      make(2, {5, 7}, 2, 16, 8, 2),
      make(1, {}, 2, 10, 4, 3),
      make(1, {9}, 2, 10, 4, 3),
      make(3, {1, 2, 3, 4}, 2, 12, 2, 1),
      make(1, {4, 4, 4}, 0, 8, 2, 4),
      make(10, {31999, 0, 17}, 3, 50, 8, 64),
  };
}

json key_vector_json(const KeyVectorCase& c) {
  WatermarkConfig cfg;
  cfg.secret_key = c.secret;
  cfg.vocab_size = c.vocab_size;
  cfg.segment_bits = c.segment_bits;
  cfg.num_segments = c.num_segments;
  cfg.message_bits = c.segment_bits * c.num_segments;
  cfg.context_window = c.context_window;
  validate_config(cfg);

  const Digest d = derive_digest(c.secret, c.layer, c.context, c.context_window);
  Keystream ks(d);
  json words = json::array();
  for (int i = 0; i < 5; ++i) words.push_back(std::to_string(ks.next_word()));
  const StepKeyMaterial m = derive_step_material(c.secret, c.layer, c.context, cfg);
  std::vector<int> partition(m.partition.begin(), m.partition.end());
  std::vector<int> mask(m.mask.begin(), m.mask.end());
  return json{
      {"secret_hex", hex_from_bytes(c.secret)},
      {"layer", c.layer},
      {"context", c.context},
      {"context_window", c.context_window},
      {"vocab_size", c.vocab_size},
      {"segment_bits", c.segment_bits},
      {"num_segments", c.num_segments},
      {"digest_hex", hex_from_bytes(d)},
      {"keystream_words", words},
      {"segment_index", m.segment_index},
      {"mask", mask},
      {"partition", partition},
  };
}

json key_vectors_document(const std::vector<KeyVectorCase>& cases) {
  json vectors = json::array();
  for (const auto& c : cases) vectors.push_back(key_vector_json(c));
  return json{{"format", "mc2mark-keyderive-v1"}, {"vectors", vectors}};
}

}  // namespace mc2mark
