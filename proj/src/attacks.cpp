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

#include "mc2mark/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mc2mark/rng.hpp"

namespace mc2mark {

namespace {

void check_ratio(double ratio) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) {
    throw Error(ErrorKind::kRange, "attack ratio must lie in [0, 1]");
  }
}

// First k entries of a partial Fisher-Yates shuffle of [0, n).
std::vector<std::size_t> choose_positions(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

}  // namespace

std::size_t attack_count(double ratio, std::size_t length) {
  check_ratio(ratio);
  return static_cast<std::size_t>(std::llround(ratio * static_cast<double>(length)));
}

std::vector<TokenId> random_replace(std::span<const TokenId> tokens, double ratio,
                                    std::uint64_t seed, std::size_t vocab_size) {
  if (vocab_size < 2) throw Error(ErrorKind::kRange, "replacement needs vocab_size >= 2");
  const std::size_t k = attack_count(ratio, tokens.size());
  Rng rng(seed);
  std::vector<TokenId> out(tokens.begin(), tokens.end());
  for (std::size_t pos : choose_positions(rng, tokens.size(), k)) {
    auto draw = static_cast<TokenId>(rng.below(vocab_size - 1));
    if (draw >= out[pos]) ++draw;
    out[pos] = draw;
  }
  return out;
}

std::vector<TokenId> random_delete(std::span<const TokenId> tokens, double ratio,
                                   std::uint64_t seed) {
  const std::size_t k = attack_count(ratio, tokens.size());
  Rng rng(seed);
  std::vector<std::uint8_t> drop(tokens.size(), 0);
  for (std::size_t pos : choose_positions(rng, tokens.size(), k)) drop[pos] = 1;
  std::vector<TokenId> out;
  out.reserve(tokens.size() - k);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!drop[i]) out.push_back(tokens[i]);
  }
  return out;
}

std::vector<TokenId> random_insert(std::span<const TokenId> tokens, double ratio,
                                   std::uint64_t seed, std::size_t vocab_size) {
  if (vocab_size < 1) throw Error(ErrorKind::kRange, "insertion needs a vocabulary");
  const std::size_t k = attack_count(ratio, tokens.size());
  Rng rng(seed);
  std::vector<TokenId> out(tokens.begin(), tokens.end());
  for (std::size_t n = 0; n < k; ++n) {
    const auto slot = static_cast<std::ptrdiff_t>(rng.below(out.size() + 1));
    const auto id = static_cast<TokenId>(rng.below(vocab_size));
    out.insert(out.begin() + slot, id);
  }
  return out;
}

std::vector<TokenId> apply_attack(std::span<const TokenId> tokens, const AttackSpec& spec,
                                  std::uint64_t seed, std::size_t vocab_size) {
  switch (spec.kind) {
    case AttackKind::kNone: return {tokens.begin(), tokens.end()};
    case AttackKind::kReplace: return random_replace(tokens, spec.ratio, seed, vocab_size);
    case AttackKind::kDelete: return random_delete(tokens, spec.ratio, seed);
    case AttackKind::kInsert: return random_insert(tokens, spec.ratio, seed, vocab_size);
  }
  return {tokens.begin(), tokens.end()};
}

AttackSpec AttackSpec::parse(std::string_view text) {
  AttackSpec spec;
  if (text == "none" || text.empty()) return spec;
  const auto colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  if (name == "replace") {
    spec.kind = AttackKind::kReplace;
  } else if (name == "delete") {
    spec.kind = AttackKind::kDelete;
  } else if (name == "insert") {
    spec.kind = AttackKind::kInsert;
  } else {
    throw Error(ErrorKind::kConfigParse, "unknown attack '" + std::string(name) + "'");
  }
  if (colon == std::string_view::npos) {
    throw Error(ErrorKind::kConfigParse, "attack '" + std::string(text) + "' needs a ratio");
  }
  // from_chars for double is missing on older toolchains.
  std::istringstream in{std::string(text.substr(colon + 1))};
  if (!(in >> spec.ratio) || !in.eof()) {
    throw Error(ErrorKind::kConfigParse, "bad attack ratio in '" + std::string(text) + "'");
  }
  check_ratio(spec.ratio);
  return spec;
}

std::string AttackSpec::to_string() const {
  std::ostringstream out;
  switch (kind) {
    case AttackKind::kNone: return "none";
    case AttackKind::kReplace: out << "replace:"; break;
    case AttackKind::kDelete: out << "delete:"; break;
    case AttackKind::kInsert: out << "insert:"; break;
  }
  out << ratio;
  return out.str();
}

}  // namespace mc2mark
