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

// Token-level perturbations. All attacks touch exactly round(ratio * T)
// positions and are deterministic in their seed.

#ifndef MC2MARK_ATTACKS_HPP_
#define MC2MARK_ATTACKS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mc2mark/types.hpp"

namespace mc2mark {

enum class AttackKind { kNone, kReplace, kDelete, kInsert };

struct AttackSpec {
  AttackKind kind = AttackKind::kNone;
  double ratio = 0.0;

  // "none", "replace:0.1", "delete:0.5", "insert:0.2".
  static AttackSpec parse(std::string_view text);
  std::string to_string() const;
};

std::size_t attack_count(double ratio, std::size_t length);

// Each chosen position gets a uniform id from V minus its current id.
std::vector<TokenId> random_replace(std::span<const TokenId> tokens, double ratio,
                                    std::uint64_t seed, std::size_t vocab_size);
std::vector<TokenId> random_delete(std::span<const TokenId> tokens, double ratio,
                                   std::uint64_t seed);
// Inserts uniform ids one at a time, each at a uniform slot of the current
// sequence.
std::vector<TokenId> random_insert(std::span<const TokenId> tokens, double ratio,
                                   std::uint64_t seed, std::size_t vocab_size);

std::vector<TokenId> apply_attack(std::span<const TokenId> tokens, const AttackSpec& spec,
                                  std::uint64_t seed, std::size_t vocab_size);

}  // namespace mc2mark

#endif  // MC2MARK_ATTACKS_HPP_
