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

// Synthetic next-token providers standing in for a real language model.

#ifndef MC2MARK_LM_SIM_HPP_
#define MC2MARK_LM_SIM_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <vector>

#include "mc2mark/generator.hpp"
#include "mc2mark/types.hpp"

namespace mc2mark {

// Each distinct trailing context of length context_order gets its own
// Dirichlet(concentration, ..., concentration) draw. Low concentration gives
// peaked, low-entropy steps; high concentration approaches uniform.
class DirichletLM final : public LanguageModel {
 public:
  DirichletLM(std::size_t vocab_size, double concentration, std::uint64_t seed,
              std::size_t context_order = 2);

  std::size_t vocab_size() const override { return vocab_size_; }
  TokenDistribution next(std::span<const TokenId> context) const override;

  double concentration() const noexcept { return concentration_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t context_order() const noexcept { return context_order_; }

 private:
  std::size_t vocab_size_;
  double concentration_;
  std::uint64_t seed_;
  std::size_t context_order_;
};

// Order-k Markov model with additive smoothing:
//   P(x | ctx) = (count(ctx, x) + delta) / (count(ctx) + delta * N).
// Contexts shorter than k are treated as unseen.
class NGramLM final : public LanguageModel {
 public:
  static NGramLM train(std::span<const TokenId> corpus, std::size_t order,
                       std::size_t vocab_size, double smoothing);

  std::size_t vocab_size() const override { return vocab_size_; }
  TokenDistribution next(std::span<const TokenId> context) const override;

  std::size_t order() const noexcept { return order_; }
  std::uint64_t count(std::span<const TokenId> context, TokenId next) const;
  std::uint64_t context_total(std::span<const TokenId> context) const;

 private:
  NGramLM(std::size_t order, std::size_t vocab_size, double smoothing)
      : order_(order), vocab_size_(vocab_size), smoothing_(smoothing) {}

  struct Row {
    std::map<TokenId, std::uint64_t> successors;
    std::uint64_t total = 0;
  };

  std::size_t order_;
  std::size_t vocab_size_;
  double smoothing_;
  std::map<std::vector<TokenId>, Row> rows_;
};

// Returns the same distribution for every context.
class FixedLM final : public LanguageModel {
 public:
  explicit FixedLM(TokenDistribution dist) : dist_(std::move(dist)) {}
  std::size_t vocab_size() const override { return dist_.size(); }
  TokenDistribution next(std::span<const TokenId>) const override { return dist_; }

 private:
  TokenDistribution dist_;
};

// Whitespace- or newline-separated integer ids.
std::vector<TokenId> read_corpus_ids(const std::filesystem::path& path);
// Byte-level tokenizer: each byte is one id, N = 256.
std::vector<TokenId> read_corpus_bytes(const std::filesystem::path& path);

inline constexpr std::size_t kByteVocabSize = 256;

// Shannon entropy in nats.
double entropy_nats(const TokenDistribution& dist);

}  // namespace mc2mark

#endif  // MC2MARK_LM_SIM_HPP_
