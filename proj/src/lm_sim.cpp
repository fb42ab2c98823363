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

#include "mc2mark/lm_sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include <boost/random/gamma_distribution.hpp>

#include "mc2mark/io.hpp"
#include "mc2mark/keyderive.hpp"
#include "mc2mark/rng.hpp"
#include "sha256.hpp"

namespace mc2mark {

DirichletLM::DirichletLM(std::size_t vocab_size, double concentration, std::uint64_t seed,
                         std::size_t context_order)
    : vocab_size_(vocab_size),
      concentration_(concentration),
      seed_(seed),
      context_order_(context_order) {
  if (vocab_size < 2) throw Error(ErrorKind::kRange, "vocab_size must be >= 2");
  if (!(concentration > 0.0) || !std::isfinite(concentration)) {
    throw Error(ErrorKind::kRange, "concentration must be positive");
  }
}

TokenDistribution DirichletLM::next(std::span<const TokenId> context) const {
  const std::size_t available = std::min(context_order_, context.size());
  detail::Sha256 h;
  static constexpr std::string_view kTag = "mc2mark-dirichlet-lm";
  h.update(std::span(reinterpret_cast<const std::uint8_t*>(kTag.data()), kTag.size()));
  h.update_le64(seed_).update_le64(context_order_);
  for (std::size_t i = available; i < context_order_; ++i) h.update_le32(kContextSentinel);
  for (TokenId id : context.last(available)) h.update_le32(id);
  const Digest d = h.finish();
  Rng rng(detail::load_le64(d.data()));

  // Sample log-gammas so small concentrations do not underflow:
  // G(a) = G(a + 1) * U^(1/a).
  boost::random::gamma_distribution<double> gamma(concentration_ + 1.0);
  std::vector<double> logs(vocab_size_);
  double peak = -std::numeric_limits<double>::infinity();
  for (auto& lg : logs) {
    const double g = gamma(rng.engine());
    lg = std::log(g) + std::log(rng.uniform_open_closed()) / concentration_;
    peak = std::max(peak, lg);
  }
  double total = 0.0;
  for (auto& lg : logs) {
    lg = std::exp(lg - peak);
    total += lg;
  }
  for (auto& p : logs) p /= total;
  return TokenDistribution::from_normalized(std::move(logs));
}

NGramLM NGramLM::train(std::span<const TokenId> corpus, std::size_t order,
                       std::size_t vocab_size, double smoothing) {
  if (corpus.empty()) throw Error(ErrorKind::kEmptyCorpus, "corpus is empty");
  if (!(smoothing > 0.0) || !std::isfinite(smoothing)) {
    throw Error(ErrorKind::kRange, "smoothing must be positive");
  }
  if (vocab_size < 2) throw Error(ErrorKind::kRange, "vocab_size must be >= 2");
  for (TokenId id : corpus) {
    if (id >= vocab_size) {
      throw Error(ErrorKind::kTokenOutOfRange,
                  "corpus id " + std::to_string(id) + " outside vocabulary");
    }
  }
  NGramLM lm(order, vocab_size, smoothing);
  for (std::size_t i = order; i < corpus.size(); ++i) {
    Row& row = lm.rows_[std::vector<TokenId>(corpus.begin() + (i - order), corpus.begin() + i)];
    ++row.successors[corpus[i]];
    ++row.total;
  }
  return lm;
}

std::uint64_t NGramLM::count(std::span<const TokenId> context, TokenId next) const {
  if (context.size() != order_) return 0;
  const auto row = rows_.find(std::vector<TokenId>(context.begin(), context.end()));
  if (row == rows_.end()) return 0;
  const auto it = row->second.successors.find(next);
  return it == row->second.successors.end() ? 0 : it->second;
}

std::uint64_t NGramLM::context_total(std::span<const TokenId> context) const {
  if (context.size() != order_) return 0;
  const auto row = rows_.find(std::vector<TokenId>(context.begin(), context.end()));
  return row == rows_.end() ? 0 : row->second.total;
}

TokenDistribution NGramLM::next(std::span<const TokenId> context) const {
  const double n = static_cast<double>(vocab_size_);
  const Row* row = nullptr;
  if (context.size() >= order_) {
    const auto tail = context.last(order_);
    const auto it = rows_.find(std::vector<TokenId>(tail.begin(), tail.end()));
    if (it != rows_.end()) row = &it->second;
  }
  const double total = row ? static_cast<double>(row->total) : 0.0;
  const double denom = total + smoothing_ * n;
  std::vector<double> probs(vocab_size_, smoothing_ / denom);
  if (row) {
    for (const auto& [id, c] : row->successors) {
      probs[id] = (static_cast<double>(c) + smoothing_) / denom;
    }
  }
  return TokenDistribution(std::move(probs));
}

std::vector<TokenId> read_corpus_ids(const std::filesystem::path& path) {
  return read_tokens(path);
}

std::vector<TokenId> read_corpus_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::vector<TokenId> ids;
  for (auto it = std::istreambuf_iterator<char>(in); it != std::istreambuf_iterator<char>(); ++it) {
    ids.push_back(static_cast<unsigned char>(*it));
  }
  return ids;
}

double entropy_nats(const TokenDistribution& dist) {
  double h = 0.0;
  for (double p : dist.probs()) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

}  // namespace mc2mark
