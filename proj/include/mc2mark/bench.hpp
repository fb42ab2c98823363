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

// Experiment sweeps: embed a random message, optionally attack the text,
// detect, and record per-bit accuracy. One job is one (n, m, run) triple;
// every attack in the grid is applied to the same generated text.

#ifndef MC2MARK_BENCH_HPP_
#define MC2MARK_BENCH_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "mc2mark/attacks.hpp"
#include "mc2mark/generator.hpp"
#include "mc2mark/types.hpp"

namespace mc2mark {

// Builds the language model of one run from its derived LM seed.
using LmFactory = std::function<std::unique_ptr<LanguageModel>(std::uint64_t lm_seed)>;

struct BenchGrid {
  std::vector<std::size_t> message_bits = {16};
  std::vector<std::size_t> layers = {10};
  std::vector<AttackSpec> attacks = {AttackSpec{}};
  std::size_t runs = 1;
  std::size_t tokens = 512;
  std::uint64_t seed_base = 0;
  // 0 means: WM_THREADS if set, else hardware concurrency.
  std::size_t threads = 0;
};

// Seeds of one run; all derive from (seed_base, run) so rows sharing a run
// index are paired across n, m and attack.
struct RunSeeds {
  std::uint64_t run_seed = 0;
  std::uint64_t message_seed = 0;
  std::uint64_t sampling_seed = 0;
  std::uint64_t lm_seed = 0;
  std::uint64_t attack_seed = 0;
  std::uint64_t key_seed = 0;

  static RunSeeds derive(std::uint64_t seed_base, std::size_t run);
};

struct RunRecord {
  std::size_t message_bits = 0;
  std::size_t layers = 0;
  std::string attack;
  std::size_t run = 0;
  RunSeeds seeds;
  std::string config_hash;
  std::string message_hex;
  std::string decoded_hex;
  std::size_t tokens_detected = 0;
  double bit_accuracy = 0.0;
  double margin_mean = 0.0;
  double margin_min_abs = 0.0;
  double us_per_token = 0.0;
  std::string status = "ok";
};

struct AggregateRow {
  std::size_t message_bits = 0;
  std::size_t layers = 0;
  std::string attack;
  std::size_t runs = 0;
  std::size_t failures = 0;
  double mean_accuracy = 0.0;
  double stderr_accuracy = 0.0;
  double mean_us_per_token = 0.0;
};

// Effective config of one run: base config with n, m, a per-run secret and
// the run's sampling seed.
WatermarkConfig run_config(const WatermarkConfig& base, std::size_t message_bits,
                           std::size_t layers, const RunSeeds& seeds);
Message random_message(std::size_t bits, std::uint64_t seed);

// Rows come back sorted by (n, m, run, attack order).
std::vector<RunRecord> run_bench(const WatermarkConfig& base, const BenchGrid& grid,
                                 const LmFactory& lm_factory);

std::vector<AggregateRow> aggregate(const std::vector<RunRecord>& rows);

void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& rows);
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows);

// Worker count: explicit request, else WM_THREADS, else hardware concurrency.
std::size_t resolve_threads(std::size_t requested);

}  // namespace mc2mark

#endif  // MC2MARK_BENCH_HPP_
