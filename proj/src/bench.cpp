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

#include "mc2mark/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>
#include <tuple>

#include "mc2mark/detector.hpp"
#include "mc2mark/io.hpp"
#include "mc2mark/keyderive.hpp"
#include "mc2mark/rng.hpp"

namespace mc2mark {

RunSeeds RunSeeds::derive(std::uint64_t seed_base, std::size_t run) {
  RunSeeds s;
  s.run_seed = mix_seed(seed_base, run);
  s.message_seed = mix_seed(s.run_seed, 1);
  s.sampling_seed = mix_seed(s.run_seed, 2);
  s.lm_seed = mix_seed(s.run_seed, 3);
  s.attack_seed = mix_seed(s.run_seed, 4);
  s.key_seed = mix_seed(s.run_seed, 5);
  return s;
}

WatermarkConfig run_config(const WatermarkConfig& base, std::size_t message_bits,
                           std::size_t layers, const RunSeeds& seeds) {
  WatermarkConfig cfg = base;
  cfg.message_bits = message_bits;
  cfg.num_segments = cfg.segment_bits ? message_bits / cfg.segment_bits : 0;
  cfg.num_layers = layers;
  cfg.sampling_seed = seeds.sampling_seed;
  Bytes material = base.secret_key;
  for (int i = 0; i < 8; ++i) material.push_back(static_cast<std::uint8_t>(seeds.key_seed >> (8 * i)));
  const Digest d = sha256(material);
  cfg.secret_key.assign(d.begin(), d.end());
  return validate_config(cfg);
}

Message random_message(std::size_t bits, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::uint8_t> out(bits);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng.next() >> 63);
  return Message(std::move(out));
}

std::size_t resolve_threads(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("WM_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

struct Job {
  std::size_t message_bits;
  std::size_t layers;
  std::size_t run;
};

std::vector<RunRecord> run_job(const WatermarkConfig& base, const BenchGrid& grid,
                               const LmFactory& lm_factory, const Job& job) {
  const RunSeeds seeds = RunSeeds::derive(grid.seed_base, job.run);
  auto make_record = [&](const AttackSpec& attack) {
    RunRecord r;
    r.message_bits = job.message_bits;
    r.layers = job.layers;
    r.attack = attack.to_string();
    r.run = job.run;
    r.seeds = seeds;
    return r;
  };

  std::vector<RunRecord> rows;
  try {
    const WatermarkConfig cfg = run_config(base, job.message_bits, job.layers, seeds);
    const Message message = random_message(job.message_bits, seeds.message_seed);
    const auto lm = lm_factory(seeds.lm_seed);

    const auto start = std::chrono::steady_clock::now();
    const auto tokens = generate(*lm, {}, message, grid.tokens, cfg);
    const double elapsed_us =
        std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - start).count();

    for (const AttackSpec& attack : grid.attacks) {
      RunRecord r = make_record(attack);
      r.config_hash = config_hash(cfg);
      r.message_hex = message_to_hex(message);
      r.us_per_token = grid.tokens ? elapsed_us / static_cast<double>(grid.tokens) : 0.0;
      try {
        const auto attacked = apply_attack(tokens, attack, seeds.attack_seed, cfg.vocab_size);
        const DecodedMessage decoded = detect(attacked, cfg);
        r.tokens_detected = attacked.size();
        r.decoded_hex = message_to_hex(decoded.bits);
        r.bit_accuracy = bit_accuracy(decoded.bits, message);
        double sum = 0.0;
        double min_abs = std::numeric_limits<double>::infinity();
        for (double m : decoded.margins) {
          sum += m;
          min_abs = std::min(min_abs, std::abs(m));
        }
        r.margin_mean = decoded.margins.empty() ? 0.0 : sum / static_cast<double>(decoded.margins.size());
        r.margin_min_abs = decoded.margins.empty() ? 0.0 : min_abs;
      } catch (const std::exception& e) {
        r.status = std::string("error: ") + e.what();
        r.bit_accuracy = std::numeric_limits<double>::quiet_NaN();
      }
      rows.push_back(std::move(r));
    }
  } catch (const std::exception& e) {
    rows.clear();
    for (const AttackSpec& attack : grid.attacks) {
      RunRecord r = make_record(attack);
      r.status = std::string("error: ") + e.what();
      r.bit_accuracy = std::numeric_limits<double>::quiet_NaN();
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

}  // namespace

std::vector<RunRecord> run_bench(const WatermarkConfig& base, const BenchGrid& grid,
                                 const LmFactory& lm_factory) {
  std::vector<Job> jobs;
  for (std::size_t n : grid.message_bits) {
    for (std::size_t m : grid.layers) {
      for (std::size_t run = 0; run < grid.runs; ++run) jobs.push_back({n, m, run});
    }
  }

  std::vector<RunRecord> collected;
  std::mutex collector;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      auto rows = run_job(base, grid, lm_factory, jobs[i]);
      const std::lock_guard<std::mutex> lock(collector);
      for (auto& r : rows) collected.push_back(std::move(r));
    }
  };

  const std::size_t workers = std::min(resolve_threads(grid.threads), std::max<std::size_t>(1, jobs.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  std::map<std::string, std::size_t> attack_order;
  for (std::size_t i = 0; i < grid.attacks.size(); ++i) {
    attack_order.emplace(grid.attacks[i].to_string(), i);
  }
  std::sort(collected.begin(), collected.end(), [&](const RunRecord& a, const RunRecord& b) {
    return std::tuple(a.message_bits, a.layers, a.run, attack_order[a.attack]) <
           std::tuple(b.message_bits, b.layers, b.run, attack_order[b.attack]);
  });
  return collected;
}

std::vector<AggregateRow> aggregate(const std::vector<RunRecord>& rows) {
  std::vector<AggregateRow> out;
  std::map<std::tuple<std::size_t, std::size_t, std::string>, std::vector<const RunRecord*>> groups;
  std::vector<std::tuple<std::size_t, std::size_t, std::string>> order;
  for (const auto& r : rows) {
    auto key = std::tuple(r.message_bits, r.layers, r.attack);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&r);
  }
  for (const auto& key : order) {
    const auto& members = groups[key];
    AggregateRow a;
    std::tie(a.message_bits, a.layers, a.attack) = key;
    std::vector<double> acc;
    double us = 0.0;
    for (const RunRecord* r : members) {
      if (r->status != "ok") {
        ++a.failures;
        continue;
      }
      acc.push_back(r->bit_accuracy);
      us += r->us_per_token;
    }
    a.runs = acc.size();
    if (!acc.empty()) {
      double sum = 0.0;
      for (double v : acc) sum += v;
      a.mean_accuracy = sum / static_cast<double>(acc.size());
      a.mean_us_per_token = us / static_cast<double>(acc.size());
      if (acc.size() > 1) {
        double ss = 0.0;
        for (double v : acc) ss += (v - a.mean_accuracy) * (v - a.mean_accuracy);
        const double var = ss / static_cast<double>(acc.size() - 1);
        a.stderr_accuracy = std::sqrt(var / static_cast<double>(acc.size()));
      }
    }
    out.push_back(std::move(a));
  }
  return out;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q.push_back('"');
    q.push_back(c);
  }
  q.push_back('"');
  return q;
}

}  // namespace

void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& rows) {
  out << "n,m,attack,run,run_seed,sampling_seed,lm_seed,attack_seed,key_seed,config_hash,"
         "message_hex,decoded_hex,tokens_detected,bit_accuracy,margin_mean,margin_min_abs,"
         "us_per_token,status\n";
  out << std::setprecision(6) << std::fixed;
  for (const auto& r : rows) {
    out << r.message_bits << ',' << r.layers << ',' << r.attack << ',' << r.run << ','
        << r.seeds.run_seed << ',' << r.seeds.sampling_seed << ',' << r.seeds.lm_seed << ','
        << r.seeds.attack_seed << ',' << r.seeds.key_seed << ',' << r.config_hash << ','
        << r.message_hex << ',' << r.decoded_hex << ',' << r.tokens_detected << ','
        << r.bit_accuracy << ',' << r.margin_mean << ',' << r.margin_min_abs << ','
        << std::setprecision(1) << r.us_per_token << std::setprecision(6) << ','
        << csv_field(r.status) << '\n';
  }
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << "n,m,attack,runs,failures,mean_accuracy,stderr_accuracy,mean_us_per_token\n";
  out << std::setprecision(6) << std::fixed;
  for (const auto& a : rows) {
    out << a.message_bits << ',' << a.layers << ',' << a.attack << ',' << a.runs << ','
        << a.failures << ',' << a.mean_accuracy << ',' << a.stderr_accuracy << ','
        << std::setprecision(1) << a.mean_us_per_token << std::setprecision(6) << '\n';
  }
}

}  // namespace mc2mark
