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

// mc2mark command-line front end.
//
// Exit codes: 0 ok, 1 decoded message differs from --expect, 2 usage or
// configuration error. Errors are reported on stderr as
// {"error":{"kind":...,"detail":...}}.

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mc2mark/attacks.hpp"
#include "mc2mark/bench.hpp"
#include "mc2mark/bridge.hpp"
#include "mc2mark/detector.hpp"
#include "mc2mark/generator.hpp"
#include "mc2mark/io.hpp"
#include "mc2mark/lm_sim.hpp"

namespace {

using mc2mark::Error;
using mc2mark::ErrorKind;
using nlohmann::json;

constexpr int kExitMismatch = 1;
constexpr int kExitUsage = 2;

struct LmOptions {
  std::string spec = "dirichlet";
  std::uint64_t seed = 0;
  double concentration = 0.3;
  std::size_t context_order = 2;
  std::size_t ngram_order = 2;
  double smoothing = 0.1;
  bool text = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--lm", spec, "dirichlet | ngram:<corpus path>")->capture_default_str();
    cmd->add_option("--lm-seed", seed, "Seed of the synthetic LM")->capture_default_str();
    cmd->add_option("--concentration", concentration, "Dirichlet concentration")
        ->capture_default_str();
    cmd->add_option("--context-order", context_order, "Dirichlet LM context length")
        ->capture_default_str();
    cmd->add_option("--ngram-order", ngram_order, "n-gram context length")->capture_default_str();
    cmd->add_option("--smoothing", smoothing, "n-gram additive smoothing")->capture_default_str();
    cmd->add_flag("--text", text, "Read the n-gram corpus as bytes (vocab 256)");
  }

  json describe() const {
    return json{{"spec", spec},           {"seed", seed},
                {"concentration", concentration}, {"context_order", context_order},
                {"ngram_order", ngram_order},     {"smoothing", smoothing},
                {"text", text}};
  }

  // Factory keyed by LM seed, so bench runs can vary it per run.
  mc2mark::LmFactory factory(std::size_t vocab_size) const {
    if (spec == "dirichlet") {
      const double conc = concentration;
      const std::size_t order = context_order;
      return [=](std::uint64_t lm_seed) -> std::unique_ptr<mc2mark::LanguageModel> {
        return std::make_unique<mc2mark::DirichletLM>(vocab_size, conc, lm_seed, order);
      };
    }
    if (spec.rfind("ngram:", 0) == 0) {
      const std::string path = spec.substr(6);
      if (text && vocab_size != mc2mark::kByteVocabSize) {
        throw Error(ErrorKind::kRange, "--text needs vocab_size 256 in the config");
      }
      const auto corpus = text ? mc2mark::read_corpus_bytes(path) : mc2mark::read_corpus_ids(path);
      auto lm = std::make_shared<mc2mark::NGramLM>(
          mc2mark::NGramLM::train(corpus, ngram_order, vocab_size, smoothing));
      return [lm](std::uint64_t) -> std::unique_ptr<mc2mark::LanguageModel> {
        return std::make_unique<mc2mark::NGramLM>(*lm);
      };
    }
    throw Error(ErrorKind::kConfigParse, "unknown --lm '" + spec + "'");
  }
};

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int report_error(std::string_view kind, std::string_view detail) {
  std::cerr << json{{"error", {{"kind", kind}, {"detail", detail}}}}.dump() << '\n';
  return kExitUsage;
}

std::vector<std::size_t> parse_size_list(std::string text, const std::string& what) {
  if (const auto eq = text.find('='); eq != std::string::npos) text = text.substr(eq + 1);
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (item.empty() || used != item.size()) {
      throw Error(ErrorKind::kConfigParse, "bad " + what + " entry '" + item + "'");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw Error(ErrorKind::kConfigParse, what + " list is empty");
  return out;
}

// "replace:0.1,0.3,delete:0.1" -> replace 0.1, replace 0.3, delete 0.1. A bare
// ratio reuses the previous kind.
std::vector<mc2mark::AttackSpec> parse_attack_list(const std::string& text) {
  std::vector<mc2mark::AttackSpec> out;
  std::stringstream ss(text);
  std::string item;
  std::string kind;
  while (std::getline(ss, item, ',')) {
    if (item == "none") {
      out.push_back({});
      continue;
    }
    if (item.find(':') != std::string::npos) {
      kind = item.substr(0, item.find(':'));
    } else if (!kind.empty()) {
      item = kind + ":" + item;
    }
    out.push_back(mc2mark::AttackSpec::parse(item));
  }
  if (out.empty()) out.push_back({});
  return out;
}

int cmd_embed(const std::string& config_path, const std::string& message_hex,
              std::size_t num_tokens, const std::string& prompt_text, const LmOptions& lm_opts,
              const std::string& out_path) {
  const auto cfg = mc2mark::load_config(config_path);
  if (num_tokens == 0) throw Error(ErrorKind::kRange, "--tokens must be positive");
  const auto message = mc2mark::message_from_hex(message_hex, cfg.message_bits);
  const auto prompt = mc2mark::parse_tokens(prompt_text);
  for (auto id : prompt) {
    if (id >= cfg.vocab_size) throw Error(ErrorKind::kTokenOutOfRange, "prompt id outside vocabulary");
  }
  const auto lm = lm_opts.factory(cfg.vocab_size)(lm_opts.seed);

  const std::string started = utc_now();
  const auto tokens = mc2mark::generate(*lm, prompt, message, num_tokens, cfg);
  mc2mark::write_text_file(out_path, mc2mark::format_tokens(tokens));

  const json sidecar{
      {"config_hash", mc2mark::config_hash(cfg)},
      {"message_hex", mc2mark::message_to_hex(message)},
      {"tokens", num_tokens},
      {"prompt", prompt},
      {"seeds", {{"sampling_seed", cfg.sampling_seed}, {"lm_seed", lm_opts.seed}}},
      {"lm", lm_opts.describe()},
      {"timestamps", {{"started", started}, {"finished", utc_now()}}},
  };
  mc2mark::write_text_file(out_path + ".json", sidecar.dump(2) + "\n");
  return 0;
}

int cmd_detect(const std::string& config_path, const std::string& in_path,
               const std::string& expect_hex) {
  const auto cfg = mc2mark::load_config(config_path);
  const auto tokens = mc2mark::read_tokens(in_path);
  const auto decoded = mc2mark::detect(tokens, cfg);
  std::cout << mc2mark::decoded_to_json(decoded).dump() << '\n';
  if (!expect_hex.empty()) {
    const auto expected = mc2mark::message_from_hex(expect_hex, cfg.message_bits);
    if (!(expected == decoded.bits)) return kExitMismatch;
  }
  return 0;
}

int cmd_attack(const std::string& in_path, const std::string& out_path, const std::string& attack,
               std::uint64_t seed, std::size_t vocab_size, const std::string& config_path) {
  if (!config_path.empty()) vocab_size = mc2mark::load_config(config_path).vocab_size;
  if (vocab_size < 2) throw Error(ErrorKind::kRange, "attack needs --vocab >= 2 or --config");
  const auto spec = mc2mark::AttackSpec::parse(attack);
  const auto tokens = mc2mark::read_tokens(in_path);
  const auto attacked = mc2mark::apply_attack(tokens, spec, seed, vocab_size);
  mc2mark::write_text_file(out_path, mc2mark::format_tokens(attacked));
  return 0;
}

int cmd_bench(const std::string& config_path, const std::string& grid_text,
              const std::string& layers_text, const std::string& attack_text,
              std::size_t runs, std::size_t num_tokens, std::uint64_t seed_base,
              const LmOptions& lm_opts, const std::string& out_path,
              const std::string& aggregate_path) {
  const auto cfg = mc2mark::load_config(config_path);
  if (num_tokens == 0) throw Error(ErrorKind::kRange, "--tokens must be positive");
  if (runs == 0) throw Error(ErrorKind::kRange, "--runs must be positive");
  mc2mark::BenchGrid grid;
  grid.message_bits = parse_size_list(grid_text, "grid");
  grid.layers = parse_size_list(layers_text, "layers");
  grid.attacks = parse_attack_list(attack_text);
  grid.runs = runs;
  grid.tokens = num_tokens;
  grid.seed_base = seed_base;
  for (std::size_t n : grid.message_bits) {
    auto probe = cfg;
    probe.message_bits = n;
    probe.num_segments = probe.segment_bits ? n / probe.segment_bits : 0;
    mc2mark::validate_config(probe);
  }

  const auto rows = mc2mark::run_bench(cfg, grid, lm_opts.factory(cfg.vocab_size));
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + out_path);
    mc2mark::write_runs_csv(out, rows);
  }
  const auto table = mc2mark::aggregate(rows);
  if (!aggregate_path.empty()) {
    std::ofstream out(aggregate_path);
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + aggregate_path);
    mc2mark::write_aggregate_csv(out, table);
  } else {
    mc2mark::write_aggregate_csv(std::cout, table);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-bit distortion-free watermarking for token sequences"};
  app.require_subcommand(1);

  std::string config_path;
  std::string message_hex;
  std::size_t num_tokens = 512;
  std::string prompt_text;
  std::string out_path;
  LmOptions lm_opts;

  auto* embed = app.add_subcommand("embed", "Generate watermarked tokens from a synthetic LM");
  embed->add_option("config", config_path, "Config JSON")->required();
  embed->add_option("--message", message_hex, "Message as hex")->required();
  embed->add_option("--tokens", num_tokens, "Tokens to generate")->capture_default_str();
  embed->add_option("--prompt", prompt_text, "Prompt ids (not keyed, seen by the LM)");
  embed->add_option("--out", out_path, "Token file; sidecar goes to <out>.json")->required();
  lm_opts.add_to(embed);

  std::string in_path;
  std::string expect_hex;
  auto* detect = app.add_subcommand("detect", "Recover the message from a token file");
  detect->add_option("config", config_path, "Config JSON")->required();
  detect->add_option("--in", in_path, "Token file (JSON array or whitespace ids)")->required();
  detect->add_option("--expect", expect_hex, "Exit 1 unless the decoded message equals this");

  std::string attack_text = "replace:0.1";
  std::uint64_t attack_seed = 0;
  std::size_t vocab_size = 0;
  auto* attack = app.add_subcommand("attack", "Perturb a token file");
  attack->add_option("--in", in_path, "Input token file")->required();
  attack->add_option("--out", out_path, "Output token file")->required();
  attack->add_option("--attack", attack_text, "replace:R | delete:R | insert:R")
      ->capture_default_str();
  attack->add_option("--seed", attack_seed, "Attack seed")->capture_default_str();
  attack->add_option("--vocab", vocab_size, "Vocabulary size");
  attack->add_option("--config", config_path, "Take the vocabulary size from a config");

  std::string grid_text = "n=16";
  std::string layers_text = "10";
  std::string bench_attacks = "none";
  std::size_t runs = 5;
  std::uint64_t seed_base = 0;
  std::string aggregate_path;
  auto* bench = app.add_subcommand("bench", "Accuracy sweep over n, m and attacks");
  bench->add_option("config", config_path, "Base config JSON")->required();
  bench->add_option("--grid", grid_text, "Message lengths, e.g. n=16,32,64")->capture_default_str();
  bench->add_option("--layers", layers_text, "Layer counts, e.g. 1,2,5,10")->capture_default_str();
  bench->add_option("--attack", bench_attacks, "e.g. none,replace:0.1,0.3")->capture_default_str();
  bench->add_option("--runs", runs, "Runs per cell")->capture_default_str();
  bench->add_option("--tokens", num_tokens, "Tokens per run")->capture_default_str();
  bench->add_option("--seed-base", seed_base, "Base of per-run seeds")->capture_default_str();
  bench->add_option("--out", out_path, "Per-run CSV");
  bench->add_option("--aggregate", aggregate_path, "Aggregate CSV (default: stdout)");
  lm_opts.add_to(bench);

  auto* vectors = app.add_subcommand("vectors", "Print key-derivation known-answer vectors");
  auto* serve = app.add_subcommand("serve", "Serve the line-delimited JSON bridge on stdio");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("Usage", e.what());
  }

  try {
    if (*embed) return cmd_embed(config_path, message_hex, num_tokens, prompt_text, lm_opts, out_path);
    if (*detect) return cmd_detect(config_path, in_path, expect_hex);
    if (*attack) {
      return cmd_attack(in_path, out_path, attack_text, attack_seed, vocab_size, config_path);
    }
    if (*bench) {
      return cmd_bench(config_path, grid_text, layers_text, bench_attacks, runs, num_tokens,
                       seed_base, lm_opts, out_path, aggregate_path);
    }
    if (*vectors) {
      std::cout << mc2mark::key_vectors_document(mc2mark::default_key_vector_cases()).dump(1)
                << '\n';
      return 0;
    }
    if (*serve) {
      mc2mark::run_bridge(std::cin, std::cout);
      return 0;
    }
  } catch (const Error& e) {
    return report_error(e.kind_name(), e.what());
  } catch (const std::exception& e) {
    return report_error("Internal", e.what());
  }
  return 0;
}
