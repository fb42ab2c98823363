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
#include <cmath>
#include <cstdlib>
#include <memory>
#include <sstream>
#include <string>

#include "gtest/gtest.h"
#include "mc2mark/lm_sim.hpp"

namespace mc2mark {
namespace {

WatermarkConfig Base() { return make_config(Bytes(32, 0x11), 300, 16, 8, 10); }

LmFactory Dirichlet(double concentration) {
  return [concentration](std::uint64_t seed) {
    return std::make_unique<DirichletLM>(300, concentration, seed);
  };
}

BenchGrid SmallGrid() {
  BenchGrid g;
  g.message_bits = {8, 16};
  g.layers = {1, 4};
  g.attacks = {AttackSpec{}, AttackSpec::parse("replace:0.5")};
  g.runs = 3;
  g.tokens = 64;
  g.seed_base = 5;
  g.threads = 1;
  return g;
}

TEST(RunSeedsTest, DistinctAndStable) {
  const RunSeeds a = RunSeeds::derive(0, 0);
  const RunSeeds b = RunSeeds::derive(0, 1);
  EXPECT_NE(a.run_seed, b.run_seed);
  EXPECT_NE(a.message_seed, a.sampling_seed);
  EXPECT_NE(a.lm_seed, a.key_seed);
  EXPECT_EQ(RunSeeds::derive(0, 1).key_seed, b.key_seed);
}

TEST(RunConfigTest, OverridesAndRekeys) {
  const RunSeeds s = RunSeeds::derive(3, 2);
  const WatermarkConfig cfg = run_config(Base(), 64, 2, s);
  EXPECT_EQ(cfg.message_bits, 64u);
  EXPECT_EQ(cfg.num_segments, 8u);
  EXPECT_EQ(cfg.num_layers, 2u);
  EXPECT_EQ(cfg.sampling_seed, s.sampling_seed);
  EXPECT_NE(cfg.secret_key, Base().secret_key);
  EXPECT_EQ(cfg.secret_key, run_config(Base(), 16, 10, s).secret_key);
  EXPECT_THROW(run_config(Base(), 12, 2, s), Error);
}

TEST(RandomMessageTest, Balanced) {
  const Message m = random_message(4096, 1);
  std::size_t ones = 0;
  for (std::size_t i = 0; i < m.size(); ++i) ones += m[i];
  EXPECT_NEAR(static_cast<double>(ones) / 4096.0, 0.5, 0.04);
  EXPECT_EQ(random_message(64, 9), random_message(64, 9));
}

TEST(RunBenchTest, GridShapeAndPairing) {
  const auto rows = run_bench(Base(), SmallGrid(), Dirichlet(0.3));
  ASSERT_EQ(rows.size(), 2u * 2u * 3u * 2u);
  for (std::size_t i = 0; i + 1 < rows.size(); i += 2) {
    EXPECT_EQ(rows[i].attack, "none");
    EXPECT_EQ(rows[i + 1].attack, "replace:0.5");
    EXPECT_EQ(rows[i].run, rows[i + 1].run);
    EXPECT_EQ(rows[i].message_hex, rows[i + 1].message_hex);
    EXPECT_EQ(rows[i].status, "ok");
  }
  // Same run index shares the message seed across m.
  EXPECT_EQ(rows[0].seeds.message_seed, rows[6].seeds.message_seed);
  EXPECT_EQ(rows[0].message_hex, rows[6].message_hex);
}

TEST(RunBenchTest, ThreadCountDoesNotChangeResults) {
  BenchGrid one = SmallGrid();
  BenchGrid four = SmallGrid();
  four.threads = 4;
  const auto a = run_bench(Base(), one, Dirichlet(0.3));
  const auto b = run_bench(Base(), four, Dirichlet(0.3));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].decoded_hex, b[i].decoded_hex);
    EXPECT_EQ(a[i].bit_accuracy, b[i].bit_accuracy);
  }
}

TEST(RunBenchTest, InvalidCellsBecomeErrorRows) {
  BenchGrid g = SmallGrid();
  g.message_bits = {12};
  g.runs = 2;
  const auto rows = run_bench(Base(), g, Dirichlet(0.3));
  ASSERT_EQ(rows.size(), 2u * 2u * 2u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.status.rfind("error: ", 0), 0u);
    EXPECT_TRUE(std::isnan(r.bit_accuracy));
  }
  const auto agg = aggregate(rows);
  ASSERT_EQ(agg.size(), 4u);
  EXPECT_EQ(agg[0].failures, 2u);
  EXPECT_EQ(agg[0].runs, 0u);
}

TEST(AggregateTest, MeanAndStderr) {
  std::vector<RunRecord> rows(3);
  const double acc[3] = {1.0, 0.5, 0.75};
  for (int i = 0; i < 3; ++i) {
    rows[i].message_bits = 16;
    rows[i].layers = 10;
    rows[i].attack = "none";
    rows[i].bit_accuracy = acc[i];
  }
  const auto agg = aggregate(rows);
  ASSERT_EQ(agg.size(), 1u);
  EXPECT_DOUBLE_EQ(agg[0].mean_accuracy, 0.75);
  EXPECT_NEAR(agg[0].stderr_accuracy, 0.25 / std::sqrt(3.0), 1e-12);
}

TEST(CsvTest, HeadersAndRowCounts) {
  BenchGrid g = SmallGrid();
  g.message_bits = {8};
  g.layers = {2};
  const auto rows = run_bench(Base(), g, Dirichlet(0.3));
  std::ostringstream runs, agg;
  write_runs_csv(runs, rows);
  write_aggregate_csv(agg, aggregate(rows));
  const std::string r = runs.str();
  const std::string a = agg.str();
  EXPECT_EQ(r.rfind("n,m,attack,run,run_seed,", 0), 0u);
  EXPECT_EQ(std::count(r.begin(), r.end(), '\n'), 1 + 6);
  EXPECT_EQ(a.rfind("n,m,attack,runs,failures,mean_accuracy,stderr_accuracy,", 0), 0u);
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 1 + 2);
  EXPECT_NE(a.find("8,2,replace:0.5,3,0,"), std::string::npos);
}

TEST(ResolveThreadsTest, ExplicitWins) {
  EXPECT_EQ(resolve_threads(3), 3u);
  setenv("WM_THREADS", "2", 1);
  EXPECT_EQ(resolve_threads(0), 2u);
  unsetenv("WM_THREADS");
  EXPECT_GE(resolve_threads(0), 1u);
}

}  // namespace
}  // namespace mc2mark
