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

#include "mc2mark/types.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "gtest/gtest.h"

namespace mc2mark {
namespace {

Bytes Secret() { return Bytes(16, 0xab); }

ErrorKind KindOf(const WatermarkConfig& cfg) {
  try {
    validate_config(cfg);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "config was accepted";
  return ErrorKind::kIo;
}

WatermarkConfig Base() {
  WatermarkConfig cfg;
  cfg.secret_key = Secret();
  cfg.vocab_size = 100;
  cfg.message_bits = 16;
  cfg.segment_bits = 8;
  cfg.num_segments = 2;
  cfg.num_layers = 10;
  return cfg;
}

TEST(ValidateConfigTest, AcceptsDefaults) {
  EXPECT_EQ(validate_config(Base()), Base());
}

TEST(ValidateConfigTest, AcceptsLongMessage) {
  WatermarkConfig cfg = Base();
  cfg.vocab_size = 32000;
  cfg.message_bits = 512;
  cfg.num_segments = 64;
  EXPECT_NO_THROW(validate_config(cfg));
}

TEST(ValidateConfigTest, RejectsIndivisibleSegments) {
  WatermarkConfig cfg = Base();
  cfg.segment_bits = 5;
  cfg.num_segments = 3;
  EXPECT_EQ(KindOf(cfg), ErrorKind::kDivisibility);
  EXPECT_THROW(make_config(Secret(), 100, 16, 5, 10), Error);
}

TEST(ValidateConfigTest, RejectsInconsistentSegmentCount) {
  WatermarkConfig cfg = Base();
  cfg.num_segments = 3;
  EXPECT_EQ(KindOf(cfg), ErrorKind::kDivisibility);
}

TEST(ValidateConfigTest, RejectsShortKey) {
  WatermarkConfig cfg = Base();
  cfg.secret_key = Bytes(15, 1);
  EXPECT_EQ(KindOf(cfg), ErrorKind::kKeyTooShort);
}

TEST(ValidateConfigTest, RangeChecks) {
  WatermarkConfig cfg = Base();
  cfg.num_layers = 0;
  EXPECT_EQ(KindOf(cfg), ErrorKind::kRange);

  cfg = Base();
  cfg.vocab_size = 1;
  EXPECT_EQ(KindOf(cfg), ErrorKind::kRange);

  cfg = Base();
  cfg.vocab_size = 4;  // fewer tokens than subsets
  EXPECT_EQ(KindOf(cfg), ErrorKind::kRange);

  cfg = Base();
  cfg.message_bits = 0;
  cfg.num_segments = 0;
  EXPECT_EQ(KindOf(cfg), ErrorKind::kRange);

  cfg = Base();
  cfg.vocab_size = 1u << 22;
  cfg.segment_bits = 21;
  cfg.message_bits = 21;
  cfg.num_segments = 1;
  EXPECT_EQ(KindOf(cfg), ErrorKind::kRange);
}

TEST(ValidateConfigTest, ErrorNamesAreStable) {
  EXPECT_EQ(error_kind_name(ErrorKind::kDivisibility), "DivisibilityError");
  EXPECT_EQ(error_kind_name(ErrorKind::kRange), "RangeError");
  EXPECT_EQ(error_kind_name(ErrorKind::kConfigNotFound), "ConfigNotFound");
}

TEST(MessageHexTest, Examples) {
  EXPECT_EQ(message_from_hex("ff", 8), Message({1, 1, 1, 1, 1, 1, 1, 1}));
  EXPECT_EQ(message_from_hex("80", 8), Message({1, 0, 0, 0, 0, 0, 0, 0}));
  EXPECT_EQ(message_from_hex("a5", 4), Message({1, 0, 1, 0}));
  EXPECT_EQ(message_from_hex("A5", 8), message_from_hex("a5", 8));
}

TEST(MessageHexTest, RoundTrip) {
  const Message m = message_from_hex("c0ffee01", 32);
  EXPECT_EQ(message_to_hex(m), "c0ffee01");
  EXPECT_EQ(message_to_hex(Message({1, 0, 1})), "a0");
}

TEST(MessageHexTest, Rejections) {
  try {
    message_from_hex("zz", 8);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidHexDigit);
  }
  try {
    message_from_hex("ff", 16);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kLengthMismatch);
  }
}

TEST(MessageTest, Segment) {
  const Message m({1, 1, 0, 0, 1, 0});
  const auto seg = m.segment(1, 2);
  ASSERT_EQ(seg.size(), 2u);
  EXPECT_EQ(seg[0], 0);
  EXPECT_EQ(seg[1], 0);
}

TEST(TokenDistributionTest, Validation) {
  EXPECT_NO_THROW(TokenDistribution({0.25, 0.75}));
  EXPECT_THROW(TokenDistribution({0.5, 0.6}), Error);
  EXPECT_THROW(TokenDistribution({-0.1, 1.1}), Error);
  EXPECT_THROW(TokenDistribution({std::numeric_limits<double>::quiet_NaN(), 1.0}), Error);
  EXPECT_THROW(TokenDistribution(std::vector<double>{}), Error);

  const TokenDistribution d({0.5 + 4e-7, 0.5});
  EXPECT_NEAR(d[0] + d[1], 1.0, 1e-15);
}

TEST(HexBytesTest, RoundTrip) {
  const Bytes b = bytes_from_hex("00ff10");
  EXPECT_EQ(b, (Bytes{0x00, 0xff, 0x10}));
  EXPECT_EQ(hex_from_bytes(b), "00ff10");
  EXPECT_THROW(bytes_from_hex("abc"), Error);
}

}  // namespace
}  // namespace mc2mark
