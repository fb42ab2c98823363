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

// Private streaming SHA-256 over OpenSSL. The low-level interface is used
// because it is roughly 2x faster than EVP for the 40-byte keystream blocks.

#ifndef MC2MARK_SRC_SHA256_HPP_
#define MC2MARK_SRC_SHA256_HPP_

#define OPENSSL_SUPPRESS_DEPRECATED
#include <openssl/sha.h>

#include <array>
#include <cstdint>
#include <span>

namespace mc2mark::detail {

class Sha256 {
 public:
  Sha256() { SHA256_Init(&ctx_); }

  Sha256& update(std::span<const std::uint8_t> data) {
    SHA256_Update(&ctx_, data.data(), data.size());
    return *this;
  }
  Sha256& update_u8(std::uint8_t v) { return update(std::span(&v, 1)); }
  Sha256& update_le64(std::uint64_t v) {
    std::array<std::uint8_t, 8> b;
    for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
    return update(b);
  }
  Sha256& update_le32(std::uint32_t v) {
    std::array<std::uint8_t, 4> b;
    for (int i = 0; i < 4; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
    return update(b);
  }

  std::array<std::uint8_t, 32> finish() {
    std::array<std::uint8_t, 32> out;
    SHA256_Final(out.data(), &ctx_);
    return out;
  }

 private:
  SHA256_CTX ctx_;
};

inline std::uint64_t load_le64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

}  // namespace mc2mark::detail

#endif  // MC2MARK_SRC_SHA256_HPP_
