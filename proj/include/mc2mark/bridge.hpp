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

// Server side of the line-delimited JSON protocol used by external inference
// loops. One JSON object per line in each direction, strictly
// request/response.
//
//   -> {"hello":1}                                   <- {"hello":1}
//   -> {"op":"open","config":{...},"message_hex":"..."}
//                                                    <- {"session":1}
//   -> {"op":"reweight","session":1,"probs":[...],"context":[...]}
//                                                    <- {"probs":[...]}
//   -> {"op":"detect","session":1,"tokens":[...]}    <- {"bits_hex":..,"margins":..,"evidence_count":..}
//   -> {"op":"close","session":1}                    <- {"closed":1}
//
// Failures answer {"error":{"kind":K,"detail":D}} and keep the server alive,
// except a bad handshake, which ends it. K is "Parse", "NoSession",
// "BadRequest", "Handshake" or a core error name such as
// "InvalidDistribution".

#ifndef MC2MARK_BRIDGE_HPP_
#define MC2MARK_BRIDGE_HPP_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "mc2mark/generator.hpp"

namespace mc2mark {

inline constexpr int kBridgeProtocolVersion = 1;

class BridgeServer {
 public:
  // Returns the response line (without newline).
  std::string handle_line(std::string_view line);
  bool finished() const noexcept { return finished_; }

 private:
  struct Session {
    WatermarkConfig config;
    Message message;
    std::unique_ptr<Watermarker> marker;
  };

  nlohmann::json dispatch(const nlohmann::json& request);
  Session& session_for(const nlohmann::json& request);

  bool greeted_ = false;
  bool finished_ = false;
  std::int64_t next_session_ = 1;
  std::map<std::int64_t, Session> sessions_;
};

// Serves until EOF or a failed handshake.
void run_bridge(std::istream& in, std::ostream& out);

}  // namespace mc2mark

#endif  // MC2MARK_BRIDGE_HPP_
