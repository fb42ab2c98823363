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

#include "mc2mark/bridge.hpp"

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "mc2mark/detector.hpp"
#include "mc2mark/io.hpp"

namespace mc2mark {

using nlohmann::json;

namespace {

// Protocol-level failure, distinct from core Error kinds.
struct ProtocolError {
  std::string kind;
  std::string detail;
};

json error_object(std::string_view kind, std::string_view detail) {
  return json{{"error", {{"kind", kind}, {"detail", detail}}}};
}

std::vector<TokenId> token_array(const json& request, const char* key) {
  if (!request.contains(key)) return {};
  const json& arr = request.at(key);
  if (!arr.is_array()) throw ProtocolError{"BadRequest", std::string(key) + " must be an array"};
  std::vector<TokenId> out;
  out.reserve(arr.size());
  for (const auto& v : arr) {
    if (!v.is_number_unsigned() || v.get<std::uint64_t>() >= kContextSentinel) {
      throw ProtocolError{"BadRequest", std::string(key) + " must hold token ids"};
    }
    out.push_back(v.get<TokenId>());
  }
  return out;
}

}  // namespace

BridgeServer::Session& BridgeServer::session_for(const json& request) {
  if (!request.contains("session") || !request.at("session").is_number_integer()) {
    throw ProtocolError{"NoSession", "request has no session id"};
  }
  const auto id = request.at("session").get<std::int64_t>();
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ProtocolError{"NoSession", "unknown session " + std::to_string(id)};
  return it->second;
}

json BridgeServer::dispatch(const json& request) {
  if (!request.is_object() || !request.contains("op") || !request.at("op").is_string()) {
    throw ProtocolError{"BadRequest", "request needs a string \"op\""};
  }
  const std::string op = request.at("op").get<std::string>();

  if (op == "open") {
    if (!request.contains("config") || !request.contains("message_hex") ||
        !request.at("message_hex").is_string()) {
      throw ProtocolError{"BadRequest", "open needs config and message_hex"};
    }
    Session s;
    s.config = config_from_json(request.at("config"));
    s.message = message_from_hex(request.at("message_hex").get<std::string>(), s.config.message_bits);
    s.marker = std::make_unique<Watermarker>(s.config, s.message);
    const std::int64_t id = next_session_++;
    sessions_.emplace(id, std::move(s));
    return json{{"session", id}};
  }
  if (op == "reweight") {
    Session& s = session_for(request);
    if (!request.contains("probs") || !request.at("probs").is_array()) {
      throw ProtocolError{"BadRequest", "reweight needs a probs array"};
    }
    std::vector<double> probs;
    for (const auto& v : request.at("probs")) {
      if (!v.is_number()) throw ProtocolError{"BadRequest", "probs must be numbers"};
      probs.push_back(v.get<double>());
    }
    const auto context = token_array(request, "context");
    const TokenDistribution out = s.marker->step(TokenDistribution(std::move(probs)), context);
    return json{{"probs", std::vector<double>(out.probs().begin(), out.probs().end())}};
  }
  if (op == "detect") {
    Session& s = session_for(request);
    const auto tokens = token_array(request, "tokens");
    return decoded_to_json(detect(tokens, s.config));
  }
  if (op == "close") {
    session_for(request);
    const auto id = request.at("session").get<std::int64_t>();
    sessions_.erase(id);
    return json{{"closed", id}};
  }
  throw ProtocolError{"BadRequest", "unknown op '" + op + "'"};
}

std::string BridgeServer::handle_line(std::string_view line) {
  json request;
  try {
    request = json::parse(line);
  } catch (const json::exception& e) {
    if (!greeted_) {
      finished_ = true;
      return error_object("Handshake", "expected {\"hello\":1}").dump();
    }
    return error_object("Parse", e.what()).dump();
  }

  if (!greeted_) {
    if (request.is_object() && request.size() == 1 && request.contains("hello") &&
        request.at("hello") == kBridgeProtocolVersion) {
      greeted_ = true;
      return json{{"hello", kBridgeProtocolVersion}}.dump();
    }
    finished_ = true;
    return error_object("Handshake", "expected {\"hello\":1}").dump();
  }

  try {
    return dispatch(request).dump();
  } catch (const ProtocolError& e) {
    return error_object(e.kind, e.detail).dump();
  } catch (const Error& e) {
    return error_object(e.kind_name(), e.what()).dump();
  } catch (const json::exception& e) {
    return error_object("BadRequest", e.what()).dump();
  }
}

void run_bridge(std::istream& in, std::ostream& out) {
  BridgeServer server;
  std::string line;
  while (!server.finished() && std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out << server.handle_line(line) << '\n' << std::flush;
  }
}

}  // namespace mc2mark
