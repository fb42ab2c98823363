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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mc2mark/attacks.hpp"
#include "mc2mark/detector.hpp"
#include "mc2mark/generator.hpp"
#include "mc2mark/io.hpp"
#include "mc2mark/lm_sim.hpp"
#include "mc2mark/mccr.hpp"

namespace py = pybind11;

namespace {

using nlohmann::json;

// Dicts cross the boundary as JSON text; configs are small.
json ToJson(const py::object& obj) {
  return json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

py::object FromJson(const json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

mc2mark::WatermarkConfig Config(const py::dict& d) { return mc2mark::config_from_json(ToJson(d)); }

std::vector<mc2mark::TokenId> Embed(const py::dict& config, const std::string& message_hex,
                                    std::size_t num_tokens, double concentration,
                                    std::uint64_t lm_seed, std::size_t context_order,
                                    const std::vector<mc2mark::TokenId>& prompt) {
  const mc2mark::WatermarkConfig cfg = Config(config);
  const mc2mark::Message msg = mc2mark::message_from_hex(message_hex, cfg.message_bits);
  py::gil_scoped_release release;
  const mc2mark::DirichletLM lm(cfg.vocab_size, concentration, lm_seed, context_order);
  return mc2mark::generate(lm, prompt, msg, num_tokens, cfg);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multi-bit distortion-free watermarking for token sequences.";

  // The module owns the exception type; the translator looks it up each time
  // so no Python object outlives interpreter shutdown.
  py::exception<mc2mark::Error>(m, "Error", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const mc2mark::Error& e) {
      const std::string kind(mc2mark::error_kind_name(e.kind()));
      py::object type = py::module_::import("mc2mark._core").attr("Error");
      py::object exc = type(e.what());
      exc.attr("kind") = kind;
      PyErr_SetObject(type.ptr(), exc.ptr());
    }
  });

  m.def("validate_config", [](const py::dict& d) { return FromJson(mc2mark::config_to_json(Config(d))); },
        py::arg("config"), "Fill defaults and check every invariant.");
  m.def("load_config", [](const std::string& path) {
    return FromJson(mc2mark::config_to_json(mc2mark::load_config(path)));
  });
  m.def("config_hash", [](const py::dict& d) { return mc2mark::config_hash(Config(d)); });

  m.def("reweight", [](const std::vector<std::uint8_t>& payload, const std::vector<double>& masses) {
    return mc2mark::reweight_function(payload, masses);
  }, py::arg("payload"), py::arg("masses"));

  m.def("watermark_step",
        [](const std::vector<double>& probs, const std::vector<mc2mark::TokenId>& context,
           const std::string& message_hex, const py::dict& config) {
          const mc2mark::WatermarkConfig cfg = Config(config);
          const auto out = mc2mark::watermark_step(
              mc2mark::TokenDistribution(probs), context,
              mc2mark::message_from_hex(message_hex, cfg.message_bits), cfg);
          return std::vector<double>(out.probs().begin(), out.probs().end());
        },
        py::arg("probs"), py::arg("context"), py::arg("message_hex"), py::arg("config"));

  m.def("embed", &Embed, py::arg("config"), py::arg("message_hex"), py::arg("num_tokens"),
        py::arg("concentration") = 0.3, py::arg("lm_seed") = 0, py::arg("context_order") = 2,
        py::arg("prompt") = std::vector<mc2mark::TokenId>{},
        "Generate watermarked tokens from the synthetic Dirichlet model.");

  m.def("detect", [](const std::vector<mc2mark::TokenId>& tokens, const py::dict& config) {
    const mc2mark::WatermarkConfig cfg = Config(config);
    mc2mark::DecodedMessage d;
    {
      py::gil_scoped_release release;
      d = mc2mark::detect(tokens, cfg);
    }
    return FromJson(mc2mark::decoded_to_json(d));
  }, py::arg("tokens"), py::arg("config"));

  m.def("attack", [](const std::vector<mc2mark::TokenId>& tokens, const std::string& spec,
                     std::uint64_t seed, std::size_t vocab_size) {
    return mc2mark::apply_attack(tokens, mc2mark::AttackSpec::parse(spec), seed, vocab_size);
  }, py::arg("tokens"), py::arg("spec"), py::arg("seed"), py::arg("vocab_size"));

  m.def("key_vectors", [] {
    return FromJson(mc2mark::key_vectors_document(mc2mark::default_key_vector_cases()));
  });
}
