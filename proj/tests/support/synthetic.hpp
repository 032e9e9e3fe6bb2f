// Copyright 2026 The apifuzz Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Large synthetic APIs for scaling measurements.

#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "apifuzz/rng.hpp"

namespace apifuzz::testing {

/// `classes` classes, a third of them generic, each with a constructor,
/// two instance methods and one static factory returning random types.
inline nlohmann::json synthetic_api_json(std::size_t classes, std::uint64_t seed) {
  Rng rng = derive_rng(seed, classes);
  auto name = [](std::size_t i) { return "K" + std::to_string(i); };
  auto generic = [](std::size_t i) { return i % 3 == 2; };
  auto simple_type = [&] {
    std::size_t i;
    do i = uniform_index(rng, classes);
    while (generic(i));
    return name(i);
  };
  auto some_type = [&](const std::string& var) {
    const std::size_t i = uniform_index(rng, classes);
    if (!generic(i)) return name(i);
    return name(i) + "<" + (var.empty() || coin(rng, 0.5) ? simple_type() : var) + ">";
  };
  nlohmann::json cls = nlohmann::json::array();
  for (std::size_t i = 0; i < classes; ++i) {
    const std::string var = generic(i) ? "T" : "";
    nlohmann::json c{{"name", name(i)}};
    if (generic(i)) c["type_parameters"] = {"T"};
    if (i > 0 && coin(rng, 0.3) && !generic(i)) {
      std::size_t s;
      do s = uniform_index(rng, i);
      while (generic(s));
      c["supertypes"] = {name(s)};
    }
    c["constructors"] = {{{"parameters", nlohmann::json::array({simple_type()})}}};
    c["methods"] = {
        {{"name", "a"}, {"parameters", nlohmann::json::array({some_type(var)})}, {"return_type", some_type(var)}},
        {{"name", "b"}, {"parameters", nlohmann::json::array()}, {"return_type", some_type(var)}},
        {{"name", "make"},
         {"static", true},
         {"type_parameters", {"X"}},
         {"parameters", nlohmann::json::array({"X"})},
         {"return_type", some_type("X")}}};
    cls.push_back(c);
  }
  return {{"classes", cls}};
}

}  // namespace apifuzz::testing
