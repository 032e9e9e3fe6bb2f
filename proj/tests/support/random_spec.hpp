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

// Random API specifications for property tests, emitted as loader JSON so
// the loader's naming and id conventions are exercised too.

#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "apifuzz/ingest.hpp"
#include "apifuzz/rng.hpp"

namespace apifuzz::testing {

struct RandomSpecOptions {
  std::size_t max_classes = 5;
  std::size_t max_members = 3;
  std::size_t max_functions = 2;
  double generic_class = 0.5;
  double generic_method = 0.35;
  double bounded = 0.15;  // chance a type parameter gets a bound
  double supertype = 0.5;
  int type_depth = 1;  // nesting of types written in signatures
  bool fields = true;
  bool statics = true;
};

class RandomSpecBuilder {
 public:
  RandomSpecBuilder(Rng& rng, RandomSpecOptions opts) : rng_(rng), o_(opts) {}

  nlohmann::json build() {
    const std::size_t n = 1 + uniform_index(rng_, o_.max_classes);
    arity_.clear();
    // C0 is always simple so every variable has at least one instantiation.
    for (std::size_t i = 0; i < n; ++i)
      arity_.push_back(i == 0 || !coin(rng_, o_.generic_class) ? 0 : 1 + uniform_index(rng_, 2));
    nlohmann::json classes = nlohmann::json::array();
    for (std::size_t i = 0; i < n; ++i) classes.push_back(make_class(i));
    nlohmann::json functions = nlohmann::json::array();
    const std::size_t nf = uniform_index(rng_, o_.max_functions + 1);
    for (std::size_t i = 0; i < nf; ++i) functions.push_back(make_method("g" + std::to_string(i), {}, false));
    return {{"classes", classes}, {"functions", functions}};
  }

 private:
  static std::string class_name(std::size_t i) { return "C" + std::to_string(i); }

  std::vector<std::string> param_names(std::size_t k, const std::string& base) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < k; ++i) out.push_back(base + std::to_string(i));
    return out;
  }

  nlohmann::json type_params(const std::vector<std::string>& names) {
    nlohmann::json arr = nlohmann::json::array();
    for (const std::string& p : names) {
      if (coin(rng_, o_.bounded)) {
        // Bounds are simple classes so they stay satisfiable or cleanly not.
        std::vector<std::size_t> simple;
        for (std::size_t i = 0; i < arity_.size(); ++i)
          if (arity_[i] == 0) simple.push_back(i);
        arr.push_back({{"name", p}, {"bound", class_name(simple[uniform_index(rng_, simple.size())])}});
      } else {
        arr.push_back(p);
      }
    }
    return arr;
  }

  std::string random_type(const std::vector<std::string>& scope, int depth) {
    if (!scope.empty() && coin(rng_, 0.4)) return scope[uniform_index(rng_, scope.size())];
    const std::size_t c = uniform_index(rng_, arity_.size());
    if (arity_[c] == 0 || depth <= 0) {
      if (arity_[c] == 0) return class_name(c);
      return class_name(0);
    }
    std::string out = class_name(c) + "<";
    for (std::size_t i = 0; i < arity_[c]; ++i) out += (i ? "," : "") + random_type(scope, depth - 1);
    return out + ">";
  }

  nlohmann::json make_method(const std::string& name, const std::vector<std::string>& outer, bool is_static) {
    std::vector<std::string> own;
    if (coin(rng_, o_.generic_method)) own = param_names(1 + uniform_index(rng_, 2), "X");
    std::vector<std::string> scope = outer;
    scope.insert(scope.end(), own.begin(), own.end());
    nlohmann::json params = nlohmann::json::array();
    const std::size_t np = uniform_index(rng_, 3);
    for (std::size_t i = 0; i < np; ++i) params.push_back(random_type(scope, o_.type_depth));
    nlohmann::json m{{"name", name}, {"parameters", params}, {"return_type", random_type(scope, o_.type_depth)}};
    if (!own.empty()) m["type_parameters"] = type_params(own);
    if (is_static) m["static"] = true;
    return m;
  }

  nlohmann::json make_class(std::size_t i) {
    const std::string name = class_name(i);
    const std::vector<std::string> params = param_names(arity_[i], "T");
    nlohmann::json c{{"name", name}};
    if (!params.empty()) c["type_parameters"] = type_params(params);
    if (i > 0 && coin(rng_, o_.supertype)) {
      const std::size_t s = uniform_index(rng_, i);
      std::string sup = class_name(s);
      if (arity_[s] > 0) {
        sup += "<";
        for (std::size_t k = 0; k < arity_[s]; ++k) sup += (k ? "," : "") + random_type(params, 1);
        sup += ">";
      }
      c["supertypes"] = {sup};
    }
    nlohmann::json methods = nlohmann::json::array();
    nlohmann::json ctors = nlohmann::json::array();
    nlohmann::json fields = nlohmann::json::array();
    const std::size_t nm = uniform_index(rng_, o_.max_members + 1);
    for (std::size_t k = 0; k < nm; ++k) {
      const std::size_t kind = uniform_index(rng_, 8);
      if (kind == 0 && ctors.empty()) {
        nlohmann::json ps = nlohmann::json::array();
        const std::size_t np = uniform_index(rng_, 2);
        for (std::size_t p = 0; p < np; ++p) ps.push_back(random_type(params, 1));
        ctors.push_back({{"parameters", ps}});
      } else if (kind == 1 && o_.fields) {
        fields.push_back({{"name", "f" + std::to_string(k)}, {"type", random_type(params, o_.type_depth)}});
      } else if (kind == 2 && o_.statics) {
        methods.push_back(make_method("s" + std::to_string(k), params, true));
      } else {
        methods.push_back(make_method("m" + std::to_string(k), params, false));
      }
    }
    if (!methods.empty()) c["methods"] = methods;
    if (!ctors.empty()) c["constructors"] = ctors;
    if (!fields.empty()) c["fields"] = fields;
    return c;
  }

  Rng& rng_;
  RandomSpecOptions o_;
  std::vector<std::size_t> arity_;
};

inline nlohmann::json random_spec_json(Rng& rng, const RandomSpecOptions& opts = {}) {
  return RandomSpecBuilder(rng, opts).build();
}

inline ApiSpec random_spec(Rng& rng, const RandomSpecOptions& opts = {}) {
  return load_api({random_spec_json(rng, opts)}, LoadOptions{true});
}

}  // namespace apifuzz::testing
