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

// Small reference APIs shared by the unit and acceptance tests.

#pragma once

#include <string>

#include "apifuzz/api.hpp"
#include "apifuzz/ingest.hpp"

namespace apifuzz::testing {

#ifndef APIFUZZ_SOURCE_DIR
#define APIFUZZ_SOURCE_DIR "."
#endif

inline std::string source_path(const std::string& rel) { return std::string(APIFUZZ_SOURCE_DIR) + "/" + rel; }

/// List/Set collections with a static list factory; int and boolean are
/// left undeclared and become external classes.
inline ApiSpec collections_api() { return load_api_files({source_path("apis/collections.json")}); }

/// Two map factories, one generic and one fixed to strings, and keySet.
inline ApiSpec maps_api() { return load_api_files({source_path("apis/maps.json")}); }

/// `B m(B x)` declared on A, with B a subclass of A.
inline ApiSpec subclass_method_api() {
  return load_api_text(R"({
    "classes": [
      {"name": "A", "methods": [{"name": "m", "parameters": [{"name": "x", "type": "B"}], "return_type": "B"}]},
      {"name": "B", "supertypes": ["A"]}
    ]
  })");
}

/// Free functions `<T> void m1(T)` and `<X, Y> Y m2(X)`.
inline ApiSpec inference_api() {
  return load_api_text(R"({
    "classes": [
      {"name": "Object"},
      {"name": "String", "supertypes": ["Object"]},
      {"name": "void"}
    ],
    "functions": [
      {"name": "m1", "type_parameters": ["T"], "parameters": [{"name": "x", "type": "T"}], "return_type": "void"},
      {"name": "m2", "type_parameters": ["X", "Y"], "parameters": [{"name": "p1", "type": "X"}], "return_type": "Y"}
    ]
  })");
}

inline DefId def_named(const ApiSpec& spec, const std::string& owner, const std::string& name) {
  for (const ApiDef& d : spec.defs())
    if (d.name == name && (owner.empty() ? !d.owner : d.owner && *d.owner == owner)) return d.id;
  throw Error("no definition " + owner + "." + name);
}

}  // namespace apifuzz::testing

namespace apifuzz::testing {

/// A hierarchy with bounded and inherited generics used by unit tests.
inline ApiSpec hierarchy_api() {
  return load_api_text(R"({
    "classes": [
      {"name": "Object"},
      {"name": "Number", "supertypes": ["Object"]},
      {"name": "Int", "supertypes": ["Number"]},
      {"name": "String", "supertypes": ["Object"]},
      {"name": "Comparable", "type_parameters": ["T"], "supertypes": ["Object"]},
      {
        "name": "List", "type_parameters": ["T"], "supertypes": ["Object"],
        "fields": [{"name": "head", "type": "T"}],
        "methods": [
          {"name": "get", "parameters": ["Int"], "return_type": "T"},
          {"name": "add", "parameters": ["T"], "return_type": "Object"},
          {"name": "map", "type_parameters": ["R"], "parameters": ["R"], "return_type": "List<R>"}
        ]
      },
      {
        "name": "ArrayList", "type_parameters": ["E"], "supertypes": ["List<E>"],
        "constructors": [{"parameters": []}]
      },
      {
        "name": "Box", "type_parameters": [{"name": "N", "bound": "Number"}], "supertypes": ["Object"],
        "constructors": [{"parameters": ["N"]}],
        "methods": [{"name": "value", "parameters": [], "return_type": "N"}]
      },
      {
        "name": "Sorted", "type_parameters": [{"name": "S", "bound": "Comparable<S>"}],
        "constructors": [{"parameters": []}]
      },
      {"name": "Version", "supertypes": ["Comparable<Version>"]},
      {
        "name": "Util",
        "methods": [
          {"name": "singleton", "static": true, "type_parameters": ["X"], "parameters": ["X"], "return_type": "List<X>"},
          {"name": "total", "static": true, "parameters": ["List<Int>"], "return_type": "Int"}
        ],
        "fields": [{"name": "ZERO", "type": "Int", "static": true}]
      }
    ]
  })");
}

}  // namespace apifuzz::testing
