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

// Loading JSON API descriptions.
//
// Document layout:
//
//   {
//     "library": "collections",
//     "language": "kotlin-like",                       (optional)
//     "classes": [{
//       "name": "List",
//       "type_parameters": [{"name": "T", "bound": "Comparable<T>"}],
//       "supertypes": ["Collection<T>"],
//       "fields": [{"name": "size", "type": "int", "static": false}],
//       "methods": [{"name": "add", "type_parameters": [],
//                    "parameters": ["T"], "return_type": "boolean",
//                    "static": false, "constructor": false}],
//       "constructors": [{"parameters": ["int"]}]      (optional shorthand)
//     }],
//     "functions": [ ...method records without owner... ]   (optional)
//   }
//
// Parameters are type strings or {"name": ..., "type": ...} objects.
// Definition ids follow document order: per class its methods, then its
// "constructors" entries, then its fields; free functions come last.

#pragma once

#include <glob.h>

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "apifuzz/api.hpp"
#include "apifuzz/error.hpp"
#include "apifuzz/instantiate.hpp"
#include "apifuzz/type_parser.hpp"

namespace apifuzz {

struct LoadOptions {
  /// Reject references to undeclared classes instead of declaring them as
  /// opaque external types.
  bool strict = false;
};

namespace detail {

class ApiLoader {
 public:
  explicit ApiLoader(const LoadOptions& opts) : opts_(opts) {}

  ApiSpec load(const std::vector<nlohmann::json>& documents) {
    std::vector<std::string> libraries;
    // Pass 1: declare every class so supertypes and members may refer forward.
    for (std::size_t i = 0; i < documents.size(); ++i) {
      const auto& doc = documents[i];
      const std::string where = "document " + std::to_string(i);
      if (!doc.is_object()) throw SpecError(where + ": expected a JSON object");
      warn_unknown(doc, {"library", "language", "classes", "functions"}, where);
      if (auto it = doc.find("library"); it != doc.end()) {
        const std::string lib = string_of(*it, where + ".library");
        if (std::find(libraries.begin(), libraries.end(), lib) == libraries.end())
          libraries.push_back(lib);
      }
      if (auto it = doc.find("language"); it != doc.end()) language_ = string_of(*it, where + ".language");
      for (const auto& c : array_of(doc, "classes", where)) declare_class(c, where);
    }
    // Pass 2: supertypes and members, in document order.
    for (std::size_t i = 0; i < documents.size(); ++i) {
      const auto& doc = documents[i];
      const std::string where = "document " + std::to_string(i);
      for (const auto& c : array_of(doc, "classes", where)) define_class(c);
      for (const auto& f : array_of(doc, "functions", where)) add_function(f, std::nullopt, where);
    }
    declare_externals();
    ApiSpec spec(join(libraries));
    for (ClassDecl& c : classes_) spec.add_class(std::move(c));
    // Ids match the prefixes baked into method type variables: both count
    // definitions in the same order starting at zero.
    for (ApiDef& d : defs_) spec.add_def(std::move(d));
    spec.warnings() = std::move(warnings_);
    spec.finalize();
    return spec;
  }

  const std::string& language() const { return language_; }

 private:
  static std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) out += (out.empty() ? "" : "+") + p;
    return out;
  }

  void warn(std::string msg) { warnings_.push_back(std::move(msg)); }

  void warn_unknown(const nlohmann::json& obj, std::initializer_list<std::string_view> known,
                    const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (std::find(known.begin(), known.end(), it.key()) == known.end())
        warn("ignoring unknown key '" + it.key() + "' in " + where);
    }
  }

  static std::string string_of(const nlohmann::json& j, const std::string& where) {
    if (!j.is_string()) throw SpecError(where + ": expected a string");
    return j.get<std::string>();
  }

  static bool bool_of(const nlohmann::json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return false;
    if (!it->is_boolean()) throw SpecError(where + "." + key + ": expected a boolean");
    return it->get<bool>();
  }

  static const nlohmann::json& array_of(const nlohmann::json& obj, const char* key,
                                        const std::string& where) {
    static const nlohmann::json empty = nlohmann::json::array();
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return empty;
    if (!it->is_array()) throw SpecError(where + "." + key + ": expected an array");
    return *it;
  }

  Type parse(const std::string& text, const TypeScope& scope, const std::string& where) {
    try {
      Type t = parse_type_expr(text, scope);
      note_references(t, where);
      return t;
    } catch (const ParseError& e) {
      throw ParseError("in " + where + " (\"" + text + "\"): " + e.detail(), e.offset());
    }
  }

  // Records class names the document uses so undeclared ones can become
  // external types; the first use fixes an external type's arity.
  void note_references(const Type& t, const std::string& where) {
    if (t.is_nominal()) {
      if (!class_index_.count(t.name()) && !references_.count(t.name())) {
        references_.emplace(t.name(), Reference{t.args().size(), where});
        reference_order_.push_back(t.name());
      }
      for (const Type& a : t.args()) note_references(a, where);
    }
  }

  std::vector<TypeParam> parse_type_params(const nlohmann::json& obj, const std::string& prefix,
                                           TypeScope& scope, const std::string& where) {
    std::vector<TypeParam> params;
    std::set<std::string> seen;
    const auto& arr = array_of(obj, "type_parameters", where);
    for (const auto& p : arr) {
      std::string name;
      if (p.is_string()) {
        name = p.get<std::string>();
      } else if (p.is_object()) {
        warn_unknown(p, {"name", "bound"}, where + " type parameter");
        name = string_of(p.value("name", nlohmann::json()), where + " type parameter name");
      } else {
        throw SpecError(where + ": type parameter must be a string or object");
      }
      if (!seen.insert(name).second)
        throw SpecError(where + ": duplicate type parameter '" + name + "'");
      scope.add(name, prefix + name);
      params.push_back(TypeParam{prefix + name, Type::top()});
    }
    // Bounds see every parameter of the declaration, which admits F-bounds.
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_object()) continue;
      auto it = arr[i].find("bound");
      if (it == arr[i].end() || it->is_null()) continue;
      params[i].bound = parse(string_of(*it, where + " bound"), scope,
                              "bound of " + std::string(params[i].name()) + " in " + where);
    }
    return params;
  }

  void declare_class(const nlohmann::json& c, const std::string& where) {
    if (!c.is_object()) throw SpecError(where + ": class entry must be an object");
    const std::string name = string_of(c.value("name", nlohmann::json()), where + " class name");
    warn_unknown(c, {"name", "type_parameters", "supertypes", "fields", "methods", "constructors"},
                 "class " + name);
    if (class_index_.count(name)) throw SpecError("duplicate class '" + name + "'");
    TypeScope scope;
    ClassDecl decl;
    decl.name = name;
    decl.type_params = parse_type_params(c, name + ".", scope, "class " + name);
    class_index_.emplace(name, classes_.size());
    classes_.push_back(std::move(decl));
    scopes_.emplace(name, std::move(scope));
  }

  void define_class(const nlohmann::json& c) {
    const std::string name = c.at("name").get<std::string>();
    const TypeScope& scope = scopes_.at(name);
    std::vector<Type> supers;
    for (const auto& s : array_of(c, "supertypes", "class " + name))
      supers.push_back(parse(string_of(s, "class " + name + " supertype"), scope, "supertypes of " + name));
    classes_[class_index_.at(name)].supertypes = std::move(supers);
    for (const auto& m : array_of(c, "methods", "class " + name)) add_function(m, name, "class " + name);
    for (const auto& k : array_of(c, "constructors", "class " + name)) {
      nlohmann::json ctor = k;
      if (!ctor.is_object()) throw SpecError("class " + name + ": constructor entry must be an object");
      ctor["constructor"] = true;
      if (!ctor.contains("name")) ctor["name"] = name;
      add_function(ctor, name, "class " + name);
    }
    for (const auto& f : array_of(c, "fields", "class " + name)) add_field(f, name);
  }

  std::uint32_t next_id() const { return static_cast<std::uint32_t>(defs_.size()); }

  void add_function(const nlohmann::json& m, const std::optional<std::string>& owner,
                    const std::string& where) {
    if (!m.is_object()) throw SpecError(where + ": method entry must be an object");
    ApiDef d;
    d.kind = DefKind::function;
    d.is_constructor = bool_of(m, "constructor", where);
    d.is_static = bool_of(m, "static", where);
    if (d.is_constructor && !owner) throw SpecError(where + ": free function cannot be a constructor");
    if (auto it = m.find("name"); it != m.end()) d.name = string_of(*it, where + " method name");
    else if (d.is_constructor) d.name = *owner;
    else throw SpecError(where + ": method without a name");
    d.owner = owner;
    const std::string loc = (owner ? *owner + "." : std::string()) + d.name;
    warn_unknown(m, {"name", "type_parameters", "parameters", "return_type", "static", "constructor"}, loc);

    TypeScope scope = owner ? scopes_.at(*owner) : TypeScope{};
    const std::string prefix = loc + "#" + std::to_string(next_id()) + ".";
    d.type_params = parse_type_params(m, prefix, scope, loc);
    std::size_t index = 0;
    for (const auto& p : array_of(m, "parameters", loc)) {
      Param param;
      std::string text;
      if (p.is_string()) {
        text = p.get<std::string>();
        param.name = "p" + std::to_string(index);
      } else if (p.is_object()) {
        warn_unknown(p, {"name", "type"}, loc + " parameter");
        text = string_of(p.value("type", nlohmann::json()), loc + " parameter type");
        param.name = p.contains("name") ? string_of(p["name"], loc + " parameter name")
                                        : "p" + std::to_string(index);
      } else {
        throw SpecError(loc + ": parameter must be a string or object");
      }
      param.type = parse(text, scope, "parameter " + std::to_string(index) + " of " + loc);
      d.params.push_back(std::move(param));
      ++index;
    }
    if (auto it = m.find("return_type"); it != m.end() && !it->is_null()) {
      d.type = parse(string_of(*it, loc + " return_type"), scope, "return type of " + loc);
    } else if (d.is_constructor) {
      d.type = classes_[class_index_.at(*owner)].self_type();
    } else {
      throw SpecError(loc + ": missing return_type");
    }
    if (d.is_constructor && (!d.type.is_nominal() || d.type.name() != *owner))
      throw SpecError(loc + ": constructor must return its owner type, got " + to_string(d.type));
    defs_.push_back(std::move(d));
  }

  void add_field(const nlohmann::json& f, const std::string& owner) {
    if (!f.is_object()) throw SpecError("class " + owner + ": field entry must be an object");
    ApiDef d;
    d.kind = DefKind::field;
    d.name = string_of(f.value("name", nlohmann::json()), "class " + owner + " field name");
    d.owner = owner;
    const std::string loc = owner + "." + d.name;
    warn_unknown(f, {"name", "type", "static"}, loc);
    d.is_static = bool_of(f, "static", loc);
    d.type = parse(string_of(f.value("type", nlohmann::json()), loc + " type"), scopes_.at(owner),
                   "type of field " + loc);
    defs_.push_back(std::move(d));
  }

  void declare_externals() {
    if (opts_.strict) return;  // finalize() reports the first unresolved name
    for (const std::string& name : reference_order_) {
      if (class_index_.count(name)) continue;
      const Reference& ref = references_.at(name);
      ClassDecl decl;
      decl.name = name;
      decl.external = true;
      for (std::size_t i = 0; i < ref.arity; ++i)
        decl.type_params.push_back(TypeParam{name + ".T" + std::to_string(i), Type::top()});
      warn("declaring undeclared type '" + name + "' (first used in " + ref.where +
           ") as an external opaque class");
      class_index_.emplace(name, classes_.size());
      classes_.push_back(std::move(decl));
    }
  }

  struct Reference {
    std::size_t arity;
    std::string where;
  };

  LoadOptions opts_;
  std::string language_;
  std::vector<ClassDecl> classes_;
  std::map<std::string, std::size_t> class_index_;
  std::map<std::string, TypeScope> scopes_;
  std::vector<ApiDef> defs_;
  std::map<std::string, Reference> references_;
  std::vector<std::string> reference_order_;
  std::vector<std::string> warnings_;
};

}  // namespace detail

/// Builds a resolved, finalized ApiSpec from parsed JSON documents.
inline ApiSpec load_api(const std::vector<nlohmann::json>& documents, const LoadOptions& opts = {}) {
  return detail::ApiLoader(opts).load(documents);
}

inline ApiSpec load_api_text(std::string_view json_text, const LoadOptions& opts = {}) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SpecError(std::string("invalid JSON: ") + e.what());
  }
  return load_api({doc}, opts);
}

/// Expands shell-style patterns; a pattern that matches nothing is an error.
inline std::vector<std::string> expand_globs(const std::vector<std::string>& patterns) {
  std::vector<std::string> files;
  for (const std::string& pattern : patterns) {
    glob_t g{};
    const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
    if (rc == GLOB_NOMATCH) {
      ::globfree(&g);
      throw ConfigError("no API files match '" + pattern + "'");
    }
    if (rc != 0) {
      ::globfree(&g);
      throw ConfigError("cannot expand '" + pattern + "'");
    }
    for (std::size_t i = 0; i < g.gl_pathc; ++i) files.emplace_back(g.gl_pathv[i]);
    ::globfree(&g);
  }
  return files;
}

inline ApiSpec load_api_files(const std::vector<std::string>& patterns, const LoadOptions& opts = {}) {
  std::vector<nlohmann::json> docs;
  for (const std::string& path : expand_globs(patterns)) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open API file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      docs.push_back(nlohmann::json::parse(buf.str()));
    } catch (const nlohmann::json::parse_error& e) {
      throw SpecError(path + ": invalid JSON: " + e.what());
    }
  }
  return load_api(docs, opts);
}

struct SkipReport {
  ApiSpec spec;
  std::vector<DefId> skipped;
};

/// Drops definitions whose type variables (owner's and own) admit no valid
/// instantiation within `depth`, e.g. `class A<T extends A<T>>` without any
/// concrete subclass.
inline SkipReport skip_unusable(const ApiSpec& spec, int depth,
                                std::size_t budget = Instantiator::kDefaultBudget) {
  std::set<DefId> removed;
  std::vector<DefId> skipped;
  for (const ApiDef& d : spec.defs()) {
    const std::vector<TypeParam> vars = spec.all_type_params(d);
    if (vars.empty()) continue;
    Instantiator inst(spec, nullptr, budget);
    if (inst.complete(vars, Substitution{}, depth)) continue;
    removed.insert(d.id);
    skipped.push_back(d.id);
  }
  if (removed.empty()) return {spec, {}};
  ApiSpec out = spec.without(removed);
  for (DefId id : skipped) {
    const ApiDef& d = spec.def(id);
    out.warnings().push_back("skipping " + (d.owner ? *d.owner + "." : std::string()) + d.name +
                             ": no valid type instantiation within depth " + std::to_string(depth));
  }
  return {std::move(out), std::move(skipped)};
}

}  // namespace apifuzz
