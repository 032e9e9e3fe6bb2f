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

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace apifuzz {

/// A value of the API type algebra.
///
/// Types are plain values compared structurally. Class types are referenced
/// by name and type variables by their qualified id (e.g. `List.T` or
/// `Utils.mapOf#3.X`); declarations (supertypes, bounds, parameters) live in
/// the ApiSpec. A generic class used as a graph node is represented by its
/// self-instance, `List<List.T>`.
class Type {
 public:
  enum class Kind : std::uint8_t { top, bottom, variable, class_type, instance };

  Type() = default;

  static Type top() { return Type(Kind::top, {}, {}); }
  static Type bottom() { return Type(Kind::bottom, {}, {}); }
  static Type variable(std::string id) { return Type(Kind::variable, std::move(id), {}); }
  static Type class_type(std::string name) {
    return Type(Kind::class_type, std::move(name), {});
  }
  static Type instance(std::string name, std::vector<Type> args) {
    if (args.empty()) return class_type(std::move(name));
    return Type(Kind::instance, std::move(name), std::move(args));
  }

  Kind kind() const { return kind_; }
  bool is_top() const { return kind_ == Kind::top; }
  bool is_bottom() const { return kind_ == Kind::bottom; }
  bool is_variable() const { return kind_ == Kind::variable; }
  bool is_class_type() const { return kind_ == Kind::class_type; }
  bool is_instance() const { return kind_ == Kind::instance; }
  /// Class type or type instance: something that names a declared class.
  bool is_nominal() const { return kind_ == Kind::class_type || kind_ == Kind::instance; }

  /// Class name for nominal types, variable id for variables, empty otherwise.
  const std::string& name() const { return name_; }
  std::span<const Type> args() const { return args_; }

  /// True when no type variable occurs anywhere in the type.
  bool is_ground() const {
    if (kind_ == Kind::variable) return false;
    for (const Type& a : args_)
      if (!a.is_ground()) return false;
    return true;
  }

  bool mentions(std::string_view var_id) const {
    if (kind_ == Kind::variable) return name_ == var_id;
    for (const Type& a : args_)
      if (a.mentions(var_id)) return true;
    return false;
  }

  /// Constructor nesting depth: `Int` is 0, `List<Int>` is 1.
  std::size_t nesting_depth() const {
    if (kind_ != Kind::instance) return 0;
    std::size_t d = 0;
    for (const Type& a : args_) d = std::max(d, a.nesting_depth());
    return d + 1;
  }

  void collect_variables(std::vector<std::string>& out) const {
    if (kind_ == Kind::variable) {
      for (const auto& v : out)
        if (v == name_) return;
      out.push_back(name_);
      return;
    }
    for (const Type& a : args_) a.collect_variables(out);
  }

  friend bool operator==(const Type& a, const Type& b) {
    return a.kind_ == b.kind_ && a.name_ == b.name_ && a.args_ == b.args_;
  }
  friend std::strong_ordering operator<=>(const Type& a, const Type& b) {
    if (auto c = a.kind_ <=> b.kind_; c != 0) return c;
    if (auto c = a.name_.compare(b.name_); c != 0) return c <=> 0;
    const std::size_t n = std::min(a.args_.size(), b.args_.size());
    for (std::size_t i = 0; i < n; ++i)
      if (auto c = a.args_[i] <=> b.args_[i]; c != 0) return c;
    return a.args_.size() <=> b.args_.size();
  }

  std::size_t hash() const {
    std::size_t h = std::hash<std::string>{}(name_) ^ (static_cast<std::size_t>(kind_) << 1);
    for (const Type& a : args_) h = h * 1099511628211ULL ^ a.hash();
    return h;
  }

 private:
  Type(Kind k, std::string name, std::vector<Type> args)
      : kind_(k), name_(std::move(name)), args_(std::move(args)) {}

  Kind kind_ = Kind::top;
  std::string name_;
  std::vector<Type> args_;
};

struct TypeHash {
  std::size_t operator()(const Type& t) const { return t.hash(); }
};

/// Short display name of a type variable id: the segment after the last dot.
inline std::string_view variable_display_name(std::string_view id) {
  const auto pos = id.rfind('.');
  return pos == std::string_view::npos ? id : id.substr(pos + 1);
}

namespace detail {
inline void render_type(const Type& t, std::string& out, bool qualified_vars) {
  switch (t.kind()) {
    case Type::Kind::top: out += "$top"; return;
    case Type::Kind::bottom: out += "$bottom"; return;
    case Type::Kind::variable:
      if (qualified_vars) {
        out += '\'';
        out += t.name();
      } else {
        out += variable_display_name(t.name());
      }
      return;
    case Type::Kind::class_type: out += t.name(); return;
    case Type::Kind::instance: {
      out += t.name();
      out += '<';
      bool first = true;
      for (const Type& a : t.args()) {
        if (!first) out += ',';
        first = false;
        render_type(a, out, qualified_vars);
      }
      out += '>';
      return;
    }
  }
}
}  // namespace detail

/// Human-readable rendering; variables print by their short name.
inline std::string to_string(const Type& t) {
  std::string out;
  detail::render_type(t, out, false);
  return out;
}

/// Re-parseable rendering; variables print as `'<qualified id>`.
inline std::string to_ir_string(const Type& t) {
  std::string out;
  detail::render_type(t, out, true);
  return out;
}

/// Finite map from type variable ids to types.
class Substitution {
 public:
  using Map = std::map<std::string, Type, std::less<>>;
  using const_iterator = Map::const_iterator;

  Substitution() = default;
  Substitution(std::initializer_list<std::pair<const std::string, Type>> init) : entries_(init) {}

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  const_iterator begin() const { return entries_.begin(); }
  const_iterator end() const { return entries_.end(); }

  bool contains(std::string_view var) const { return entries_.find(var) != entries_.end(); }
  const Type* find(std::string_view var) const {
    auto it = entries_.find(var);
    return it == entries_.end() ? nullptr : &it->second;
  }
  void bind(std::string var, Type t) { entries_.insert_or_assign(std::move(var), std::move(t)); }
  void erase(std::string_view var) {
    if (auto it = entries_.find(var); it != entries_.end()) entries_.erase(it);
  }

  /// Entries restricted to the given variable ids.
  Substitution restricted_to(std::span<const std::string> vars) const {
    Substitution out;
    for (const auto& v : vars)
      if (const Type* t = find(v)) out.bind(v, *t);
    return out;
  }

  friend bool operator==(const Substitution&, const Substitution&) = default;

 private:
  Map entries_;
};

/// Replaces every mapped variable in `t`, recursively through instance
/// arguments. Substitution is simultaneous: images are not re-substituted.
inline Type apply(const Substitution& sub, const Type& t) {
  if (sub.empty()) return t;
  switch (t.kind()) {
    case Type::Kind::variable:
      if (const Type* img = sub.find(t.name())) return *img;
      return t;
    case Type::Kind::instance: {
      std::vector<Type> args;
      args.reserve(t.args().size());
      for (const Type& a : t.args()) args.push_back(apply(sub, a));
      return Type::instance(t.name(), std::move(args));
    }
    default: return t;
  }
}

/// True iff every variable in `general`'s domain maps to the identical type
/// in `specific`.
inline bool subsumes(const Substitution& general, const Substitution& specific) {
  for (const auto& [var, t] : general) {
    const Type* other = specific.find(var);
    if (!other || *other != t) return false;
  }
  return true;
}

/// Union of two substitutions; absent when they disagree on a shared variable.
inline std::optional<Substitution> merge(const Substitution& a, const Substitution& b) {
  Substitution out = a;
  for (const auto& [var, t] : b) {
    if (const Type* existing = out.find(var)) {
      if (*existing != t) return std::nullopt;
    } else {
      out.bind(var, t);
    }
  }
  return out;
}

inline std::string to_string(const Substitution& sub) {
  std::string out = "{";
  bool first = true;
  for (const auto& [var, t] : sub) {
    if (!first) out += ", ";
    first = false;
    out += variable_display_name(var);
    out += "->";
    out += to_string(t);
  }
  out += '}';
  return out;
}

}  // namespace apifuzz
