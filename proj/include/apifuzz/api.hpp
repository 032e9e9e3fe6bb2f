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

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "apifuzz/error.hpp"
#include "apifuzz/type.hpp"

namespace apifuzz {

struct DefId {
  std::uint32_t value = 0;
  friend auto operator<=>(const DefId&, const DefId&) = default;
};

struct TypeParam {
  std::string id;
  Type bound = Type::top();

  std::string_view name() const { return variable_display_name(id); }
  Type type() const { return Type::variable(id); }
};

struct Param {
  std::string name;
  Type type;
};

enum class DefKind : std::uint8_t { function, field };

/// A method, constructor, free function or field of an API.
struct ApiDef {
  DefId id;
  DefKind kind = DefKind::function;
  std::string name;
  std::optional<std::string> owner;  // absent for free functions
  std::vector<TypeParam> type_params;  // the definition's own parameters
  std::vector<Param> params;
  Type type;  // return type, or the field's type
  bool is_static = false;
  bool is_constructor = false;

  bool is_function() const { return kind == DefKind::function; }
  bool is_field() const { return kind == DefKind::field; }
  /// Members reached through a receiver value.
  bool is_instance_member() const { return owner && !is_static && !is_constructor; }
};

struct ClassDecl {
  std::string name;
  std::vector<TypeParam> type_params;
  std::vector<Type> supertypes;  // in terms of type_params
  std::vector<DefId> members;
  bool external = false;  // auto-declared opaque type

  bool is_generic() const { return !type_params.empty(); }

  /// `C` for simple classes, `C<C.T,...>` for type constructors.
  Type self_type() const {
    std::vector<Type> args;
    args.reserve(type_params.size());
    for (const auto& p : type_params) args.push_back(p.type());
    return Type::instance(name, std::move(args));
  }

  std::vector<std::string> param_ids() const {
    std::vector<std::string> ids;
    for (const auto& p : type_params) ids.push_back(p.id);
    return ids;
  }
};

/// A resolved API: classes, their members and free functions.
///
/// Definition ids are assigned in insertion order and stay stable when
/// definitions are removed. Call finalize() after the last insertion; it
/// validates arities, supertype acyclicity and computes the inheritance order.
class ApiSpec {
 public:
  explicit ApiSpec(std::string name = {}) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }
  void set_name(std::string n) { name_ = std::move(n); }

  ClassDecl& add_class(ClassDecl c) {
    if (class_index_.count(c.name)) throw SpecError("duplicate class '" + c.name + "'");
    for (const auto& p : c.type_params) register_variable(p);
    class_index_.emplace(c.name, classes_.size());
    classes_.push_back(std::move(c));
    finalized_ = false;
    return classes_.back();
  }

  /// Adds a definition and assigns the next id; `d.id` is ignored.
  DefId add_def(ApiDef d) {
    d.id = DefId{next_id_++};
    for (const auto& p : d.type_params) register_variable(p);
    if (d.owner) {
      auto it = class_index_.find(*d.owner);
      if (it == class_index_.end()) throw ResolutionError("unknown owner class '" + *d.owner + "'");
      classes_[it->second].members.push_back(d.id);
    }
    def_index_.emplace(d.id.value, defs_.size());
    defs_.push_back(std::move(d));
    finalized_ = false;
    return defs_.back().id;
  }

  /// Next id add_def() will hand out; used to build qualified variable ids.
  DefId next_def_id() const { return DefId{next_id_}; }

  std::span<const ClassDecl> classes() const { return classes_; }
  std::span<const ApiDef> defs() const { return defs_; }

  const ClassDecl* find_class(std::string_view name) const {
    auto it = class_index_.find(std::string(name));
    return it == class_index_.end() ? nullptr : &classes_[it->second];
  }
  const ClassDecl& class_named(std::string_view name) const {
    if (const ClassDecl* c = find_class(name)) return *c;
    throw ResolutionError("unresolved type name '" + std::string(name) + "'");
  }

  const ApiDef* find_def(DefId id) const {
    auto it = def_index_.find(id.value);
    return it == def_index_.end() ? nullptr : &defs_[it->second];
  }
  const ApiDef& def(DefId id) const {
    if (const ApiDef* d = find_def(id)) return *d;
    throw ResolutionError("unknown definition id " + std::to_string(id.value));
  }

  const TypeParam* find_variable(std::string_view id) const {
    auto it = variables_.find(std::string(id));
    return it == variables_.end() ? nullptr : &it->second;
  }
  /// Declared upper bound; Top for unknown or unbounded variables.
  Type upper_bound(std::string_view var_id) const {
    const TypeParam* p = find_variable(var_id);
    return p ? p->bound : Type::top();
  }

  /// Type parameters instantiated by explicit type arguments at a call site:
  /// the owner's parameters for constructors and static members of generic
  /// classes, followed by the definition's own.
  std::vector<TypeParam> call_type_params(const ApiDef& d) const {
    std::vector<TypeParam> out;
    if (d.owner && !d.is_instance_member()) {
      const ClassDecl& c = class_named(*d.owner);
      out = c.type_params;
    }
    out.insert(out.end(), d.type_params.begin(), d.type_params.end());
    return out;
  }

  /// Every variable a usage of `d` must fix: owner parameters, then own.
  std::vector<TypeParam> all_type_params(const ApiDef& d) const {
    std::vector<TypeParam> out;
    if (d.owner) out = class_named(*d.owner).type_params;
    out.insert(out.end(), d.type_params.begin(), d.type_params.end());
    return out;
  }

  /// Class indices with every class after all of its declared supertypes.
  const std::vector<std::size_t>& topological_order() const { return topo_order_; }

  bool finalized() const { return finalized_; }

  std::vector<std::string>& warnings() { return warnings_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// Copy without the given definitions; ids of the others are unchanged.
  ApiSpec without(const std::set<DefId>& removed) const {
    ApiSpec out = *this;
    out.defs_.clear();
    out.def_index_.clear();
    for (const ApiDef& d : defs_) {
      if (removed.count(d.id)) continue;
      out.def_index_.emplace(d.id.value, out.defs_.size());
      out.defs_.push_back(d);
    }
    for (ClassDecl& c : out.classes_)
      std::erase_if(c.members, [&](DefId id) { return removed.count(id) > 0; });
    return out;
  }

  void finalize() {
    for (const ClassDecl& c : classes_) {
      for (const auto& p : c.type_params) check_type(p.bound, "bound of " + p.id);
      for (const Type& s : c.supertypes) {
        check_type(s, "supertype of " + c.name);
        if (!s.is_nominal())
          throw SpecError("supertype of " + c.name + " must be a class type: " + to_string(s));
      }
    }
    for (const ApiDef& d : defs_) {
      const std::string where = (d.owner ? *d.owner + "." : std::string()) + d.name;
      for (const auto& p : d.type_params) check_type(p.bound, "bound of " + p.id);
      for (const auto& p : d.params) check_type(p.type, "parameter of " + where);
      check_type(d.type, "type of " + where);
    }
    compute_topological_order();
    check_consistent_ancestors();
    finalized_ = true;
  }

 private:
  void register_variable(const TypeParam& p) {
    if (!variables_.emplace(p.id, p).second)
      throw SpecError("duplicate type parameter id '" + p.id + "'");
  }

  void check_type(const Type& t, const std::string& where) const {
    switch (t.kind()) {
      case Type::Kind::variable:
        if (!find_variable(t.name()))
          throw ResolutionError("unresolved type variable '" + t.name() + "' in " + where);
        return;
      case Type::Kind::class_type:
      case Type::Kind::instance: {
        const ClassDecl* c = find_class(t.name());
        if (!c) throw ResolutionError("unresolved type name '" + t.name() + "' in " + where);
        if (c->type_params.size() != t.args().size())
          throw SpecError("arity mismatch for '" + t.name() + "' in " + where + ": expected " +
                          std::to_string(c->type_params.size()) + " type argument(s), got " +
                          std::to_string(t.args().size()));
        for (const Type& a : t.args()) check_type(a, where);
        return;
      }
      default: return;
    }
  }

  void compute_topological_order() {
    enum class Mark : std::uint8_t { none, active, done };
    std::vector<Mark> mark(classes_.size(), Mark::none);
    std::vector<std::size_t> stack;
    topo_order_.clear();
    auto visit = [&](auto&& self, std::size_t i) -> void {
      if (mark[i] == Mark::done) return;
      if (mark[i] == Mark::active) {
        std::string cycle;
        auto from = std::find(stack.begin(), stack.end(), i);
        for (auto it = from; it != stack.end(); ++it) cycle += classes_[*it].name + " -> ";
        cycle += classes_[i].name;
        throw SpecError("supertype cycle: " + cycle);
      }
      mark[i] = Mark::active;
      stack.push_back(i);
      for (const Type& s : classes_[i].supertypes) self(self, class_index_.at(s.name()));
      stack.pop_back();
      mark[i] = Mark::done;
      topo_order_.push_back(i);
    };
    for (std::size_t i = 0; i < classes_.size(); ++i) visit(visit, i);
  }

  // A class may not inherit two different instantiations of one generic class.
  void check_consistent_ancestors() const {
    std::vector<std::map<std::string, Type>> ancestors(classes_.size());
    for (std::size_t i : topo_order_) {
      const ClassDecl& c = classes_[i];
      auto& mine = ancestors[i];
      for (const Type& s : c.supertypes) {
        const std::size_t si = class_index_.at(s.name());
        const ClassDecl& sc = classes_[si];
        Substitution sub;
        for (std::size_t k = 0; k < sc.type_params.size(); ++k)
          sub.bind(sc.type_params[k].id, s.args()[k]);
        std::vector<std::pair<std::string, Type>> inherited{{sc.name, s}};
        for (const auto& [name, t] : ancestors[si]) inherited.emplace_back(name, apply(sub, t));
        for (auto& [name, t] : inherited) {
          auto [it, fresh] = mine.emplace(name, t);
          if (!fresh && it->second != t)
            throw SpecError("class " + c.name + " inherits conflicting instantiations " +
                            to_string(it->second) + " and " + to_string(t));
        }
      }
    }
  }

  std::string name_;
  std::vector<ClassDecl> classes_;
  std::unordered_map<std::string, std::size_t> class_index_;
  std::vector<ApiDef> defs_;
  std::unordered_map<std::uint32_t, std::size_t> def_index_;
  std::unordered_map<std::string, TypeParam> variables_;
  std::vector<std::size_t> topo_order_;
  std::vector<std::string> warnings_;
  std::uint32_t next_id_ = 0;
  bool finalized_ = false;
};

}  // namespace apifuzz
