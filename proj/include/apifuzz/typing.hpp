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

// Type-level operations over an ApiSpec: decomposition, nominal subtyping
// with invariant generics, one-sided unification and member lookup.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "apifuzz/api.hpp"
#include "apifuzz/type.hpp"

namespace apifuzz {

struct Decomposition {
  Substitution sub;
  Type base;
};

/// Splits `N<t...>` into `[params(N) -> t...]` and the constructor's
/// self-type. Identity entries (`T -> T`) are dropped, so decomposing a
/// self-type yields the empty substitution. Other types decompose to (ε, t).
inline Decomposition decompose(const ApiSpec& spec, const Type& t) {
  if (!t.is_instance()) return {Substitution{}, t};
  const ClassDecl& c = spec.class_named(t.name());
  Substitution sub;
  const auto args = t.args();
  for (std::size_t i = 0; i < c.type_params.size() && i < args.size(); ++i) {
    if (args[i].is_variable() && args[i].name() == c.type_params[i].id) continue;
    sub.bind(c.type_params[i].id, args[i]);
  }
  return {std::move(sub), c.self_type()};
}

/// Declared supertypes of a nominal type with its arguments substituted in.
inline std::vector<Type> direct_supertypes(const ApiSpec& spec, const Type& t) {
  std::vector<Type> out;
  if (!t.is_nominal()) return out;
  const ClassDecl& c = spec.class_named(t.name());
  const Substitution sub = decompose(spec, t).sub;
  out.reserve(c.supertypes.size());
  for (const Type& s : c.supertypes) out.push_back(apply(sub, s));
  return out;
}

/// Reflexive-transitive nominal subtyping. Generic arguments are invariant.
/// Throws ResolutionError for class names the spec does not declare.
inline bool is_subtype(const ApiSpec& spec, const Type& sub, const Type& super) {
  if (sub == super) return true;
  if (sub.is_bottom() || super.is_top()) return true;
  switch (sub.kind()) {
    case Type::Kind::top: return false;
    case Type::Kind::bottom: return true;
    case Type::Kind::variable: {
      const Type bound = spec.upper_bound(sub.name());
      if (bound.is_top()) return false;
      return is_subtype(spec, bound, super);
    }
    default: break;
  }
  if (!super.is_nominal()) {
    spec.class_named(sub.name());
    return false;
  }
  const ClassDecl& c = spec.class_named(sub.name());
  if (super.name() == c.name) {
    spec.class_named(super.name());
    return false;  // same constructor, different arguments
  }
  for (const Type& s : direct_supertypes(spec, sub))
    if (is_subtype(spec, s, super)) return true;
  spec.class_named(super.name());
  return false;
}

namespace detail {
// Structural matching of `pattern` against `target`, binding pattern variables.
inline bool match(const Type& target, const Type& pattern, Substitution& sub) {
  if (pattern.is_variable()) {
    if (const Type* bound = sub.find(pattern.name())) return *bound == target;
    sub.bind(pattern.name(), target);
    return true;
  }
  if (pattern.kind() != target.kind() || pattern.name() != target.name()) return false;
  const auto pa = pattern.args();
  const auto ta = target.args();
  if (pa.size() != ta.size()) return false;
  for (std::size_t i = 0; i < pa.size(); ++i)
    if (!match(ta[i], pa[i], sub)) return false;
  return true;
}

inline std::optional<Substitution> unify_down(const ApiSpec& spec, const Type& target,
                                              const Type& pattern) {
  Substitution sub;
  if (match(target, pattern, sub)) return sub;
  if (!pattern.is_nominal()) return std::nullopt;
  for (const Type& s : direct_supertypes(spec, pattern))
    if (auto r = unify_down(spec, target, s)) return r;
  return std::nullopt;
}

inline std::optional<Substitution> unify_up(const ApiSpec& spec, const Type& actual,
                                            const Type& pattern) {
  Substitution sub;
  if (match(actual, pattern, sub)) return sub;
  if (!actual.is_nominal()) return std::nullopt;
  for (const Type& s : direct_supertypes(spec, actual))
    if (auto r = unify_up(spec, s, pattern)) return r;
  return std::nullopt;
}
}  // namespace detail

/// Finds σ binding variables of `pattern` so that σ(pattern) <: target.
///
/// Nested arguments unify by equality; subtyping is admitted only at the top
/// level, by retrying against the (substituted) supertypes of `pattern`.
/// Variables of `target` are rigid.
inline std::optional<Substitution> unify(const ApiSpec& spec, const Type& target,
                                         const Type& pattern) {
  if (pattern.is_bottom() || target.is_top()) return Substitution{};
  return detail::unify_down(spec, target, pattern);
}

/// Mirror of unify() for argument positions: σ with actual <: σ(pattern),
/// chasing the supertypes of `actual` at the top level.
inline std::optional<Substitution> unify_super(const ApiSpec& spec, const Type& actual,
                                               const Type& pattern) {
  if (actual.is_bottom()) return Substitution{};
  if (pattern.is_top()) return Substitution{};
  return detail::unify_up(spec, actual, pattern);
}

/// Every mapped variable respects its (substituted) upper bound.
inline bool is_valid(const ApiSpec& spec, const Substitution& sub) {
  for (const auto& [var, t] : sub) {
    const Type bound = spec.upper_bound(var);
    if (bound.is_top()) continue;
    if (!is_subtype(spec, t, apply(sub, bound))) return false;
  }
  return true;
}

/// Which type the member lookup decomposes to obtain its substitution.
enum class LookupSubstitution : std::uint8_t {
  receiver,     // decompose the receiver type (default)
  return_type,  // decompose the member's declared type, the literal rule reading
};

struct LookupOptions {
  LookupSubstitution source = LookupSubstitution::receiver;
};

struct MemberLookup {
  const ApiDef* def = nullptr;
  Substitution sub;
};

namespace detail {
template <typename Pred>
std::optional<MemberLookup> lookup_member(const ApiSpec& spec, const Type& recv, Pred&& pred,
                                          const LookupOptions& opts) {
  if (recv.is_variable()) {
    const Type bound = spec.upper_bound(recv.name());
    if (bound.is_top()) return std::nullopt;
    return lookup_member(spec, bound, pred, opts);
  }
  if (!recv.is_nominal()) return std::nullopt;
  const ClassDecl& c = spec.class_named(recv.name());
  for (DefId id : c.members) {
    const ApiDef& d = spec.def(id);
    if (!d.is_instance_member() || !pred(d)) continue;
    if (opts.source == LookupSubstitution::return_type) return MemberLookup{&d, decompose(spec, d.type).sub};
    return MemberLookup{&d, decompose(spec, recv).sub};
  }
  for (const Type& s : direct_supertypes(spec, recv))
    if (auto r = lookup_member(spec, s, pred, opts)) return r;
  return std::nullopt;
}
}  // namespace detail

/// Finds the instance field `name` on `recv` or, failing that, its
/// supertypes. The substitution maps the owner's parameters as seen from `recv`.
inline std::optional<MemberLookup> lookup_field(const ApiSpec& spec, const Type& recv,
                                                std::string_view name,
                                                const LookupOptions& opts = {}) {
  return detail::lookup_member(
      spec, recv, [&](const ApiDef& d) { return d.is_field() && d.name == name; }, opts);
}

/// As lookup_field, keyed by definition id so overloads stay distinct.
inline std::optional<MemberLookup> lookup_method(const ApiSpec& spec, const Type& recv, DefId id,
                                                 const LookupOptions& opts = {}) {
  return detail::lookup_member(
      spec, recv, [&](const ApiDef& d) { return d.is_function() && d.id == id; }, opts);
}

/// Lookup of any instance member (field or function) by id.
inline std::optional<MemberLookup> lookup_member(const ApiSpec& spec, const Type& recv, DefId id,
                                                 const LookupOptions& opts = {}) {
  return detail::lookup_member(spec, recv, [&](const ApiDef& d) { return d.id == id; }, opts);
}

/// Transitive supertypes of `t`, `t` first, breadth-first and deduplicated.
inline std::vector<Type> supertype_closure(const ApiSpec& spec, const Type& t) {
  std::vector<Type> out{t};
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (Type& s : direct_supertypes(spec, out[i]))
      if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(std::move(s));
  }
  return out;
}

}  // namespace apifuzz
