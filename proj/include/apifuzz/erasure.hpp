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

// Removing explicit type arguments that local inference recovers.
//
// The pass runs outside-in: a call keeps or drops all of its type arguments
// depending on whether inference from its target type and its (not yet
// erased) arguments reproduces them exactly. Arguments are then erased
// against the target types the checker will hand them.

#pragma once

#include <optional>
#include <vector>

#include "apifuzz/api.hpp"
#include "apifuzz/checker.hpp"
#include "apifuzz/expr.hpp"
#include "apifuzz/type.hpp"
#include "apifuzz/typing.hpp"

namespace apifuzz {

/// The substitution a call's explicit type arguments denote.
inline Substitution explicit_substitution(const ApiSpec& spec, const Expr& call) {
  Substitution s;
  const auto params = spec.call_type_params(spec.def(call.def()));
  const auto args = call.type_args();
  for (std::size_t i = 0; i < params.size() && i < args.size(); ++i) s.bind(params[i].id, args[i]);
  return s;
}

/// True when every type argument of `call` can be dropped: inference from
/// `target` and the argument types yields exactly the explicit ones.
inline bool can_erase(const ApiSpec& spec, const Expr& call, const std::optional<Type>& target,
                      const CheckOptions& opts = {}) {
  if (!call.is_call() || call.type_args().empty()) return false;
  auto inferred = infer_call(spec, call, target, opts);
  return inferred && *inferred == explicit_substitution(spec, call);
}

namespace detail {

// Target types the checker passes to the arguments of `call` once its type
// arguments are `kept` or dropped. Unknown receivers yield no targets.
inline std::vector<std::optional<Type>> argument_targets(const ApiSpec& spec, const Expr& call,
                                                         const std::optional<Type>& target, bool kept,
                                                         const CheckOptions& opts) {
  const ApiDef& d = spec.def(call.def());
  std::vector<std::optional<Type>> out(d.params.size());
  Substitution known;
  if (!call.receiver().is_empty()) {
    auto rt = type_of(spec, call.receiver(), std::nullopt, opts);
    if (!rt) return out;
    auto lk = lookup_method(spec, *rt, d.id, opts.lookup);
    if (!lk) return out;
    known = lk->sub;
  }
  const auto params = spec.call_type_params(d);
  if (kept) {
    for (const auto& [v, t] : explicit_substitution(spec, call)) known.bind(v, t);
  } else if (target && !target->is_top()) {
    if (auto u = unify(spec, *target, apply(known, d.type))) {
      for (const TypeParam& p : params)
        if (const Type* t = u->find(p.id)) known.bind(p.id, *t);
    }
  }
  for (std::size_t i = 0; i < d.params.size(); ++i) {
    Type t = apply(known, d.params[i].type);
    if (t.is_ground()) out[i] = std::move(t);
  }
  return out;
}

}  // namespace detail

/// Erases type arguments throughout `e`; `target` is the type the context
/// expects (absent for bare statements and receivers).
inline Expr erase(const ApiSpec& spec, const Expr& e, const std::optional<Type>& target,
                  const CheckOptions& opts = {}) {
  switch (e.kind()) {
    case Expr::Kind::empty:
    case Expr::Kind::constant: return e;
    case Expr::Kind::local_var: return Expr::local_var(e.name(), e.type(), erase(spec, e.rhs(), e.type(), opts));
    case Expr::Kind::field_access:
      return Expr::field_access(erase(spec, e.receiver(), std::nullopt, opts), e.def());
    case Expr::Kind::call: {
      const bool drop = can_erase(spec, e, target, opts);
      const auto targets = detail::argument_targets(spec, e, target, !drop, opts);
      std::vector<Expr> args;
      const auto orig = e.args();
      for (std::size_t i = 0; i < orig.size(); ++i)
        args.push_back(erase(spec, orig[i], i < targets.size() ? targets[i] : std::nullopt, opts));
      std::vector<Type> type_args;
      if (!drop) type_args.assign(e.type_args().begin(), e.type_args().end());
      return Expr::call(erase(spec, e.receiver(), std::nullopt, opts), e.def(), std::move(type_args),
                        std::move(args));
    }
  }
  return e;
}

inline Program erase(const ApiSpec& spec, const Program& p, const CheckOptions& opts = {}) {
  Program out;
  out.metadata = p.metadata;
  for (const Expr& s : p.statements) out.statements.push_back(erase(spec, s, std::nullopt, opts));
  return out;
}

/// Number of calls whose type arguments were dropped between `before` and `after`.
inline std::size_t erased_call_count(const Expr& before, const Expr& after) {
  std::size_t n = (before.is_call() && !before.type_args().empty() && after.type_args().empty()) ? 1 : 0;
  const bool has_children = before.is_call() || before.is_field_access() || before.is_local_var();
  if (!has_children) return n;
  if (before.is_local_var()) return n + erased_call_count(before.rhs(), after.rhs());
  n += erased_call_count(before.receiver(), after.receiver());
  const auto a = before.args();
  const auto b = after.args();
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) n += erased_call_count(a[i], b[i]);
  return n;
}

}  // namespace apifuzz
