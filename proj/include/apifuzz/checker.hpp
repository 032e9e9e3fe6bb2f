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

// Reference type checker for API-IR programs.
//
//   ε                : ⊥
//   constant(t)      : t
//   e.f              : σt        where lookup of f on type(e) gives (t, σ)
//   e.m<t̄>(ē)        : σt        σ = lookup σ ∪ [ᾱ ↦ t̄], type(ē) <: σp̄
//   local var x: t = e           type(e) <: t
//
// Calls without explicit type arguments to polymorphic functions are
// inferred locally: first from the target type against the return type,
// then from each argument against its parameter. Conflicts or unbound
// variables reject the call.

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "apifuzz/api.hpp"
#include "apifuzz/expr.hpp"
#include "apifuzz/type.hpp"
#include "apifuzz/typing.hpp"

namespace apifuzz {

struct CheckOptions {
  LookupOptions lookup;
};

struct Verdict {
  bool well_typed = true;
  std::size_t statement = 0;  // index of the failing statement
  Slot slot;                  // position in that statement's outermost use
  std::string reason;
  std::vector<std::string> warnings;

  explicit operator bool() const { return well_typed; }
};

namespace detail {

class Checker {
 public:
  Checker(const ApiSpec& spec, const CheckOptions& opts) : spec_(spec), opts_(opts) {}

  struct Typed {
    Type type;
    Expr elaborated;  // inferred type arguments filled in
    Substitution call_sub;  // for calls: the callee's call type parameters
  };

  // `blame` is the slot errors inside this expression are attributed to;
  // absent for the statement's outermost use, whose own slots apply.
  std::optional<Typed> infer(const Expr& e, const std::optional<Type>& target,
                             const std::optional<Slot>& blame) {
    switch (e.kind()) {
      case Expr::Kind::empty: return Typed{Type::bottom(), e, {}};
      case Expr::Kind::constant:
        if (!resolvable(e.type())) return fail(blame.value_or(Slot::expected()), "unresolvable constant type " + to_string(e.type()));
        return Typed{e.type(), e, {}};
      case Expr::Kind::field_access: return infer_field(e, blame);
      case Expr::Kind::call: return infer_call(e, target, blame);
      case Expr::Kind::local_var: {
        if (!resolvable(e.type())) return fail(Slot::expected(), "unresolvable declared type " + to_string(e.type()));
        auto rhs = infer(e.rhs(), e.type(), blame);
        if (!rhs) return std::nullopt;
        if (!is_subtype(spec_, rhs->type, e.type()))
          return fail(Slot::expected(), to_string(rhs->type) + " is incompatible to " + to_string(e.type()) +
                                            " in local var " + e.name());
        return Typed{Type::bottom(), Expr::local_var(e.name(), e.type(), std::move(rhs->elaborated)), {}};
      }
    }
    return std::nullopt;
  }

  const std::optional<std::pair<Slot, std::string>>& error() const { return error_; }
  std::vector<std::string>& warnings() { return warnings_; }
  void reset_error() { error_.reset(); }

 private:
  std::nullopt_t fail(Slot slot, std::string reason) {
    if (!error_) error_ = std::make_pair(slot, std::move(reason));
    return std::nullopt;
  }

  bool resolvable(const Type& t) const {
    switch (t.kind()) {
      case Type::Kind::variable: return false;
      case Type::Kind::class_type:
      case Type::Kind::instance: {
        const ClassDecl* c = spec_.find_class(t.name());
        if (!c || c->type_params.size() != t.args().size()) return false;
        for (const Type& a : t.args())
          if (!resolvable(a)) return false;
        return true;
      }
      default: return true;
    }
  }

  static Slot nested(const std::optional<Slot>& blame, Slot own) { return blame.value_or(own); }

  std::string def_name(const ApiDef& d) const {
    return (d.owner ? *d.owner + "." : std::string()) + d.name;
  }

  std::optional<Typed> infer_field(const Expr& e, const std::optional<Slot>& blame) {
    const ApiDef* d = spec_.find_def(e.def());
    if (!d) throw ResolutionError("unknown definition id " + std::to_string(e.def().value));
    if (!d->is_field()) return fail(nested(blame, Slot::receiver()), def_name(*d) + " is not a field");
    if (e.receiver().is_empty()) {
      if (d->is_instance_member())
        return fail(nested(blame, Slot::receiver()), "instance field " + def_name(*d) + " needs a receiver");
      if (!d->type.is_ground())
        return fail(nested(blame, Slot::receiver()), "static field " + def_name(*d) + " has an open type");
      return Typed{d->type, e, {}};
    }
    auto recv = infer(e.receiver(), std::nullopt, nested(blame, Slot::receiver()));
    if (!recv) return std::nullopt;
    auto lk = lookup_member(spec_, recv->type, d->id, opts_.lookup);
    if (!lk) return fail(nested(blame, Slot::receiver()), "type " + to_string(recv->type) + " has no field " + d->name);
    return Typed{apply(lk->sub, d->type), Expr::field_access(std::move(recv->elaborated), d->id), {}};
  }

  std::optional<Typed> infer_call(const Expr& e, const std::optional<Type>& target,
                                  const std::optional<Slot>& blame) {
    const ApiDef* d = spec_.find_def(e.def());
    if (!d) throw ResolutionError("unknown definition id " + std::to_string(e.def().value));
    if (!d->is_function()) return fail(nested(blame, Slot::receiver()), def_name(*d) + " is not a function");

    Substitution lookup_sub;
    std::optional<Expr> recv_elab;
    if (e.receiver().is_empty()) {
      if (d->is_instance_member())
        return fail(nested(blame, Slot::receiver()), "instance method " + def_name(*d) + " needs a receiver");
      recv_elab = e.receiver();
    } else {
      if (!d->is_instance_member())
        return fail(nested(blame, Slot::receiver()), def_name(*d) + " cannot be called on a receiver");
      auto recv = infer(e.receiver(), std::nullopt, nested(blame, Slot::receiver()));
      if (!recv) return std::nullopt;
      auto lk = lookup_method(spec_, recv->type, d->id, opts_.lookup);
      if (!lk)
        return fail(nested(blame, Slot::receiver()),
                    "type " + to_string(recv->type) + " has no method " + d->name);
      lookup_sub = std::move(lk->sub);
      recv_elab = std::move(recv->elaborated);
    }

    const std::vector<TypeParam> params = spec_.call_type_params(*d);
    const auto args = e.args();
    if (args.size() != d->params.size())
      return fail(nested(blame, Slot::argument(std::min(args.size(), d->params.size()))),
                  def_name(*d) + " expects " + std::to_string(d->params.size()) + " argument(s), got " +
                      std::to_string(args.size()));

    Substitution sub = lookup_sub;
    Substitution call_sub;
    std::vector<Expr> arg_elab;
    std::vector<Type> arg_types;

    if (!e.type_args().empty() || params.empty()) {
      if (e.type_args().size() != params.size())
        return fail(nested(blame, Slot::type_arguments()),
                    def_name(*d) + " expects " + std::to_string(params.size()) + " type argument(s), got " +
                        std::to_string(e.type_args().size()));
      for (std::size_t i = 0; i < params.size(); ++i) {
        const Type& t = e.type_args()[i];
        if (!resolvable(t))
          return fail(nested(blame, Slot::type_arguments()), "unresolvable type argument " + to_string(t));
        if (const Type* prev = sub.find(params[i].id); prev && *prev != t)
          warnings_.push_back("explicit type argument " + to_string(t) + " overrides " + to_string(*prev) +
                              " for " + std::string(params[i].name()) + " in " + def_name(*d));
        sub.bind(params[i].id, t);
        call_sub.bind(params[i].id, t);
      }
      if (auto bad = violated_bound(params, sub))
        return fail(nested(blame, Slot::type_arguments()), *bad);
      for (std::size_t i = 0; i < args.size(); ++i) {
        const Type formal = apply(sub, d->params[i].type);
        auto a = infer(args[i], formal, nested(blame, Slot::argument(i)));
        if (!a) return std::nullopt;
        arg_types.push_back(a->type);
        arg_elab.push_back(std::move(a->elaborated));
      }
    } else {
      // Local inference: target against the return type, then arguments.
      Substitution inferred;
      if (target && !target->is_top()) {
        if (auto u = unify(spec_, *target, apply(lookup_sub, d->type)))
          inferred = restrict(*u, params);
      }
      const Substitution from_target = inferred;
      // Arguments see what the receiver and the target fix, nothing more.
      Substitution known = lookup_sub;
      for (const auto& [v, t] : inferred) known.bind(v, t);
      for (std::size_t i = 0; i < args.size(); ++i) {
        const Type formal = apply(lookup_sub, d->params[i].type);
        const Type arg_target = apply(known, formal);
        auto a = infer(args[i], arg_target.is_ground() ? std::optional<Type>(arg_target) : std::nullopt,
                       nested(blame, Slot::argument(i)));
        if (!a) return std::nullopt;
        if (auto u = unify_super(spec_, a->type, formal)) {
          // What the target fixed only needs the subtype check below.
          Substitution fresh;
          for (const auto& [v, t] : restrict(*u, params))
            if (!from_target.contains(v)) fresh.bind(v, t);
          auto merged = merge(inferred, fresh);
          if (!merged)
            return fail(nested(blame, Slot::type_arguments()),
                        "conflicting inferred type arguments for " + def_name(*d));
          inferred = std::move(*merged);
        }
        arg_types.push_back(a->type);
        arg_elab.push_back(std::move(a->elaborated));
      }
      for (const TypeParam& p : params) {
        if (!inferred.contains(p.id))
          return fail(nested(blame, Slot::type_arguments()),
                      "cannot infer type argument " + std::string(p.name()) + " of " + def_name(*d));
      }
      for (const auto& [v, t] : inferred) sub.bind(v, t);
      call_sub = std::move(inferred);
      if (auto bad = violated_bound(params, sub))
        return fail(nested(blame, Slot::type_arguments()), *bad);
    }

    for (std::size_t i = 0; i < args.size(); ++i) {
      const Type formal = apply(sub, d->params[i].type);
      if (!is_subtype(spec_, arg_types[i], formal))
        return fail(nested(blame, Slot::argument(i)),
                    to_string(arg_types[i]) + " is incompatible to " + to_string(formal) + " in argument " +
                        std::to_string(i) + " of " + def_name(*d));
    }

    // Elaborated calls always carry their type arguments.
    std::vector<Type> type_args;
    for (const TypeParam& p : params) type_args.push_back(apply(sub, p.type()));
    Expr elab = Expr::call(std::move(*recv_elab), d->id, std::move(type_args), std::move(arg_elab));
    return Typed{apply(sub, d->type), std::move(elab), std::move(call_sub)};
  }

  std::optional<std::string> violated_bound(const std::vector<TypeParam>& params, const Substitution& sub) const {
    for (const TypeParam& p : params) {
      if (p.bound.is_top()) continue;
      const Type t = apply(sub, p.type());
      const Type b = apply(sub, p.bound);
      if (!is_subtype(spec_, t, b))
        return "type argument " + to_string(t) + " for " + std::string(p.name()) + " violates bound " +
               to_string(b);
    }
    return std::nullopt;
  }

  static Substitution restrict(const Substitution& s, const std::vector<TypeParam>& params) {
    Substitution out;
    for (const TypeParam& p : params)
      if (const Type* t = s.find(p.id)) out.bind(p.id, *t);
    return out;
  }

  const ApiSpec& spec_;
  const CheckOptions& opts_;
  std::optional<std::pair<Slot, std::string>> error_;
  std::vector<std::string> warnings_;
};

}  // namespace detail

/// Type-checks every statement; the first failing premise is reported.
inline Verdict check(const ApiSpec& spec, const Program& p, const CheckOptions& opts = {}) {
  detail::Checker c(spec, opts);
  Verdict v;
  for (std::size_t i = 0; i < p.statements.size(); ++i) {
    if (c.infer(p.statements[i], std::nullopt, std::nullopt)) continue;
    v.well_typed = false;
    v.statement = i;
    if (c.error()) {
      v.slot = c.error()->first;
      v.reason = c.error()->second;
    }
    break;
  }
  v.warnings = std::move(c.warnings());
  return v;
}

/// Type of a single expression checked against an optional target.
inline std::optional<Type> type_of(const ApiSpec& spec, const Expr& e,
                                   const std::optional<Type>& target = std::nullopt,
                                   const CheckOptions& opts = {}) {
  detail::Checker c(spec, opts);
  auto r = c.infer(e, target, std::nullopt);
  if (!r) return std::nullopt;
  return r->type;
}

/// Type arguments local inference assigns to `call`, whose own type
/// argument list is empty. Absent when inference fails.
inline std::optional<Substitution> infer_call(const ApiSpec& spec, const Expr& call,
                                              const std::optional<Type>& target,
                                              const CheckOptions& opts = {}) {
  if (!call.is_call()) return std::nullopt;
  detail::Checker c(spec, opts);
  const Expr bare = call.type_args().empty() ? call : call.with_type_args({});
  auto r = c.infer(bare, target, std::nullopt);
  if (!r) return std::nullopt;
  return r->call_sub;
}

/// The program with every inferred type argument written out; absent when
/// the program does not type-check.
inline std::optional<Program> elaborate(const ApiSpec& spec, const Program& p, const CheckOptions& opts = {}) {
  detail::Checker c(spec, opts);
  Program out;
  out.metadata = p.metadata;
  for (const Expr& s : p.statements) {
    auto r = c.infer(s, std::nullopt, std::nullopt);
    if (!r) return std::nullopt;
    out.statements.push_back(std::move(r->elaborated));
  }
  return out;
}

}  // namespace apifuzz
