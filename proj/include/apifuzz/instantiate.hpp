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

// Choosing concrete types for type variables.
//
// Candidates are the spec's classes; generic classes are instantiated
// recursively, so depth 0 admits only simple types, depth 1 admits List<Int>
// and depth 2 admits List<List<Int>>. The search backtracks over bound
// failures (F-bounds included) within a work budget.

#pragma once

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "apifuzz/api.hpp"
#include "apifuzz/rng.hpp"
#include "apifuzz/type.hpp"
#include "apifuzz/typing.hpp"

namespace apifuzz {

class Instantiator {
 public:
  static constexpr std::size_t kDefaultBudget = 20000;

  /// With a null `rng` candidates are tried in declaration order, which makes
  /// the search exhaustive up to the budget.
  Instantiator(const ApiSpec& spec, Rng* rng, std::size_t budget = kDefaultBudget)
      : spec_(spec), rng_(rng), budget_(budget) {}

  /// Extends `seed` so every variable in `vars` is bound to a ground type of
  /// nesting depth <= `depth` and the result is valid. Absent when no such
  /// extension exists or the budget runs out.
  std::optional<Substitution> complete(std::span<const TypeParam> vars, Substitution seed, int depth) {
    std::optional<Substitution> found;
    each_completion(vars, 0, seed, depth, [&](const Substitution& s) {
      if (!is_valid(spec_, s)) return false;
      found = s;
      return true;
    });
    return found;
  }

  /// One ground type (nesting <= depth) that is a subtype of `bound`.
  std::optional<Type> draw_type(int depth, const Type& bound = Type::top()) {
    std::optional<Type> found;
    each_type(depth, bound, [&](const Type& t) {
      if (!bound.is_top() && !is_subtype(spec_, t, bound)) return false;
      found = t;
      return true;
    });
    return found;
  }

  bool exhausted() const { return exhausted_; }

 private:
  using SubstitutionSink = std::function<bool(const Substitution&)>;
  using TypeSink = std::function<bool(const Type&)>;

  bool each_completion(std::span<const TypeParam> vars, std::size_t i, Substitution& sub, int depth,
                       const SubstitutionSink& f) {
    while (i < vars.size() && sub.contains(vars[i].id)) ++i;
    if (i == vars.size()) return f(sub);
    const TypeParam& v = vars[i];
    const Type hint = apply(sub, v.bound);
    return each_type(depth, hint.is_ground() ? hint : Type::top(), [&](const Type& t) {
      sub.bind(v.id, t);
      bool stop = false;
      if (bounds_hold(vars, sub)) stop = each_completion(vars, i + 1, sub, depth, f);
      sub.erase(v.id);
      return stop;
    });
  }

  // Every variable of `vars` bound so far whose bound has become ground.
  bool bounds_hold(std::span<const TypeParam> vars, const Substitution& sub) const {
    for (const TypeParam& p : vars) {
      const Type* t = sub.find(p.id);
      if (!t || p.bound.is_top()) continue;
      const Type b = apply(sub, p.bound);
      if (b.is_ground() && !is_subtype(spec_, *t, b)) return false;
    }
    return true;
  }

  // Calls f with candidate types until it returns true. `hint` (ground or
  // Top) prunes classes that cannot be subtypes of it.
  bool each_type(int depth, const Type& hint, const TypeSink& f) {
    std::vector<std::size_t> order(spec_.classes().size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (rng_) shuffle(std::span<std::size_t>(order), *rng_);
    for (std::size_t ci : order) {
      if (exhausted_) return true;
      const ClassDecl& c = spec_.classes()[ci];
      if (!c.is_generic()) {
        if (!spend()) return true;
        if (f(Type::class_type(c.name))) return true;
        continue;
      }
      if (depth < 1) continue;
      const Type self = c.self_type();
      Substitution seed;
      if (!hint.is_top()) {
        auto u = unify(spec_, hint, self);
        if (!u) continue;
        seed = std::move(*u);
      }
      const auto params = std::span<const TypeParam>(c.type_params);
      const bool stop = each_completion(params, 0, seed, depth - 1, [&](const Substitution& s) {
        if (!spend()) return true;
        Type t = apply(s, self);
        if (!t.is_ground() || t.nesting_depth() > static_cast<std::size_t>(depth)) return false;
        return f(t);
      });
      if (stop) return true;
    }
    return false;
  }

  bool spend() {
    if (budget_ == 0) {
      exhausted_ = true;
      return false;
    }
    --budget_;
    return true;
  }

  const ApiSpec& spec_;
  Rng* rng_;
  std::size_t budget_;
  bool exhausted_ = false;
};

/// A random valid substitution for `vars` with images of nesting <= depth.
/// Absent when the variables cannot be instantiated at this depth.
inline std::optional<Substitution> draw_substitution(const ApiSpec& spec, std::span<const TypeParam> vars,
                                                     int depth, Rng& rng,
                                                     std::size_t budget = Instantiator::kDefaultBudget) {
  Instantiator inst(spec, &rng, budget);
  return inst.complete(vars, Substitution{}, depth);
}

/// Spec-declared ground types that are subtypes of `t`, in declaration order.
/// Each generic class contributes at most one instance; parameters not fixed
/// by `t` are drawn at `free_depth`. Top and Bottom never appear.
inline std::vector<Type> subtypes_of(const ApiSpec& spec, const Type& t, Rng& rng, int free_depth = 1) {
  std::vector<Type> out;
  if (t.is_bottom()) return out;
  auto push = [&](Type c) {
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(std::move(c));
  };
  for (const ClassDecl& c : spec.classes()) {
    if (!c.is_generic()) {
      const Type ct = Type::class_type(c.name);
      if (is_subtype(spec, ct, t)) push(ct);
      continue;
    }
    const Type self = c.self_type();
    Substitution seed;
    if (!t.is_top()) {
      auto u = unify(spec, t, self);
      if (!u) continue;
      seed = std::move(*u);
    }
    Instantiator inst(spec, &rng);
    auto full = inst.complete(c.type_params, std::move(seed), free_depth);
    if (!full) continue;
    Type inst_t = apply(*full, self);
    if (inst_t.is_ground() && is_subtype(spec, inst_t, t)) push(std::move(inst_t));
  }
  return out;
}

/// Transitive supertypes of `t` (itself included) without Top.
inline std::vector<Type> supertypes_of(const ApiSpec& spec, const Type& t) {
  if (t.is_top()) return {};
  std::vector<Type> out;
  for (Type& s : supertype_closure(spec, t))
    if (!s.is_top()) out.push_back(std::move(s));
  return out;
}

}  // namespace apifuzz
