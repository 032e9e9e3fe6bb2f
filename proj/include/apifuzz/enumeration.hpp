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

// Typing sequences: the receiver, argument and expected types of one use of
// an API definition. Well-typed sequences come from the product of subtype
// sets (receiver, arguments) and the supertype set (expected type);
// ill-typed ones corrupt a slot with an incompatible type.

#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "apifuzz/api.hpp"
#include "apifuzz/expr.hpp"
#include "apifuzz/graph.hpp"
#include "apifuzz/instantiate.hpp"
#include "apifuzz/rng.hpp"
#include "apifuzz/type.hpp"
#include "apifuzz/typing.hpp"

namespace apifuzz {

struct ApiSignature {
  std::optional<Type> receiver;  // absent for sourceless definitions
  std::vector<Type> params;
  Type return_type;
};

inline ApiSignature signature_of(const ApiGraph& g, DefId id) {
  const ApiDef& d = g.spec().def(id);
  ApiSignature sig;
  if (const std::size_t r = g.receiver_of(id); r != ApiGraph::npos) sig.receiver = g.node(r).type;
  for (const Param& p : d.params) sig.params.push_back(p.type);
  sig.return_type = d.type;
  return sig;
}

struct TypingSequence {
  DefId def;
  std::optional<Type> receiver;
  std::vector<Type> args;
  Type expected;
  Substitution sub;
  bool well_typed = true;
  std::optional<Slot> faulted;  // set for ill-typed sequences

  friend bool operator==(const TypingSequence&, const TypingSequence&) = default;
};

/// `⟨A, B, B⟩`-style rendering; an absent receiver prints as `-`.
inline std::string to_string(const TypingSequence& s) {
  std::string out = "<";
  out += s.receiver ? to_string(*s.receiver) : "-";
  for (const Type& a : s.args) out += ", " + to_string(a);
  out += ", " + to_string(s.expected) + ">";
  return out;
}

struct EnumCaps {
  std::size_t max_sequences = 500;
  std::size_t incompatible_per_slot = 5;
  bool multi_fault = false;
  /// Nesting depth for type parameters not fixed by the slot type.
  int free_depth = 1;
};

/// Signature types after applying the definition's substitution.
struct InstantiatedSignature {
  std::optional<Type> receiver;
  std::vector<Type> params;
  Type return_type;
};

inline InstantiatedSignature instantiate_signature(const ApiSignature& sig, const Substitution& sub) {
  InstantiatedSignature out;
  if (sig.receiver) out.receiver = apply(sub, *sig.receiver);
  for (const Type& p : sig.params) out.params.push_back(apply(sub, p));
  out.return_type = apply(sub, sig.return_type);
  return out;
}

/// First slot whose relation fails, checked receiver, arguments, expected.
/// Absent exactly when the sequence is well typed against the signature.
inline std::optional<Slot> first_violation(const ApiSpec& spec, const InstantiatedSignature& sig,
                                           const TypingSequence& s) {
  if (sig.receiver.has_value() != s.receiver.has_value()) return Slot::receiver();
  if (s.receiver && !is_subtype(spec, *s.receiver, *sig.receiver)) return Slot::receiver();
  if (s.args.size() != sig.params.size()) return Slot::argument(std::min(s.args.size(), sig.params.size()));
  for (std::size_t i = 0; i < s.args.size(); ++i)
    if (!is_subtype(spec, s.args[i], sig.params[i])) return Slot::argument(i);
  if (!is_subtype(spec, sig.return_type, s.expected)) return Slot::expected();
  return std::nullopt;
}

namespace detail {

// k distinct uniform indices from [0, n), ascending (Floyd's algorithm).
inline std::vector<std::uint64_t> sample_indices(std::uint64_t n, std::size_t k, Rng& rng) {
  std::set<std::uint64_t> chosen;
  for (std::uint64_t j = n - k; j < n; ++j) {
    const std::uint64_t t = j == UINT64_MAX ? rng() : static_cast<std::uint64_t>(uniform_index(rng, j + 1));
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  return {chosen.begin(), chosen.end()};
}

inline std::vector<Type> slot_subtypes(const ApiSpec& spec, const Type& t, Rng& rng, int free_depth) {
  std::vector<Type> out = subtypes_of(spec, t, rng, free_depth);
  // Keep the slot itself available when it is not a spec class (Top).
  if (out.empty() && !t.is_bottom() && t.is_ground()) out.push_back(t);
  return out;
}

inline std::vector<Type> slot_supertypes(const ApiSpec& spec, const Type& t) {
  std::vector<Type> out = supertypes_of(spec, t);
  if (out.empty() && t.is_ground()) out.push_back(t);
  return out;
}

}  // namespace detail

/// Every combination of receiver subtypes, argument subtypes and expected
/// supertypes. Products above caps.max_sequences are sampled uniformly.
inline std::vector<TypingSequence> enumerate_well_typed(const ApiSpec& spec, const ApiGraph& g, DefId id,
                                                        const Substitution& sub, const EnumCaps& caps,
                                                        Rng& rng) {
  const InstantiatedSignature sig = instantiate_signature(signature_of(g, id), sub);
  // Slot order: receiver (if any), arguments, expected. Receiver varies fastest.
  std::vector<std::vector<Type>> sets;
  if (sig.receiver) sets.push_back(detail::slot_subtypes(spec, *sig.receiver, rng, caps.free_depth));
  for (const Type& p : sig.params) sets.push_back(detail::slot_subtypes(spec, p, rng, caps.free_depth));
  sets.push_back(detail::slot_supertypes(spec, sig.return_type));

  std::uint64_t total = 1;
  bool overflow = false;
  for (const auto& s : sets) {
    if (s.empty()) return {};
    if (total > UINT64_MAX / s.size()) overflow = true;
    else total *= s.size();
  }

  auto decode = [&](std::uint64_t index) {
    std::vector<std::size_t> pick(sets.size());
    for (std::size_t i = 0; i < sets.size(); ++i) {
      pick[i] = static_cast<std::size_t>(index % sets[i].size());
      index /= sets[i].size();
    }
    return pick;
  };
  auto make = [&](const std::vector<std::size_t>& pick) {
    TypingSequence s;
    s.def = id;
    s.sub = sub;
    std::size_t i = 0;
    if (sig.receiver) s.receiver = sets[i][pick[i]], ++i;
    for (std::size_t a = 0; a < sig.params.size(); ++a, ++i) s.args.push_back(sets[i][pick[i]]);
    s.expected = sets[i][pick[i]];
    return s;
  };

  std::vector<TypingSequence> out;
  if (!overflow && total <= caps.max_sequences) {
    for (std::uint64_t k = 0; k < total; ++k) out.push_back(make(decode(k)));
  } else if (!overflow) {
    for (std::uint64_t k : detail::sample_indices(total, caps.max_sequences, rng)) out.push_back(make(decode(k)));
  } else {
    std::set<std::vector<std::size_t>> seen;
    while (out.size() < caps.max_sequences) {
      std::vector<std::size_t> pick(sets.size());
      for (std::size_t i = 0; i < sets.size(); ++i) pick[i] = uniform_index(rng, sets[i].size());
      if (seen.insert(pick).second) out.push_back(make(pick));
    }
  }
  return out;
}

/// Types ill-typed slots draw from: each simple class, one instance of each
/// generic class, and same-constructor variants of `near` with one argument
/// replaced, which probe argument invariance.
inline std::vector<Type> fault_universe(const ApiSpec& spec, const Type& near, Rng& rng, int free_depth) {
  std::vector<Type> out;
  auto push = [&](Type t) {
    if (t.is_ground() && std::find(out.begin(), out.end(), t) == out.end()) out.push_back(std::move(t));
  };
  for (const ClassDecl& c : spec.classes()) {
    if (!c.is_generic()) {
      push(Type::class_type(c.name));
    } else if (auto s = draw_substitution(spec, c.type_params, free_depth, rng)) {
      push(apply(*s, c.self_type()));
    }
  }
  if (near.is_instance()) {
    const ClassDecl& c = spec.class_named(near.name());
    std::vector<Type> args(near.args().begin(), near.args().end());
    for (std::size_t i = 0; i < args.size(); ++i) {
      Instantiator inst(spec, &rng);
      auto other = inst.draw_type(std::max(0, free_depth - 1));
      if (!other || *other == args[i]) continue;
      std::vector<Type> changed = args;
      changed[i] = *other;
      Substitution s;
      for (std::size_t k = 0; k < c.type_params.size(); ++k) s.bind(c.type_params[k].id, changed[k]);
      if (is_valid(spec, s)) push(Type::instance(near.name(), std::move(changed)));
    }
  }
  return out;
}

/// Sequences that violate the signature. Each corrupts one slot (or several
/// with caps.multi_fault) while the rest keep the tightest well-typed type.
/// A faulted receiver is unrelated to the expected receiver type and cannot
/// resolve the member at all.
inline std::vector<TypingSequence> enumerate_ill_typed(const ApiSpec& spec, const ApiGraph& g, DefId id,
                                                       const Substitution& sub, const EnumCaps& caps,
                                                       Rng& rng) {
  const InstantiatedSignature sig = instantiate_signature(signature_of(g, id), sub);
  TypingSequence base;
  base.def = id;
  base.sub = sub;
  base.receiver = sig.receiver;
  base.args = sig.params;
  base.expected = sig.return_type;
  base.well_typed = false;

  struct SlotFaults {
    Slot slot;
    std::vector<Type> types;
  };
  std::vector<SlotFaults> faults;
  auto pick = [&](const Type& near, auto&& incompatible) {
    std::vector<Type> universe = fault_universe(spec, near, rng, caps.free_depth);
    shuffle(std::span<Type>(universe), rng);
    std::vector<Type> chosen;
    for (Type& t : universe) {
      if (chosen.size() >= caps.incompatible_per_slot) break;
      if (incompatible(t)) chosen.push_back(std::move(t));
    }
    return chosen;
  };
  if (sig.receiver) {
    const Type& r = *sig.receiver;
    faults.push_back({Slot::receiver(), pick(r, [&](const Type& t) {
                        return !is_subtype(spec, t, r) && !is_subtype(spec, r, t) &&
                               !lookup_member(spec, t, id).has_value();
                      })});
  }
  for (std::size_t i = 0; i < sig.params.size(); ++i) {
    const Type& p = sig.params[i];
    faults.push_back({Slot::argument(i), pick(p, [&](const Type& t) { return !is_subtype(spec, t, p); })});
  }
  faults.push_back({Slot::expected(), pick(sig.return_type, [&](const Type& t) {
                      return !is_subtype(spec, sig.return_type, t);
                    })});

  auto set_slot = [](TypingSequence& s, const Slot& slot, const Type& t) {
    switch (slot.kind) {
      case Slot::Kind::receiver: s.receiver = t; break;
      case Slot::Kind::argument: s.args[slot.index] = t; break;
      default: s.expected = t; break;
    }
  };

  std::vector<TypingSequence> out;
  for (const SlotFaults& f : faults) {
    for (const Type& t : f.types) {
      TypingSequence s = base;
      set_slot(s, f.slot, t);
      s.faulted = f.slot;
      if (caps.multi_fault) {
        // Corrupt the other slots independently; blame goes to the first one
        // a checker visits.
        for (const SlotFaults& other : faults) {
          if (other.slot == f.slot || other.types.empty() || !coin(rng)) continue;
          set_slot(s, other.slot, other.types[uniform_index(rng, other.types.size())]);
          if (other.slot < *s.faulted) s.faulted = other.slot;
        }
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace apifuzz
