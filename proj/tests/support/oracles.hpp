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

// Independent reference computations used by property tests.

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "apifuzz/campaign.hpp"
#include "apifuzz/checker.hpp"
#include "apifuzz/enumeration.hpp"
#include "apifuzz/erasure.hpp"
#include "apifuzz/graph.hpp"
#include "apifuzz/ingest.hpp"
#include "apifuzz/inhabitants.hpp"
#include "apifuzz/instantiate.hpp"
#include "random_spec.hpp"

namespace apifuzz::testing {

// One-way structural matching: variables of `pattern` bind to subterms of
// `target`, consistently.
inline bool match_pattern(const Type& pattern, const Type& target, std::map<std::string, Type>& bindings) {
  if (pattern.is_variable()) {
    auto [it, inserted] = bindings.emplace(pattern.name(), target);
    return inserted || it->second == target;
  }
  if (pattern.kind() != target.kind() || pattern.name() != target.name()) return false;
  if (pattern.args().size() != target.args().size()) return false;
  for (std::size_t i = 0; i < pattern.args().size(); ++i)
    if (!match_pattern(pattern.args()[i], target.args()[i], bindings)) return false;
  return true;
}

inline Type substitute(const Type& t, const std::map<std::string, Type>& s) {
  if (t.is_variable()) {
    auto it = s.find(t.name());
    return it == s.end() ? t : it->second;
  }
  if (!t.is_instance()) return t;
  std::vector<Type> args;
  for (const Type& a : t.args()) args.push_back(substitute(a, s));
  return Type::instance(t.name(), std::move(args));
}

/// Result type of the call chain along `nodes`: each member's owner
/// parameters are bound positionally to the arguments of the value it is
/// invoked on.
inline std::optional<Type> chain_type(const ApiGraph& g, const std::vector<std::size_t>& nodes) {
  const ApiSpec& spec = g.spec();
  std::optional<Type> cur;
  for (std::size_t n : nodes) {
    const GraphNode& node = g.node(n);
    if (node.is_type()) continue;
    const ApiDef& d = spec.def(node.def);
    if (!cur) {
      cur = d.type;
      continue;
    }
    const ClassDecl& owner = spec.class_named(*d.owner);
    if (cur->name() != owner.name || cur->args().size() != owner.type_params.size()) return std::nullopt;
    std::map<std::string, Type> s;
    for (std::size_t i = 0; i < owner.type_params.size(); ++i) s[owner.type_params[i].id] = cur->args()[i];
    cur = substitute(d.type, s);
  }
  return cur;
}

/// Every simple path from a def node without incoming edges to `target`.
inline std::set<std::vector<std::size_t>> all_simple_paths(const ApiGraph& g, std::size_t target) {
  std::set<std::vector<std::size_t>> out;
  std::vector<std::size_t> path;
  std::vector<char> on(g.nodes().size(), 0);
  std::function<void(std::size_t)> dfs = [&](std::size_t n) {
    path.push_back(n);
    on[n] = 1;
    if (n == target) {
      out.insert(path);
    } else {
      for (std::size_t e : g.out_edges(n)) {
        const std::size_t to = g.edges()[e].to;
        if (!on[to]) dfs(to);
      }
    }
    on[n] = 0;
    path.pop_back();
  };
  for (std::size_t s = 0; s < g.nodes().size(); ++s)
    if (!g.node(s).is_type() && g.in_edges(s).empty()) dfs(s);
  return out;
}

/// Feasible paths to `t` by brute force: simple paths whose chain type can
/// be instantiated to exactly `t`.
inline std::set<std::vector<std::size_t>> brute_force_feasible(const ApiGraph& g, const Type& t) {
  std::set<std::vector<std::size_t>> out;
  const std::size_t target = g.type_node(decompose(g.spec(), t).base);
  if (target == ApiGraph::npos) return out;
  for (const auto& p : all_simple_paths(g, target)) {
    auto ct = chain_type(g, p);
    std::map<std::string, Type> b;
    if (ct && match_pattern(*ct, t, b)) out.insert(p);
  }
  return out;
}

struct PropertyTally {
  std::size_t trials = 0;
  std::size_t checks = 0;
  std::size_t excluded = 0;  // erased ill-typed programs found well typed
  std::vector<std::string> violations;

  void fail(std::string msg) {
    if (violations.size() < 20) violations.push_back(std::move(msg));
    else if (violations.size() == 20) violations.push_back("...");
  }
  bool ok() const { return violations.empty(); }
};

inline EnumCaps property_caps() {
  EnumCaps caps;
  caps.max_sequences = 12;
  caps.incompatible_per_slot = 3;
  return caps;
}

/// Well-typed realizations pass the checker; single-fault ill-typed ones
/// fail it with blame on the faulted slot.
inline void agreement_trial(std::uint64_t seed, PropertyTally& tally) {
  Rng rng = derive_rng(seed, 1);
  const ApiSpec raw = random_spec(rng);
  const ApiSpec spec = skip_unusable(raw, 2).spec;
  const ApiGraph g(spec);
  InhabitantSearch search(g, rng);
  ++tally.trials;
  for (const ApiDef& d : spec.defs()) {
    auto sub = draw_substitution(spec, spec.all_type_params(d), 2, rng);
    if (!sub) {
      tally.fail("seed " + std::to_string(seed) + ": no substitution for kept def " + d.name);
      continue;
    }
    for (const TypingSequence& s : enumerate_well_typed(spec, g, d.id, *sub, property_caps(), rng)) {
      const Program p = search.realize(s);
      const Verdict v = check(spec, p);
      ++tally.checks;
      if (!v)
        tally.fail("seed " + std::to_string(seed) + ": well-typed " + to_string(s) + " rejected: " + v.reason +
                   " in " + print_ir(spec, p));
    }
    for (const TypingSequence& s : enumerate_ill_typed(spec, g, d.id, *sub, property_caps(), rng)) {
      const Program p = search.realize(s);
      const Verdict v = check(spec, p);
      ++tally.checks;
      if (v)
        tally.fail("seed " + std::to_string(seed) + ": ill-typed " + to_string(s) + " accepted: " + print_ir(spec, p));
      else if (s.faulted && v.slot != *s.faulted)
        tally.fail("seed " + std::to_string(seed) + ": " + to_string(s) + " blamed " + to_string(v.slot) +
                   " instead of " + to_string(*s.faulted) + ": " + print_ir(spec, p));
    }
  }
}

/// Erased well-typed programs still check and elaborate back to the
/// original; erased ill-typed programs that became well typed never reach
/// the campaign's output.
inline void erasure_trial(std::uint64_t seed, PropertyTally& tally) {
  Rng rng = derive_rng(seed, 2);
  const ApiSpec raw = random_spec(rng);
  const ApiSpec spec = skip_unusable(raw, 2).spec;
  const ApiGraph g(spec);
  InhabitantSearch search(g, rng);
  ++tally.trials;
  for (const ApiDef& d : spec.defs()) {
    auto sub = draw_substitution(spec, spec.all_type_params(d), 2, rng);
    if (!sub) continue;
    for (const TypingSequence& s : enumerate_well_typed(spec, g, d.id, *sub, property_caps(), rng)) {
      const Program p = search.realize(s);
      if (!check(spec, p)) continue;  // covered by the agreement property
      const Program e = erase(spec, p);
      ++tally.checks;
      const Verdict v = check(spec, e);
      if (!v) {
        tally.fail("seed " + std::to_string(seed) + ": erased program rejected: " + print_ir(spec, e) + " (" +
                   v.reason + ")");
        continue;
      }
      auto back = elaborate(spec, e);
      if (!back || back->statements != p.statements)
        tally.fail("seed " + std::to_string(seed) + ": type arguments not recovered: " + print_ir(spec, p) +
                   " erased to " + print_ir(spec, e) +
                   (back ? " elaborated to " + print_ir(spec, *back) : std::string(" (no elaboration)")));
    }
    for (const TypingSequence& s : enumerate_ill_typed(spec, g, d.id, *sub, property_caps(), rng)) {
      const Program p = search.realize(s);
      if (check(spec, p)) continue;
      if (check(spec, erase(spec, p))) ++tally.excluded;
    }
  }
  CampaignConfig cfg;
  cfg.no_compile = true;
  cfg.write_programs = false;
  cfg.modes = {Mode::ill_erased};
  cfg.caps = property_caps();
  cfg.seed = seed;
  const Campaign campaign(raw, cfg);
  for (const ApiDef& d : campaign.spec().defs()) {
    for (const SynthesizedProgram& sp : campaign.synthesize(d).programs) {
      ++tally.checks;
      if (check(campaign.spec(), sp.program))
        tally.fail("seed " + std::to_string(seed) + ": campaign kept well-typed erased program " +
                   print_ir(campaign.spec(), sp.program));
    }
  }
}

/// Random small graphs: the feasible-path search with no limits returns
/// exactly the brute-force feasible set.
inline void path_trial(std::uint64_t seed, PropertyTally& tally, std::size_t max_nodes = 12) {
  Rng rng = derive_rng(seed, 3);
  RandomSpecOptions o;
  o.bounded = 0;
  o.type_depth = 1;
  std::optional<ApiSpec> spec;
  for (int attempt = 0; attempt < 50 && !spec; ++attempt) {
    ApiSpec s = random_spec(rng, o);
    if (ApiGraph(s).nodes().size() <= max_nodes) spec = std::move(s);
  }
  if (!spec) return;
  const ApiGraph g(*spec);
  ++tally.trials;
  InhabitantOptions opts;
  opts.path_limit = 0;
  opts.paths_per_source = 0;
  InhabitantSearch search(g, rng, opts);
  for (std::size_t n = 0; n < g.nodes().size(); ++n) {
    if (!g.node(n).is_type()) continue;
    const ClassDecl& c = spec->class_named(g.node(n).type.name());
    // A few ground targets per constructor, biased toward simple arguments.
    for (int k = 0; k < 3; ++k) {
      Instantiator inst(*spec, &rng);
      auto full = inst.complete(c.type_params, Substitution{}, k == 0 ? 0 : 1);
      if (!full) continue;
      const Type t = apply(*full, c.self_type());
      std::set<std::vector<std::size_t>> got;
      for (const FeasiblePath& fp : search.find_api_paths(t))
        if (!fp.trivial()) got.insert(fp.path.nodes);
      const auto want = brute_force_feasible(g, t);
      ++tally.checks;
      if (got != want)
        tally.fail("seed " + std::to_string(seed) + ": target " + to_string(t) + ": search found " +
                   std::to_string(got.size()) + " feasible paths, brute force " + std::to_string(want.size()));
    }
  }
}

}  // namespace apifuzz::testing
