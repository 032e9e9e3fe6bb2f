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

// Type inhabitants: expressions of a requested type built from graph paths.
//
// A path like `mapOf -> Map -> keySet -> Set` is feasible for Set<Int> when
// propagating the edge labels left to right (E -> K -> X) and unifying the
// resulting Set<X> with Set<Int> gives a consistent, valid substitution.
// Variables left open are drawn at random. When no path works the
// inhabitant is `constant(t)`, so every type is inhabited.

#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "apifuzz/api.hpp"
#include "apifuzz/enumeration.hpp"
#include "apifuzz/expr.hpp"
#include "apifuzz/graph.hpp"
#include "apifuzz/instantiate.hpp"
#include "apifuzz/rng.hpp"
#include "apifuzz/typing.hpp"

namespace apifuzz {

struct FeasiblePath {
  GraphPath path;  // no nodes for the trivial path
  Substitution resolved;
  Type target;

  bool trivial() const { return path.nodes.empty(); }
};

struct InhabitantOptions {
  /// Feasible non-trivial paths to collect; 0 means all.
  std::size_t path_limit = 1;
  /// Loopless paths per start node; 0 means all.
  std::size_t paths_per_source = 1;
  bool start_at_type_nodes = false;
  /// Nesting depth for variables the path leaves open.
  int free_depth = 1;
  /// Redraws of open variables before a path counts as infeasible.
  int free_draw_attempts = 4;
  /// Maximum program depth; argument inhabitants at depth 0 are constants.
  int program_depth = 2;
  std::string result_variable = "x";
};

/// Result of the deterministic part of path evaluation.
struct PathEvaluation {
  bool feasible = false;
  Substitution propagated;  // label composition along the path
  Substitution unifier;     // binds what the target fixes
  Type produced;            // the path's result type before unification
};

/// Fresh ids for the owner parameters a constructor or static member takes
/// as call-site type arguments. Without them a call whose result flows into
/// its own owner's type node would alias that node's parameters.
inline Substitution call_site_renaming(const ApiSpec& spec, const ApiDef& d) {
  Substitution r;
  if (!d.owner || d.is_instance_member()) return r;
  for (const TypeParam& p : spec.class_named(*d.owner).type_params) r.bind(p.id, Type::variable(p.id + "@call"));
  return r;
}

/// Every variable a use of the path's definitions must fix, in path order.
/// The leading definition's call-site parameters appear renamed.
inline std::vector<TypeParam> path_type_variables(const ApiGraph& g, const GraphPath& p) {
  std::vector<TypeParam> vars;
  for (std::size_t n : p.nodes) {
    const GraphNode& node = g.node(n);
    if (!node.is_def()) continue;
    const ApiDef& d = g.spec().def(node.def);
    const Substitution rename = call_site_renaming(g.spec(), d);
    for (TypeParam v : g.spec().all_type_params(d)) {
      if (const Type* fresh = rename.find(v.id)) v.id = fresh->name();
      v.bound = apply(rename, v.bound);
      auto same = [&](const TypeParam& w) { return w.id == v.id; };
      if (std::none_of(vars.begin(), vars.end(), same)) vars.push_back(std::move(v));
    }
  }
  return vars;
}

/// Propagates edge labels left to right and unifies the produced type with `t`.
inline PathEvaluation evaluate_path(const ApiGraph& g, const GraphPath& p, const Type& t) {
  PathEvaluation ev;
  if (p.nodes.empty()) return ev;
  for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i) {
    const std::size_t e = g.edge_between(p.nodes[i], p.nodes[i + 1]);
    if (e == ApiGraph::npos) return ev;
    Substitution label = g.edge(e).label;
    if (const GraphNode& from = g.node(p.nodes[i]); from.is_def()) {
      const ApiDef& d = g.spec().def(from.def);
      const Substitution rename = call_site_renaming(g.spec(), d);
      if (!rename.empty()) label = decompose(g.spec(), apply(rename, d.type)).sub;
    }
    for (const auto& [var, image] : label) ev.propagated.bind(var, apply(ev.propagated, image));
  }
  const GraphNode& last = g.node(p.nodes.back());
  if (!last.is_type()) return ev;
  ev.produced = apply(ev.propagated, last.type);
  auto u = unify(g.spec(), t, ev.produced);
  if (!u) return ev;
  ev.unifier = std::move(*u);
  ev.feasible = apply(ev.unifier, ev.produced) == t;
  return ev;
}

class InhabitantSearch {
 public:
  InhabitantSearch(const ApiGraph& g, Rng& rng, InhabitantOptions opts = {})
      : g_(g), spec_(g.spec()), rng_(rng), opts_(std::move(opts)) {}

  const InhabitantOptions& options() const { return opts_; }

  /// Completes a feasible evaluation into a full substitution over the
  /// path's variables; absent when open variables admit no valid choice.
  std::optional<Substitution> resolve(const GraphPath& p, const PathEvaluation& ev, const Type& t) {
    const std::vector<TypeParam> vars = path_type_variables(g_, p);
    std::vector<TypeParam> open;
    for (const TypeParam& v : vars)
      if (!ev.propagated.contains(v.id) && !ev.unifier.contains(v.id)) open.push_back(v);
    const Substitution target_sub = decompose(spec_, t).sub;
    for (int attempt = 0; attempt < std::max(1, opts_.free_draw_attempts); ++attempt) {
      Instantiator inst(spec_, &rng_);
      auto drawn = inst.complete(open, ev.unifier, opts_.free_depth);
      if (!drawn) return std::nullopt;
      Substitution resolved = *drawn;
      for (const auto& [var, image] : ev.propagated) {
        if (!resolved.contains(var)) resolved.bind(var, apply(*drawn, image));
      }
      for (const auto& [var, image] : target_sub)
        if (!resolved.contains(var)) resolved.bind(var, image);
      const bool ground = std::all_of(resolved.begin(), resolved.end(),
                                      [](const auto& kv) { return kv.second.is_ground(); });
      if (ground && is_valid(spec_, resolved) && bounds_hold(vars, resolved) && subsumes(target_sub, resolved))
        return resolved;
      if (open.empty()) return std::nullopt;  // nothing left to redraw
    }
    return std::nullopt;
  }

  /// The trivial path, followed by up to path_limit feasible paths to the
  /// constructor of `t`, shortest first and in random order within a length.
  std::vector<FeasiblePath> find_api_paths(const Type& t) {
    std::vector<FeasiblePath> out{FeasiblePath{GraphPath{}, Substitution{}, t}};
    if (!t.is_nominal()) return out;
    const std::size_t target = g_.type_node(decompose(spec_, t).base);
    if (target == ApiGraph::npos) return out;
    std::vector<GraphPath> paths =
        g_.paths_to(target, PathOptions{opts_.paths_per_source, opts_.start_at_type_nodes});
    for (std::size_t lo = 0; lo < paths.size();) {
      std::size_t hi = lo;
      while (hi < paths.size() && paths[hi].length() == paths[lo].length()) ++hi;
      shuffle(std::span<GraphPath>(paths).subspan(lo, hi - lo), rng_);
      lo = hi;
    }
    std::size_t found = 0;
    for (GraphPath& p : paths) {
      if (p.length() == 0) continue;  // the trivial path is already in front
      const PathEvaluation ev = evaluate_path(g_, p, t);
      if (!ev.feasible) continue;
      auto resolved = resolve(p, ev, t);
      if (!resolved) continue;
      out.push_back(FeasiblePath{std::move(p), std::move(*resolved), t});
      if (opts_.path_limit != 0 && ++found >= opts_.path_limit) break;
    }
    return out;
  }

  /// Folds a feasible path into an expression. Arguments are inhabitants
  /// searched at `depth - 1`.
  Expr to_expr(const FeasiblePath& fp, int depth) {
    if (fp.trivial()) return Expr::constant(fp.target);
    Expr e = Expr::empty();
    for (std::size_t i = 0; i < fp.path.nodes.size(); ++i) {
      const GraphNode& n = g_.node(fp.path.nodes[i]);
      if (n.is_type()) {
        if (i == 0) e = Expr::constant(apply(fp.resolved, n.type));
        continue;
      }
      const ApiDef& d = spec_.def(n.def);
      if (d.is_field()) {
        e = Expr::field_access(std::move(e), d.id);
        continue;
      }
      const Substitution rename = call_site_renaming(spec_, d);
      auto resolve_type = [&](const Type& t) { return apply(fp.resolved, apply(rename, t)); };
      std::vector<Type> type_args;
      for (const TypeParam& v : spec_.call_type_params(d)) type_args.push_back(resolve_type(v.type()));
      std::vector<Expr> args;
      for (const Param& p : d.params) args.push_back(inhabitant(resolve_type(p.type), depth - 1));
      e = Expr::call(std::move(e), d.id, std::move(type_args), std::move(args));
    }
    return e;
  }

  /// An expression of type `t`: the first feasible path when depth allows,
  /// otherwise `constant(t)`.
  Expr inhabitant(const Type& t, int depth) {
    if (depth <= 0) return Expr::constant(t);
    for (const FeasiblePath& fp : find_api_paths(t))
      if (!fp.trivial()) return to_expr(fp, depth);
    return Expr::constant(t);
  }

  /// Builds `local var x: expected = <use of seq.def>` with inhabitants for
  /// the receiver and arguments and explicit type arguments from seq.sub.
  Program realize(const TypingSequence& seq) {
    const ApiDef& d = spec_.def(seq.def);
    const int inner = opts_.program_depth - 1;
    Expr recv = seq.receiver ? inhabitant(*seq.receiver, inner) : Expr::empty();
    Expr use;
    if (d.is_field()) {
      use = Expr::field_access(std::move(recv), d.id);
    } else {
      std::vector<Type> type_args;
      for (const TypeParam& v : spec_.call_type_params(d)) type_args.push_back(apply(seq.sub, v.type()));
      std::vector<Expr> args;
      for (const Type& a : seq.args) args.push_back(inhabitant(a, inner));
      use = Expr::call(std::move(recv), d.id, std::move(type_args), std::move(args));
    }
    Program p;
    p.statements.push_back(Expr::local_var(opts_.result_variable, seq.expected, std::move(use)));
    return p;
  }

 private:
  bool bounds_hold(const std::vector<TypeParam>& vars, const Substitution& sub) const {
    for (const TypeParam& v : vars) {
      const Type* t = sub.find(v.id);
      if (!t) return false;
      if (!v.bound.is_top() && !is_subtype(spec_, *t, apply(sub, v.bound))) return false;
    }
    return true;
  }

  const ApiGraph& g_;
  const ApiSpec& spec_;
  Rng& rng_;
  InhabitantOptions opts_;
};

}  // namespace apifuzz
