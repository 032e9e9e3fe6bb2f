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

// The API graph connects type nodes to the instance members they own
// (label ε) and definitions to the decomposed type they return (label = the
// decomposition substitution). Paths ending in a type node describe chains
// of calls producing a value of that type.

#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "apifuzz/api.hpp"
#include "apifuzz/type.hpp"
#include "apifuzz/typing.hpp"

namespace apifuzz {

struct GraphNode {
  enum class Kind : std::uint8_t { type, def };
  Kind kind;
  Type type;  // type nodes
  DefId def;  // def nodes

  bool is_type() const { return kind == Kind::type; }
  bool is_def() const { return kind == Kind::def; }
};

struct GraphEdge {
  std::size_t from;
  std::size_t to;
  Substitution label;
};

/// A loopless path given by node indices; its length is the edge count.
struct GraphPath {
  std::vector<std::size_t> nodes;
  std::size_t length() const { return nodes.empty() ? 0 : nodes.size() - 1; }
  friend bool operator==(const GraphPath&, const GraphPath&) = default;
  friend auto operator<=>(const GraphPath&, const GraphPath&) = default;
};

struct PathOptions {
  /// Paths per start node; 0 means unbounded.
  std::size_t k = 1;
  /// Also start at type nodes. The target then yields the zero-length path.
  bool start_at_type_nodes = false;
};

class ApiGraph {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  explicit ApiGraph(const ApiSpec& spec) : spec_(&spec) { build(); }

  const ApiSpec& spec() const { return *spec_; }
  const std::vector<GraphNode>& nodes() const { return nodes_; }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  const GraphNode& node(std::size_t i) const { return nodes_[i]; }
  const GraphEdge& edge(std::size_t i) const { return edges_[i]; }
  const std::vector<std::size_t>& out_edges(std::size_t n) const { return out_[n]; }
  const std::vector<std::size_t>& in_edges(std::size_t n) const { return in_[n]; }

  std::size_t type_node(const Type& t) const {
    auto it = type_index_.find(t);
    return it == type_index_.end() ? npos : it->second;
  }
  std::size_t def_node(DefId id) const {
    auto it = def_index_.find(id.value);
    return it == def_index_.end() ? npos : it->second;
  }

  /// Edge index between two nodes, npos when absent.
  std::size_t edge_between(std::size_t from, std::size_t to) const {
    for (std::size_t e : out_[from])
      if (edges_[e].to == to) return e;
    return npos;
  }

  /// The receiver type node of an instance member, npos for sourceless defs.
  std::size_t receiver_of(DefId id) const {
    const std::size_t n = def_node(id);
    if (n == npos || in_[n].empty()) return npos;
    return edges_[in_[n].front()].from;
  }

  std::size_t type_node_count() const {
    return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(),
                                                  [](const GraphNode& n) { return n.is_type(); }));
  }
  std::size_t def_node_count() const { return nodes_.size() - type_node_count(); }

  /// Loopless paths ending at `target`, shortest first, up to `opts.k` per
  /// start node (Yen's algorithm, uniform edge weights). Ties are ordered by
  /// start node and then node sequence.
  std::vector<GraphPath> paths_to(std::size_t target, const PathOptions& opts = {}) const;

  /// Graphviz rendering.
  std::string to_dot() const;

  std::string node_label(std::size_t i) const {
    const GraphNode& n = nodes_[i];
    if (n.is_type()) return to_string(n.type);
    const ApiDef& d = spec_->def(n.def);
    return (d.owner ? *d.owner + "." : std::string()) + d.name;
  }

 private:
  std::size_t add_type_node(const Type& t) {
    auto [it, fresh] = type_index_.emplace(t, nodes_.size());
    if (fresh) push_node(GraphNode{GraphNode::Kind::type, t, DefId{}});
    return it->second;
  }

  void push_node(GraphNode n) {
    nodes_.push_back(std::move(n));
    out_.emplace_back();
    in_.emplace_back();
  }

  void add_edge(std::size_t from, std::size_t to, Substitution label) {
    out_[from].push_back(edges_.size());
    in_[to].push_back(edges_.size());
    edges_.push_back(GraphEdge{from, to, std::move(label)});
  }

  void add_def(const ApiDef& d) {
    const std::size_t n = nodes_.size();
    def_index_.emplace(d.id.value, n);
    push_node(GraphNode{GraphNode::Kind::def, Type::top(), d.id});
    if (d.is_instance_member()) {
      const std::size_t recv = add_type_node(spec_->class_named(*d.owner).self_type());
      add_edge(recv, n, Substitution{});
    }
    // Top, Bottom and bare type variables own no members and get no node.
    if (d.type.is_nominal()) {
      Decomposition dec = decompose(*spec_, d.type);
      const std::size_t ret = add_type_node(dec.base);
      add_edge(n, ret, std::move(dec.sub));
    }
  }

  void build() {
    for (std::size_t ci : spec_->topological_order()) {
      for (DefId id : spec_->classes()[ci].members) add_def(spec_->def(id));
    }
    for (const ApiDef& d : spec_->defs())
      if (!d.owner) add_def(d);
  }

  // Reverse breadth-first distances to `target` avoiding banned nodes/edges.
  std::vector<std::size_t> distances_to(std::size_t target, const std::vector<char>& banned_node,
                                        const std::set<std::size_t>& banned_edge) const {
    std::vector<std::size_t> dist(nodes_.size(), npos);
    if (banned_node[target]) return dist;
    std::deque<std::size_t> queue{target};
    dist[target] = 0;
    while (!queue.empty()) {
      const std::size_t v = queue.front();
      queue.pop_front();
      for (std::size_t e : in_[v]) {
        const std::size_t u = edges_[e].from;
        if (dist[u] != npos || banned_node[u] || banned_edge.count(e)) continue;
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
    }
    return dist;
  }

  // Follows decreasing distance from `from`; first matching out-edge wins.
  std::optional<GraphPath> walk(std::size_t from, const std::vector<std::size_t>& dist,
                                const std::set<std::size_t>& banned_edge) const {
    if (dist[from] == npos) return std::nullopt;
    GraphPath p{{from}};
    std::size_t u = from;
    while (dist[u] != 0) {
      std::size_t next = npos;
      for (std::size_t e : out_[u]) {
        const std::size_t v = edges_[e].to;
        if (!banned_edge.count(e) && dist[v] != npos && dist[v] + 1 == dist[u]) {
          next = v;
          break;
        }
      }
      if (next == npos) return std::nullopt;
      u = next;
      p.nodes.push_back(u);
    }
    return p;
  }

  std::vector<GraphPath> yen(std::size_t source, std::size_t target, std::size_t k,
                             const std::vector<std::size_t>& base_dist) const;

  const ApiSpec* spec_;
  std::vector<GraphNode> nodes_;
  std::vector<GraphEdge> edges_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
  std::unordered_map<Type, std::size_t, TypeHash> type_index_;
  std::unordered_map<std::uint32_t, std::size_t> def_index_;
};

inline std::vector<GraphPath> ApiGraph::yen(std::size_t source, std::size_t target, std::size_t k,
                                            const std::vector<std::size_t>& base_dist) const {
  std::vector<GraphPath> found;
  const std::set<std::size_t> no_edges;
  auto first = walk(source, base_dist, no_edges);
  if (!first) return found;
  found.push_back(std::move(*first));
  // Candidates ordered by (length, nodes) so extraction is deterministic.
  std::set<std::pair<std::size_t, std::vector<std::size_t>>> candidates;
  std::set<std::vector<std::size_t>> seen{found.front().nodes};
  while (k == 0 || found.size() < k) {
    const GraphPath last = found.back();
    for (std::size_t i = 0; i + 1 < last.nodes.size(); ++i) {
      const std::size_t spur = last.nodes[i];
      std::set<std::size_t> banned_edge;
      for (const GraphPath& p : found) {
        if (p.nodes.size() > i + 1 && std::equal(last.nodes.begin(), last.nodes.begin() + i + 1, p.nodes.begin()))
          banned_edge.insert(edge_between(p.nodes[i], p.nodes[i + 1]));
      }
      std::vector<char> banned_node(nodes_.size(), 0);
      for (std::size_t j = 0; j < i; ++j) banned_node[last.nodes[j]] = 1;
      const auto dist = distances_to(target, banned_node, banned_edge);
      auto spur_path = walk(spur, dist, banned_edge);
      if (!spur_path) continue;
      std::vector<std::size_t> total(last.nodes.begin(), last.nodes.begin() + i);
      total.insert(total.end(), spur_path->nodes.begin(), spur_path->nodes.end());
      if (seen.insert(total).second) candidates.emplace(total.size(), std::move(total));
    }
    if (candidates.empty()) break;
    auto best = candidates.begin();
    found.push_back(GraphPath{best->second});
    candidates.erase(best);
  }
  return found;
}

inline std::vector<GraphPath> ApiGraph::paths_to(std::size_t target, const PathOptions& opts) const {
  std::vector<GraphPath> out;
  if (target >= nodes_.size()) return out;
  const std::vector<char> none(nodes_.size(), 0);
  const auto dist = distances_to(target, none, {});
  for (std::size_t s = 0; s < nodes_.size(); ++s) {
    if (dist[s] == npos) continue;
    const GraphNode& n = nodes_[s];
    const bool start = n.is_def() ? in_[s].empty() : opts.start_at_type_nodes;
    if (!start) continue;
    if (opts.k == 1) {
      if (auto p = walk(s, dist, {})) out.push_back(std::move(*p));
    } else {
      for (GraphPath& p : yen(s, target, opts.k, dist)) out.push_back(std::move(p));
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const GraphPath& a, const GraphPath& b) { return a.length() < b.length(); });
  return out;
}

inline std::string ApiGraph::to_dot() const {
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') q += '\\';
      q += c;
    }
    return q + "\"";
  };
  std::ostringstream os;
  os << "digraph api {\n";
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    os << "  n" << i << " [label=" << quote(node_label(i))
       << (nodes_[i].is_type() ? ", shape=ellipse" : ", shape=box") << "];\n";
  }
  for (const GraphEdge& e : edges_) {
    os << "  n" << e.from << " -> n" << e.to;
    if (!e.label.empty()) os << " [label=" << quote(to_string(e.label)) << "]";
    os << ";\n";
  }
  os << "}\n";
  return os.str();
}

struct GraphStats {
  std::size_t nodes = 0;
  std::size_t type_nodes = 0;
  std::size_t def_nodes = 0;
  std::size_t edges = 0;
  std::size_t classes = 0;
  std::size_t polymorphic_defs = 0;
  std::size_t constructors = 0;
  std::size_t static_defs = 0;
  std::size_t fields = 0;
  double avg_signature_size = 0;  // mean parameter count of functions

  friend bool operator==(const GraphStats&, const GraphStats&) = default;
};

inline GraphStats graph_stats(const ApiGraph& g) {
  GraphStats s;
  s.nodes = g.nodes().size();
  s.type_nodes = g.type_node_count();
  s.def_nodes = g.def_node_count();
  s.edges = g.edges().size();
  const ApiSpec& spec = g.spec();
  s.classes = static_cast<std::size_t>(std::count_if(spec.classes().begin(), spec.classes().end(),
                                                     [](const ClassDecl& c) { return !c.external; }));
  std::size_t functions = 0, params = 0;
  for (const ApiDef& d : spec.defs()) {
    if (!d.type_params.empty()) ++s.polymorphic_defs;
    if (d.is_constructor) ++s.constructors;
    if (d.is_static) ++s.static_defs;
    if (d.is_field()) {
      ++s.fields;
    } else {
      ++functions;
      params += d.params.size();
    }
  }
  if (functions) s.avg_signature_size = static_cast<double>(params) / static_cast<double>(functions);
  return s;
}

}  // namespace apifuzz
