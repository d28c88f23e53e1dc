// Copyright 2026 The msnlab Authors
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

#ifndef MSNLAB_GRAPHS_HPP_
#define MSNLAB_GRAPHS_HPP_

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "msnlab/common.hpp"

namespace msnlab::graphs {

/// Directed graph over named vertices.  The names "s" and "t" are reserved
/// for the distinguished start/end vertices; graphs produced by
/// parse_edge_list always contain both.  Edges are a deduplicated set of
/// ordered pairs with no self-loops.
class DiGraph {
 public:
  DiGraph() = default;

  /// Graph containing only the distinguished vertices s and t.
  static DiGraph with_st() {
    DiGraph g;
    g.add_vertex("s");
    g.add_vertex("t");
    return g;
  }

  int add_vertex(const std::string& name) {
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    int id = static_cast<int>(names_.size());
    names_.push_back(name);
    index_.emplace(name, id);
    return id;
  }

  bool has_vertex(const std::string& name) const { return index_.count(name) != 0; }

  int id(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw PreconditionError("unknown vertex: " + name);
    return it->second;
  }

  const std::string& name(int id) const { return names_.at(static_cast<size_t>(id)); }
  int n() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }

  std::optional<int> s_id() const { return maybe_id("s"); }
  std::optional<int> t_id() const { return maybe_id("t"); }

  /// Throws unless both s and t are present.
  std::pair<int, int> st() const {
    auto s = s_id(), t = t_id();
    if (!s || !t) throw PreconditionError("graph lacks distinguished vertices s/t");
    return {*s, *t};
  }

  void add_edge(int u, int v) {
    if (u == v) throw PreconditionError("self-loop rejected at vertex " + name(u));
    if (u < 0 || v < 0 || u >= n() || v >= n())
      throw PreconditionError("edge endpoint out of range");
    if (!edges_.emplace(u, v).second)
      throw PreconditionError("duplicate edge " + name(u) + " -> " + name(v));
  }

  void add_edge(const std::string& u, const std::string& v) { add_edge(id(u), id(v)); }

  /// Inserts the edge if absent; no error on duplicates.  Used by graph
  /// rewrites where merges naturally collapse parallel edges.
  void put_edge(int u, int v) {
    if (u != v) edges_.emplace(u, v);
  }

  bool has_edge(int u, int v) const { return edges_.count({u, v}) != 0; }
  bool has_edge(const std::string& u, const std::string& v) const {
    return has_vertex(u) && has_vertex(v) && has_edge(id(u), id(v));
  }

  const std::set<std::pair<int, int>>& edges() const { return edges_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  /// Edges as (name, name) pairs, sorted.
  std::vector<std::pair<std::string, std::string>> edge_names() const {
    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(edges_.size());
    for (auto [u, v] : edges_) out.emplace_back(name(u), name(v));
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<std::vector<int>> out_adj() const {
    std::vector<std::vector<int>> adj(static_cast<size_t>(n()));
    for (auto [u, v] : edges_) adj[static_cast<size_t>(u)].push_back(v);
    return adj;
  }

  std::vector<std::vector<int>> in_adj() const {
    std::vector<std::vector<int>> adj(static_cast<size_t>(n()));
    for (auto [u, v] : edges_) adj[static_cast<size_t>(v)].push_back(u);
    return adj;
  }

  /// Equality is by vertex-name set and by named edge set.
  friend bool operator==(const DiGraph& a, const DiGraph& b) {
    if (a.index_.size() != b.index_.size()) return false;
    for (const auto& [name, id] : a.index_) {
      (void)id;
      if (!b.has_vertex(name)) return false;
    }
    return a.edge_names() == b.edge_names();
  }
  friend bool operator!=(const DiGraph& a, const DiGraph& b) { return !(a == b); }

 private:
  std::optional<int> maybe_id(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::vector<std::string> names_;
  std::map<std::string, int> index_;
  std::set<std::pair<int, int>> edges_;
};

/// Parses the edge-list format: lines "u -> v", "vertex u" (declares an
/// isolated vertex), blank lines, and "#" comments.  The result always
/// contains s and t.
inline DiGraph parse_edge_list(const std::string& text) {
  DiGraph g = DiGraph::with_st();
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto valid_token = [](const std::string& tok) {
    if (tok.empty()) return false;
    for (char c : tok)
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string a, b, c;
    if (!(ls >> a)) continue;  // blank
    if (a == "vertex") {
      if (!(ls >> b) || !valid_token(b) || (ls >> c))
        throw ParseError("malformed vertex declaration", lineno);
      g.add_vertex(b);
      continue;
    }
    if (!(ls >> b >> c) || b != "->" || !valid_token(a) || !valid_token(c))
      throw ParseError("malformed edge line: " + line, lineno);
    std::string extra;
    if (ls >> extra) throw ParseError("trailing tokens: " + extra, lineno);
    if (a == c) throw ParseError("self-loop " + a + " -> " + c, lineno);
    g.add_vertex(a);
    g.add_vertex(c);
    if (g.has_edge(a, c)) throw ParseError("duplicate edge " + a + " -> " + c, lineno);
    g.add_edge(a, c);
  }
  return g;
}

inline std::string format_edge_list(const DiGraph& g) {
  std::ostringstream out;
  std::set<int> endpoint;
  for (auto [u, v] : g.edges()) {
    endpoint.insert(u);
    endpoint.insert(v);
  }
  std::vector<std::string> isolated;
  for (int i = 0; i < g.n(); ++i)
    if (!endpoint.count(i) && g.name(i) != "s" && g.name(i) != "t")
      isolated.push_back(g.name(i));
  std::sort(isolated.begin(), isolated.end());
  for (const auto& v : isolated) out << "vertex " << v << "\n";
  for (const auto& [u, v] : g.edge_names()) out << u << " -> " << v << "\n";
  return out.str();
}

/// Vertices reachable from `from` along directed edges.
inline std::vector<bool> reachable_from(const DiGraph& g, int from) {
  std::vector<bool> seen(static_cast<size_t>(g.n()), false);
  auto adj = g.out_adj();
  std::deque<int> q{from};
  seen[static_cast<size_t>(from)] = true;
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    for (int v : adj[static_cast<size_t>(u)])
      if (!seen[static_cast<size_t>(v)]) {
        seen[static_cast<size_t>(v)] = true;
        q.push_back(v);
      }
  }
  return seen;
}

/// Vertices from which `to` is reachable.
inline std::vector<bool> reaches(const DiGraph& g, int to) {
  std::vector<bool> seen(static_cast<size_t>(g.n()), false);
  auto adj = g.in_adj();
  std::deque<int> q{to};
  seen[static_cast<size_t>(to)] = true;
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    for (int v : adj[static_cast<size_t>(u)])
      if (!seen[static_cast<size_t>(v)]) {
        seen[static_cast<size_t>(v)] = true;
        q.push_back(v);
      }
  }
  return seen;
}

/// True iff a directed path from s to t exists.
inline bool has_st_path(const DiGraph& g) {
  auto s = g.s_id(), t = g.t_id();
  if (!s || !t) return false;
  return reachable_from(g, *s)[static_cast<size_t>(*t)];
}

/// BFS distances from `from` (-1 where unreachable).
inline std::vector<int> distances_from(const DiGraph& g, int from) {
  std::vector<int> dist(static_cast<size_t>(g.n()), -1);
  auto adj = g.out_adj();
  std::deque<int> q{from};
  dist[static_cast<size_t>(from)] = 0;
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    for (int v : adj[static_cast<size_t>(u)])
      if (dist[static_cast<size_t>(v)] < 0) {
        dist[static_cast<size_t>(v)] = dist[static_cast<size_t>(u)] + 1;
        q.push_back(v);
      }
  }
  return dist;
}

/// BFS distances to `to` along reversed edges.
inline std::vector<int> distances_to(const DiGraph& g, int to) {
  std::vector<int> dist(static_cast<size_t>(g.n()), -1);
  auto adj = g.in_adj();
  std::deque<int> q{to};
  dist[static_cast<size_t>(to)] = 0;
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    for (int v : adj[static_cast<size_t>(u)])
      if (dist[static_cast<size_t>(v)] < 0) {
        dist[static_cast<size_t>(v)] = dist[static_cast<size_t>(u)] + 1;
        q.push_back(v);
      }
  }
  return dist;
}

// ---------------------------------------------------------------------------
// Permutation sets

struct SigmaBudget {
  // Materialized sigma refuses when (non-fixed count)! exceeds this.
  long max_permutations = 5'000'000;
};

/// Applies a relabeling permutation to the non-fixed vertices and streams
/// the resulting graph for every permutation.  Duplicates are not removed
/// in the stream; materialized sigma() dedupes.
inline void for_each_sigma(const DiGraph& g, const std::set<std::string>& fixed,
                           const std::function<void(const DiGraph&)>& fn) {
  for (const auto& f : fixed)
    if (!g.has_vertex(f)) throw PreconditionError("fixed vertex not in graph: " + f);
  std::vector<int> movable;
  for (int i = 0; i < g.n(); ++i)
    if (!fixed.count(g.name(i))) movable.push_back(i);
  std::vector<int> perm(movable.begin(), movable.end());
  // map[] sends vertex id -> relabeled id.
  std::vector<int> map(static_cast<size_t>(g.n()));
  do {
    std::iota(map.begin(), map.end(), 0);
    for (size_t k = 0; k < movable.size(); ++k)
      map[static_cast<size_t>(movable[k])] = perm[k];
    DiGraph h;
    for (int i = 0; i < g.n(); ++i) h.add_vertex(g.name(i));
    for (auto [u, v] : g.edges())
      h.put_edge(map[static_cast<size_t>(u)], map[static_cast<size_t>(v)]);
    fn(h);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

/// The permutation set sigma_W(G): all relabelings of the non-fixed
/// vertices, as a duplicate-free set of graphs.  sigma(G) fixes {s,t}.
inline std::vector<DiGraph> sigma(const DiGraph& g, const std::set<std::string>& fixed,
                                  const SigmaBudget& budget = {}) {
  long movable = 0;
  for (int i = 0; i < g.n(); ++i)
    if (!fixed.count(g.name(i))) ++movable;
  long perms = 1;
  for (long k = 2; k <= movable; ++k) {
    perms *= k;
    if (perms > budget.max_permutations)
      throw BudgetExceeded("sigma: " + std::to_string(movable) +
                           "! permutations exceed budget");
  }
  std::vector<DiGraph> out;
  std::set<std::vector<std::pair<std::string, std::string>>> seen;
  for_each_sigma(g, fixed, [&](const DiGraph& h) {
    if (seen.insert(h.edge_names()).second) out.push_back(h);
  });
  return out;
}

inline std::vector<DiGraph> sigma_st(const DiGraph& g, const SigmaBudget& budget = {}) {
  return sigma(g, {"s", "t"}, budget);
}

// ---------------------------------------------------------------------------
// Tree classification

enum class TreeKindTag { FlowOut, FlowIn, GeneralTree, NotATree };

struct TreeKind {
  TreeKindTag tag;
  std::optional<std::string> root;  // FlowOut root / FlowIn sink
};

/// True iff the underlying undirected graph is a tree (connected, n-1 edges,
/// no parallel opposite pairs collapsing below n-1).
inline bool underlying_is_tree(const DiGraph& g) {
  if (g.n() == 0) return false;
  if (g.edge_count() != g.n() - 1) return false;
  // n-1 edges and no undirected cycle imply connectivity; union-find
  // detects cycles, including a u->v / v->u pair (the second edge closes
  // a 2-cycle).
  std::vector<int> up(static_cast<size_t>(g.n()));
  std::iota(up.begin(), up.end(), 0);
  auto find = [&](int x) {
    while (up[static_cast<size_t>(x)] != x) {
      up[static_cast<size_t>(x)] = up[static_cast<size_t>(up[static_cast<size_t>(x)])];
      x = up[static_cast<size_t>(x)];
    }
    return x;
  };
  for (auto [u, v] : g.edges()) {
    int ru = find(u), rv = find(v);
    if (ru == rv) return false;
    up[static_cast<size_t>(ru)] = rv;
  }
  return true;
}

/// Classifies a directed graph as a flow-out tree (root reaches every
/// vertex), flow-in tree (every vertex reaches the sink), a general
/// directed tree, or not a tree at all.  A bare directed path is reported
/// as FlowOut.
inline TreeKind classify_tree(const DiGraph& g) {
  if (!underlying_is_tree(g)) return {TreeKindTag::NotATree, std::nullopt};
  if (g.n() == 1) return {TreeKindTag::FlowOut, g.name(0)};
  std::vector<int> indeg(static_cast<size_t>(g.n()), 0), outdeg(static_cast<size_t>(g.n()), 0);
  for (auto [u, v] : g.edges()) {
    ++outdeg[static_cast<size_t>(u)];
    ++indeg[static_cast<size_t>(v)];
  }
  // In a directed tree: flow-out iff exactly one vertex has indegree 0 and
  // the rest indegree 1 (parents are unique and acyclic).
  int roots = 0, root = -1, sinks = 0, sink = -1;
  bool flow_out = true, flow_in = true;
  for (int i = 0; i < g.n(); ++i) {
    if (indeg[static_cast<size_t>(i)] == 0) {
      ++roots;
      root = i;
    } else if (indeg[static_cast<size_t>(i)] != 1) {
      flow_out = false;
    }
    if (outdeg[static_cast<size_t>(i)] == 0) {
      ++sinks;
      sink = i;
    } else if (outdeg[static_cast<size_t>(i)] != 1) {
      flow_in = false;
    }
  }
  if (flow_out && roots == 1) return {TreeKindTag::FlowOut, g.name(root)};
  if (flow_in && sinks == 1) return {TreeKindTag::FlowIn, g.name(sink)};
  return {TreeKindTag::GeneralTree, std::nullopt};
}

/// Number of vertices besides s and t that are not lollipops (a lollipop v
/// has the edge s->v or v->t).
inline int count_non_lollipops(const DiGraph& g) {
  auto [s, t] = g.st();
  int count = 0;
  for (int v = 0; v < g.n(); ++v) {
    if (v == s || v == t) continue;
    if (!g.has_edge(s, v) && !g.has_edge(v, t)) ++count;
  }
  return count;
}

// ---------------------------------------------------------------------------
// Fingerprints and canonical forms

/// Deterministic serialization of a labeled graph, for certificate replay
/// checks and corpus caching.  Not isomorphism-invariant.
inline std::string fingerprint(const DiGraph& g) {
  std::vector<std::string> names = g.names();
  std::sort(names.begin(), names.end());
  std::ostringstream out;
  for (const auto& v : names) out << v << ',';
  out << '|';
  for (const auto& [u, v] : g.edge_names()) out << u << '>' << v << ';';
  return out.str();
}

inline uint64_t fingerprint_hash(const DiGraph& g) {
  // FNV-1a
  uint64_t h = 1469598103934665603ull;
  for (char c : fingerprint(g)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

namespace detail {

inline std::string ahu_code(int v, int parent,
                            const std::vector<std::vector<int>>& und,
                            const std::set<std::pair<int, int>>& edges) {
  std::vector<std::string> child_codes;
  for (int c : und[static_cast<size_t>(v)]) {
    if (c == parent) continue;
    char dir = edges.count({v, c}) ? '>' : '<';
    child_codes.push_back(dir + ahu_code(c, v, und, edges));
  }
  std::sort(child_codes.begin(), child_codes.end());
  std::string code = "(";
  for (const auto& c : child_codes) code += c;
  code += ")";
  return code;
}

inline std::vector<int> tree_centroids(const std::vector<std::vector<int>>& und) {
  int n = static_cast<int>(und.size());
  std::vector<int> size(static_cast<size_t>(n), 1), best;
  int best_weight = n + 1;
  // Iterative post-order from 0.
  std::vector<std::pair<int, int>> stack{{0, -1}};
  std::vector<std::pair<int, int>> order;
  while (!stack.empty()) {
    auto [v, p] = stack.back();
    stack.pop_back();
    order.emplace_back(v, p);
    for (int c : und[static_cast<size_t>(v)])
      if (c != p) stack.emplace_back(c, v);
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if (it->second >= 0) size[static_cast<size_t>(it->second)] += size[static_cast<size_t>(it->first)];
  for (auto [v, p] : order) {
    int weight = n - size[static_cast<size_t>(v)];
    for (int c : und[static_cast<size_t>(v)])
      if (c != p) weight = std::max(weight, size[static_cast<size_t>(c)]);
    if (weight < best_weight) {
      best_weight = weight;
      best = {v};
    } else if (weight == best_weight) {
      best.push_back(v);
    }
  }
  return best;
}

}  // namespace detail

/// Isomorphism-canonical code for directed trees: AHU encoding with edge
/// direction marks, rooted at the centroid(s) of the underlying tree.
/// Two directed trees have equal codes iff they are isomorphic.
inline std::string tree_canonical_code(const DiGraph& g) {
  if (!underlying_is_tree(g)) throw PreconditionError("tree_canonical_code: not a tree");
  std::vector<std::vector<int>> und(static_cast<size_t>(g.n()));
  for (auto [u, v] : g.edges()) {
    und[static_cast<size_t>(u)].push_back(v);
    und[static_cast<size_t>(v)].push_back(u);
  }
  std::string best;
  for (int c : detail::tree_centroids(und)) {
    std::string code = detail::ahu_code(c, -1, und, g.edges());
    if (best.empty() || code < best) best = code;
  }
  return best;
}

struct TreeEnumBudget {
  int max_n = 10;
};

/// Streams every directed tree on 1..n_max vertices up to isomorphism
/// (vertices named v1..vn), built by leaf attachment with canonical-code
/// deduplication.
inline void enumerate_directed_trees(int n_max, const std::function<void(const DiGraph&)>& fn,
                                     const TreeEnumBudget& budget = {}) {
  if (n_max > budget.max_n)
    throw BudgetExceeded("enumerate_directed_trees: n_max " + std::to_string(n_max) +
                         " exceeds limit " + std::to_string(budget.max_n));
  if (n_max < 1) return;
  DiGraph single;
  single.add_vertex("v1");
  fn(single);
  std::vector<DiGraph> level{single};
  for (int n = 2; n <= n_max; ++n) {
    std::vector<DiGraph> next;
    std::set<std::string> seen;
    std::string leaf = "v" + std::to_string(n);
    for (const DiGraph& t : level) {
      for (int v = 0; v < t.n(); ++v) {
        for (int dir = 0; dir < 2; ++dir) {
          DiGraph u = t;
          int w = u.add_vertex(leaf);
          if (dir == 0)
            u.add_edge(v, w);
          else
            u.add_edge(w, v);
          if (seen.insert(tree_canonical_code(u)).second) {
            next.push_back(u);
            fn(u);
          }
        }
      }
    }
    level = std::move(next);
  }
}

inline std::vector<DiGraph> enumerate_directed_trees(int n_max,
                                                     const TreeEnumBudget& budget = {}) {
  std::vector<DiGraph> out;
  enumerate_directed_trees(n_max, [&](const DiGraph& g) { out.push_back(g); }, budget);
  return out;
}

}  // namespace msnlab::graphs

#endif  // MSNLAB_GRAPHS_HPP_
