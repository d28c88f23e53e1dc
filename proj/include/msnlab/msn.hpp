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

#ifndef MSNLAB_MSN_HPP_
#define MSNLAB_MSN_HPP_

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "msnlab/common.hpp"
#include "msnlab/graphs.hpp"

namespace msnlab::msn {

/// Label on a network edge: a directed input-graph edge u->v, or Unlabeled
/// (traversable under every input).
struct EdgeLabel {
  std::optional<std::pair<std::string, std::string>> directed;

  static EdgeLabel unlabeled() { return {}; }
  static EdgeLabel edge(std::string u, std::string v) {
    if (u == v) throw PreconditionError("label self-loop " + u + "->" + v);
    return {std::make_pair(std::move(u), std::move(v))};
  }
  bool is_unlabeled() const { return !directed.has_value(); }

  friend bool operator==(const EdgeLabel& a, const EdgeLabel& b) {
    return a.directed == b.directed;
  }
  friend bool operator<(const EdgeLabel& a, const EdgeLabel& b) {
    return a.directed < b.directed;
  }
};

/// Monotone switching network: an undirected multigraph over named network
/// vertices including the distinguished "s'" and "t'", each edge carrying an
/// EdgeLabel.  Parallel edges are permitted.  Size is the vertex count.
class SwitchingNetwork {
 public:
  struct Edge {
    int u, v;  // unordered endpoints
    EdgeLabel label;
  };

  SwitchingNetwork() {
    add_vertex("s'");
    add_vertex("t'");
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
    if (it == index_.end()) throw PreconditionError("unknown network vertex: " + name);
    return it->second;
  }

  const std::string& name(int id) const { return names_.at(static_cast<size_t>(id)); }
  int size() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  int s_id() const { return 0; }
  int t_id() const { return 1; }

  void add_edge(int u, int v, EdgeLabel label) {
    if (u < 0 || v < 0 || u >= size() || v >= size())
      throw PreconditionError("network edge endpoint out of range");
    edges_.push_back({u, v, std::move(label)});
  }
  void add_edge(const std::string& u, const std::string& v, EdgeLabel label) {
    int ui = add_vertex(u), vi = add_vertex(v);
    add_edge(ui, vi, std::move(label));
  }

  const std::vector<Edge>& edges() const { return edges_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  /// Distinct directed labels occurring in the network, sorted.
  std::vector<std::pair<std::string, std::string>> label_alphabet() const {
    std::set<std::pair<std::string, std::string>> set;
    for (const Edge& e : edges_)
      if (e.label.directed) set.insert(*e.label.directed);
    return {set.begin(), set.end()};
  }

 private:
  std::vector<std::string> names_;
  std::map<std::string, int> index_;
  std::vector<Edge> edges_;
};

/// Parses the network text format: lines "u -- v : a->b" or "u -- v : *",
/// blank lines and "#" comments.  The distinguished vertices are spelled
/// "s'" and "t'".  "network-vertex u" declares an isolated network vertex.
inline SwitchingNetwork parse_network(const std::string& text) {
  SwitchingNetwork net;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string a;
    if (!(ls >> a)) continue;
    if (a == "network-vertex") {
      std::string v, extra;
      if (!(ls >> v) || (ls >> extra))
        throw ParseError("malformed network-vertex declaration", lineno);
      net.add_vertex(v);
      continue;
    }
    std::string dash, b, colon, lab, extra;
    if (!(ls >> dash >> b >> colon >> lab) || dash != "--" || colon != ":" || (ls >> extra))
      throw ParseError("malformed network edge line: " + line, lineno);
    if (lab == "*") {
      net.add_edge(a, b, EdgeLabel::unlabeled());
    } else {
      auto arrow = lab.find("->");
      if (arrow == std::string::npos || arrow == 0 || arrow + 2 >= lab.size())
        throw ParseError("malformed label: " + lab, lineno);
      std::string lu = lab.substr(0, arrow), lv = lab.substr(arrow + 2);
      if (lu == lv) throw ParseError("label self-loop: " + lab, lineno);
      net.add_edge(a, b, EdgeLabel::edge(lu, lv));
    }
  }
  return net;
}

inline std::string format_network(const SwitchingNetwork& net) {
  std::ostringstream out;
  std::vector<bool> endpoint(static_cast<size_t>(net.size()), false);
  for (const auto& e : net.edges()) {
    endpoint[static_cast<size_t>(e.u)] = true;
    endpoint[static_cast<size_t>(e.v)] = true;
  }
  for (int v = 2; v < net.size(); ++v)
    if (!endpoint[static_cast<size_t>(v)]) out << "network-vertex " << net.name(v) << "\n";
  for (const auto& e : net.edges()) {
    out << net.name(e.u) << " -- " << net.name(e.v) << " : ";
    if (e.label.directed)
      out << e.label.directed->first << "->" << e.label.directed->second;
    else
      out << "*";
    out << "\n";
  }
  return out.str();
}

/// True iff the network accepts G: s' reaches t' in the subnetwork of edges
/// whose label is Unlabeled or a directed edge of G.
inline bool accepts(const SwitchingNetwork& net, const graphs::DiGraph& g) {
  std::vector<std::vector<int>> adj(static_cast<size_t>(net.size()));
  for (const auto& e : net.edges()) {
    bool live = e.label.is_unlabeled() ||
                g.has_edge(e.label.directed->first, e.label.directed->second);
    if (live) {
      adj[static_cast<size_t>(e.u)].push_back(e.v);
      adj[static_cast<size_t>(e.v)].push_back(e.u);
    }
  }
  std::vector<bool> seen(static_cast<size_t>(net.size()), false);
  std::deque<int> q{net.s_id()};
  seen[static_cast<size_t>(net.s_id())] = true;
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    if (u == net.t_id()) return true;
    for (int v : adj[static_cast<size_t>(u)])
      if (!seen[static_cast<size_t>(v)]) {
        seen[static_cast<size_t>(v)] = true;
        q.push_back(v);
      }
  }
  return false;
}

struct SoundnessReport {
  bool sound;
  // Present iff !sound: a network walk and the pathless input it accepts.
  std::vector<std::string> witness_walk;
  std::optional<graphs::DiGraph> witness_input;
};

struct SoundnessBudget {
  long max_states = 20'000'000;
  int max_labels = 62;
};

namespace detail {

/// Builds the input graph over `universe` whose edges are the labels picked
/// out by `bits` from `alphabet`.
inline graphs::DiGraph label_graph(const std::vector<std::string>& universe,
                                   const std::vector<std::pair<std::string, std::string>>& alphabet,
                                   uint64_t bits) {
  graphs::DiGraph g;
  for (const auto& v : universe) g.add_vertex(v);
  g.add_vertex("s");
  g.add_vertex("t");
  for (size_t i = 0; i < alphabet.size(); ++i)
    if (bits >> i & 1) {
      g.add_vertex(alphabet[i].first);
      g.add_vertex(alphabet[i].second);
      g.put_edge(g.id(alphabet[i].first), g.id(alphabet[i].second));
    }
  return g;
}

}  // namespace detail

/// Decides soundness: the network is sound iff no s'-t' walk accumulates a
/// label set that, viewed as an input graph over `universe`, lacks an s-t
/// path.  Exact search over (network vertex, label bitset) states; branches
/// whose accumulated labels already contain an s-t path are pruned (every
/// extension then accepts only path-having inputs).
inline SoundnessReport is_sound(const SwitchingNetwork& net,
                                const std::vector<std::string>& universe,
                                const SoundnessBudget& budget = {}) {
  auto alphabet = net.label_alphabet();
  int nl = static_cast<int>(alphabet.size());
  if (nl > budget.max_labels)
    throw BudgetExceeded("is_sound: label alphabet of " + std::to_string(nl) +
                         " exceeds limit");
  std::map<std::pair<std::string, std::string>, int> label_index;
  for (int i = 0; i < nl; ++i) label_index[alphabet[static_cast<size_t>(i)]] = i;

  struct NEdge {
    int to;
    uint64_t bit;  // 0 for unlabeled
    int edge_idx;
  };
  std::vector<std::vector<NEdge>> adj(static_cast<size_t>(net.size()));
  for (int i = 0; i < net.edge_count(); ++i) {
    const auto& e = net.edges()[static_cast<size_t>(i)];
    uint64_t bit = e.label.directed
                       ? (uint64_t{1} << label_index.at(*e.label.directed))
                       : 0;
    adj[static_cast<size_t>(e.u)].push_back({e.v, bit, i});
    adj[static_cast<size_t>(e.v)].push_back({e.u, bit, i});
  }

  // Cached s-t-path predicate over label subsets, evaluated by a flat DFS
  // over interned vertex indices (equivalent to building the label graph).
  std::map<std::string, int> vid;
  auto intern = [&](const std::string& v) {
    auto it = vid.find(v);
    if (it != vid.end()) return it->second;
    int k = static_cast<int>(vid.size());
    vid.emplace(v, k);
    return k;
  };
  for (const auto& v : universe) intern(v);
  int sv = intern("s"), tv = intern("t");
  std::vector<std::pair<int, int>> ledges(static_cast<size_t>(nl));
  for (int i = 0; i < nl; ++i)
    ledges[static_cast<size_t>(i)] = {intern(alphabet[static_cast<size_t>(i)].first),
                                      intern(alphabet[static_cast<size_t>(i)].second)};
  int nv = static_cast<int>(vid.size());
  std::unordered_map<uint64_t, bool> path_cache;
  std::vector<char> mark(static_cast<size_t>(nv));
  std::vector<int> dfs_stack;
  auto has_path = [&](uint64_t bits) {
    auto it = path_cache.find(bits);
    if (it != path_cache.end()) return it->second;
    std::fill(mark.begin(), mark.end(), 0);
    mark[static_cast<size_t>(sv)] = 1;
    dfs_stack.assign(1, sv);
    while (!dfs_stack.empty()) {
      int v = dfs_stack.back();
      dfs_stack.pop_back();
      for (int i = 0; i < nl; ++i) {
        if (!(bits >> i & 1)) continue;
        auto [a, b] = ledges[static_cast<size_t>(i)];
        if (a == v && !mark[static_cast<size_t>(b)]) {
          mark[static_cast<size_t>(b)] = 1;
          dfs_stack.push_back(b);
        }
      }
    }
    bool r = mark[static_cast<size_t>(tv)] != 0;
    path_cache.emplace(bits, r);
    return r;
  };

  using State = std::pair<int, uint64_t>;
  struct StateHash {
    size_t operator()(const State& s) const {
      return std::hash<uint64_t>()(s.second * 0x9e3779b97f4a7c15ULL +
                                   static_cast<uint64_t>(s.first));
    }
  };
  std::unordered_map<State, std::pair<State, int>, StateHash> parent;
  std::deque<State> q;
  State start{net.s_id(), 0};
  parent.emplace(start, std::make_pair(start, -1));
  q.push_back(start);
  long explored = 0;
  while (!q.empty()) {
    auto [v, bits] = q.front();
    q.pop_front();
    if (++explored > budget.max_states)
      throw BudgetExceeded("is_sound: state budget exceeded");
    if (v == net.t_id() && !has_path(bits)) {
      // Unsound: reconstruct the walk.
      SoundnessReport rep;
      rep.sound = false;
      std::vector<std::string> walk;
      State cur{v, bits};
      walk.push_back(net.name(v));
      while (true) {
        auto [pred, ei] = parent.at(cur);
        if (ei < 0) break;
        cur = pred;
        walk.push_back(net.name(cur.first));
      }
      std::reverse(walk.begin(), walk.end());
      rep.witness_walk = std::move(walk);
      rep.witness_input = detail::label_graph(universe, alphabet, bits);
      return rep;
    }
    if (has_path(bits)) continue;  // pruned: all extensions forced sound
    for (const NEdge& e : adj[static_cast<size_t>(v)]) {
      State next{e.to, bits | e.bit};
      if (parent.emplace(next, std::make_pair(State{v, bits}, e.edge_idx)).second)
        q.push_back(next);
    }
  }
  return {true, {}, std::nullopt};
}

/// Streams every simple s-t path over the universe as an input graph.
inline void for_each_simple_st_path(const std::vector<std::string>& universe,
                                    const std::function<void(const graphs::DiGraph&)>& fn) {
  std::vector<std::string> inner;
  for (const auto& v : universe)
    if (v != "s" && v != "t") inner.push_back(v);
  std::sort(inner.begin(), inner.end());
  int k = static_cast<int>(inner.size());
  std::vector<int> chosen;
  std::vector<bool> used(static_cast<size_t>(k), false);
  std::function<void()> rec = [&]() {
    // Current path: s -> inner[chosen...] -> t
    graphs::DiGraph g = graphs::DiGraph::with_st();
    for (const auto& v : universe)
      if (v != "s" && v != "t") g.add_vertex(v);
    std::string prev = "s";
    for (int ci : chosen) {
      g.add_edge(prev, inner[static_cast<size_t>(ci)]);
      prev = inner[static_cast<size_t>(ci)];
    }
    g.add_edge(prev, "t");
    fn(g);
    for (int i = 0; i < k; ++i) {
      if (used[static_cast<size_t>(i)]) continue;
      used[static_cast<size_t>(i)] = true;
      chosen.push_back(i);
      rec();
      chosen.pop_back();
      used[static_cast<size_t>(i)] = false;
    }
  };
  rec();
}

struct CompletenessBudget {
  int max_inner = 8;  // simple-path count is sum over k of k-permutations
};

/// True iff the network accepts every input graph over `universe` that has
/// an s-t path.  By acceptance monotonicity it suffices to check the
/// minimal such graphs: the simple s-t paths.
inline bool is_complete(const SwitchingNetwork& net,
                        const std::vector<std::string>& universe,
                        const CompletenessBudget& budget = {}) {
  int inner = 0;
  for (const auto& v : universe)
    if (v != "s" && v != "t") ++inner;
  if (inner > budget.max_inner)
    throw BudgetExceeded("is_complete: universe of " + std::to_string(inner + 2) +
                         " vertices exceeds limit");
  bool ok = true;
  for_each_simple_st_path(universe, [&](const graphs::DiGraph& g) {
    if (ok && !accepts(net, g)) ok = false;
  });
  return ok;
}

// ---------------------------------------------------------------------------
// Proof-level network transforms

struct NetworkTransform {
  enum class Kind {
    ParallelSourceS,  // every edge labeled v1->v2 gains a parallel s->v2 edge
    ParallelSinkT,    // every edge labeled v1->v2 gains a parallel v1->t edge
    UnlabelIntoS,     // labels v->s become Unlabeled
    UnlabelFromT,     // labels t->v become Unlabeled
    RelabelMerge,     // label endpoints in S rewritten to s, in T to t
  };
  Kind kind;
  std::string v1, v2;              // ParallelSourceS / ParallelSinkT
  std::set<std::string> S, T;      // RelabelMerge

  static NetworkTransform parallel_source_s(std::string v1, std::string v2) {
    return {Kind::ParallelSourceS, std::move(v1), std::move(v2), {}, {}};
  }
  static NetworkTransform parallel_sink_t(std::string v1, std::string v2) {
    return {Kind::ParallelSinkT, std::move(v1), std::move(v2), {}, {}};
  }
  static NetworkTransform unlabel_into_s() { return {Kind::UnlabelIntoS, "", "", {}, {}}; }
  static NetworkTransform unlabel_from_t() { return {Kind::UnlabelFromT, "", "", {}, {}}; }
  static NetworkTransform relabel_merge(std::set<std::string> S, std::set<std::string> T) {
    return {Kind::RelabelMerge, "", "", std::move(S), std::move(T)};
  }
};

/// Applies a soundness-preserving transform.  RelabelMerge drops network
/// edges whose rewritten label would be a self-loop: such a label can never
/// occur in the merged input graph, so the edge is dead weight.
inline SwitchingNetwork apply_network_transform(const SwitchingNetwork& net,
                                                const NetworkTransform& tr) {
  using K = NetworkTransform::Kind;
  if (tr.kind == K::RelabelMerge) {
    if (tr.S.count("t")) throw PreconditionError("RelabelMerge: t in S");
    if (tr.T.count("s")) throw PreconditionError("RelabelMerge: s in T");
    for (const auto& v : tr.S)
      if (tr.T.count(v)) throw PreconditionError("RelabelMerge: S and T overlap at " + v);
  }
  auto rewrite = [&](const std::string& v) -> std::string {
    if (tr.S.count(v)) return "s";
    if (tr.T.count(v)) return "t";
    return v;
  };
  SwitchingNetwork out;
  for (int v = 2; v < net.size(); ++v) out.add_vertex(net.name(v));
  for (const auto& e : net.edges()) {
    switch (tr.kind) {
      case K::ParallelSourceS:
        out.add_edge(e.u, e.v, e.label);
        if (e.label.directed && e.label.directed->first == tr.v1 &&
            e.label.directed->second == tr.v2)
          out.add_edge(e.u, e.v, EdgeLabel::edge("s", tr.v2));
        break;
      case K::ParallelSinkT:
        out.add_edge(e.u, e.v, e.label);
        if (e.label.directed && e.label.directed->first == tr.v1 &&
            e.label.directed->second == tr.v2)
          out.add_edge(e.u, e.v, EdgeLabel::edge(tr.v1, "t"));
        break;
      case K::UnlabelIntoS:
        if (e.label.directed && e.label.directed->second == "s")
          out.add_edge(e.u, e.v, EdgeLabel::unlabeled());
        else
          out.add_edge(e.u, e.v, e.label);
        break;
      case K::UnlabelFromT:
        if (e.label.directed && e.label.directed->first == "t")
          out.add_edge(e.u, e.v, EdgeLabel::unlabeled());
        else
          out.add_edge(e.u, e.v, e.label);
        break;
      case K::RelabelMerge: {
        if (!e.label.directed) {
          out.add_edge(e.u, e.v, e.label);
          break;
        }
        std::string a = rewrite(e.label.directed->first);
        std::string b = rewrite(e.label.directed->second);
        if (a != b) out.add_edge(e.u, e.v, EdgeLabel::edge(a, b));
        break;
      }
    }
  }
  return out;
}

}  // namespace msnlab::msn

#endif  // MSNLAB_MSN_HPP_
