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

#ifndef MSNLAB_REDUCE_HPP_
#define MSNLAB_REDUCE_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "msnlab/common.hpp"
#include "msnlab/dplen.hpp"
#include "msnlab/graphs.hpp"

namespace msnlab::reduce {

/// One legality-checked graph rewrite.  Every move type is backed by an
/// inequality on m(sigma(.)): merging a vertex set with s or t, removing
/// useless edges (into s / out of t), adding an edge, or replacing an edge
/// a->b with s->b (resp. a->b with a->t) can only decrease or preserve the
/// minimal sound-network size.  A valid move sequence therefore witnesses
/// m(sigma(start)) >= m(sigma(end)).
struct Move {
  enum class Kind {
    MergeIntoS,
    MergeIntoT,
    RemoveUselessEdges,
    AddEdge,
    ReplaceEdgeWithSourceS,
    ReplaceEdgeWithSinkT,
  };
  Kind kind;
  std::set<std::string> vertices;  // merge moves
  std::string u, v;                // edge moves

  static Move merge_into_s(std::set<std::string> x) {
    return {Kind::MergeIntoS, std::move(x), "", ""};
  }
  static Move merge_into_t(std::set<std::string> y) {
    return {Kind::MergeIntoT, std::move(y), "", ""};
  }
  static Move remove_useless_edges() { return {Kind::RemoveUselessEdges, {}, "", ""}; }
  static Move add_edge(std::string u, std::string v) {
    return {Kind::AddEdge, {}, std::move(u), std::move(v)};
  }
  static Move replace_edge_with_source_s(std::string u, std::string v) {
    return {Kind::ReplaceEdgeWithSourceS, {}, std::move(u), std::move(v)};
  }
  static Move replace_edge_with_sink_t(std::string u, std::string v) {
    return {Kind::ReplaceEdgeWithSinkT, {}, std::move(u), std::move(v)};
  }

  std::string describe() const {
    std::ostringstream out;
    switch (kind) {
      case Kind::MergeIntoS:
      case Kind::MergeIntoT:
        out << (kind == Kind::MergeIntoS ? "MergeIntoS{" : "MergeIntoT{");
        for (const auto& v : vertices) out << v << ",";
        out << "}";
        break;
      case Kind::RemoveUselessEdges:
        out << "RemoveUselessEdges";
        break;
      case Kind::AddEdge:
        out << "AddEdge(" << u << "," << v << ")";
        break;
      case Kind::ReplaceEdgeWithSourceS:
        out << "ReplaceEdgeWithSourceS(" << u << "," << v << ")";
        break;
      case Kind::ReplaceEdgeWithSinkT:
        out << "ReplaceEdgeWithSinkT(" << u << "," << v << ")";
        break;
    }
    return out.str();
  }
};

namespace detail {

inline graphs::DiGraph merge_set(const graphs::DiGraph& g, const std::set<std::string>& x,
                                 const std::string& into) {
  graphs::DiGraph h;
  for (int i = 0; i < g.n(); ++i)
    if (!x.count(g.name(i))) h.add_vertex(g.name(i));
  int target = h.id(into);
  for (auto [u, v] : g.edges()) {
    int nu = x.count(g.name(u)) ? target : h.id(g.name(u));
    int nv = x.count(g.name(v)) ? target : h.id(g.name(v));
    h.put_edge(nu, nv);  // self-loops (intra-set edges) silently dropped
  }
  return h;
}

}  // namespace detail

/// Applies one move; throws PreconditionError on any violated precondition.
inline graphs::DiGraph apply_move(const graphs::DiGraph& g, const Move& m) {
  using K = Move::Kind;
  switch (m.kind) {
    case K::MergeIntoS:
    case K::MergeIntoT: {
      const std::string into = (m.kind == K::MergeIntoS) ? "s" : "t";
      const std::string forbidden = (m.kind == K::MergeIntoS) ? "t" : "s";
      for (const auto& v : m.vertices) {
        if (!g.has_vertex(v))
          throw PreconditionError(m.describe() + ": unknown vertex " + v);
        if (v == forbidden || v == into)
          throw PreconditionError(m.describe() + ": " + v + " may not be merged");
      }
      return detail::merge_set(g, m.vertices, into);
    }
    case K::RemoveUselessEdges: {
      auto [s, t] = g.st();
      graphs::DiGraph h;
      for (int i = 0; i < g.n(); ++i) h.add_vertex(g.name(i));
      for (auto [u, v] : g.edges())
        if (v != s && u != t) h.put_edge(u, v);
      return h;
    }
    case K::AddEdge: {
      if (!g.has_vertex(m.u) || !g.has_vertex(m.v))
        throw PreconditionError(m.describe() + ": unknown endpoint");
      if (m.u == m.v) throw PreconditionError(m.describe() + ": self-loop");
      if (g.has_edge(m.u, m.v))
        throw PreconditionError(m.describe() + ": edge already present");
      graphs::DiGraph h = g;
      h.add_edge(m.u, m.v);
      return h;
    }
    case K::ReplaceEdgeWithSourceS:
    case K::ReplaceEdgeWithSinkT: {
      if (!g.has_vertex(m.u) || !g.has_vertex(m.v) || !g.has_edge(m.u, m.v))
        throw PreconditionError(m.describe() + ": edge not present");
      bool to_s = (m.kind == K::ReplaceEdgeWithSourceS);
      if (to_s && m.v == "s")
        throw PreconditionError(m.describe() + ": replacement would be a self-loop");
      if (!to_s && m.u == "t")
        throw PreconditionError(m.describe() + ": replacement would be a self-loop");
      graphs::DiGraph h;
      for (int i = 0; i < g.n(); ++i) h.add_vertex(g.name(i));
      for (auto [u, v] : g.edges())
        if (!(g.name(u) == m.u && g.name(v) == m.v)) h.put_edge(u, v);
      if (to_s)
        h.put_edge(h.id("s"), h.id(m.v));
      else
        h.put_edge(h.id(m.u), h.id("t"));
      return h;
    }
  }
  throw PreconditionError("unknown move kind");
}

/// Replayable witness of m(sigma(start)) >= m(sigma(end)).
struct ReductionCertificate {
  graphs::DiGraph start;
  std::vector<Move> moves;
  std::vector<std::string> fingerprints;  // after each move
  graphs::DiGraph end;
  std::map<std::string, std::string> metadata;
};

struct CheckReport {
  bool ok = true;
  std::string reason;
  int failed_move = -1;  // index, -1 when not move-specific
};

/// Replays the moves from the start graph, verifying every precondition,
/// every recorded intermediate fingerprint, and the final graph.
inline CheckReport check_certificate(const ReductionCertificate& c) {
  if (c.fingerprints.size() != c.moves.size())
    return {false, "fingerprint count does not match move count", -1};
  graphs::DiGraph cur = c.start;
  for (size_t i = 0; i < c.moves.size(); ++i) {
    try {
      cur = apply_move(cur, c.moves[i]);
    } catch (const PreconditionError& e) {
      return {false, std::string("precondition: ") + e.what(), static_cast<int>(i)};
    }
    if (graphs::fingerprint(cur) != c.fingerprints[i])
      return {false, "fingerprint mismatch", static_cast<int>(i)};
  }
  if (!(cur == c.end)) return {false, "replay does not reproduce the end graph", -1};
  return {};
}

/// Accumulates a certificate while validating each move as it is applied.
class CertificateBuilder {
 public:
  explicit CertificateBuilder(graphs::DiGraph start)
      : start_(start), cur_(std::move(start)) {}

  const graphs::DiGraph& current() const { return cur_; }

  void apply(Move m) {
    if ((m.kind == Move::Kind::MergeIntoS || m.kind == Move::Kind::MergeIntoT) &&
        m.vertices.empty())
      return;  // empty merges are no-ops, not recorded
    cur_ = apply_move(cur_, m);
    fingerprints_.push_back(graphs::fingerprint(cur_));
    moves_.push_back(std::move(m));
  }

  void note(const std::string& key, const std::string& value) { metadata_[key] = value; }
  void note(const std::string& key, long value) { metadata_[key] = std::to_string(value); }

  ReductionCertificate finish() const {
    return {start_, moves_, fingerprints_, cur_, metadata_};
  }

 private:
  graphs::DiGraph start_, cur_;
  std::vector<Move> moves_;
  std::vector<std::string> fingerprints_;
  std::map<std::string, std::string> metadata_;
};

// ---------------------------------------------------------------------------
// Shared machinery

namespace detail {

inline graphs::DiGraph disjoint_union(const graphs::DiGraph& g, const graphs::DiGraph& h) {
  graphs::DiGraph u = g;
  for (const auto& name : h.names()) {
    if (u.has_vertex(name))
      throw PreconditionError("disjoint_union: vertex " + name + " occurs in both graphs");
    u.add_vertex(name);
  }
  for (const auto& [a, b] : h.edge_names()) u.add_edge(a, b);
  return u;
}

/// Undirected connected components of the current graph restricted to a
/// vertex-name set.
inline std::vector<std::set<std::string>> components_of(const graphs::DiGraph& g,
                                                        const std::set<std::string>& names) {
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& v : names) adj[v];
  for (const auto& [u, v] : g.edge_names())
    if (names.count(u) && names.count(v)) {
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
  std::set<std::string> seen;
  std::vector<std::set<std::string>> comps;
  for (const auto& v : names) {
    if (seen.count(v)) continue;
    std::set<std::string> comp;
    std::vector<std::string> stack{v};
    seen.insert(v);
    while (!stack.empty()) {
      std::string x = stack.back();
      stack.pop_back();
      comp.insert(x);
      for (const auto& w : adj[x])
        if (seen.insert(w).second) stack.push_back(w);
    }
    comps.push_back(std::move(comp));
  }
  return comps;
}

/// Vertices of the unique s-t path of a directed tree, in order.
inline std::vector<std::string> tree_st_path(const graphs::DiGraph& g) {
  auto [s, t] = g.st();
  auto out = g.out_adj();
  std::vector<int> parent(static_cast<size_t>(g.n()), -1);
  std::vector<int> stack{s};
  std::vector<bool> seen(static_cast<size_t>(g.n()), false);
  seen[static_cast<size_t>(s)] = true;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : out[static_cast<size_t>(v)])
      if (!seen[static_cast<size_t>(w)]) {
        seen[static_cast<size_t>(w)] = true;
        parent[static_cast<size_t>(w)] = v;
        stack.push_back(w);
      }
  }
  if (!seen[static_cast<size_t>(t)]) throw PreconditionError("no s-t path");
  std::vector<std::string> path;
  for (int v = t; v >= 0; v = parent[static_cast<size_t>(v)]) path.push_back(g.name(v));
  std::reverse(path.begin(), path.end());
  return path;
}

/// Reduces one floating directed-tree component of the builder's current
/// graph (disconnected from s and t) to a directed path with at least
/// ceil(sqrt(n_H)) vertices, via depth pigeonhole (Case 1) or path
/// straightening (Case 2).  Returns the surviving path, in order.
inline std::vector<std::string> sqrt_reduce_component(CertificateBuilder& b,
                                                      const std::set<std::string>& comp) {
  size_t n_h = comp.size();
  int target = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_h))));
  if (n_h == 1) return {*comp.begin()};

  const graphs::DiGraph& g = b.current();
  // Depth labeling from the lexicographically first component vertex.
  std::map<std::string, int> depth;
  std::map<std::string, std::vector<std::pair<std::string, bool>>> und;
  for (const auto& [u, v] : g.edge_names())
    if (comp.count(u) && comp.count(v)) {
      und[u].emplace_back(v, true);
      und[v].emplace_back(u, false);
    }
  std::string base = *comp.begin();
  depth[base] = 0;
  std::vector<std::string> stack{base};
  while (!stack.empty()) {
    std::string x = stack.back();
    stack.pop_back();
    for (const auto& [w, fwd] : und[x])
      if (!depth.count(w)) {
        depth[w] = depth[x] + (fwd ? 1 : -1);
        stack.push_back(w);
      }
  }
  int dmin = depth[base], dmax = depth[base];
  for (const auto& [v, d] : depth) {
    (void)v;
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
  }
  int span = dmax - dmin + 1;

  if (span < target) {
    // Case 1: some depth holds >= target vertices; keep `target` of them,
    // merge shallower into t and deeper (plus extras) into s, then chain.
    std::map<int, std::vector<std::string>> by_depth;
    for (const auto& [v, d] : depth) by_depth[d].push_back(v);
    int best_d = dmin;
    size_t best = 0;
    for (auto& [d, vs] : by_depth) {
      std::sort(vs.begin(), vs.end());
      if (vs.size() > best) {
        best = vs.size();
        best_d = d;
      }
    }
    std::vector<std::string> keep(by_depth[best_d].begin(),
                                  by_depth[best_d].begin() + target);
    std::set<std::string> keep_set(keep.begin(), keep.end());
    std::set<std::string> to_t, to_s;
    for (const auto& [v, d] : depth) {
      if (keep_set.count(v)) continue;
      (d < best_d ? to_t : to_s).insert(v);
    }
    b.apply(Move::merge_into_t(to_t));
    b.apply(Move::merge_into_s(to_s));
    b.apply(Move::remove_useless_edges());
    for (size_t i = 0; i + 1 < keep.size(); ++i)
      b.apply(Move::add_edge(keep[i], keep[i + 1]));
    return keep;
  }

  // Case 2: take the undirected path between a minimum-depth and a
  // maximum-depth vertex, merge the off-path subtrees by boundary-edge
  // direction, then straighten backward edges one local sink at a time.
  std::string wmin, wmax;
  {
    std::vector<std::string> names(comp.begin(), comp.end());
    for (const auto& v : names) {
      if (wmin.empty() && depth[v] == dmin) wmin = v;
      if (wmax.empty() && depth[v] == dmax) wmax = v;
    }
  }
  // Unique undirected path wmin .. wmax.
  std::map<std::string, std::string> par;
  std::vector<std::string> bfs{wmin};
  par[wmin] = wmin;
  for (size_t qi = 0; qi < bfs.size(); ++qi) {
    std::string x = bfs[qi];
    for (const auto& [w, fwd] : und[x]) {
      (void)fwd;
      if (!par.count(w)) {
        par[w] = x;
        bfs.push_back(w);
      }
    }
  }
  std::vector<std::string> path;
  for (std::string v = wmax;; v = par[v]) {
    path.push_back(v);
    if (v == wmin) break;
  }
  std::reverse(path.begin(), path.end());
  std::set<std::string> on_path(path.begin(), path.end());

  // Off-path subtrees: each hangs on a single boundary edge.  A subtree
  // entered by an edge from the path merges into s (creating u->s), one
  // leaving into the path merges into t (creating t->u): all useless.
  std::set<std::string> to_s, to_t;
  for (const auto& u : path) {
    for (const auto& [w, fwd] : und[u]) {
      if (on_path.count(w)) continue;
      // Collect w's whole off-path subtree.
      std::set<std::string> sub;
      std::vector<std::string> st{w};
      sub.insert(w);
      while (!st.empty()) {
        std::string x = st.back();
        st.pop_back();
        for (const auto& [y, f2] : und[x]) {
          (void)f2;
          if (!on_path.count(y) && sub.insert(y).second) st.push_back(y);
        }
      }
      auto& dst = fwd ? to_s : to_t;
      dst.insert(sub.begin(), sub.end());
    }
  }
  b.apply(Move::merge_into_s(to_s));
  b.apply(Move::merge_into_t(to_t));
  b.apply(Move::remove_useless_edges());

  // Straightening: while a local sink u_j (edges u_{j-1}->u_j and
  // u_{j+1}->u_j) exists, merge it into s and bridge u_{j-1}->u_{j+1}.
  // Each round keeps the forward edge count and removes one backward edge.
  auto forward = [&](const std::string& a, const std::string& c) {
    return b.current().has_edge(a, c);
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t j = 1; j + 1 < path.size(); ++j) {
      if (forward(path[j - 1], path[j]) && forward(path[j + 1], path[j])) {
        b.apply(Move::merge_into_s({path[j]}));
        b.apply(Move::remove_useless_edges());
        b.apply(Move::add_edge(path[j - 1], path[j + 1]));
        path.erase(path.begin() + static_cast<long>(j));
        changed = true;
        break;
      }
    }
  }
  return path;
}

/// Reduces one floating component to a path of exactly p(component)
/// vertices via the disconnected-path family: non-family vertices that
/// reach the family merge into t, those reached from it merge into s, and
/// the surviving family paths are linked into one path.
inline std::vector<std::string> dplen_reduce_component(CertificateBuilder& b,
                                                       const std::set<std::string>& comp) {
  const graphs::DiGraph& g = b.current();
  // Extract the component as its own graph for the DP.
  graphs::DiGraph h;
  for (const auto& v : comp) h.add_vertex(v);
  for (const auto& [u, v] : g.edge_names())
    if (comp.count(u) && comp.count(v)) h.add_edge(u, v);
  auto dp = dplen::general_p_dp(h);

  std::set<std::string> in_family;
  for (const auto& p : dp.witness.paths) in_family.insert(p.begin(), p.end());
  std::set<std::string> to_t, to_s;
  for (const auto& v : comp) {
    if (in_family.count(v)) continue;
    bool inbound = false, outbound = false;
    auto from_v = graphs::reachable_from(h, h.id(v));
    auto to_v = graphs::reaches(h, h.id(v));
    for (const auto& f : in_family) {
      if (from_v[static_cast<size_t>(h.id(f))]) inbound = true;
      if (to_v[static_cast<size_t>(h.id(f))]) outbound = true;
    }
    if (inbound == outbound)
      throw PreconditionError("dplen_reduce: vertex " + v +
                              " is neither strictly inbound nor strictly outbound");
    (inbound ? to_t : to_s).insert(v);
  }
  b.apply(Move::merge_into_t(to_t));
  b.apply(Move::merge_into_s(to_s));
  b.apply(Move::remove_useless_edges());

  std::vector<std::string> linked;
  for (const auto& p : dp.witness.paths) {
    if (!linked.empty()) b.apply(Move::add_edge(linked.back(), p.front()));
    linked.insert(linked.end(), p.begin(), p.end());
  }
  return linked;
}

/// Folds a floating directed path into internally-disjoint s-t paths of
/// length `len` each: segments of len-1 vertices get edges from s and to t,
/// separated by junction vertices merged into s; a short tail merges into s.
inline int fold_path_into_st_segments(CertificateBuilder& b,
                                      const std::vector<std::string>& path, int len) {
  if (len < 2) throw PreconditionError("fold: segment length must be >= 2");
  int m = static_cast<int>(path.size());
  int seg = len - 1;  // interior vertices per s-t path
  int pos = 0, made = 0;
  while (m - pos >= seg) {
    if (!b.current().has_edge("s", path[static_cast<size_t>(pos)]))
      b.apply(Move::add_edge("s", path[static_cast<size_t>(pos)]));
    b.apply(Move::add_edge(path[static_cast<size_t>(pos + seg - 1)], "t"));
    ++made;
    pos += seg;
    if (pos < m) {
      // Junction: its outgoing edge becomes s->next, its incoming one dies.
      b.apply(Move::merge_into_s({path[static_cast<size_t>(pos)]}));
      ++pos;
    }
  }
  std::set<std::string> tail(path.begin() + pos, path.end());
  b.apply(Move::merge_into_s(tail));
  b.apply(Move::remove_useless_edges());
  return made;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Certificate generators

/// Reduces the disjoint tree H next to G to a directed path with at least
/// ceil(sqrt(n_H)) vertices.
inline ReductionCertificate sqrt_path_certificate(const graphs::DiGraph& g,
                                                  const graphs::DiGraph& h) {
  if (!graphs::underlying_is_tree(h))
    throw PreconditionError("sqrt_path_certificate: H is not a directed tree");
  if (h.has_vertex("s") || h.has_vertex("t"))
    throw PreconditionError("sqrt_path_certificate: H must not contain s or t");
  CertificateBuilder b(detail::disjoint_union(g, h));
  std::set<std::string> comp(h.names().begin(), h.names().end());
  auto path = detail::sqrt_reduce_component(b, comp);
  b.note("n_H", static_cast<long>(h.n()));
  b.note("path_vertices", static_cast<long>(path.size()));
  return b.finish();
}

/// Reduces the disjoint tree H to a directed path of exactly p(H) vertices.
inline ReductionCertificate dplen_path_certificate(const graphs::DiGraph& g,
                                                   const graphs::DiGraph& h) {
  if (!graphs::underlying_is_tree(h))
    throw PreconditionError("dplen_path_certificate: H is not a directed tree");
  if (h.has_vertex("s") || h.has_vertex("t"))
    throw PreconditionError("dplen_path_certificate: H must not contain s or t");
  CertificateBuilder b(detail::disjoint_union(g, h));
  std::set<std::string> comp(h.names().begin(), h.names().end());
  auto path = detail::dplen_reduce_component(b, comp);
  b.note("n_H", static_cast<long>(h.n()));
  b.note("path_vertices", static_cast<long>(path.size()));
  return b.finish();
}

/// The two-part lower-bound reduction for a general directed tree with an
/// s-t path: part 1 collapses the s-side and t-side halos and rebuilds the
/// floating remainder into disjoint length-l s-t paths; part 2 yields a
/// flow-out tree (and, mirrored, a flow-in tree) by merging the complement.
inline std::vector<ReductionCertificate> thm51_lower_certificates(
    const graphs::DiGraph& g) {
  if (!graphs::underlying_is_tree(g))
    throw PreconditionError("thm51: input is not a directed tree");
  auto path = detail::tree_st_path(g);
  int ell = static_cast<int>(path.size()) - 1;
  std::set<std::string> on_path(path.begin(), path.end());
  auto [s, t] = g.st();
  // Halos use reachability that avoids the opposite terminal: a vertex
  // hanging below t is not usefully s-side (its link dies with the useless
  // t-edges), so it belongs to the floating remainder instead.
  auto reach_avoiding = [&](int start, int avoid, bool forward) {
    std::vector<char> seen(static_cast<size_t>(g.n()), 0);
    seen[static_cast<size_t>(start)] = 1;
    std::vector<int> stack{start};
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (auto [x, y] : g.edges()) {
        int from = forward ? x : y, to = forward ? y : x;
        if (from != v || to == avoid || seen[static_cast<size_t>(to)]) continue;
        seen[static_cast<size_t>(to)] = 1;
        stack.push_back(to);
      }
    }
    return seen;
  };
  auto from_s = reach_avoiding(s, t, true);
  auto to_t = reach_avoiding(t, s, false);
  std::set<std::string> hs, ht, dbar;
  for (int v = 0; v < g.n(); ++v) {
    const std::string& name = g.name(v);
    if (on_path.count(name)) continue;
    if (from_s[static_cast<size_t>(v)])
      hs.insert(name);
    else if (to_t[static_cast<size_t>(v)])
      ht.insert(name);
    else
      dbar.insert(name);
  }

  std::vector<ReductionCertificate> out;

  // Part 1: single path plus floating trees, then fold into s-t paths.
  {
    CertificateBuilder b(g);
    b.apply(Move::merge_into_s(hs));
    b.apply(Move::merge_into_t(ht));
    b.apply(Move::remove_useless_edges());
    auto comps = detail::components_of(b.current(), dbar);
    std::ostringstream sizes;
    std::vector<std::string> linked;
    for (const auto& comp : comps) {
      sizes << comp.size() << ",";
      auto p = detail::sqrt_reduce_component(b, comp);
      if (!linked.empty()) b.apply(Move::add_edge(linked.back(), p.front()));
      linked.insert(linked.end(), p.begin(), p.end());
    }
    int made = 0;
    if (!linked.empty()) {
      if (ell >= 2) {
        made = detail::fold_path_into_st_segments(b, linked, ell);
      } else {
        // A direct s-t edge leaves no room for extra paths of the same
        // length; the rebuilt remainder simply merges into s.
        b.apply(Move::merge_into_s({linked.begin(), linked.end()}));
        b.apply(Move::remove_useless_edges());
      }
    }
    b.note("ell", ell);
    b.note("d_bar", static_cast<long>(dbar.size()));
    b.note("component_sizes", sizes.str());
    b.note("long_path_vertices", static_cast<long>(linked.size()));
    b.note("extra_st_paths", made);
    b.note("part", "1");
    out.push_back(b.finish());
  }

  // Part 2: merge everything outside H_s and the path into t (flow-out),
  // and dually into s (flow-in).
  {
    CertificateBuilder b(g);
    std::set<std::string> rest;
    for (const auto& v : ht) rest.insert(v);
    for (const auto& v : dbar) rest.insert(v);
    b.apply(Move::merge_into_t(rest));
    b.apply(Move::remove_useless_edges());
    b.note("part", "2-flow-out");
    out.push_back(b.finish());
  }
  {
    CertificateBuilder b(g);
    std::set<std::string> rest;
    for (const auto& v : hs) rest.insert(v);
    for (const auto& v : dbar) rest.insert(v);
    b.apply(Move::merge_into_s(rest));
    b.apply(Move::remove_useless_edges());
    b.note("part", "2-flow-in");
    out.push_back(b.finish());
  }
  return out;
}

/// The flow-out-tree lower-bound reduction for index i.  For i = 1 every
/// off-path edge a->b becomes s->b.  For i >= 2 the shallow-subtree set
/// merges into s, then either many depth-ceil(k/2) vertices spawn parallel
/// equal-length s-t paths (Case 1) or the largest remaining subtree is
/// rebuilt into extra s-t paths of length ceil(k/2) (Case 2, two subcases
/// by whether t lies in that subtree).
inline ReductionCertificate flowout_lower_certificate(const graphs::DiGraph& g, int i) {
  auto kind = graphs::classify_tree(g);
  if (kind.tag != graphs::TreeKindTag::FlowOut || *kind.root != "s")
    throw PreconditionError("flowout_lower_certificate: not a flow-out tree rooted at s");
  if (!g.has_vertex("t")) throw PreconditionError("flowout_lower_certificate: t missing");
  auto path = detail::tree_st_path(g);
  int ell = static_cast<int>(path.size()) - 1;
  int lglg = (ell >= 2) ? static_cast<int>(std::ceil(std::log2(std::log2(ell)))) : 0;
  if (i < 1 || i > std::max(1, lglg))
    throw PreconditionError("flowout_lower_certificate: i out of range");

  CertificateBuilder b(g);
  b.note("ell", ell);
  b.note("i", i);

  std::set<std::string> on_path(path.begin(), path.end());
  if (i == 1) {
    for (const auto& [u, v] : g.edge_names()) {
      bool on = on_path.count(u) && on_path.count(v);
      if (!on && u != "s") b.apply(Move::replace_edge_with_source_s(u, v));
    }
    b.note("case", "i=1");
    return b.finish();
  }

  long k = 1;
  for (int e = 0; e < (1 << i); ++e) k *= 2;  // k = 2^(2^i)
  if (ell < k)
    throw PreconditionError("flowout_lower_certificate: path length below k = 2^(2^i)");
  int half_up = static_cast<int>((k + 1) / 2);
  int half_dn = static_cast<int>(k / 2);
  b.note("k", k);

  auto dist = graphs::distances_from(g, g.id("s"));
  // Maximum descendant distance per vertex (descendants are reflexive).
  auto out_adj = g.out_adj();
  std::vector<int> maxdesc(static_cast<size_t>(g.n()), 0);
  {
    // Reverse BFS order from s.
    std::vector<int> order;
    std::vector<int> q{g.id("s")};
    for (size_t qi = 0; qi < q.size(); ++qi) {
      order.push_back(q[qi]);
      for (int w : out_adj[static_cast<size_t>(q[qi])]) q.push_back(w);
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      maxdesc[static_cast<size_t>(*it)] = dist[static_cast<size_t>(*it)];
      for (int w : out_adj[static_cast<size_t>(*it)])
        maxdesc[static_cast<size_t>(*it)] =
            std::max(maxdesc[static_cast<size_t>(*it)], maxdesc[static_cast<size_t>(w)]);
    }
  }
  std::set<std::string> s1;
  for (int v = 0; v < g.n(); ++v)
    if (g.name(v) != "s" && g.name(v) != "t" && maxdesc[static_cast<size_t>(v)] < k)
      s1.insert(g.name(v));
  b.apply(Move::merge_into_s(s1));
  b.apply(Move::remove_useless_edges());
  long c_i = b.current().n() - 1;  // remaining vertices other than s
  b.note("c_i_remaining", c_i);

  // Snapshot: the case analysis below plans against the post-S_1 graph
  // even while later moves mutate the builder's state.
  const graphs::DiGraph cur = b.current();
  auto cdist = graphs::distances_from(cur, cur.id("s"));
  long dbar_k = 0;
  for (int v = 0; v < cur.n(); ++v)
    if (cdist[static_cast<size_t>(v)] >= 0 && cdist[static_cast<size_t>(v)] <= half_up)
      ++dbar_k;
  b.note("dbar_k", dbar_k);

  std::vector<std::string> depth_set;  // vertices at depth exactly ceil(k/2)
  for (int v = 0; v < cur.n(); ++v)
    if (cdist[static_cast<size_t>(v)] == half_up) depth_set.push_back(cur.name(v));
  std::sort(depth_set.begin(), depth_set.end());

  if (static_cast<double>(dbar_k) >= std::sqrt(static_cast<double>(c_i))) {
    // Case 1: one path of floor(k/2) edges below every depth-ceil(k/2)
    // vertex, everything else merged away.
    b.note("case", "1");
    auto co = cur.out_adj();
    auto cmaxd = [&]() {
      std::vector<int> md(static_cast<size_t>(cur.n()), 0);
      std::vector<int> order{cur.id("s")};
      for (size_t qi = 0; qi < order.size(); ++qi)
        for (int w : co[static_cast<size_t>(order[qi])]) order.push_back(w);
      for (auto it = order.rbegin(); it != order.rend(); ++it) {
        md[static_cast<size_t>(*it)] = cdist[static_cast<size_t>(*it)];
        for (int w : co[static_cast<size_t>(*it)])
          md[static_cast<size_t>(*it)] =
              std::max(md[static_cast<size_t>(*it)], md[static_cast<size_t>(w)]);
      }
      return md;
    }();
    auto reaches_t = graphs::reaches(cur, cur.id("t"));
    std::string t_anc;  // the depth-ceil(k/2) ancestor of t
    for (const auto& v : depth_set)
      if (reaches_t[static_cast<size_t>(cur.id(v))]) t_anc = v;
    std::set<std::string> path_vertices, w_ends;
    for (const auto& vname : depth_set) {
      // Walk floor(k/2) edges downward; toward t when v is t's ancestor.
      int v = cur.id(vname);
      path_vertices.insert(vname);
      for (int step = 0; step < half_dn; ++step) {
        int next = -1;
        for (int w : co[static_cast<size_t>(v)]) {
          if (vname == t_anc) {
            if (reaches_t[static_cast<size_t>(w)]) {
              next = w;
              break;
            }
            continue;
          }
          if (cmaxd[static_cast<size_t>(w)] >= k && next < 0) next = w;
        }
        if (next < 0)
          throw PreconditionError("flowout_lower_certificate: path below " + vname +
                                  " too short");
        v = next;
        path_vertices.insert(cur.name(v));
      }
      w_ends.insert(cur.name(v));
    }
    // Descendants of the path ends merge into t; everything else off the
    // chosen paths merges into s.
    std::set<std::string> desc_t;
    for (const auto& w : w_ends) {
      auto rf = graphs::reachable_from(cur, cur.id(w));
      for (int v = 0; v < cur.n(); ++v)
        if (rf[static_cast<size_t>(v)] && cur.name(v) != w && cur.name(v) != "t")
          desc_t.insert(cur.name(v));
    }
    std::set<std::string> to_s;
    for (int v = 0; v < cur.n(); ++v) {
      const std::string& name = cur.name(v);
      if (name == "s" || name == "t") continue;
      if (path_vertices.count(name) || desc_t.count(name)) continue;
      to_s.insert(name);
    }
    b.apply(Move::merge_into_s(to_s));
    b.apply(Move::merge_into_t(desc_t));
    b.apply(Move::remove_useless_edges());
    for (const auto& w : w_ends)
      if (w != "t" && !b.current().has_edge(w, "t")) b.apply(Move::add_edge(w, "t"));
    b.note("parallel_paths", static_cast<long>(depth_set.size()));
    return b.finish();
  }

  // Case 2: pick the depth-ceil(k/2) vertex with the largest subtree.
  b.note("case", "2");
  std::string vstar;
  long best_sub = -1;
  std::map<std::string, std::set<std::string>> subtrees;
  for (const auto& vname : depth_set) {
    auto rf = graphs::reachable_from(cur, cur.id(vname));
    std::set<std::string> sub;
    for (int v = 0; v < cur.n(); ++v)
      if (rf[static_cast<size_t>(v)] && cur.name(v) != vname) sub.insert(cur.name(v));
    if (static_cast<long>(sub.size()) > best_sub) {
      best_sub = static_cast<long>(sub.size());
      vstar = vname;
    }
    subtrees[vname] = std::move(sub);
  }
  if (vstar.empty()) throw PreconditionError("flowout_lower_certificate: empty depth set");
  std::set<std::string> h_set = subtrees[vstar];
  bool t_in_h = h_set.count("t") != 0;
  h_set.erase("t");
  b.note("subcase", t_in_h ? "1" : "2");
  b.apply(Move::merge_into_t({vstar}));

  if (t_in_h) {
    // Merge the interior of the old vstar..t path into t as well.
    std::vector<std::string> vt_path;
    {
      auto co = cur.out_adj();
      std::vector<int> parent(static_cast<size_t>(cur.n()), -1);
      std::vector<int> st{cur.id(vstar)};
      std::vector<bool> seen(static_cast<size_t>(cur.n()), false);
      seen[static_cast<size_t>(cur.id(vstar))] = true;
      while (!st.empty()) {
        int v = st.back();
        st.pop_back();
        for (int w : co[static_cast<size_t>(v)])
          if (!seen[static_cast<size_t>(w)]) {
            seen[static_cast<size_t>(w)] = true;
            parent[static_cast<size_t>(w)] = v;
            st.push_back(w);
          }
      }
      for (int v = parent[static_cast<size_t>(cur.id("t"))]; v >= 0 && v != cur.id(vstar);
           v = parent[static_cast<size_t>(v)])
        vt_path.push_back(cur.name(v));
    }
    std::set<std::string> interior(vt_path.begin(), vt_path.end());
    for (const auto& v : interior) h_set.erase(v);
    b.apply(Move::merge_into_t(interior));
  } else {
    // w: the s-t path vertex at distance ceil(k/2) from t.
    std::string w = path[static_cast<size_t>(ell - half_up)];
    if (w == "s")
      throw PreconditionError("flowout_lower_certificate: degenerate w = s");
    b.apply(Move::merge_into_s({w}));
  }
  b.apply(Move::remove_useless_edges());

  // Merge everything not in H and not on a current s-t path into s.
  {
    const graphs::DiGraph& c2 = b.current();
    auto rs = graphs::reachable_from(c2, c2.id("s"));
    auto rt = graphs::reaches(c2, c2.id("t"));
    std::set<std::string> to_s;
    for (int v = 0; v < c2.n(); ++v) {
      const std::string& name = c2.name(v);
      if (name == "s" || name == "t" || h_set.count(name)) continue;
      if (rs[static_cast<size_t>(v)] && rt[static_cast<size_t>(v)]) continue;
      to_s.insert(name);
    }
    b.apply(Move::merge_into_s(to_s));
    b.apply(Move::remove_useless_edges());
  }

  // The floating leftovers of H become paths, link them, and fold into
  // s-t paths of length ceil(k/2).
  {
    std::set<std::string> floating;
    const graphs::DiGraph& c2 = b.current();
    auto rs = graphs::reachable_from(c2, c2.id("s"));
    for (int v = 0; v < c2.n(); ++v)
      if (!rs[static_cast<size_t>(v)] && c2.name(v) != "t") floating.insert(c2.name(v));
    auto comps = detail::components_of(c2, floating);
    std::ostringstream sizes;
    std::vector<std::string> linked;
    for (const auto& comp : comps) {
      sizes << comp.size() << ",";
      auto p = detail::sqrt_reduce_component(b, comp);
      if (!linked.empty()) b.apply(Move::add_edge(linked.back(), p.front()));
      linked.insert(linked.end(), p.begin(), p.end());
    }
    int made = 0;
    if (!linked.empty()) made = detail::fold_path_into_st_segments(b, linked, half_up);
    b.note("floating_sizes", sizes.str());
    b.note("extra_st_paths", made);
  }
  return b.finish();
}

// ---------------------------------------------------------------------------
// Upper-bound graph sequence

struct GraphSequence {
  std::vector<graphs::DiGraph> graphs_seq;  // G_1 .. G_{ceil(lglg l)+1}
  std::vector<std::set<std::string>> p_s, p_t;  // per step >= 2
  int c_bar = 0;
};

namespace detail {

inline void isolate(graphs::DiGraph& g, const std::set<std::string>& names) {
  graphs::DiGraph h;
  for (int i = 0; i < g.n(); ++i) h.add_vertex(g.name(i));
  for (auto [u, v] : g.edges())
    if (!names.count(g.name(u)) && !names.count(g.name(v))) h.put_edge(u, v);
  g = h;
}

}  // namespace detail

/// The upper-bound rewrite sequence: G_1 strips the c-bar vertices farther
/// than l from s (or to t); each later step grabs the finished fringe
/// within distance 2^(2^i) (leaves on the s side, sources on the t side,
/// plus their connecting paths) and rewires it straight onto s or t.  In
/// the final graph every vertex is a direct neighbor of s or t, on the s-t
/// path, or isolated.
inline GraphSequence upper_graph_sequence(const graphs::DiGraph& g) {
  if (!graphs::underlying_is_tree(g))
    throw PreconditionError("upper_graph_sequence: input is not a directed tree");
  auto path = detail::tree_st_path(g);
  int ell = static_cast<int>(path.size()) - 1;
  int steps = (ell >= 2) ? static_cast<int>(std::ceil(std::log2(std::log2(
                               std::max(2, ell))))) : 0;
  std::set<std::string> on_path(path.begin(), path.end());

  GraphSequence seq;
  graphs::DiGraph cur = g;
  {
    // Normalize: vertices in neither halo nor path lose their edges.
    auto from_s = graphs::reachable_from(cur, cur.id("s"));
    auto to_t = graphs::reaches(cur, cur.id("t"));
    std::set<std::string> stray;
    for (int v = 0; v < cur.n(); ++v)
      if (!from_s[static_cast<size_t>(v)] && !to_t[static_cast<size_t>(v)])
        stray.insert(cur.name(v));
    detail::isolate(cur, stray);
  }
  {
    // G_1: strip halo vertices farther than l from s / to t.  The stray
    // vertices isolated above are not counted; they are the d-bar family.
    auto from_s = graphs::reachable_from(cur, cur.id("s"));
    auto to_t = graphs::reaches(cur, cur.id("t"));
    auto ds = graphs::distances_from(cur, cur.id("s"));
    auto dt = graphs::distances_to(cur, cur.id("t"));
    std::set<std::string> far;
    for (int v = 0; v < cur.n(); ++v) {
      if (!from_s[static_cast<size_t>(v)] && !to_t[static_cast<size_t>(v)]) continue;
      int a = ds[static_cast<size_t>(v)], bd = dt[static_cast<size_t>(v)];
      bool near = (a >= 0 && a <= ell) || (bd >= 0 && bd <= ell);
      if (!near) far.insert(cur.name(v));
    }
    seq.c_bar = static_cast<int>(far.size());
    detail::isolate(cur, far);
    seq.graphs_seq.push_back(cur);
  }

  for (int i = 2; i <= steps + 1; ++i) {
    // Threshold 2^(2^i); the final step covers everything (>= l^2 > l).
    long theta;
    if (i >= 6 || (1L << (1 << i)) > 4L * ell * ell)
      theta = 4L * static_cast<long>(ell) * ell + 4;
    else
      theta = 1L << (1 << i);
    auto ds = graphs::distances_from(cur, cur.id("s"));
    auto dt = graphs::distances_to(cur, cur.id("t"));
    auto out = cur.out_adj();
    auto in = cur.in_adj();

    std::set<std::string> ps, pt;
    for (int v = 0; v < cur.n(); ++v) {
      const std::string& name = cur.name(v);
      if (name == "s" || name == "t" || on_path.count(name)) continue;
      int d = ds[static_cast<size_t>(v)];
      if (d >= 0 && d < theta && out[static_cast<size_t>(v)].empty()) {
        // Leaf near s: take it and its ancestor chain back to s.
        int x = v;
        while (x >= 0 && cur.name(x) != "s" && !on_path.count(cur.name(x))) {
          ps.insert(cur.name(x));
          x = in[static_cast<size_t>(x)].empty() ? -1 : in[static_cast<size_t>(x)][0];
        }
      }
      int d2 = dt[static_cast<size_t>(v)];
      if (d2 >= 0 && d2 < theta && in[static_cast<size_t>(v)].empty()) {
        // Source near t: take it and its chain toward t.
        int x = v;
        while (x >= 0 && cur.name(x) != "t" && !on_path.count(cur.name(x))) {
          pt.insert(cur.name(x));
          x = out[static_cast<size_t>(x)].empty() ? -1 : out[static_cast<size_t>(x)][0];
        }
      }
    }
    graphs::DiGraph next;
    for (int v = 0; v < cur.n(); ++v) next.add_vertex(cur.name(v));
    for (auto [u, v] : cur.edges()) {
      // Grabbed vertices shed every old edge and hang directly off s / t.
      if (ps.count(cur.name(u)) || pt.count(cur.name(u))) continue;
      if (ps.count(cur.name(v)) || pt.count(cur.name(v))) continue;
      next.put_edge(u, v);
    }
    for (const auto& v : ps) next.put_edge(next.id("s"), next.id(v));
    for (const auto& v : pt) next.put_edge(next.id(v), next.id("t"));
    cur = next;
    {
      // Subtrees orphaned by an ancestor's departure can never reconnect;
      // strip their edges so they end up isolated.
      auto from_s = graphs::reachable_from(cur, cur.id("s"));
      auto to_t = graphs::reaches(cur, cur.id("t"));
      std::set<std::string> stray;
      for (int v = 0; v < cur.n(); ++v)
        if (!from_s[static_cast<size_t>(v)] && !to_t[static_cast<size_t>(v)])
          stray.insert(cur.name(v));
      detail::isolate(cur, stray);
    }
    seq.graphs_seq.push_back(cur);
    seq.p_s.push_back(std::move(ps));
    seq.p_t.push_back(std::move(pt));
  }
  return seq;
}

/// The final-graph invariant of the upper-bound sequence.
inline bool final_graph_normalized(const graphs::DiGraph& g) {
  auto [s, t] = g.st();
  std::set<int> on_path;
  auto from_s = graphs::reachable_from(g, s);
  auto to_t = graphs::reaches(g, t);
  for (int v = 0; v < g.n(); ++v)
    if (from_s[static_cast<size_t>(v)] && to_t[static_cast<size_t>(v)]) on_path.insert(v);
  for (int v = 0; v < g.n(); ++v) {
    if (v == s || v == t || on_path.count(v)) continue;
    int deg = 0;
    bool direct = false;
    for (auto [a, bb] : g.edges()) {
      if (a == v || bb == v) {
        ++deg;
        if ((a == s && bb == v) || (a == v && bb == t)) direct = true;
      }
    }
    if (deg == 0) continue;          // isolated
    if (deg == 1 && direct) continue;  // single edge to s or t
    return false;
  }
  return true;
}

}  // namespace msnlab::reduce

#endif  // MSNLAB_REDUCE_HPP_
