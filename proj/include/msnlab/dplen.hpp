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

#ifndef MSNLAB_DPLEN_HPP_
#define MSNLAB_DPLEN_HPP_

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "msnlab/common.hpp"
#include "msnlab/graphs.hpp"

namespace msnlab::dplen {

/// A set of vertex-disjoint directed paths; single vertices count as
/// length-0 paths.  Valid (per is_family) when additionally no directed
/// path of the host tree connects a vertex of one family path to a vertex
/// of another, in either direction.
struct PathFamily {
  std::vector<std::vector<std::string>> paths;

  int size() const {
    int total = 0;
    for (const auto& p : paths) total += static_cast<int>(p.size());
    return total;
  }
};

namespace detail {

inline std::vector<std::vector<bool>> reach_matrix(const graphs::DiGraph& h) {
  std::vector<std::vector<bool>> reach;
  reach.reserve(static_cast<size_t>(h.n()));
  for (int v = 0; v < h.n(); ++v) reach.push_back(graphs::reachable_from(h, v));
  return reach;
}

}  // namespace detail

/// Checks the disconnected-path-family invariants: every listed path is a
/// directed path of H, paths are vertex-disjoint, and no directed path of H
/// connects two distinct family paths.
inline bool is_family(const graphs::DiGraph& h, const PathFamily& fam) {
  std::vector<std::vector<int>> paths;
  std::set<int> used;
  for (const auto& p : fam.paths) {
    if (p.empty()) return false;
    std::vector<int> ids;
    for (const auto& name : p) {
      if (!h.has_vertex(name)) return false;
      ids.push_back(h.id(name));
    }
    for (size_t k = 0; k + 1 < ids.size(); ++k)
      if (!h.has_edge(ids[k], ids[k + 1])) return false;
    for (int v : ids)
      if (!used.insert(v).second) return false;  // overlap
    paths.push_back(std::move(ids));
  }
  auto reach = detail::reach_matrix(h);
  for (size_t i = 0; i < paths.size(); ++i)
    for (size_t j = 0; j < paths.size(); ++j) {
      if (i == j) continue;
      for (int a : paths[i])
        for (int b : paths[j])
          if (reach[static_cast<size_t>(a)][static_cast<size_t>(b)]) return false;
    }
  return true;
}

struct BruteForceBudget {
  int max_n = 12;
};

/// Exact disconnected-path length by exhaustive search over all families.
/// All directed paths of the tree are enumerated, pairwise compatibility is
/// precomputed, and a branch-and-bound scan finds the maximum total vertex
/// count.
inline std::pair<int, PathFamily> brute_force_p(const graphs::DiGraph& h,
                                                const BruteForceBudget& budget = {}) {
  if (!graphs::underlying_is_tree(h))
    throw PreconditionError("brute_force_p: input is not a directed tree");
  int n = h.n();
  if (n > budget.max_n)
    throw BudgetExceeded("brute_force_p: " + std::to_string(n) + " vertices exceed limit " +
                         std::to_string(budget.max_n));
  auto out = h.out_adj();
  // Every directed simple path, as a vertex list.
  std::vector<std::vector<int>> paths;
  for (int start = 0; start < n; ++start) {
    std::vector<int> cur{start};
    std::function<void()> extend = [&]() {
      paths.push_back(cur);
      for (int w : out[static_cast<size_t>(cur.back())]) {
        cur.push_back(w);
        extend();
        cur.pop_back();
      }
    };
    extend();
  }
  auto reach = detail::reach_matrix(h);
  int np = static_cast<int>(paths.size());
  // Per path: its vertex mask and the reflexive forward closure of its
  // vertices.  Two paths are compatible when neither reaches the other;
  // merely sharing an ancestor is fine.
  std::vector<uint32_t> mask(static_cast<size_t>(np), 0);
  std::vector<uint32_t> fwd(static_cast<size_t>(np), 0);
  for (int i = 0; i < np; ++i) {
    uint32_t m = 0, f = 0;
    for (int v : paths[static_cast<size_t>(i)]) {
      m |= uint32_t{1} << v;
      for (int w = 0; w < n; ++w)
        if (reach[static_cast<size_t>(v)][static_cast<size_t>(w)]) f |= uint32_t{1} << w;
    }
    mask[static_cast<size_t>(i)] = m;
    fwd[static_cast<size_t>(i)] = m | f;
  }
  // Longest paths first helps the bound.
  std::vector<int> order(static_cast<size_t>(np));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return paths[static_cast<size_t>(a)].size() > paths[static_cast<size_t>(b)].size();
  });
  std::vector<int> suffix_best(static_cast<size_t>(np) + 1, 0);
  for (int i = np - 1; i >= 0; --i)
    suffix_best[static_cast<size_t>(i)] =
        suffix_best[static_cast<size_t>(i) + 1] +
        static_cast<int>(paths[static_cast<size_t>(order[static_cast<size_t>(i)])].size());

  int best = 0;
  std::vector<int> best_sel, sel;
  std::function<void(int, int)> go = [&](int idx, int got) {
    if (got > best) {
      best = got;
      best_sel = sel;
    }
    if (idx >= np || got + suffix_best[static_cast<size_t>(idx)] <= best) return;
    for (int i = idx; i < np; ++i) {
      if (got + suffix_best[static_cast<size_t>(i)] <= best) break;
      int p = order[static_cast<size_t>(i)];
      bool ok = true;
      for (int q : sel)
        if ((fwd[static_cast<size_t>(p)] & mask[static_cast<size_t>(q)]) ||
            (fwd[static_cast<size_t>(q)] & mask[static_cast<size_t>(p)])) {
          ok = false;
          break;
        }
      if (!ok) continue;
      sel.push_back(p);
      go(i + 1, got + static_cast<int>(paths[static_cast<size_t>(p)].size()));
      sel.pop_back();
    }
  };
  go(0, 0);

  PathFamily fam;
  for (int p : best_sel) {
    std::vector<std::string> names;
    for (int v : paths[static_cast<size_t>(p)]) names.push_back(h.name(v));
    fam.paths.push_back(std::move(names));
  }
  return {best, fam};
}

// ---------------------------------------------------------------------------
// Flow-out trees: the b(v)/d(v) recursion with a greedy witness

struct BTable {
  std::string root;
  std::map<std::string, int> b, d;
  PathFamily witness;

  int b_root() const { return b.at(root); }
};

/// Computes b(v) = max(sum of children's b, d(v)) over a flow-out tree,
/// where d(v) is the maximum vertex count of a directed path starting at v.
/// b(root) equals the disconnected-path length; a witness family of that
/// size is built by a greedy topological scan (skip v when it is reachable
/// from a chosen path or its children's sum attains b(v); otherwise take
/// the longest path from v).
inline BTable flowout_b(const graphs::DiGraph& h) {
  auto kind = graphs::classify_tree(h);
  if (kind.tag != graphs::TreeKindTag::FlowOut)
    throw PreconditionError("flowout_b: not a flow-out tree");
  int n = h.n();
  int root = h.id(*kind.root);
  auto out = h.out_adj();
  // Topological order: BFS from the root along out-edges.
  std::vector<int> topo;
  topo.reserve(static_cast<size_t>(n));
  std::deque<int> q{root};
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    topo.push_back(v);
    for (int w : out[static_cast<size_t>(v)]) q.push_back(w);
  }
  std::vector<int> b(static_cast<size_t>(n)), d(static_cast<size_t>(n));
  std::vector<int> best_child(static_cast<size_t>(n), -1);  // argmax d, for the longest path
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    int v = *it;
    int sum = 0, maxd = 0;
    for (int w : out[static_cast<size_t>(v)]) {
      sum += b[static_cast<size_t>(w)];
      if (d[static_cast<size_t>(w)] > maxd) {
        maxd = d[static_cast<size_t>(w)];
        best_child[static_cast<size_t>(v)] = w;
      }
    }
    d[static_cast<size_t>(v)] = 1 + maxd;
    b[static_cast<size_t>(v)] = out[static_cast<size_t>(v)].empty()
                                    ? 1
                                    : std::max(sum, d[static_cast<size_t>(v)]);
  }

  BTable table;
  table.root = h.name(root);
  for (int v = 0; v < n; ++v) {
    table.b[h.name(v)] = b[static_cast<size_t>(v)];
    table.d[h.name(v)] = d[static_cast<size_t>(v)];
  }

  // Greedy witness.
  std::vector<bool> blocked(static_cast<size_t>(n), false);  // reachable from a chosen path
  for (int v : topo) {
    if (blocked[static_cast<size_t>(v)]) continue;
    int sum = 0;
    for (int w : out[static_cast<size_t>(v)]) sum += b[static_cast<size_t>(w)];
    if (!out[static_cast<size_t>(v)].empty() && b[static_cast<size_t>(v)] == sum) continue;
    // Take the longest path from v and block its vertices' whole subtrees.
    std::vector<std::string> path;
    for (int cur = v; cur >= 0; cur = best_child[static_cast<size_t>(cur)]) {
      path.push_back(h.name(cur));
      std::deque<int> bq{cur};
      while (!bq.empty()) {
        int x = bq.front();
        bq.pop_front();
        if (blocked[static_cast<size_t>(x)]) continue;
        blocked[static_cast<size_t>(x)] = true;
        for (int w : out[static_cast<size_t>(x)]) bq.push_back(w);
      }
    }
    table.witness.paths.push_back(std::move(path));
  }
  return table;
}

// ---------------------------------------------------------------------------
// General directed trees: the six-function linear-time DP

struct DpTables {
  std::vector<std::string> ordering;  // v_1 .. v_n (level order from the root)
  // Indexed by position in `ordering`.
  std::vector<int> a1, a2, a3, a4, a5, a6;
};

struct DpResult {
  int p;
  DpTables tables;
  PathFamily witness;
};

/// Linear-time disconnected-path length for an arbitrary directed tree,
/// processing a level-order traversal from the chosen root in reverse.  Per
/// position i the six values are, over the subtree V_i hanging below v_i:
///   a1: best family avoiding v_i with nothing reachable from v_i,
///   a2: best family avoiding v_i with nothing reaching v_i,
///   a3: best family whose path at v_i leaves v_i (path starts at v_i),
///   a4: dual (path ends at v_i),
///   a5: best family with v_i on a path,
///   a6: p(V_i) = max(a1, a2, a5).
/// The witness family is reconstructed from recorded argmax choices.
inline DpResult general_p_dp(const graphs::DiGraph& h,
                             const std::optional<std::string>& root = std::nullopt,
                             bool want_witness = true) {
  if (!graphs::underlying_is_tree(h))
    throw PreconditionError("general_p_dp: input is not a directed tree");
  int n = h.n();
  int r = root ? h.id(*root) : 0;

  // Undirected adjacency in flat CSR form: (neighbor, directed u -> v?).
  std::vector<int> off(static_cast<size_t>(n) + 1, 0);
  for (auto [u, v] : h.edges()) {
    ++off[static_cast<size_t>(u) + 1];
    ++off[static_cast<size_t>(v) + 1];
  }
  for (int i = 0; i < n; ++i) off[static_cast<size_t>(i) + 1] += off[static_cast<size_t>(i)];
  std::vector<std::pair<int, bool>> und_flat(off[static_cast<size_t>(n)]);
  std::vector<int> fill(off.begin(), off.end() - 1);
  for (auto [u, v] : h.edges()) {
    und_flat[static_cast<size_t>(fill[static_cast<size_t>(u)]++)] = {v, true};
    und_flat[static_cast<size_t>(fill[static_cast<size_t>(v)]++)] = {u, false};
  }
  auto und = [&](int v) {
    return std::span(und_flat.data() + off[static_cast<size_t>(v)],
                     und_flat.data() + off[static_cast<size_t>(v) + 1]);
  };

  // Level order ignoring directions; pos[v] = index in the ordering.
  std::vector<int> order;
  order.reserve(static_cast<size_t>(n));
  std::vector<int> pos(static_cast<size_t>(n), -1);
  std::deque<int> q{r};
  pos[static_cast<size_t>(r)] = 0;
  order.push_back(r);
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (auto [w, fwd] : und(v)) {
      (void)fwd;
      if (pos[static_cast<size_t>(w)] < 0) {
        pos[static_cast<size_t>(w)] = static_cast<int>(order.size());
        order.push_back(w);
        q.push_back(w);
      }
    }
  }
  // Every vertex has at most one earlier-indexed neighbor (its BFS parent);
  // the tree precondition guarantees this, asserted here.
  for (int v = 0; v < n; ++v) {
    int earlier = 0;
    for (auto [w, fwd] : und(v)) {
      (void)fwd;
      if (pos[static_cast<size_t>(w)] < pos[static_cast<size_t>(v)]) ++earlier;
    }
    if (earlier > 1) throw PreconditionError("general_p_dp: ordering property violated");
  }

  std::vector<int> a1(static_cast<size_t>(n)), a2(static_cast<size_t>(n)),
      a3(static_cast<size_t>(n)), a4(static_cast<size_t>(n)), a5(static_cast<size_t>(n)),
      a6(static_cast<size_t>(n));
  // Argmax choices for witness reconstruction, vertex ids (-1 = none).
  std::vector<int> c3(static_cast<size_t>(n), -1), c4(static_cast<size_t>(n), -1);
  enum Tag : uint8_t { TAG_A1, TAG_A2, TAG_A5 };
  std::vector<uint8_t> tag6(static_cast<size_t>(n), TAG_A1);

  for (int idx = n - 1; idx >= 0; --idx) {
    int v = order[static_cast<size_t>(idx)];
    int s_a1_out = 0, s_a6_in = 0, s_a2_in = 0, s_a6_out = 0;
    int m3 = 0, m4 = 0;
    for (auto [w, fwd] : und(v)) {
      if (pos[static_cast<size_t>(w)] < idx) continue;  // BFS parent, not in V_i
      size_t ws = static_cast<size_t>(w);
      if (fwd) {
        s_a1_out += a1[ws];
        s_a6_out += a6[ws];
        if (a3[ws] - a1[ws] > m3) {
          m3 = a3[ws] - a1[ws];
          c3[static_cast<size_t>(v)] = w;
        }
      } else {
        s_a2_in += a2[ws];
        s_a6_in += a6[ws];
        if (a4[ws] - a2[ws] > m4) {
          m4 = a4[ws] - a2[ws];
          c4[static_cast<size_t>(v)] = w;
        }
      }
    }
    size_t vs = static_cast<size_t>(v);
    a1[vs] = s_a1_out + s_a6_in;
    a2[vs] = s_a2_in + s_a6_out;
    int base = 1 + s_a1_out + s_a2_in;
    a3[vs] = base + m3;
    a4[vs] = base + m4;
    a5[vs] = base + m3 + m4;
    a6[vs] = std::max({a1[vs], a2[vs], a5[vs]});
    if (a6[vs] == a5[vs])
      tag6[vs] = TAG_A5;
    else if (a6[vs] == a1[vs])
      tag6[vs] = TAG_A1;
    else
      tag6[vs] = TAG_A2;
  }

  DpResult res;
  res.p = a6[static_cast<size_t>(r)];
  res.tables.ordering.reserve(static_cast<size_t>(n));
  for (int v : order) res.tables.ordering.push_back(h.name(v));
  res.tables.a1.resize(static_cast<size_t>(n));
  res.tables.a2.resize(static_cast<size_t>(n));
  res.tables.a3.resize(static_cast<size_t>(n));
  res.tables.a4.resize(static_cast<size_t>(n));
  res.tables.a5.resize(static_cast<size_t>(n));
  res.tables.a6.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    size_t vs = static_cast<size_t>(order[static_cast<size_t>(i)]);
    res.tables.a1[static_cast<size_t>(i)] = a1[vs];
    res.tables.a2[static_cast<size_t>(i)] = a2[vs];
    res.tables.a3[static_cast<size_t>(i)] = a3[vs];
    res.tables.a4[static_cast<size_t>(i)] = a4[vs];
    res.tables.a5[static_cast<size_t>(i)] = a5[vs];
    res.tables.a6[static_cast<size_t>(i)] = a6[vs];
  }
  if (!want_witness) return res;

  // Witness reconstruction, iterative over (vertex, mode) work items.
  enum Mode : uint8_t { M_A1, M_A2, M_P3, M_P4, M_P5, M_A6 };
  std::vector<std::pair<int, uint8_t>> work{{r, M_A6}};
  auto later_neighbors = [&](int v) {
    std::vector<std::pair<int, bool>> out;
    for (auto [w, fwd] : und(v))
      if (pos[static_cast<size_t>(w)] > pos[static_cast<size_t>(v)]) out.emplace_back(w, fwd);
    return out;
  };
  // Pushes the non-chain contributions of a chain node.
  auto push_sides = [&](int v, int skip) {
    for (auto [w, fwd] : later_neighbors(v)) {
      if (w == skip) continue;
      work.emplace_back(w, fwd ? M_A1 : M_A2);
    }
  };
  while (!work.empty()) {
    auto [v, mode] = work.back();
    work.pop_back();
    switch (mode) {
      case M_A1:
        for (auto [w, fwd] : later_neighbors(v)) work.emplace_back(w, fwd ? M_A1 : M_A6);
        break;
      case M_A2:
        for (auto [w, fwd] : later_neighbors(v)) work.emplace_back(w, fwd ? M_A6 : M_A2);
        break;
      case M_A6: {
        uint8_t t = tag6[static_cast<size_t>(v)];
        work.emplace_back(v, t == TAG_A5 ? M_P5 : (t == TAG_A1 ? M_A1 : M_A2));
        break;
      }
      default: {
        // Distinguished path through v: an incoming chain (c4 links) for
        // M_P4/M_P5, an outgoing chain (c3 links) for M_P3/M_P5.
        std::vector<int> in_chain, out_chain;
        if (mode == M_P4 || mode == M_P5)
          for (int cur = c4[static_cast<size_t>(v)]; cur >= 0;
               cur = c4[static_cast<size_t>(cur)])
            in_chain.push_back(cur);
        if (mode == M_P3 || mode == M_P5)
          for (int cur = c3[static_cast<size_t>(v)]; cur >= 0;
               cur = c3[static_cast<size_t>(cur)])
            out_chain.push_back(cur);
        std::vector<std::string> path;
        for (auto it = in_chain.rbegin(); it != in_chain.rend(); ++it)
          path.push_back(h.name(*it));
        path.push_back(h.name(v));
        for (int w : out_chain) path.push_back(h.name(w));
        res.witness.paths.push_back(std::move(path));
        // Side contributions of every chain vertex.
        int in_next = in_chain.empty() ? -1 : in_chain.front();
        int out_next = out_chain.empty() ? -1 : out_chain.front();
        for (auto [w, fwd] : later_neighbors(v)) {
          if (w == in_next || w == out_next) continue;
          work.emplace_back(w, fwd ? M_A1 : M_A2);
        }
        for (size_t k = 0; k < in_chain.size(); ++k) {
          int skip = (k + 1 < in_chain.size()) ? in_chain[k + 1] : -1;
          push_sides(in_chain[k], skip);
        }
        for (size_t k = 0; k < out_chain.size(); ++k) {
          int skip = (k + 1 < out_chain.size()) ? out_chain[k + 1] : -1;
          push_sides(out_chain[k], skip);
        }
        break;
      }
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Lower-bound labelings and decompositions

struct JLabeling {
  std::map<std::string, int> j;
  std::map<int, int> k;  // class counts
};

/// The pigeonhole labeling for flow-out trees: leaves get j = 1, a unique
/// maximal child passes its j up, ties bump it by one.  The best class size
/// max_i k_i satisfies ceil(V / (lg V + 1)) <= max_i k_i <= p(H).
inline std::pair<JLabeling, int> j_label_bound(const graphs::DiGraph& h) {
  auto kind = graphs::classify_tree(h);
  if (kind.tag != graphs::TreeKindTag::FlowOut)
    throw PreconditionError("j_label_bound: not a flow-out tree");
  int n = h.n();
  int root = h.id(*kind.root);
  auto out = h.out_adj();
  std::vector<int> topo;
  std::deque<int> q{root};
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    topo.push_back(v);
    for (int w : out[static_cast<size_t>(v)]) q.push_back(w);
  }
  std::vector<int> j(static_cast<size_t>(n), 1);
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    int v = *it;
    if (out[static_cast<size_t>(v)].empty()) {
      j[static_cast<size_t>(v)] = 1;
      continue;
    }
    int maxj = 0, count = 0;
    for (int w : out[static_cast<size_t>(v)]) {
      if (j[static_cast<size_t>(w)] > maxj) {
        maxj = j[static_cast<size_t>(w)];
        count = 1;
      } else if (j[static_cast<size_t>(w)] == maxj) {
        ++count;
      }
    }
    j[static_cast<size_t>(v)] = (count > 1) ? maxj + 1 : maxj;
  }
  JLabeling lab;
  int best = 0;
  for (int v = 0; v < n; ++v) {
    lab.j[h.name(v)] = j[static_cast<size_t>(v)];
    best = std::max(best, ++lab.k[j[static_cast<size_t>(v)]]);
  }
  return {lab, best};
}

struct BkDecomposition {
  std::vector<std::set<std::string>> layers;  // B_0, B_1, ...
  std::set<std::string> b1;                   // odd layers: flow-out collection
  std::set<std::string> b2;                   // even layers: flow-in collection
};

/// Alternating-layer decomposition: B_0 holds an indegree-0 vertex, odd
/// layers collect everything forward-reachable from the previous layer,
/// even layers everything reaching back into the previous layer.  The odd
/// union induces disjoint flow-out trees, the even union flow-in trees.
inline BkDecomposition bk_decompose(const graphs::DiGraph& h) {
  if (!graphs::underlying_is_tree(h))
    throw PreconditionError("bk_decompose: input is not a directed tree");
  int n = h.n();
  std::vector<int> indeg(static_cast<size_t>(n), 0);
  for (auto [u, v] : h.edges()) {
    (void)u;
    ++indeg[static_cast<size_t>(v)];
  }
  int r = -1;
  for (int v = 0; v < n && r < 0; ++v)
    if (indeg[static_cast<size_t>(v)] == 0) r = v;
  if (r < 0) throw PreconditionError("bk_decompose: no indegree-0 vertex");

  auto out = h.out_adj();
  auto in = h.in_adj();
  std::vector<int> layer_of(static_cast<size_t>(n), -1);
  layer_of[static_cast<size_t>(r)] = 0;
  BkDecomposition dec;
  dec.layers.push_back({h.name(r)});
  std::vector<int> frontier{r};
  int assigned = 1;
  for (int k = 1; assigned < n; ++k) {
    bool forward = (k % 2 == 1);
    const auto& step = forward ? out : in;
    std::deque<int> q(frontier.begin(), frontier.end());
    std::set<std::string> layer;
    std::vector<int> next;
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      for (int w : step[static_cast<size_t>(v)]) {
        if (layer_of[static_cast<size_t>(w)] >= 0) continue;
        layer_of[static_cast<size_t>(w)] = k;
        layer.insert(h.name(w));
        next.push_back(w);
        ++assigned;
        q.push_back(w);
      }
    }
    dec.layers.push_back(std::move(layer));
    frontier = std::move(next);
  }
  for (size_t k = 0; k < dec.layers.size(); ++k)
    for (const auto& v : dec.layers[k]) (k % 2 == 1 ? dec.b1 : dec.b2).insert(v);
  return dec;
}

}  // namespace msnlab::dplen

#endif  // MSNLAB_DPLEN_HPP_
