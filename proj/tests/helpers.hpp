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
//
// Shared fixtures and small generators for the test suite.

#ifndef MSNLAB_TESTS_HELPERS_HPP_
#define MSNLAB_TESTS_HELPERS_HPP_

#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "msnlab/graphs.hpp"
#include "msnlab/msn.hpp"

namespace msnlab::testing {

/// Graph over {s,t} plus any further endpoints mentioned in `edges`.
inline graphs::DiGraph make_graph(
    const std::vector<std::pair<std::string, std::string>>& edges,
    const std::vector<std::string>& isolated = {}) {
  graphs::DiGraph g = graphs::DiGraph::with_st();
  for (const auto& [u, v] : edges) {
    g.add_vertex(u);
    g.add_vertex(v);
  }
  for (const auto& v : isolated) g.add_vertex(v);
  for (const auto& [u, v] : edges) g.add_edge(u, v);
  return g;
}

/// Tree without s/t, for the disconnected-path machinery.
inline graphs::DiGraph make_tree(
    const std::vector<std::pair<std::string, std::string>>& edges,
    const std::vector<std::string>& isolated = {}) {
  graphs::DiGraph g;
  for (const auto& [u, v] : edges) {
    g.add_vertex(u);
    g.add_vertex(v);
  }
  for (const auto& v : isolated) g.add_vertex(v);
  for (const auto& [u, v] : edges) g.add_edge(u, v);
  return g;
}

/// The two-member permutation-set fixture: a length-2 s-t path through a,
/// with b isolated.  Relabeling a<->b gives the only other member, and the
/// minimal sound network accepting both has exactly 4 vertices.
inline graphs::DiGraph fig_sigma_graph() {
  return make_graph({{"s", "a"}, {"a", "t"}}, {"b"});
}

/// A size-5 sound and complete certain-knowledge network over {s,t,a,b}:
/// each internal vertex stands for a set of vertices known reachable from
/// s ({a}, {b}, or {a,b}), and every edge label extends that set by its
/// head, so any live walk from s' only visits sets of genuinely reachable
/// vertices and t' stays unreachable on pathless inputs.
inline msn::SwitchingNetwork reference_network_stab() {
  msn::SwitchingNetwork net;
  net.add_edge("s'", "t'", msn::EdgeLabel::edge("s", "t"));
  net.add_edge("s'", "ua", msn::EdgeLabel::edge("s", "a"));
  net.add_edge("s'", "ub", msn::EdgeLabel::edge("s", "b"));
  net.add_edge("ua", "t'", msn::EdgeLabel::edge("a", "t"));
  net.add_edge("ub", "t'", msn::EdgeLabel::edge("b", "t"));
  net.add_edge("ua", "uab", msn::EdgeLabel::edge("a", "b"));
  net.add_edge("ub", "uab", msn::EdgeLabel::edge("b", "a"));
  net.add_edge("uab", "t'", msn::EdgeLabel::edge("a", "t"));
  net.add_edge("uab", "t'", msn::EdgeLabel::edge("b", "t"));
  return net;
}

/// Uniform random directed tree on n vertices named v1..vn: random parent,
/// random edge orientation.
inline graphs::DiGraph random_tree(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  graphs::DiGraph g;
  for (int i = 0; i < n; ++i) g.add_vertex("v" + std::to_string(i + 1));
  for (int i = 1; i < n; ++i) {
    int p = static_cast<int>(rng() % static_cast<std::uint64_t>(i));
    if (rng() & 1)
      g.add_edge(p, i);
    else
      g.add_edge(i, p);
  }
  return g;
}

/// Random input graph over {s,t,v1..}: each of the n(n-1) ordered pairs is
/// an edge with probability num/den.
inline graphs::DiGraph random_graph(int extra, std::uint64_t seed, int num = 1,
                                    int den = 3) {
  std::mt19937_64 rng(seed);
  graphs::DiGraph g = graphs::DiGraph::with_st();
  for (int i = 1; i <= extra; ++i) g.add_vertex("v" + std::to_string(i));
  for (int u = 0; u < g.n(); ++u)
    for (int v = 0; v < g.n(); ++v)
      if (u != v && static_cast<int>(rng() % static_cast<std::uint64_t>(den)) < num)
        g.put_edge(u, v);
  return g;
}

/// Random switching network over the given universe: `internal` internal
/// vertices, `edge_count` edges with endpoints and labels drawn uniformly.
inline msn::SwitchingNetwork random_network(const std::vector<std::string>& universe,
                                            int internal, int edge_count,
                                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  msn::SwitchingNetwork net;
  for (int i = 1; i <= internal; ++i) net.add_vertex("u" + std::to_string(i));
  std::vector<std::pair<std::string, std::string>> labels;
  for (const auto& a : universe)
    for (const auto& b : universe)
      if (a != b) labels.emplace_back(a, b);
  for (int e = 0; e < edge_count; ++e) {
    int u = static_cast<int>(rng() % static_cast<std::uint64_t>(net.size()));
    int v = static_cast<int>(rng() % static_cast<std::uint64_t>(net.size()));
    if (u == v) continue;
    const auto& lab = labels[static_cast<size_t>(rng() % labels.size())];
    net.add_edge(u, v, msn::EdgeLabel::edge(lab.first, lab.second));
  }
  return net;
}

/// Appends a directed chain of `len` fresh vertices below `from`; returns
/// the name of the last vertex.
inline std::string add_chain(graphs::DiGraph& g, const std::string& from,
                             const std::string& prefix, int len) {
  std::string prev = from;
  for (int i = 1; i <= len; ++i) {
    std::string v = prefix + std::to_string(i);
    g.add_vertex(v);
    g.add_edge(prev, v);
    prev = v;
  }
  return prev;
}

/// Random directed tree containing the path s -> c1 -> ... -> c(ell-1) -> t,
/// with the remaining vertices attached to random hosts in random
/// orientation.
inline graphs::DiGraph random_st_tree(int n, int ell, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  graphs::DiGraph g = graphs::DiGraph::with_st();
  std::string prev = "s";
  for (int i = 1; i < ell; ++i) {
    g.add_vertex("c" + std::to_string(i));
    g.add_edge(prev, "c" + std::to_string(i));
    prev = "c" + std::to_string(i);
  }
  g.add_edge(prev, "t");
  for (int i = g.n(); i < n; ++i) {
    int host = static_cast<int>(rng() % static_cast<std::uint64_t>(g.n()));
    int v = g.add_vertex("x" + std::to_string(i));
    if (rng() & 1)
      g.add_edge(host, v);
    else
      g.add_edge(v, host);
  }
  return g;
}

/// Bare s-t path of length 16: the minimal flow-out instance where i=2 is
/// legal and the shallow-slice count dominates (many depth<=8 vertices).
inline graphs::DiGraph flowout_fixture_case1() {
  graphs::DiGraph g = graphs::DiGraph::with_st();
  std::string last = add_chain(g, "s", "c", 15);
  g.add_edge(last, "t");
  return g;
}

/// Broom: one depth-8 spine whose tip carries both the continuation to t
/// and many long chains, so few shallow vertices face a large remainder and
/// the dominant depth-8 subtree contains t.
inline graphs::DiGraph flowout_fixture_case2_t_inside() {
  graphs::DiGraph g = graphs::DiGraph::with_st();
  std::string vstar = add_chain(g, "s", "a", 8);
  std::string last = add_chain(g, vstar, "b", 8);
  g.add_edge(last, "t");
  for (int c = 1; c <= 10; ++c) add_chain(g, vstar, "q" + std::to_string(c) + "_", 8);
  return g;
}

/// Two depth-8 branches: the dominant subtree hangs off one tip while t
/// lies below the other, so the largest-subtree pick avoids t.
inline graphs::DiGraph flowout_fixture_case2_t_outside() {
  graphs::DiGraph g = graphs::DiGraph::with_st();
  std::string va = add_chain(g, "s", "a", 8);
  std::string vb = add_chain(g, "s", "b", 8);
  std::string last = add_chain(g, vb, "c", 8);
  g.add_edge(last, "t");
  for (int c = 1; c <= 40; ++c) add_chain(g, va, "q" + std::to_string(c) + "_", 8);
  return g;
}

/// Tree with one vertex (c) that neither sees s nor reaches t: the
/// floating remainder of the two-part lower-bound reduction.
inline graphs::DiGraph thm51_floating_fixture() {
  return make_graph({{"s", "p"}, {"p", "t"}, {"a", "p"}, {"a", "c"}});
}

/// All 2^k input graphs over {s,t} plus `extra` named inner vertices.
inline void for_each_graph_over(const std::vector<std::string>& inner,
                                const std::function<void(const graphs::DiGraph&)>& fn) {
  std::vector<std::string> uni{"s", "t"};
  uni.insert(uni.end(), inner.begin(), inner.end());
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& a : uni)
    for (const auto& b : uni)
      if (a != b) pairs.emplace_back(a, b);
  size_t k = pairs.size();
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << k); ++bits) {
    graphs::DiGraph g = graphs::DiGraph::with_st();
    for (const auto& v : inner) g.add_vertex(v);
    for (size_t i = 0; i < k; ++i)
      if (bits >> i & 1) g.add_edge(pairs[i].first, pairs[i].second);
    fn(g);
  }
}

}  // namespace msnlab::testing

#endif  // MSNLAB_TESTS_HELPERS_HPP_
