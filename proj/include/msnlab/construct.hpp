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

#ifndef MSNLAB_CONSTRUCT_HPP_
#define MSNLAB_CONSTRUCT_HPP_

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "msnlab/common.hpp"
#include "msnlab/graphs.hpp"
#include "msnlab/msn.hpp"

namespace msnlab::construct {

/// The layered hard instance: ell-1 fully-connected layers between s and
/// t, with roughly half the vertices left isolated.
struct LayeredGraph {
  graphs::DiGraph graph;
  std::vector<std::vector<std::string>> layers;
  long n = 0;
  int ell = 0;
  long isolated = 0;
};

inline void check_layered_hypotheses(long n, int ell) {
  if (ell < 2) throw PreconditionError("build_layered: ell must be >= 2");
  long per_layer = (n - 2) / (2L * (ell - 1));
  if (per_layer < 1)
    throw PreconditionError("build_layered: n too small for ell nonempty layers");
  // Per-path acceptance probability >= (1/(4(ell-1)))^(ell-1) needs each
  // layer to hold at least an n/(4(ell-1)) share of the universe; checked
  // per instance instead of demanding asymptotically large n.
  if (4L * (ell - 1) * per_layer < n)
    throw PreconditionError(
        "build_layered: layer share below the quarter threshold");
}

inline LayeredGraph build_layered(long n, int ell) {
  check_layered_hypotheses(n, ell);
  LayeredGraph lg;
  lg.n = n;
  lg.ell = ell;
  long per_layer = (n - 2) / (2L * (ell - 1));
  lg.graph = graphs::DiGraph::with_st();
  for (int i = 1; i < ell; ++i) {
    std::vector<std::string> layer;
    for (long j = 1; j <= per_layer; ++j)
      layer.push_back("c" + std::to_string(i) + "_" + std::to_string(j));
    for (const auto& v : layer) lg.graph.add_vertex(v);
    lg.layers.push_back(std::move(layer));
  }
  lg.isolated = n - 2 - (ell - 1) * per_layer;
  for (long j = 1; j <= lg.isolated; ++j)
    lg.graph.add_vertex("z" + std::to_string(j));
  for (const auto& v : lg.layers.front()) lg.graph.add_edge("s", v);
  for (size_t i = 0; i + 1 < lg.layers.size(); ++i)
    for (const auto& u : lg.layers[i])
      for (const auto& v : lg.layers[i + 1]) lg.graph.add_edge(u, v);
  for (const auto& v : lg.layers.back()) lg.graph.add_edge(v, "t");
  return lg;
}

/// Each layer collapsed to one vertex: a bare path of length ell plus the
/// same isolated vertices.
inline graphs::DiGraph merged_layered(const LayeredGraph& lg) {
  graphs::DiGraph g = graphs::DiGraph::with_st();
  std::string prev = "s";
  for (size_t i = 1; i < lg.layers.size() + 1; ++i) {
    std::string v = "v" + std::to_string(i);
    g.add_vertex(v);
    g.add_edge(prev, v);
    prev = v;
  }
  g.add_edge(prev, "t");
  for (long j = 1; j <= lg.isolated; ++j) g.add_vertex("z" + std::to_string(j));
  return g;
}

/// Exact per-path acceptance probability p = (1/(4(ell-1)))^(ell-1),
/// stored as its denominator, and the path count C = n^2 / p.
struct RequiredC {
  std::uint64_t p_den = 0;  // p = 1 / p_den
  std::uint64_t c = 0;
};

inline RequiredC required_C(long n, int ell) {
  if (ell < 2) throw PreconditionError("required_C: ell must be >= 2");
  std::uint64_t den = 1;
  std::uint64_t base = 4ULL * static_cast<std::uint64_t>(ell - 1);
  for (int e = 0; e < ell - 1; ++e) {
    if (den > std::numeric_limits<std::uint64_t>::max() / base)
      throw PreconditionError("required_C: denominator overflows 64 bits");
    den *= base;
  }
  std::uint64_t n2 = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n);
  if (den > std::numeric_limits<std::uint64_t>::max() / n2)
    throw PreconditionError("required_C: C overflows 64 bits");
  return {den, n2 * den};  // p = 1/den, so ceil(n^2/p) = n^2 * den exactly
}

/// C internally-disjoint s'-t' paths of length ell whose intermediate
/// labels are drawn uniformly from the vertex universe.  A drawn label
/// with equal endpoints can never be live (inputs are simple), so the
/// corresponding network edge is omitted; the path then just never
/// conducts, which is acceptance-equivalent to carrying a dead edge.
struct RandomPathNetwork {
  msn::SwitchingNetwork net;
  long long c = 0;
  int ell = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> universe;
  // Per path, the label sequence as universe-index pairs (u, v); entries
  // with u == v mark a dead (omitted) edge.
  std::vector<std::vector<std::pair<int, int>>> path_labels;
};

inline RandomPathNetwork build_random_network(long n, int ell, long long c,
                                              std::uint64_t seed) {
  check_layered_hypotheses(n, ell);
  LayeredGraph lg = build_layered(n, ell);
  RandomPathNetwork rpn;
  rpn.c = c;
  rpn.ell = ell;
  rpn.seed = seed;
  rpn.universe = lg.graph.names();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(rpn.universe.size()) - 1);
  int s_idx = lg.graph.id("s"), t_idx = lg.graph.id("t");
  for (long long k = 1; k <= c; ++k) {
    std::vector<int> w(static_cast<size_t>(ell) + 1);
    w.front() = s_idx;
    w.back() = t_idx;
    for (int j = 1; j < ell; ++j) w[static_cast<size_t>(j)] = pick(rng);
    std::vector<std::string> nodes;
    nodes.push_back("s'");
    for (int j = 1; j < ell; ++j)
      nodes.push_back("p" + std::to_string(k) + "_" + std::to_string(j));
    nodes.push_back("t'");
    for (size_t j = 1; j + 1 < nodes.size(); ++j) rpn.net.add_vertex(nodes[j]);
    std::vector<std::pair<int, int>> labels;
    for (int j = 0; j < ell; ++j) {
      int a = w[static_cast<size_t>(j)], b = w[static_cast<size_t>(j) + 1];
      labels.emplace_back(a, b);
      if (a != b)
        rpn.net.add_edge(nodes[static_cast<size_t>(j)], nodes[static_cast<size_t>(j) + 1],
                         msn::EdgeLabel::edge(rpn.universe[static_cast<size_t>(a)],
                                              rpn.universe[static_cast<size_t>(b)]));
    }
    rpn.path_labels.push_back(std::move(labels));
  }
  return rpn;
}

struct VerifyReport {
  long n = 0;
  int ell = 0;
  std::uint64_t p_den = 0;
  long long c = 0;
  std::uint64_t seed = 0;
  long swept = 0;     // distinct permuted inputs tested
  long rejected = 0;  // tested inputs the network fails to accept
  bool exhaustive = false;
  bool sound = true;
  double per_path_rate = 0.0;  // empirical single-path acceptance rate
};

namespace detail {

/// Adjacency matrix of the layered graph under a relabeling of its
/// non-s/t vertices: perm[i] is the new universe index of old index i.
inline void permuted_matrix(const graphs::DiGraph& g, const std::vector<int>& perm,
                            std::vector<char>* mat) {
  size_t n = static_cast<size_t>(g.n());
  std::fill(mat->begin(), mat->end(), 0);
  for (auto [u, v] : g.edges())
    (*mat)[static_cast<size_t>(perm[static_cast<size_t>(u)]) * n +
           static_cast<size_t>(perm[static_cast<size_t>(v)])] = 1;
}

}  // namespace detail

/// Sweeps the network against relabelings of the layered graph: exhaustive
/// over distinct permuted inputs when their count fits the cap, otherwise
/// a uniform sample of permutations.  Soundness is structural (each path's
/// label sequence is itself an s-t walk, so any accepted input has an s-t
/// path); pass spot_check_soundness to also run the exact checker.
inline VerifyReport verify_construction(const RandomPathNetwork& rpn,
                                        const LayeredGraph& lg,
                                        long sweep_cap = 100000,
                                        long sample_size = 20000,
                                        bool spot_check_soundness = false,
                                        int threads = 1) {
  if (static_cast<long>(rpn.universe.size()) != lg.graph.n())
    throw PreconditionError("verify_construction: parameter mismatch");
  VerifyReport rep;
  rep.n = lg.n;
  rep.ell = lg.ell;
  auto req = required_C(lg.n, lg.ell);
  rep.p_den = req.p_den;
  rep.c = rpn.c;
  rep.seed = rpn.seed;

  const graphs::DiGraph& g = lg.graph;
  size_t n = static_cast<size_t>(g.n());
  std::vector<char> mat(n * n, 0);
  auto accepted_by_path = [&](const std::vector<std::pair<int, int>>& labels) {
    for (auto [a, b] : labels)
      if (a == b || !mat[static_cast<size_t>(a) * n + static_cast<size_t>(b)])
        return false;
    return true;
  };
  auto accepted = [&]() {
    for (const auto& labels : rpn.path_labels)
      if (accepted_by_path(labels)) return true;
    return false;
  };

  // Movable indices: everything except s and t.
  std::vector<int> movable;
  for (int v = 0; v < g.n(); ++v)
    if (v != g.id("s") && v != g.id("t")) movable.push_back(v);

  double perms = 1;
  for (size_t i = 2; i <= movable.size(); ++i) perms *= static_cast<double>(i);
  rep.exhaustive = perms <= 5e6;  // enumerable; distinct graphs capped below

  long path_hits = 0, path_trials = 0;
  auto tally = [&]() {
    bool ok = accepted();
    ++rep.swept;
    if (!ok) ++rep.rejected;
    if (rep.swept <= 200) {
      for (const auto& labels : rpn.path_labels) {
        ++path_trials;
        if (accepted_by_path(labels)) ++path_hits;
      }
    }
  };

  if (rep.exhaustive) {
    std::vector<int> target = movable;
    std::sort(target.begin(), target.end());
    std::set<std::vector<char>> seen;
    do {
      std::vector<int> perm(n);
      perm[static_cast<size_t>(g.id("s"))] = g.id("s");
      perm[static_cast<size_t>(g.id("t"))] = g.id("t");
      for (size_t i = 0; i < movable.size(); ++i)
        perm[static_cast<size_t>(movable[i])] = target[i];
      detail::permuted_matrix(g, perm, &mat);
      if (!seen.insert(mat).second) continue;
      if (static_cast<long>(seen.size()) > sweep_cap)
        throw BudgetExceeded("verify_construction: distinct input sweep cap");
      tally();
    } while (std::next_permutation(target.begin(), target.end()));
  } else {
    // Sampled mode: permutations are independent, so shard them.
    threads = std::max(1, threads);
    std::vector<long> t_swept(static_cast<size_t>(threads), 0),
        t_rejected(static_cast<size_t>(threads), 0),
        t_hits(static_cast<size_t>(threads), 0),
        t_trials(static_cast<size_t>(threads), 0);
    auto worker = [&](int tid) {
      std::mt19937_64 rng(rpn.seed ^ 0x9e3779b97f4a7c15ULL ^
                          (0x7f4a7c15ULL * static_cast<std::uint64_t>(tid)));
      std::vector<char> local(n * n, 0);
      std::vector<int> target = movable;
      long quota = sample_size / threads + (tid < sample_size % threads ? 1 : 0);
      long rate_quota = 200 / threads + 1;
      for (long it = 0; it < quota; ++it) {
        std::shuffle(target.begin(), target.end(), rng);
        std::vector<int> perm(n);
        perm[static_cast<size_t>(g.id("s"))] = g.id("s");
        perm[static_cast<size_t>(g.id("t"))] = g.id("t");
        for (size_t i = 0; i < movable.size(); ++i)
          perm[static_cast<size_t>(movable[i])] = target[i];
        std::fill(local.begin(), local.end(), 0);
        for (auto [u, v] : g.edges())
          local[static_cast<size_t>(perm[static_cast<size_t>(u)]) * n +
                static_cast<size_t>(perm[static_cast<size_t>(v)])] = 1;
        auto path_ok = [&](const std::vector<std::pair<int, int>>& labels) {
          for (auto [a, b] : labels)
            if (a == b || !local[static_cast<size_t>(a) * n + static_cast<size_t>(b)])
              return false;
          return true;
        };
        bool ok = false;
        for (const auto& labels : rpn.path_labels)
          if (path_ok(labels)) {
            ok = true;
            break;
          }
        ++t_swept[static_cast<size_t>(tid)];
        if (!ok) ++t_rejected[static_cast<size_t>(tid)];
        if (it < rate_quota)
          for (const auto& labels : rpn.path_labels) {
            ++t_trials[static_cast<size_t>(tid)];
            if (path_ok(labels)) ++t_hits[static_cast<size_t>(tid)];
          }
      }
    };
    if (threads == 1) {
      worker(0);
    } else {
      std::vector<std::thread> pool;
      for (int tid = 0; tid < threads; ++tid) pool.emplace_back(worker, tid);
      for (auto& th : pool) th.join();
    }
    for (int tid = 0; tid < threads; ++tid) {
      rep.swept += t_swept[static_cast<size_t>(tid)];
      rep.rejected += t_rejected[static_cast<size_t>(tid)];
      path_hits += t_hits[static_cast<size_t>(tid)];
      path_trials += t_trials[static_cast<size_t>(tid)];
    }
  }

  rep.per_path_rate =
      path_trials > 0 ? static_cast<double>(path_hits) / static_cast<double>(path_trials)
                      : 0.0;
  rep.sound = true;
  if (spot_check_soundness)
    rep.sound = msn::is_sound(rpn.net, g.names()).sound;
  return rep;
}

/// Draws networks under successive seeds until one accepts every swept
/// input, giving up after max_retries draws.
inline std::pair<RandomPathNetwork, VerifyReport> accept_with_retries(
    long n, int ell, long long c, std::uint64_t base_seed, int max_retries = 5,
    long sweep_cap = 100000, long sample_size = 20000, int threads = 1) {
  VerifyReport last;
  for (int r = 0; r < max_retries; ++r) {
    RandomPathNetwork rpn =
        build_random_network(n, ell, c, base_seed + static_cast<std::uint64_t>(r));
    LayeredGraph lg = build_layered(n, ell);
    last = verify_construction(rpn, lg, sweep_cap, sample_size, false, threads);
    if (last.rejected == 0) return {std::move(rpn), last};
  }
  throw BudgetExceeded("accept_with_retries: all seeds left rejected inputs");
}

}  // namespace msnlab::construct

#endif  // MSNLAB_CONSTRUCT_HPP_
