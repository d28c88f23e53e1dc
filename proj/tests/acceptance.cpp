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
// End-to-end acceptance run: ten numbered criteria, one verdict line each,
// nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "helpers.hpp"
#include "msnlab/construct.hpp"
#include "msnlab/dplen.hpp"
#include "msnlab/graphs.hpp"
#include "msnlab/msn.hpp"
#include "msnlab/reduce.hpp"
#include "msnlab/search.hpp"

using namespace msnlab;
using graphs::DiGraph;
using msnlab::testing::make_graph;

namespace {

int g_failures = 0;

struct CriterionFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& what) {
  if (!cond) throw CriterionFailure(what);
}

void run_criterion(int num, const std::string& label,
                   const std::function<std::string()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  try {
    std::string detail = body();
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                      .count();
    std::ostringstream line;
    line << "[PASS] criterion " << num << ": " << label << " (" << detail << "; "
         << std::fixed;
    line.precision(1);
    line << secs << "s)";
    std::cout << line.str() << std::endl;
  } catch (const std::exception& e) {
    ++g_failures;
    std::cout << "[FAIL] criterion " << num << ": " << label << " -- " << e.what()
              << std::endl;
  }
}

/// Pigeonhole bound ceil(v / (halve * (lg v + 1))).
long pigeonhole(int v, double halve) {
  double denom = halve * (std::log2(static_cast<double>(v)) + 1.0);
  return static_cast<long>(std::ceil(static_cast<double>(v) / denom - 1e-9));
}

/// Random recursive tree on n vertices, matching the CLI bench generator.
DiGraph bench_tree(long n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  DiGraph g;
  for (long i = 0; i < n; ++i) g.add_vertex("v" + std::to_string(i + 1));
  for (long i = 1; i < n; ++i) {
    long p = static_cast<long>(rng() % static_cast<std::uint64_t>(i));
    if (rng() & 1)
      g.add_edge(static_cast<int>(p), static_cast<int>(i));
    else
      g.add_edge(static_cast<int>(i), static_cast<int>(p));
  }
  return g;
}

// ---------------------------------------------------------------------------

std::string criterion1_dp_vs_brute() {
  long trees = 0;
  graphs::enumerate_directed_trees(9, [&](const DiGraph& h) {
    int bp = dplen::brute_force_p(h).first;
    int dp = dplen::general_p_dp(h).p;
    require(dp == bp, "p mismatch on a " + std::to_string(h.n()) + "-vertex tree: dp=" +
                          std::to_string(dp) + " brute=" + std::to_string(bp));
    ++trees;
  });
  return "0 mismatches across " + std::to_string(trees) + " trees <= 9 vertices";
}

std::string criterion2_flowout_recursion() {
  long flowouts = 0;
  graphs::enumerate_directed_trees(10, [&](const DiGraph& h) {
    if (graphs::classify_tree(h).tag != graphs::TreeKindTag::FlowOut) return;
    dplen::BTable bt = dplen::flowout_b(h);
    int bp = dplen::brute_force_p(h).first;
    require(bt.b_root() == bp, "b(root) != brute p on a flow-out tree");
    require(dplen::is_family(h, bt.witness), "greedy witness is not a valid family");
    require(bt.witness.size() == bt.b_root(), "witness vertex count != b(root)");
    ++flowouts;
  });
  return "0 mismatches across " + std::to_string(flowouts) +
         " flow-out trees <= 10 vertices";
}

std::string criterion3_pigeonhole_bounds() {
  long general = 0, flowouts = 0;
  graphs::enumerate_directed_trees(9, [&](const DiGraph& h) {
    int p = dplen::general_p_dp(h).p;
    require(p >= pigeonhole(h.n(), 2.0), "general bound violated at n=" +
                                             std::to_string(h.n()));
    ++general;
  });
  graphs::enumerate_directed_trees(10, [&](const DiGraph& h) {
    if (graphs::classify_tree(h).tag != graphs::TreeKindTag::FlowOut) return;
    int p = dplen::flowout_b(h).b_root();
    require(p >= pigeonhole(h.n(), 1.0), "flow-out bound violated at n=" +
                                             std::to_string(h.n()));
    ++flowouts;
  });
  return "0 violations (" + std::to_string(general) + " trees, " +
         std::to_string(flowouts) + " flow-out trees)";
}

std::string criterion4_exact_m_values() {
  auto r1 = search::min_sound_msn({make_graph({{"s", "t"}})});
  require(r1.m() == 2, "m({s->t}) != 2");
  auto r2 = search::min_sound_msn(graphs::sigma_st(make_graph({{"s", "a"}, {"a", "t"}})));
  require(r2.m() == 3, "m(sigma(s->a->t)) != 3");
  auto members = graphs::sigma_st(testing::fig_sigma_graph());
  auto r3 = search::min_sound_msn(members);
  require(r3.m() == 4, "m(sigma(path through a, isolated b)) != 4");
  require(r3.witness.has_value() && msn::is_sound(*r3.witness, {"s", "t", "a", "b"}).sound,
          "m=4 witness is unsound");
  for (const auto& g : members)
    require(msn::accepts(*r3.witness, g), "m=4 witness rejects a member");
  return "m = 2, 3, 4 with validated witnesses";
}

std::string criterion5_m_monotonicity() {
  search::MOracle oracle;
  long inputs = 0, comparisons = 0;
  std::vector<std::vector<std::string>> inners = {{}, {"a"}, {"a", "b"}};
  for (const auto& inner : inners) {
    testing::for_each_graph_over(inner, [&](const DiGraph& g) {
      if (!graphs::has_st_path(g)) return;
      ++inputs;
      int mg = oracle.m_sigma(g);
      // Edge addition never raises m(sigma(.)).
      for (const auto& u : g.names())
        for (const auto& v : g.names()) {
          if (u == v || g.has_edge(u, v)) continue;
          DiGraph g2 = reduce::apply_move(g, reduce::Move::add_edge(u, v));
          require(oracle.m_sigma(g2) <= mg, "edge addition raised m(sigma(.))");
          ++comparisons;
        }
      // Useless-edge removal leaves m(sigma(.)) unchanged.
      DiGraph g3 = reduce::apply_move(g, reduce::Move::remove_useless_edges());
      require(oracle.m_sigma(g3) == mg, "useless-edge removal changed m(sigma(.))");
      ++comparisons;
      // Merging into s and t never raises m(sigma(.)).
      size_t k = inner.size();
      for (std::uint32_t sm = 0; sm < (1u << k); ++sm)
        for (std::uint32_t tm = 0; tm < (1u << k); ++tm) {
          if ((sm & tm) != 0 || (sm == 0 && tm == 0)) continue;
          DiGraph gm = g;
          std::set<std::string> xs, xt;
          for (size_t i = 0; i < k; ++i) {
            if (sm >> i & 1) xs.insert(inner[i]);
            if (tm >> i & 1) xt.insert(inner[i]);
          }
          if (!xs.empty()) gm = reduce::apply_move(gm, reduce::Move::merge_into_s(xs));
          if (!xt.empty()) gm = reduce::apply_move(gm, reduce::Move::merge_into_t(xt));
          require(oracle.m_sigma(gm) <= mg, "merge raised m(sigma(.))");
          ++comparisons;
        }
    });
  }
  return "0 violations over " + std::to_string(inputs) + " graphs, " +
         std::to_string(comparisons) + " comparisons, " +
         std::to_string(oracle.cache_size()) + " m-classes";
}

std::string criterion6_transform_soundness() {
  std::vector<std::string> universe{"s", "t", "a", "b"};
  std::mt19937_64 rng(20260824);
  long trials = 0, networks = 0;
  while (trials < 500) {
    msn::SwitchingNetwork net = testing::random_network(
        universe, 1 + static_cast<int>(rng() % 3), 4 + static_cast<int>(rng() % 5),
        rng());
    if (!msn::is_sound(net, universe).sound) continue;
    ++networks;
    std::vector<msn::NetworkTransform> trs{
        msn::NetworkTransform::parallel_source_s("a", "b"),
        msn::NetworkTransform::parallel_sink_t("a", "b"),
        msn::NetworkTransform::unlabel_into_s(),
        msn::NetworkTransform::unlabel_from_t(),
        msn::NetworkTransform::relabel_merge({"a"}, {"b"})};
    for (const auto& tr : trs) {
      msn::SwitchingNetwork out = msn::apply_network_transform(net, tr);
      require(msn::is_sound(out, universe).sound, "transform broke soundness");
      ++trials;
    }
  }
  return "0 violations across " + std::to_string(trials) + " transforms of " +
         std::to_string(networks) + " sound networks";
}

std::string criterion7_certificate_suite() {
  DiGraph host = make_graph({{"s", "t"}});

  // sqrt certificates on 100 random trees up to 40 vertices.
  for (int k = 0; k < 100; ++k) {
    int n = 1 + k % 40;
    DiGraph h = testing::random_tree(n, 5000 + static_cast<std::uint64_t>(k));
    auto cert = reduce::sqrt_path_certificate(host, h);
    require(reduce::check_certificate(cert).ok, "sqrt certificate failed to replay");
    long got = std::stol(cert.metadata.at("path_vertices"));
    long want = static_cast<long>(std::ceil(std::sqrt(static_cast<double>(n)) - 1e-9));
    require(got >= want, "sqrt path shorter than ceil(sqrt(n))");
  }

  // dplen certificates reach exactly p(H) on every tree <= 9 vertices.
  long dp_trees = 0;
  graphs::enumerate_directed_trees(9, [&](const DiGraph& h) {
    auto cert = reduce::dplen_path_certificate(host, h);
    require(reduce::check_certificate(cert).ok, "dplen certificate failed to replay");
    require(std::stol(cert.metadata.at("path_vertices")) ==
                dplen::brute_force_p(h).first,
            "dplen path length != brute-force p(H)");
    ++dp_trees;
  });

  // Flow-out and two-part lower-bound certificates: a 20-fixture suite that
  // has to light up every case and subcase.
  std::set<std::string> covered;
  int fixtures = 0;
  auto run_flowout = [&](const DiGraph& g, int i) {
    auto cert = reduce::flowout_lower_certificate(g, i);
    require(reduce::check_certificate(cert).ok, "flow-out certificate failed to replay");
    std::string key = "flow-out case " + cert.metadata.at("case");
    if (cert.metadata.count("subcase")) key += " subcase " + cert.metadata.at("subcase");
    covered.insert(key);
  };
  auto run_two_part = [&](const DiGraph& g) {
    auto certs = reduce::thm51_lower_certificates(g);
    require(certs.size() == 3, "expected three two-part certificates");
    for (const auto& cert : certs) {
      require(reduce::check_certificate(cert).ok,
              "two-part certificate failed to replay");
      covered.insert("two-part " + cert.metadata.at("part"));
    }
  };

  DiGraph f1 = testing::flowout_fixture_case1();
  run_flowout(f1, 1);
  run_flowout(f1, 2);
  ++fixtures;
  run_flowout(testing::flowout_fixture_case2_t_inside(), 2);
  ++fixtures;
  run_flowout(testing::flowout_fixture_case2_t_outside(), 2);
  ++fixtures;
  run_flowout(make_graph({{"s", "a"}, {"a", "t"}, {"s", "b"}}), 1);
  ++fixtures;
  run_two_part(make_graph({{"s", "c1"}, {"c1", "c2"}, {"c2", "t"}}));
  ++fixtures;
  run_two_part(testing::thm51_floating_fixture());
  ++fixtures;
  for (int k = 0; k < 13; ++k) {
    run_two_part(testing::random_st_tree(10 + k % 5, 3 + k % 3,
                                         900 + static_cast<std::uint64_t>(k)));
    ++fixtures;
  }
  run_two_part(testing::random_st_tree(20, 6, 999));
  ++fixtures;

  for (const std::string& key :
       {"flow-out case i=1", "flow-out case 1", "flow-out case 2 subcase 1",
        "flow-out case 2 subcase 2", "two-part 1", "two-part 2-flow-out",
        "two-part 2-flow-in"})
    require(covered.count(key) == 1, "branch not covered: " + key);

  return "100 sqrt certs, " + std::to_string(dp_trees) + " dplen certs, " +
         std::to_string(fixtures) + " lower-bound fixtures, " +
         std::to_string(covered.size()) + " branches covered";
}

std::string criterion8_randomized_construction() {
  auto req = construct::required_C(10, 3);
  require(req.p_den == 64, "p != 1/64 at ell=3");
  require(req.c == 6400, "C != 6400 at n=10, ell=3");
  auto [rpn, rep] = construct::accept_with_retries(10, 3, 6400, 1, 5);
  require(rep.rejected == 0, "some permuted input was rejected");
  require(rep.exhaustive && rep.swept == 420, "exhaustive sweep did not cover all 420");
  require(rpn.net.size() == 2 + 6400LL * 2, "network size != 2 + C(ell-1)");
  // Structural soundness: every path's label sequence chains s to t, so any
  // accepted input carries an s-t walk.
  construct::LayeredGraph lg = construct::build_layered(10, 3);
  int s_idx = lg.graph.id("s"), t_idx = lg.graph.id("t");
  for (const auto& labels : rpn.path_labels) {
    require(labels.front().first == s_idx && labels.back().second == t_idx,
            "path labels do not span s to t");
    for (size_t j = 0; j + 1 < labels.size(); ++j)
      require(labels[j].second == labels[j + 1].first, "path labels do not chain");
  }
  // Exact-checker spot check at a label count the checker can afford.
  construct::RandomPathNetwork tiny = construct::build_random_network(10, 3, 5, 1);
  require(msn::is_sound(tiny.net, lg.graph.names()).sound,
          "tiny instance failed the exact soundness checker");
  return "seed 1 accepted all 420 members; size 12802; sound";
}

std::string criterion9_linear_scaling() {
  auto time_dp = [](long n) {
    DiGraph g = bench_tree(n, 1);
    auto t0 = std::chrono::steady_clock::now();
    int reps = 0;
    do {
      (void)dplen::general_p_dp(g, std::nullopt, false);
      ++reps;
    } while (std::chrono::steady_clock::now() - t0 < std::chrono::milliseconds(300));
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
               .count() /
           reps;
  };
  double t4 = time_dp(10000), t5 = time_dp(100000), t6 = time_dp(1000000);
  double r1 = t5 / t4, r2 = t6 / t5;
  std::ostringstream detail;
  detail.precision(2);
  detail << std::fixed << "ratios " << r1 << "x and " << r2
         << "x against size ratio 10x";
  require(r1 <= 30.0 && r2 <= 30.0, "elapsed grew faster than 3x the size ratio (" +
                                        detail.str() + ")");
  require(r1 >= 10.0 / 3.0 && r2 >= 10.0 / 3.0,
          "elapsed grew slower than a third of the size ratio (" + detail.str() + ")");
  return detail.str();
}

std::string criterion10_acceptance_monotonicity() {
  std::mt19937_64 rng(424242);
  std::vector<std::string> universe{"s", "t", "v1", "v2"};
  long trials = 0;
  while (trials < 1000) {
    DiGraph g = testing::random_graph(2, rng(), 1, 3);
    DiGraph h = g;
    for (int u = 0; u < h.n(); ++u)
      for (int v = 0; v < h.n(); ++v)
        if (u != v && rng() % 4 == 0) h.put_edge(u, v);
    msn::SwitchingNetwork net = testing::random_network(
        universe, 1 + static_cast<int>(rng() % 3), 3 + static_cast<int>(rng() % 8),
        rng());
    if (msn::accepts(net, g)) require(msn::accepts(net, h), "N accepted G but not H");
    ++trials;
  }
  return "0 violations across 1000 (N, G, H) triples";
}

}  // namespace

int main() {
  run_criterion(1, "general DP equals brute force on all trees <= 9",
                criterion1_dp_vs_brute);
  run_criterion(2, "flow-out recursion equals brute force on flow-out trees <= 10",
                criterion2_flowout_recursion);
  run_criterion(3, "pigeonhole lower bounds hold on the corpus",
                criterion3_pigeonhole_bounds);
  run_criterion(4, "exact minimum network sizes 2 / 3 / 4", criterion4_exact_m_values);
  run_criterion(5, "m(sigma(.)) monotone under edge addition, merges, cleanup",
                criterion5_m_monotonicity);
  run_criterion(6, "network transforms preserve soundness (500 trials)",
                criterion6_transform_soundness);
  run_criterion(7, "certificate suite: sqrt, dplen, and lower-bound branches",
                criterion7_certificate_suite);
  run_criterion(8, "randomized path network accepts all permuted inputs",
                criterion8_randomized_construction);
  run_criterion(9, "p(H) DP scales linearly from 10^4 to 10^6",
                criterion9_linear_scaling);
  run_criterion(10, "acceptance is monotone under input-edge addition",
                criterion10_acceptance_monotonicity);
  if (g_failures > 0) {
    std::cout << g_failures << " criterion(s) failed" << std::endl;
    return 1;
  }
  std::cout << "all 10 criteria passed" << std::endl;
  return 0;
}
