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

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "msnlab/bounds.hpp"
#include "msnlab/cert_json.hpp"
#include "msnlab/common.hpp"
#include "msnlab/construct.hpp"
#include "msnlab/dplen.hpp"
#include "msnlab/graphs.hpp"
#include "msnlab/msn.hpp"
#include "msnlab/reduce.hpp"
#include "msnlab/search.hpp"

namespace {

using nlohmann::json;

// Exit codes: 0 success, 1 negative verdict, 2 usage/input error, 3 budget.
constexpr int kOk = 0, kNegative = 1, kUsage = 2, kBudget = 3;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw msnlab::ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

msnlab::graphs::DiGraph load_graph(const std::string& path) {
  return msnlab::graphs::parse_edge_list(slurp(path));
}

msnlab::msn::SwitchingNetwork load_network(const std::string& path) {
  return msnlab::msn::parse_network(slurp(path));
}

// The shared grammar always injects s and t; plain-tree inputs (dplen)
// should not carry them as stray isolated vertices.
msnlab::graphs::DiGraph drop_isolated_st(const msnlab::graphs::DiGraph& g) {
  std::set<std::string> incident;
  for (const auto& [u, v] : g.edge_names()) {
    incident.insert(u);
    incident.insert(v);
  }
  msnlab::graphs::DiGraph h;
  for (const auto& v : g.names())
    if ((v != "s" && v != "t") || incident.count(v)) h.add_vertex(v);
  for (const auto& [u, v] : g.edge_names()) h.add_edge(u, v);
  return h;
}

std::vector<std::string> numbered_universe(int n) {
  std::vector<std::string> u{"s", "t"};
  for (int i = 1; i <= n - 2; ++i) u.push_back("v" + std::to_string(i));
  return u;
}

json profile_json(const msnlab::bounds::BoundProfile& p) {
  json j;
  j["side"] = p.side == msnlab::bounds::BoundProfile::Side::Lower ? "lower" : "upper";
  j["render"] = p.render();
  j["factors"] = json::array();
  for (const auto& f : p.factors)
    j["factors"].push_back(
        {{"label", f.label}, {"base", f.base}, {"scale", f.scale.render()}});
  return j;
}

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("MSNLAB_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

msnlab::graphs::DiGraph random_tree(long n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  msnlab::graphs::DiGraph g;
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

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"msnlab: a laboratory for monotone switching networks and "
               "directed s-t connectivity"};
  app.require_subcommand(1);
  bool as_json = false;
  int threads_flag = 0;
  app.add_flag("--json", as_json, "emit JSON on stdout");
  app.add_option("--threads", threads_flag,
                 "worker threads (fallback: MSNLAB_THREADS)");

  // ---- bounds ----
  std::string bounds_file;
  bool bounds_flowout = false;
  auto* cmd_bounds = app.add_subcommand("bounds", "structural stats and bound profiles");
  cmd_bounds->add_option("file", bounds_file, "edge-list file")->required();
  cmd_bounds->add_flag("--flowout", bounds_flowout, "treat input as a flow-out tree");

  // ---- dplen ----
  std::string dplen_file, dplen_root;
  bool dplen_brute = false, dplen_flowout_b = false;
  auto* cmd_dplen = app.add_subcommand("dplen", "disconnected-path length p(H)");
  cmd_dplen->add_option("file", dplen_file, "edge-list file")->required();
  cmd_dplen->add_option("--root", dplen_root, "DP recursion root vertex");
  cmd_dplen->add_flag("--brute", dplen_brute, "use the brute-force oracle");
  cmd_dplen->add_flag("--flowout-b", dplen_flowout_b, "use the flow-out b(v) recursion");

  // ---- accepts ----
  std::string acc_net, acc_graph;
  auto* cmd_accepts = app.add_subcommand("accepts", "does the network accept the graph");
  cmd_accepts->add_option("network", acc_net, "network file")->required();
  cmd_accepts->add_option("graph", acc_graph, "edge-list file")->required();

  // ---- sound ----
  std::string sound_net;
  int sound_universe = 4;
  auto* cmd_sound = app.add_subcommand("sound", "exact soundness check");
  cmd_sound->add_option("network", sound_net, "network file")->required();
  cmd_sound->add_option("--universe", sound_universe, "universe size incl. s,t");

  // ---- complete ----
  std::string comp_net;
  int comp_universe = 4;
  auto* cmd_complete = app.add_subcommand("complete", "completeness over simple paths");
  cmd_complete->add_option("network", comp_net, "network file")->required();
  cmd_complete->add_option("--universe", comp_universe, "universe size incl. s,t");

  // ---- sigma ----
  std::string sigma_file;
  long sigma_max = 1000;
  auto* cmd_sigma = app.add_subcommand("sigma", "permutation set sigma(G)");
  cmd_sigma->add_option("file", sigma_file, "edge-list file")->required();
  cmd_sigma->add_option("--max", sigma_max, "print at most this many members");

  // ---- min-msn ----
  std::string mm_file;
  bool mm_sigma = false;
  int mm_max_universe = 4, mm_max_size = 6;
  auto* cmd_mm = app.add_subcommand("min-msn", "exact m(I) by exhaustive search");
  cmd_mm->add_option("file", mm_file, "edge-list file")->required();
  cmd_mm->add_flag("--sigma", mm_sigma, "search m(sigma(G)) instead of m({G})");
  cmd_mm->add_option("--max-universe", mm_max_universe, "refuse larger universes");
  cmd_mm->add_option("--max-size", mm_max_size, "largest network size tried");

  // ---- reduce ----
  std::string red_file, red_h_file, red_mode = "thm51", red_out;
  int red_i = 1;
  auto* cmd_reduce = app.add_subcommand("reduce", "generate reduction certificates");
  cmd_reduce->add_option("file", red_file, "edge-list file (G)")->required();
  cmd_reduce->add_option("--mode", red_mode, "sqrt | dplen | thm51 | flowout | upper")
      ->check(CLI::IsMember({"sqrt", "dplen", "thm51", "flowout", "upper"}));
  cmd_reduce->add_option("--h-file", red_h_file, "disjoint tree H (sqrt/dplen modes)");
  cmd_reduce->add_option("-i,--index", red_i, "index i (flowout mode)");
  cmd_reduce->add_option("--out", red_out, "write certificate JSON to this file");

  // ---- check-cert ----
  std::string cc_file;
  auto* cmd_cc = app.add_subcommand("check-cert", "replay and verify a certificate");
  cmd_cc->add_option("file", cc_file, "certificate JSON file")->required();

  // ---- construct-a ----
  long ca_n = 0;
  int ca_ell = 0, ca_retries = 5;
  long long ca_c = 0;
  std::uint64_t ca_seed = 1;
  long ca_sweep_cap = 100000, ca_sample = 20000;
  auto* cmd_ca = app.add_subcommand("construct-a", "randomized path-network construction");
  cmd_ca->add_option("--n", ca_n, "vertex count")->required();
  cmd_ca->add_option("--ell", ca_ell, "path length")->required();
  cmd_ca->add_option("--C", ca_c, "path count (default: n^2/p)");
  cmd_ca->add_option("--seed", ca_seed, "base RNG seed");
  cmd_ca->add_option("--retries", ca_retries, "seed retries");
  cmd_ca->add_option("--sweep-cap", ca_sweep_cap, "exhaustive sweep cap");
  cmd_ca->add_option("--sample", ca_sample, "sample size beyond the cap");

  // ---- bench ----
  std::vector<long> bench_sizes{10000, 100000, 1000000};
  std::uint64_t bench_seed = 1;
  auto* cmd_bench = app.add_subcommand("bench", "time the linear p(H) DP");
  cmd_bench->add_option("--sizes", bench_sizes, "tree sizes, ascending");
  cmd_bench->add_option("--seed", bench_seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  int threads = resolve_threads(threads_flag);

  try {
    if (*cmd_bounds) {
      auto g = load_graph(bounds_file);
      json j;
      if (bounds_flowout) {
        auto st = msnlab::bounds::flowout_c(g);
        j["n"] = st.n;
        j["ell"] = st.ell;
        j["d"] = st.d;
        j["c"] = st.c;
        j["profile_t54"] = profile_json(msnlab::bounds::profile_t54(st));
        if (!as_json) {
          std::cout << "flow-out tree: n=" << st.n << " ell=" << st.ell << "\nc:";
          for (size_t i = 0; i < st.c.size(); ++i)
            std::cout << " c_" << (i + 1) << "=" << st.c[i];
          std::cout << "\nlower bound profile: "
                    << msnlab::bounds::profile_t54(st).render() << "\n";
        }
      } else {
        auto st = msnlab::bounds::compute_stats(g);
        auto [lo, up] = msnlab::bounds::profile_t51(st);
        j["n"] = st.n;
        j["ell"] = st.ell;
        j["d_s"] = st.d_s;
        j["d_t"] = st.d_t;
        j["c_s"] = st.c_s;
        j["c_t"] = st.c_t;
        j["d_bar"] = st.d_bar;
        j["c_bar"] = st.c_bar;
        j["non_lollipops"] = st.non_lollipops;
        j["profile_t51_lower"] = profile_json(lo);
        j["profile_t51_upper"] = profile_json(up);
        j["profile_t34"] = profile_json(msnlab::bounds::profile_t34(st.n, st.non_lollipops));
        if (!as_json) {
          std::cout << "n=" << st.n << " ell=" << st.ell << " d_bar=" << st.d_bar
                    << " c_bar=" << st.c_bar << " non_lollipops=" << st.non_lollipops
                    << "\nc_s:";
          for (size_t i = 0; i < st.c_s.size(); ++i)
            std::cout << " c_" << (i + 1) << "=" << st.c_s[i];
          std::cout << "\nc_t:";
          for (size_t i = 0; i < st.c_t.size(); ++i)
            std::cout << " c_" << (i + 1) << "=" << st.c_t[i];
          std::cout << "\nlower: " << lo.render() << "\nupper: " << up.render() << "\n";
        }
      }
      if (as_json) std::cout << j.dump(2) << "\n";
      return kOk;
    }

    if (*cmd_dplen) {
      auto h = drop_isolated_st(load_graph(dplen_file));
      int p = 0;
      msnlab::dplen::PathFamily fam;
      if (dplen_brute) {
        std::tie(p, fam) = msnlab::dplen::brute_force_p(h);
      } else if (dplen_flowout_b) {
        auto bt = msnlab::dplen::flowout_b(h);
        p = bt.b_root();
        fam = bt.witness;
      } else {
        auto dp = dplen_root.empty()
                      ? msnlab::dplen::general_p_dp(h)
                      : msnlab::dplen::general_p_dp(h, dplen_root);
        p = dp.p;
        fam = dp.witness;
      }
      json j;
      j["p"] = p;
      j["witness"] = fam.paths;
      if (as_json)
        std::cout << j.dump(2) << "\n";
      else {
        std::cout << "p(H) = " << p << "\nwitness family:\n";
        for (const auto& path : fam.paths) {
          std::cout << " ";
          for (size_t i = 0; i < path.size(); ++i)
            std::cout << (i ? " -> " : " ") << path[i];
          std::cout << "\n";
        }
      }
      return kOk;
    }

    if (*cmd_accepts) {
      auto net = load_network(acc_net);
      auto g = load_graph(acc_graph);
      bool ok = msnlab::msn::accepts(net, g);
      if (as_json)
        std::cout << json{{"accepts", ok}}.dump(2) << "\n";
      else
        std::cout << (ok ? "accepts" : "rejects") << "\n";
      return ok ? kOk : kNegative;
    }

    if (*cmd_sound) {
      auto net = load_network(sound_net);
      auto rep = msnlab::msn::is_sound(net, numbered_universe(sound_universe));
      json j;
      j["sound"] = rep.sound;
      if (!rep.sound) {
        j["witness_walk"] = rep.witness_walk;
        j["witness_input"] =
            msnlab::graphs::format_edge_list(*rep.witness_input);
      }
      if (as_json)
        std::cout << j.dump(2) << "\n";
      else if (rep.sound)
        std::cout << "sound\n";
      else
        std::cout << "unsound; accepted pathless input:\n"
                  << msnlab::graphs::format_edge_list(*rep.witness_input);
      return rep.sound ? kOk : kNegative;
    }

    if (*cmd_complete) {
      auto net = load_network(comp_net);
      std::vector<std::string> uni = numbered_universe(comp_universe);
      bool ok = msnlab::msn::is_complete(net, uni);
      if (as_json)
        std::cout << json{{"complete", ok}}.dump(2) << "\n";
      else
        std::cout << (ok ? "complete" : "incomplete") << "\n";
      return ok ? kOk : kNegative;
    }

    if (*cmd_sigma) {
      auto g = load_graph(sigma_file);
      auto members = msnlab::graphs::sigma_st(g);
      json j;
      j["size"] = members.size();
      j["members"] = json::array();
      long shown = 0;
      for (const auto& m : members) {
        if (shown++ >= sigma_max) break;
        j["members"].push_back(msnlab::graphs::format_edge_list(m));
      }
      if (as_json)
        std::cout << j.dump(2) << "\n";
      else {
        std::cout << "|sigma(G)| = " << members.size() << "\n";
        for (const auto& m : j["members"])
          std::cout << m.get<std::string>() << "---\n";
      }
      return kOk;
    }

    if (*cmd_mm) {
      auto g = load_graph(mm_file);
      if (g.n() > mm_max_universe)
        throw msnlab::BudgetExceeded(
            "min-msn: universe of " + std::to_string(g.n()) +
            " exceeds --max-universe " + std::to_string(mm_max_universe));
      std::vector<msnlab::graphs::DiGraph> members =
          mm_sigma ? msnlab::graphs::sigma_st(g)
                   : std::vector<msnlab::graphs::DiGraph>{g};
      msnlab::search::SearchBudget budget;
      budget.max_size = mm_max_size;
      auto r = msnlab::search::min_sound_msn(members, budget);
      json j;
      j["m"] = r.m();
      j["explored"] = r.explored;
      j["witness"] = msnlab::msn::format_network(*r.witness);
      if (as_json)
        std::cout << j.dump(2) << "\n";
      else
        std::cout << "m = " << r.m() << "\nwitness network:\n"
                  << msnlab::msn::format_network(*r.witness);
      return kOk;
    }

    if (*cmd_reduce) {
      auto g = load_graph(red_file);
      std::vector<msnlab::reduce::ReductionCertificate> certs;
      json j;
      if (red_mode == "sqrt" || red_mode == "dplen") {
        if (red_h_file.empty())
          throw msnlab::ParseError("reduce --mode " + red_mode + " needs --h-file");
        std::string text = slurp(red_h_file);
        // H is a plain tree without s/t; parse as raw edge list.
        msnlab::graphs::DiGraph h;
        {
          auto parsed = msnlab::graphs::parse_edge_list(text);
          for (const auto& v : parsed.names())
            if (v != "s" && v != "t") h.add_vertex(v);
          for (const auto& [u, v] : parsed.edge_names()) h.add_edge(u, v);
        }
        certs.push_back(red_mode == "sqrt"
                            ? msnlab::reduce::sqrt_path_certificate(g, h)
                            : msnlab::reduce::dplen_path_certificate(g, h));
      } else if (red_mode == "thm51") {
        certs = msnlab::reduce::thm51_lower_certificates(g);
      } else if (red_mode == "flowout") {
        certs.push_back(msnlab::reduce::flowout_lower_certificate(g, red_i));
      } else {  // upper
        auto seq = msnlab::reduce::upper_graph_sequence(g);
        j["c_bar"] = seq.c_bar;
        j["graphs"] = json::array();
        for (const auto& gi : seq.graphs_seq)
          j["graphs"].push_back(msnlab::graphs::format_edge_list(gi));
        j["p_s_sizes"] = json::array();
        j["p_t_sizes"] = json::array();
        for (const auto& s : seq.p_s) j["p_s_sizes"].push_back(s.size());
        for (const auto& s : seq.p_t) j["p_t_sizes"].push_back(s.size());
        j["final_normalized"] =
            msnlab::reduce::final_graph_normalized(seq.graphs_seq.back());
        std::cout << j.dump(2) << "\n";
        return kOk;
      }
      j["certificates"] = json::array();
      for (const auto& c : certs)
        j["certificates"].push_back(msnlab::reduce::certificate_to_json(c));
      if (!red_out.empty()) {
        std::ofstream out(red_out);
        out << j.dump(2) << "\n";
      }
      if (as_json || red_out.empty()) std::cout << j.dump(2) << "\n";
      return kOk;
    }

    if (*cmd_cc) {
      json j = json::parse(slurp(cc_file));
      json out;
      out["results"] = json::array();
      bool all_ok = true;
      auto check_one = [&](const json& jc) {
        auto cert = msnlab::reduce::certificate_from_json(jc);
        auto rep = msnlab::reduce::check_certificate(cert);
        all_ok = all_ok && rep.ok;
        out["results"].push_back({{"ok", rep.ok},
                                  {"reason", rep.reason},
                                  {"failed_move", rep.failed_move}});
      };
      if (j.contains("certificates"))
        for (const auto& jc : j["certificates"]) check_one(jc);
      else
        check_one(j);
      out["ok"] = all_ok;
      if (as_json)
        std::cout << out.dump(2) << "\n";
      else
        std::cout << (all_ok ? "valid" : "INVALID") << " ("
                  << out["results"].size() << " certificate(s))\n";
      return all_ok ? kOk : kNegative;
    }

    if (*cmd_ca) {
      auto req = msnlab::construct::required_C(ca_n, ca_ell);
      if (ca_c == 0) ca_c = static_cast<long long>(req.c);
      auto [rpn, rep] = msnlab::construct::accept_with_retries(
          ca_n, ca_ell, ca_c, ca_seed, ca_retries, ca_sweep_cap, ca_sample, threads);
      json j;
      j["n"] = rep.n;
      j["ell"] = rep.ell;
      j["p"] = "1/" + std::to_string(rep.p_den);
      j["C"] = rep.c;
      j["seed"] = rep.seed;
      j["swept"] = rep.swept;
      j["rejected"] = rep.rejected;
      j["sound"] = rep.sound;
      j["exhaustive"] = rep.exhaustive;
      j["per_path_rate"] = rep.per_path_rate;
      j["network_size"] = rpn.net.size();
      if (as_json)
        std::cout << j.dump(2) << "\n";
      else
        std::cout << "n=" << rep.n << " ell=" << rep.ell << " p=1/" << rep.p_den
                  << " C=" << rep.c << " seed=" << rep.seed << " swept=" << rep.swept
                  << " rejected=" << rep.rejected << " sound=" << rep.sound
                  << " size=" << rpn.net.size() << "\n";
      return kOk;
    }

    if (*cmd_bench) {
      json rows = json::array();
      for (long n : bench_sizes) {
        auto g = random_tree(n, bench_seed);
        auto t0 = std::chrono::steady_clock::now();
        int reps = 0;
        int p = 0;
        do {
          p = msnlab::dplen::general_p_dp(g, std::nullopt, false).p;
          ++reps;
        } while (std::chrono::steady_clock::now() - t0 <
                 std::chrono::milliseconds(200));
        double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count() /
                    reps;
        rows.push_back({{"n", n}, {"p", p}, {"elapsed_ms", ms}, {"reps", reps}});
        if (!as_json)
          std::cout << "n=" << n << " p=" << p << " elapsed_ms=" << ms
                    << " reps=" << reps << "\n";
      }
      if (as_json) std::cout << rows.dump(2) << "\n";
      return kOk;
    }
  } catch (const msnlab::BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kBudget;
  } catch (const msnlab::ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kUsage;
  } catch (const msnlab::PreconditionError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
