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

#ifndef MSNLAB_BOUNDS_HPP_
#define MSNLAB_BOUNDS_HPP_

#include <algorithm>
#include <limits>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "msnlab/common.hpp"
#include "msnlab/graphs.hpp"
#include "msnlab/reduce.hpp"

namespace msnlab::bounds {

/// ceil(lg lg x): the smallest i >= 0 with 2^(2^i) >= x, computed exactly
/// in integers.  Defined for x >= 2.
inline int ceil_lg_lg(long x) {
  if (x < 2) throw PreconditionError("ceil_lg_lg: argument below 2");
  for (int i = 0;; ++i) {
    long v = 2;
    for (int e = 1; e < (1 << i); ++e) {
      v *= 2;
      if (v >= x) break;
    }
    if (v >= x) return i;
  }
}

/// 2^(2^i), saturating instead of overflowing.
inline long double_exp(int i) {
  if (i >= 6) return std::numeric_limits<long>::max();  // 2^64 and beyond
  long v = 1;
  for (int e = 0; e < (1 << i); ++e) v *= 2;
  return v;
}

/// Structural statistics of a directed tree with an s-t path.  The d/c
/// families count off-path halo vertices by the maximum distance reached
/// by their descendants (from s) or ancestors (to t); descendants and
/// ancestors are reflexive, so a leaf counts at its own distance.
struct StructureStats {
  long n = 0;
  int ell = 0;
  std::vector<long> d_s, d_t;  // index = distance, size n+1
  std::vector<long> c_s, c_t;  // index 0 holds c_1
  long d_bar = 0;              // off-path vertices in neither halo
  long c_bar = 0;              // halo vertices farther than ell from s / to t
  long non_lollipops = 0;
  std::set<std::string> h_s, h_t;
};

namespace detail {

/// Per-vertex maximum of dist[] over the reflexive out- (or in-) closure.
inline std::vector<int> closure_max(const graphs::DiGraph& g,
                                    const std::vector<std::vector<int>>& adj,
                                    const std::vector<int>& dist) {
  // Iterate to a fixed point; tree inputs converge in depth passes but
  // this stays correct for any DAG restriction we are handed.
  std::vector<int> best = dist;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int v = 0; v < g.n(); ++v)
      for (int w : adj[static_cast<size_t>(v)])
        if (best[static_cast<size_t>(w)] > best[static_cast<size_t>(v)]) {
          best[static_cast<size_t>(v)] = best[static_cast<size_t>(w)];
          changed = true;
        }
  }
  return best;
}

}  // namespace detail

inline StructureStats compute_stats(const graphs::DiGraph& g) {
  if (!graphs::underlying_is_tree(g))
    throw PreconditionError("compute_stats: input is not a directed tree");
  auto path = reduce::detail::tree_st_path(g);
  std::set<std::string> on_path(path.begin(), path.end());

  StructureStats st;
  st.n = g.n();
  st.ell = static_cast<int>(path.size()) - 1;
  auto [s, t] = g.st();
  auto from_s = graphs::reachable_from(g, s);
  auto to_t = graphs::reaches(g, t);
  auto ds = graphs::distances_from(g, s);
  auto dt = graphs::distances_to(g, t);
  auto maxdesc = detail::closure_max(g, g.out_adj(), ds);
  auto maxanc = detail::closure_max(g, g.in_adj(), dt);

  st.d_s.assign(static_cast<size_t>(st.n) + 1, 0);
  st.d_t.assign(static_cast<size_t>(st.n) + 1, 0);
  for (int v = 0; v < g.n(); ++v) {
    const std::string& name = g.name(v);
    if (on_path.count(name)) continue;
    if (from_s[static_cast<size_t>(v)]) {
      st.h_s.insert(name);
      ++st.d_s[static_cast<size_t>(maxdesc[static_cast<size_t>(v)])];
      if (ds[static_cast<size_t>(v)] > st.ell) ++st.c_bar;
    } else if (to_t[static_cast<size_t>(v)]) {
      st.h_t.insert(name);
      ++st.d_t[static_cast<size_t>(maxanc[static_cast<size_t>(v)])];
      if (dt[static_cast<size_t>(v)] > st.ell) ++st.c_bar;
    } else {
      ++st.d_bar;
    }
  }

  int len = (st.ell >= 2) ? std::max(1, ceil_lg_lg(st.ell)) : 0;
  st.c_s.assign(static_cast<size_t>(len), 0);
  st.c_t.assign(static_cast<size_t>(len), 0);
  for (int i = 1; i <= len; ++i) {
    long lo = (i == 1) ? 1 : double_exp(i);
    for (long j = lo; j <= st.n; ++j) {
      st.c_s[static_cast<size_t>(i - 1)] += st.d_s[static_cast<size_t>(j)];
      st.c_t[static_cast<size_t>(i - 1)] += st.d_t[static_cast<size_t>(j)];
    }
  }
  st.non_lollipops = graphs::count_non_lollipops(g);
  return st;
}

/// Statistics of a flow-out tree rooted at s: d_i counts all vertices
/// whose reflexive descendants reach a maximum distance of i from s, and
/// c_1 = n, c_i = sum of d_j for j >= 2^(2^i).
struct FlowOutStats {
  long n = 0;
  int ell = 0;
  std::vector<long> d;  // index = distance, size n+1
  std::vector<long> c;  // index 0 holds c_1 = n
};

inline FlowOutStats flowout_c(const graphs::DiGraph& g) {
  auto kind = graphs::classify_tree(g);
  if (kind.tag != graphs::TreeKindTag::FlowOut || *kind.root != "s")
    throw PreconditionError("flowout_c: not a flow-out tree rooted at s");
  FlowOutStats st;
  st.n = g.n();
  st.ell = static_cast<int>(reduce::detail::tree_st_path(g).size()) - 1;
  auto ds = graphs::distances_from(g, g.id("s"));
  auto maxdesc = detail::closure_max(g, g.out_adj(), ds);
  st.d.assign(static_cast<size_t>(st.n) + 1, 0);
  for (int v = 0; v < g.n(); ++v)
    ++st.d[static_cast<size_t>(maxdesc[static_cast<size_t>(v)])];

  int len = std::max(2, (st.ell >= 2) ? ceil_lg_lg(st.ell) : 0);
  st.c.assign(static_cast<size_t>(len), 0);
  st.c[0] = st.n;
  for (int i = 2; i <= len; ++i) {
    long lo = double_exp(i);
    for (long j = lo; j <= st.n; ++j)
      st.c[static_cast<size_t>(i - 1)] += st.d[static_cast<size_t>(j)];
  }
  return st;
}

// ---------------------------------------------------------------------------
// Symbolic bound profiles

/// A symbolic factor base^scale; the exponent scales form two chains above
/// 1: 1 < lg lg ell < lg ell, and 2^1 < 2^2 < ... (the chains are mutually
/// incomparable above 1).
struct Scale {
  enum class Kind { One, LgLgEll, LgEll, TwoPow };
  Kind kind = Kind::One;
  int i = 0;  // for TwoPow

  static Scale one() { return {Kind::One, 0}; }
  static Scale lglg_ell() { return {Kind::LgLgEll, 0}; }
  static Scale lg_ell() { return {Kind::LgEll, 0}; }
  static Scale two_pow(int i) { return {Kind::TwoPow, i}; }

  std::string render() const {
    switch (kind) {
      case Kind::One:
        return "1";
      case Kind::LgLgEll:
        return "lg lg ell";
      case Kind::LgEll:
        return "lg ell";
      case Kind::TwoPow:
        return "2^" + std::to_string(i);
    }
    return "?";
  }
};

/// scale a <= scale b in the two-chain partial order.
inline bool scale_le(const Scale& a, const Scale& b) {
  using K = Scale::Kind;
  if (a.kind == K::One) return true;
  if (b.kind == K::One) return false;
  if (a.kind == K::TwoPow || b.kind == K::TwoPow)
    return a.kind == K::TwoPow && b.kind == K::TwoPow && a.i <= b.i;
  if (a.kind == b.kind) return true;
  return a.kind == K::LgLgEll;  // lg lg ell <= lg ell
}

struct Factor {
  std::string label;  // e.g. "ell+dbar"
  long base = 0;
  Scale scale;

  std::string render() const { return "(" + label + ")^{" + scale.render() + "}"; }
};

struct BoundProfile {
  enum class Side { Lower, Upper };
  Side side = Side::Lower;
  std::vector<Factor> factors;

  std::string render() const {
    std::string out;
    for (const auto& f : factors) {
      if (!out.empty()) out += " * ";
      out += f.render();
    }
    return out.empty() ? "1" : out;
  }
};

// Reference profiles.  Theorems stated with Theta yield a (lower, upper)
// pair with identical factor lists.

/// All path-containing inputs on n vertices: n^(Theta(lg n)); rendered
/// with the lg ell scale at the extremal path length ell = n.
inline std::pair<BoundProfile, BoundProfile> profile_t31(long n) {
  BoundProfile lo{BoundProfile::Side::Lower, {{"n", n, Scale::lg_ell()}}};
  BoundProfile up{BoundProfile::Side::Upper, {{"n", n, Scale::lg_ell()}}};
  return {lo, up};
}

/// Inputs with an s-t path of length ell: n^(Theta(lg ell)).
inline std::pair<BoundProfile, BoundProfile> profile_t32(long n) {
  return {{BoundProfile::Side::Lower, {{"n", n, Scale::lg_ell()}}},
          {BoundProfile::Side::Upper, {{"n", n, Scale::lg_ell()}}}};
}

/// Every vertex on exactly one length-ell s-t path: n^(Theta(lg ell)).
inline std::pair<BoundProfile, BoundProfile> profile_t33(long n) {
  return profile_t32(n);
}

/// All but k vertices lollipops: upper bound n^(O(1)) * k^(O(lg ell)).
inline BoundProfile profile_t34(long n, long k) {
  return {BoundProfile::Side::Upper,
          {{"n", n, Scale::one()}, {"k", k, Scale::lg_ell()}}};
}

/// General directed-tree bounds from the halo statistics: the lower bound
/// is (ell+dbar)^(lg ell) times the best single c-term, the upper bound is
/// n^(lg lg ell) (ell+dbar)^(lg ell) times the product of all c-terms.
/// Zero-base c-terms are omitted (they contribute nothing to the display).
inline std::pair<BoundProfile, BoundProfile> profile_t51(const StructureStats& st) {
  BoundProfile lo{BoundProfile::Side::Lower, {}};
  lo.factors.push_back({"ell+dbar", st.ell + st.d_bar, Scale::lg_ell()});
  long best = 0;
  int best_i = 0;
  for (size_t j = 0; j < st.c_s.size(); ++j) {
    long v = st.c_s[j] + st.c_t[j];
    if (v >= best && v > 0) {  // ties resolve to the larger exponent
      best = v;
      best_i = static_cast<int>(j) + 1;
    }
  }
  if (best > 0)
    lo.factors.push_back({"c_" + std::to_string(best_i) + "^s+c_" +
                              std::to_string(best_i) + "^t",
                          best, Scale::two_pow(best_i)});

  BoundProfile up{BoundProfile::Side::Upper, {}};
  up.factors.push_back({"n", st.n, Scale::lglg_ell()});
  up.factors.push_back({"ell+dbar", st.ell + st.d_bar, Scale::lg_ell()});
  for (size_t j = 0; j < st.c_s.size(); ++j) {
    long v = st.c_s[j] + st.c_t[j];
    if (v > 0)
      up.factors.push_back({"c_" + std::to_string(j + 1) + "^s+c_" +
                                std::to_string(j + 1) + "^t",
                            v, Scale::two_pow(static_cast<int>(j) + 1)});
  }
  return {lo, up};
}

/// Flow-out tree lower bound: ell^(lg ell) * max_i c_i^(2^i).
inline BoundProfile profile_t54(const FlowOutStats& st) {
  BoundProfile lo{BoundProfile::Side::Lower, {}};
  lo.factors.push_back({"ell", st.ell, Scale::lg_ell()});
  long best = 0;
  int best_i = 0;
  for (size_t j = 0; j < st.c.size(); ++j)
    if (st.c[j] >= best && st.c[j] > 0) {
      best = st.c[j];
      best_i = static_cast<int>(j) + 1;
    }
  if (best > 0)
    lo.factors.push_back({"c_" + std::to_string(best_i), best, Scale::two_pow(best_i)});
  return lo;
}

enum class Comparison { Dominates, Dominated, Incomparable };

namespace detail {

inline bool majorizes(const BoundProfile& p1, const BoundProfile& p2) {
  for (const auto& f2 : p2.factors) {
    bool covered = false;
    for (const auto& f1 : p1.factors)
      if (f1.base >= f2.base && scale_le(f2.scale, f1.scale)) {
        covered = true;
        break;
      }
    if (!covered) return false;
  }
  return true;
}

}  // namespace detail

/// Factor-wise dominance up to constants: p1 dominates p2 when every
/// factor of p2 is majorized (>= base and >= scale) by some factor of p1.
inline Comparison compare_profiles(const BoundProfile& p1, const BoundProfile& p2) {
  if (p1.side != p2.side)
    throw PreconditionError("compare_profiles: profiles are for different sides");
  if (detail::majorizes(p1, p2)) return Comparison::Dominates;
  if (detail::majorizes(p2, p1)) return Comparison::Dominated;
  return Comparison::Incomparable;
}

}  // namespace msnlab::bounds

#endif  // MSNLAB_BOUNDS_HPP_
