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

#ifndef MSNLAB_SEARCH_HPP_
#define MSNLAB_SEARCH_HPP_

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "msnlab/common.hpp"
#include "msnlab/graphs.hpp"
#include "msnlab/msn.hpp"

namespace msnlab::search {

struct SearchBudget {
  long max_nodes = 200'000'000;
  int max_size = 6;
};

/// Result of a minimality search.  Exact when lower == upper; a budget
/// overrun leaves the best-known interval instead.
struct SearchResult {
  int lower = 2;
  int upper = -1;  // -1: no accepting network found within max_size
  std::optional<msn::SwitchingNetwork> witness;
  long explored = 0;

  bool exact() const { return upper >= 0 && lower == upper; }
  int m() const {
    if (!exact()) throw PreconditionError("search result is not exact");
    return upper;
  }
};

namespace detail {

/// DFS over k-subsets of (network pair, label) slots, deepening on k.
/// Invariants along the search: the partial network is always sound
/// (including an edge that breaks soundness prunes that branch, since
/// adding further edges cannot restore soundness), and a branch is pruned
/// when even including every undecided slot fails to accept some member.
class SlotSearch {
 public:
  SlotSearch(const std::vector<graphs::DiGraph>& members,
             std::vector<std::string> universe,
             std::vector<std::pair<std::string, std::string>> alphabet, int size,
             long max_nodes)
      : members_(members),
        universe_(std::move(universe)),
        alphabet_(std::move(alphabet)),
        size_(size),
        max_nodes_(max_nodes) {
    // Pair order: (s',t') first, then s'/t'-incident pairs per internal
    // vertex, then internal pairs.
    pairs_.emplace_back(0, 1);
    for (int u = 2; u < size_; ++u) {
      pairs_.emplace_back(0, u);
      pairs_.emplace_back(1, u);
    }
    for (int u = 2; u < size_; ++u)
      for (int v = u + 1; v < size_; ++v) pairs_.emplace_back(u, v);
    for (int pi = 0; pi < static_cast<int>(pairs_.size()); ++pi)
      for (int li = 0; li < static_cast<int>(alphabet_.size()); ++li)
        slots_.push_back({pairs_[static_cast<size_t>(pi)].first,
                          pairs_[static_cast<size_t>(pi)].second, li, pi});
    // Per member: which slots are live (the member carries the label), the
    // pair-bitmask of live slots at or after each index, and incremental
    // chosen-slot counts per pair.  Feasibility then reduces to s'-t'
    // connectivity over at most size*(size-1)/2 pair bits.
    size_t ns = slots_.size(), nm = members_.size();
    member_suffix_.assign(nm, std::vector<uint32_t>(ns + 1, 0));
    member_live_.assign(nm * ns, 0);
    member_mask_.assign(nm, 0);
    member_cnt_.assign(nm * pairs_.size(), 0);
    // Bitset-based soundness machinery (same state space and verdict as the
    // exact checker, specialized to this search's small alphabet).
    nl_ = static_cast<int>(alphabet_.size());
    use_fast_sound_ = nl_ <= 20;
    if (use_fast_sound_) {
      std::map<std::string, int> vid;
      auto intern = [&](const std::string& v) {
        auto it = vid.find(v);
        if (it != vid.end()) return it->second;
        int k = static_cast<int>(vid.size());
        vid.emplace(v, k);
        return k;
      };
      for (const auto& v : universe_) intern(v);
      sv_ = intern("s");
      tv_ = intern("t");
      ledges_.resize(static_cast<size_t>(nl_));
      for (int i = 0; i < nl_; ++i)
        ledges_[static_cast<size_t>(i)] = {intern(alphabet_[static_cast<size_t>(i)].first),
                                           intern(alphabet_[static_cast<size_t>(i)].second)};
      nuv_ = static_cast<int>(vid.size());
      path_memo_.assign(size_t{1} << nl_, -1);
      sound_seen_.assign(static_cast<size_t>(size_) << nl_, 0);
      sound_stamp_ = 0;
    }
    for (size_t mi = 0; mi < nm; ++mi) {
      const auto& g = members_[mi];
      for (size_t i = ns; i-- > 0;) {
        const Slot& s = slots_[i];
        const auto& lab = alphabet_[static_cast<size_t>(s.label)];
        bool live = g.has_vertex(lab.first) && g.has_vertex(lab.second) &&
                    g.has_edge(lab.first, lab.second);
        member_live_[mi * ns + i] = live ? 1 : 0;
        member_suffix_[mi][i] =
            member_suffix_[mi][i + 1] |
            (live ? (uint32_t{1} << s.pair) : 0);
      }
    }
    degree_.assign(static_cast<size_t>(size_), 0);
  }

  /// Returns a witness network of exactly this size, or nullopt after
  /// exhausting the space.  Throws BudgetExceeded on overrun.
  ///
  /// Inner deepening is on edge count: any sound network accepting all
  /// members contains a sound accepting subnetwork keeping only one
  /// minimal live s'-t' path per member (subnetworks of sound networks
  /// are sound), so at most |I|*(size-1) edges ever need considering.
  std::optional<msn::SwitchingNetwork> run(long* explored) {
    chosen_.clear();
    found_.reset();
    explored_ = 0;
    long cap = static_cast<long>(members_.size()) * (size_ - 1);
    cap = std::min(cap, static_cast<long>(slots_.size()));
    for (long k = 1; k <= cap && !found_; ++k) choose(0, static_cast<int>(k));
    *explored += explored_;
    return found_;
  }

 private:
  struct Slot {
    int u, v, label, pair;
  };

  msn::SwitchingNetwork materialize(const std::vector<int>& slot_indices) const {
    msn::SwitchingNetwork net;
    for (int u = 2; u < size_; ++u) net.add_vertex("u" + std::to_string(u - 1));
    for (int i : slot_indices) {
      const Slot& s = slots_[static_cast<size_t>(i)];
      net.add_edge(s.u, s.v,
                   msn::EdgeLabel::edge(alphabet_[static_cast<size_t>(s.label)].first,
                                        alphabet_[static_cast<size_t>(s.label)].second));
    }
    return net;
  }

  // Connectivity of s'(=0) and t'(=1) over the pairs whose bit is set.
  bool st_connected(uint32_t pair_mask) const {
    uint32_t reach = 1;  // vertex bitset, s' in
    bool changed = true;
    while (changed) {
      changed = false;
      for (int pi = 0; pi < static_cast<int>(pairs_.size()); ++pi) {
        if (!(pair_mask >> pi & 1)) continue;
        auto [u, v] = pairs_[static_cast<size_t>(pi)];
        uint32_t bu = uint32_t{1} << u, bv = uint32_t{1} << v;
        uint32_t both = bu | bv;
        if ((reach & both) && (reach & both) != both) {
          reach |= both;
          changed = true;
        }
      }
    }
    return (reach >> 1) & 1;
  }

  bool has_path_bits(uint32_t bits) {
    int8_t& memo = path_memo_[bits];
    if (memo >= 0) return memo != 0;
    uint32_t mark = uint32_t{1} << sv_;
    bool changed = true;
    while (changed) {
      changed = false;
      for (int i = 0; i < nl_; ++i) {
        if (!(bits >> i & 1)) continue;
        auto [a, b] = ledges_[static_cast<size_t>(i)];
        if ((mark >> a & 1) && !(mark >> b & 1)) {
          mark |= uint32_t{1} << b;
          changed = true;
        }
      }
    }
    memo = (mark >> tv_ & 1) ? 1 : 0;
    return memo != 0;
  }

  // Soundness of the partial network built from chosen_: BFS over
  // (network vertex, accumulated label bitset) states, pruning states whose
  // labels already contain an s-t path; unsound iff t' is reached without
  // one.  Same state space and verdict as the exact checker.
  bool chosen_sound() {
    ++sound_stamp_;
    sound_work_.assign(1, uint64_t{0} << nl_ | 0);  // (s'=0, empty bits)
    sound_seen_[0] = sound_stamp_;
    while (!sound_work_.empty()) {
      uint64_t st = sound_work_.back();
      sound_work_.pop_back();
      int v = static_cast<int>(st >> nl_);
      uint32_t bits = static_cast<uint32_t>(st & ((uint64_t{1} << nl_) - 1));
      if (has_path_bits(bits)) continue;
      if (v == 1) return false;  // t' with pathless labels
      for (int ci : chosen_) {
        const Slot& s = slots_[static_cast<size_t>(ci)];
        int to;
        if (s.u == v)
          to = s.v;
        else if (s.v == v)
          to = s.u;
        else
          continue;
        uint32_t nb = bits | (uint32_t{1} << s.label);
        uint64_t key = static_cast<uint64_t>(to) << nl_ | nb;
        if (sound_seen_[key] != sound_stamp_) {
          sound_seen_[key] = sound_stamp_;
          sound_work_.push_back(key);
        }
      }
    }
    return true;
  }

  bool accepts_all_with_undecided(int idx) const {
    for (size_t mi = 0; mi < members_.size(); ++mi)
      if (!st_connected(member_mask_[mi] |
                        member_suffix_[mi][static_cast<size_t>(idx)]))
        return false;
    return true;
  }

  // Picks `remaining` more slots from indices >= start (lexicographic
  // combinations, each candidate edge set visited once).
  bool choose(int start, int remaining) {
    if (++explored_ > max_nodes_) throw BudgetExceeded("min_sound_msn: node budget");
    if (remaining == 0) {
      // Internal vertices of degree <= 1 never affect acceptance, so a
      // candidate leaving one is covered by the smaller size: require full
      // degree-2 usage at exactly this size.
      for (int v = 2; v < size_; ++v)
        if (degree_[static_cast<size_t>(v)] < 2) return false;
      for (size_t mi = 0; mi < members_.size(); ++mi)
        if (!st_connected(member_mask_[mi])) return false;
      found_ = materialize(chosen_);
      return true;
    }
    // Each new edge raises total internal degree by at most 2.
    int deficit = 0;
    for (int v = 2; v < size_; ++v)
      deficit += std::max(0, 2 - degree_[static_cast<size_t>(v)]);
    if (deficit > 2 * remaining) return false;
    size_t ns = slots_.size();
    for (int i = start; i + remaining <= static_cast<int>(ns); ++i) {
      // The undecided suffix only shrinks as i grows, so one failure here
      // rules out every later starting point too.
      if (!accepts_all_with_undecided(i)) return false;
      const Slot& s = slots_[static_cast<size_t>(i)];
      chosen_.push_back(i);
      ++degree_[static_cast<size_t>(s.u)];
      ++degree_[static_cast<size_t>(s.v)];
      for (size_t mi = 0; mi < members_.size(); ++mi) {
        if (!member_live_[mi * ns + static_cast<size_t>(i)]) continue;
        if (member_cnt_[mi * pairs_.size() + static_cast<size_t>(s.pair)]++ == 0)
          member_mask_[mi] |= uint32_t{1} << s.pair;
      }
      bool sound = use_fast_sound_
                       ? chosen_sound()
                       : msn::is_sound(materialize(chosen_), universe_).sound;
      bool ok = sound && choose(i + 1, remaining - 1);
      chosen_.pop_back();
      --degree_[static_cast<size_t>(s.u)];
      --degree_[static_cast<size_t>(s.v)];
      for (size_t mi = 0; mi < members_.size(); ++mi) {
        if (!member_live_[mi * ns + static_cast<size_t>(i)]) continue;
        if (--member_cnt_[mi * pairs_.size() + static_cast<size_t>(s.pair)] == 0)
          member_mask_[mi] &= ~(uint32_t{1} << s.pair);
      }
      if (ok) return true;
    }
    return false;
  }

  const std::vector<graphs::DiGraph>& members_;
  std::vector<std::string> universe_;
  std::vector<std::pair<std::string, std::string>> alphabet_;
  int size_;
  long max_nodes_;
  std::vector<Slot> slots_;
  std::vector<std::pair<int, int>> pairs_;
  std::vector<std::vector<uint32_t>> member_suffix_;
  std::vector<char> member_live_;
  std::vector<uint32_t> member_mask_;
  std::vector<int> member_cnt_;
  int nl_ = 0;
  bool use_fast_sound_ = false;
  int sv_ = 0, tv_ = 0, nuv_ = 0;
  std::vector<std::pair<int, int>> ledges_;
  std::vector<int8_t> path_memo_;
  std::vector<uint32_t> sound_seen_;
  uint32_t sound_stamp_ = 0;
  std::vector<uint64_t> sound_work_;
  std::vector<int> degree_;
  std::vector<int> chosen_;
  std::optional<msn::SwitchingNetwork> found_;
  long explored_ = 0;
};

}  // namespace detail

/// Exact m(I): the minimum vertex count of a sound switching network
/// accepting every member of I.  Iterative deepening on network size; the
/// label alphabet is restricted to the union of member edge sets (a label
/// outside the union can never enable acceptance of a member, and removing
/// all edges carrying it preserves soundness and acceptance, so some
/// minimum network uses only union labels).
inline SearchResult min_sound_msn(const std::vector<graphs::DiGraph>& members,
                                  const SearchBudget& budget = {}) {
  if (members.empty()) {
    SearchResult r;
    r.lower = r.upper = 2;
    r.witness = msn::SwitchingNetwork{};
    return r;
  }
  std::set<std::string> uni_set;
  std::set<std::pair<std::string, std::string>> alpha_set;
  for (const auto& g : members) {
    if (!graphs::has_st_path(g))
      throw PreconditionError("min_sound_msn: a member has no s-t path");
    for (const auto& v : g.names()) uni_set.insert(v);
    for (const auto& e : g.edge_names()) alpha_set.insert(e);
  }
  std::vector<std::string> universe(uni_set.begin(), uni_set.end());
  std::vector<std::pair<std::string, std::string>> alphabet(alpha_set.begin(),
                                                            alpha_set.end());
  SearchResult result;
  for (int size = 2; size <= budget.max_size; ++size) {
    result.lower = size;
    detail::SlotSearch search(members, universe, alphabet, size, budget.max_nodes);
    std::optional<msn::SwitchingNetwork> hit;
    try {
      hit = search.run(&result.explored);
    } catch (const BudgetExceeded&) {
      result.lower = size;  // sizes below `size` are exhausted
      throw;
    }
    if (hit) {
      result.upper = size;
      result.witness = std::move(hit);
      return result;
    }
  }
  throw BudgetExceeded("min_sound_msn: no accepting network within max_size " +
                       std::to_string(budget.max_size));
}

inline bool verify_m(const std::vector<graphs::DiGraph>& members, int claimed,
                     const SearchBudget& budget = {}) {
  return min_sound_msn(members, budget).m() == claimed;
}

/// Caching oracle for m(sigma(G)) keyed by the minimal fingerprint of G
/// over relabelings of the non-s/t vertices (m(sigma(.)) is invariant
/// under such relabelings since sigma itself is).
class MOracle {
 public:
  explicit MOracle(SearchBudget budget = {}) : budget_(budget) {}

  int m_sigma(const graphs::DiGraph& g) {
    std::string key = canonical_key(g);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    int m = min_sound_msn(graphs::sigma_st(g), budget_).m();
    cache_.emplace(std::move(key), m);
    return m;
  }

  size_t cache_size() const { return cache_.size(); }

  static std::string canonical_key(const graphs::DiGraph& g) {
    std::string best;
    graphs::for_each_sigma(g, {"s", "t"}, [&](const graphs::DiGraph& h) {
      std::string f = graphs::fingerprint(h);
      if (best.empty() || f < best) best = f;
    });
    return best;
  }

 private:
  SearchBudget budget_;
  std::map<std::string, int> cache_;
};

}  // namespace msnlab::search

#endif  // MSNLAB_SEARCH_HPP_
