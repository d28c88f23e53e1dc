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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "helpers.hpp"
#include "msnlab/graphs.hpp"
#include "msnlab/msn.hpp"
#include "msnlab/search.hpp"

using namespace msnlab;
using namespace msnlab::search;
using graphs::DiGraph;
using msnlab::testing::make_graph;

namespace {

/// Full witness validation: the network is sound over the members' universe
/// and accepts every member.
void check_witness(const SearchResult& r, const std::vector<DiGraph>& members) {
  REQUIRE(r.exact());
  REQUIRE(r.witness.has_value());
  CHECK(r.witness->size() == r.m());
  std::set<std::string> uni;
  for (const auto& g : members)
    for (const auto& v : g.names()) uni.insert(v);
  std::vector<std::string> universe(uni.begin(), uni.end());
  CHECK(msn::is_sound(*r.witness, universe).sound);
  for (const auto& g : members) CHECK(msn::accepts(*r.witness, g));
}

}  // namespace

TEST_CASE("m({s->t}) = 2") {
  std::vector<DiGraph> members{make_graph({{"s", "t"}})};
  auto r = min_sound_msn(members);
  CHECK(r.m() == 2);
  check_witness(r, members);
  CHECK(verify_m(members, 2));
  CHECK_FALSE(verify_m(members, 3));
}

TEST_CASE("m(sigma(s->a->t over {s,a,t})) = 3") {
  DiGraph g = make_graph({{"s", "a"}, {"a", "t"}});
  auto members = graphs::sigma_st(g);
  REQUIRE(members.size() == 1);
  auto r = min_sound_msn(members);
  CHECK(r.m() == 3);
  check_witness(r, members);
}

TEST_CASE("m(sigma(path through a, isolated b)) = 4") {
  auto members = graphs::sigma_st(testing::fig_sigma_graph());
  REQUIRE(members.size() == 2);
  auto r = min_sound_msn(members);
  CHECK(r.m() == 4);
  check_witness(r, members);
  CHECK(verify_m(members, 4));
}

TEST_CASE("empty member set is vacuous at size 2") {
  auto r = min_sound_msn({});
  CHECK(r.m() == 2);
}

TEST_CASE("members without an s-t path are rejected") {
  CHECK_THROWS_AS(min_sound_msn({make_graph({{"s", "a"}})}), PreconditionError);
}

TEST_CASE("budget overrun raises instead of guessing") {
  auto members = graphs::sigma_st(testing::fig_sigma_graph());
  SearchBudget tiny;
  tiny.max_nodes = 5;
  CHECK_THROWS_AS(min_sound_msn(members, tiny), BudgetExceeded);
  SearchBudget small_size;
  small_size.max_size = 3;
  CHECK_THROWS_AS(min_sound_msn(members, small_size), BudgetExceeded);
}

TEST_CASE("subset monotonicity: I subset of J implies m(I) <= m(J)") {
  auto members = graphs::sigma_st(testing::fig_sigma_graph());
  std::vector<DiGraph> half{members[0]};
  CHECK(min_sound_msn(half).m() <= min_sound_msn(members).m());
}

TEST_CASE("MOracle caches by relabeling-invariant key") {
  MOracle oracle;
  DiGraph g1 = make_graph({{"s", "a"}, {"a", "t"}}, {"b"});
  DiGraph g2 = make_graph({{"s", "b"}, {"b", "t"}}, {"a"});
  CHECK(MOracle::canonical_key(g1) == MOracle::canonical_key(g2));
  CHECK(oracle.m_sigma(g1) == 4);
  CHECK(oracle.m_sigma(g2) == 4);
  CHECK(oracle.cache_size() == 1);
}

TEST_CASE("witness of m=2 on direct edge is the single labeled edge") {
  auto r = min_sound_msn({make_graph({{"s", "t"}})});
  REQUIRE(r.witness.has_value());
  CHECK(r.witness->size() == 2);
  REQUIRE(r.witness->edge_count() >= 1);
  for (const auto& e : r.witness->edges()) {
    REQUIRE(e.label.directed.has_value());
    CHECK(*e.label.directed == std::make_pair(std::string("s"), std::string("t")));
  }
}

TEST_CASE("explored counter is monotone in problem size") {
  auto small = min_sound_msn({make_graph({{"s", "t"}})});
  auto big = min_sound_msn(graphs::sigma_st(testing::fig_sigma_graph()));
  CHECK(small.explored > 0);
  CHECK(big.explored > small.explored);
}
