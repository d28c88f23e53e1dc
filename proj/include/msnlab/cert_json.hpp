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
// JSON (de)serialization for reduction certificates.  Kept out of the core
// headers so the library proper has no third-party dependencies.

#ifndef MSNLAB_CERT_JSON_HPP_
#define MSNLAB_CERT_JSON_HPP_

#include <string>

#include <json.hpp>

#include "msnlab/common.hpp"
#include "msnlab/graphs.hpp"
#include "msnlab/reduce.hpp"

namespace msnlab::reduce {

inline const char* move_kind_name(Move::Kind k) {
  switch (k) {
    case Move::Kind::MergeIntoS:
      return "merge_into_s";
    case Move::Kind::MergeIntoT:
      return "merge_into_t";
    case Move::Kind::RemoveUselessEdges:
      return "remove_useless_edges";
    case Move::Kind::AddEdge:
      return "add_edge";
    case Move::Kind::ReplaceEdgeWithSourceS:
      return "replace_edge_with_source_s";
    case Move::Kind::ReplaceEdgeWithSinkT:
      return "replace_edge_with_sink_t";
  }
  return "?";
}

inline Move::Kind move_kind_from_name(const std::string& s) {
  if (s == "merge_into_s") return Move::Kind::MergeIntoS;
  if (s == "merge_into_t") return Move::Kind::MergeIntoT;
  if (s == "remove_useless_edges") return Move::Kind::RemoveUselessEdges;
  if (s == "add_edge") return Move::Kind::AddEdge;
  if (s == "replace_edge_with_source_s") return Move::Kind::ReplaceEdgeWithSourceS;
  if (s == "replace_edge_with_sink_t") return Move::Kind::ReplaceEdgeWithSinkT;
  throw ParseError("unknown move kind: " + s);
}

inline nlohmann::json certificate_to_json(const ReductionCertificate& c) {
  nlohmann::json j;
  j["start"] = graphs::format_edge_list(c.start);
  j["end"] = graphs::format_edge_list(c.end);
  j["fingerprints"] = c.fingerprints;
  j["metadata"] = c.metadata;
  j["moves"] = nlohmann::json::array();
  for (const auto& m : c.moves) {
    nlohmann::json jm;
    jm["kind"] = move_kind_name(m.kind);
    if (m.kind == Move::Kind::MergeIntoS || m.kind == Move::Kind::MergeIntoT)
      jm["vertices"] = m.vertices;
    if (!m.u.empty()) jm["u"] = m.u;
    if (!m.v.empty()) jm["v"] = m.v;
    j["moves"].push_back(std::move(jm));
  }
  return j;
}

inline ReductionCertificate certificate_from_json(const nlohmann::json& j) {
  ReductionCertificate c;
  c.start = graphs::parse_edge_list(j.at("start").get<std::string>());
  c.end = graphs::parse_edge_list(j.at("end").get<std::string>());
  c.fingerprints = j.at("fingerprints").get<std::vector<std::string>>();
  if (j.contains("metadata"))
    c.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
  for (const auto& jm : j.at("moves")) {
    Move m;
    m.kind = move_kind_from_name(jm.at("kind").get<std::string>());
    if (jm.contains("vertices"))
      m.vertices = jm.at("vertices").get<std::set<std::string>>();
    if (jm.contains("u")) m.u = jm.at("u").get<std::string>();
    if (jm.contains("v")) m.v = jm.at("v").get<std::string>();
    c.moves.push_back(std::move(m));
  }
  return c;
}

}  // namespace msnlab::reduce

#endif  // MSNLAB_CERT_JSON_HPP_
