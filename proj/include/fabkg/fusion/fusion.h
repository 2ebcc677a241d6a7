// Copyright 2026 The FabKG Authors.
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

#ifndef FABKG_FUSION_FUSION_H_
#define FABKG_FUSION_FUSION_H_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fabkg/error.h"
#include "fabkg/kg/graph.h"
#include "fabkg/text/normalize.h"
#include "json.hpp"

namespace fabkg::fusion {

// Matching stages, in the order they are tried.
enum class MatchOrigin : std::uint8_t {
  kExternalId,
  kExactLabel,
  kAliasList,
  kLevenshteinCluster,
  kManual
};

std::string_view match_origin_name(MatchOrigin origin);

struct Match {
  kg::EntityId a;  // entity of the notes-side graph
  kg::EntityId b;  // canonical entity of the knowledge-base-side graph
  MatchOrigin origin = MatchOrigin::kExactLabel;

  friend bool operator==(const Match&, const Match&) = default;
};

// An entity of graph A that matched two or more entities of graph B at the
// first stage that produced any candidate.
struct Conflict {
  kg::EntityId a;
  std::string label;
  MatchOrigin stage = MatchOrigin::kExactLabel;
  std::vector<kg::EntityId> candidates;

  friend bool operator==(const Conflict&, const Conflict&) = default;
};

// One line of a manual override file, "alias<TAB>canonical". The canonical
// side is a label or a Q-identifier of graph B.
struct Override {
  std::string alias;
  std::string canonical;
  std::size_t line = 0;
};

class OverrideFormatError : public Error {
 public:
  OverrideFormatError(std::size_t line, const std::string& message)
      : Error("override line " + std::to_string(line) + ": " + message),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Blank lines and lines starting with '#' are ignored.
std::vector<Override> parse_overrides(std::string_view text);
std::vector<Override> load_overrides(const std::filesystem::path& path);

struct SynonymTable {
  // Keyed by the graph-A entity. Several A entities may share one B entity.
  std::map<kg::EntityId, Match> matches;
  std::vector<Conflict> conflicts;
  // Override lines whose alias or canonical side names no entity.
  std::vector<Override> unresolved_overrides;

  // Normalized A label -> canonical B id.
  std::map<std::string, kg::EntityId> entries(const kg::KnowledgeGraph& a) const;
  std::optional<kg::EntityId> canonical(kg::EntityId a) const;
};

SynonymTable build_synonym_table(const kg::KnowledgeGraph& a,
                                 const kg::KnowledgeGraph& b,
                                 const text::Threshold& threshold = {},
                                 const std::vector<Override>& overrides = {});

struct MergeReport {
  std::size_t textbook_entity_count = 0;
  std::size_t wiki_entity_count = 0;
  std::size_t matched_count = 0;
  double overlap_fraction = 0.0;
  // Notes triples that were new to the fused graph and connect two entities
  // that both exist on the knowledge-base side.
  std::size_t new_link_count = 0;
  std::size_t fused_entity_count = 0;
  std::size_t fused_triple_count = 0;
  std::map<MatchOrigin, std::size_t> matches_by_origin;
  std::vector<Conflict> conflicts;
  std::vector<Override> unresolved_overrides;
};

struct MergeResult {
  kg::KnowledgeGraph graph;
  MergeReport report;
  // Where each entity of the inputs ended up.
  std::vector<kg::EntityId> a_to_fused;
  std::vector<kg::EntityId> b_to_fused;
};

// B's entities and triples are copied first and keep their ids. Matched A
// entities fold into their B counterpart, the rest are appended.
MergeResult merge_graphs(const kg::KnowledgeGraph& notes_graph,
                         const kg::KnowledgeGraph& wiki_graph,
                         const SynonymTable& table);

nlohmann::json report_to_json(const MergeReport& report,
                              const kg::KnowledgeGraph& notes_graph,
                              const kg::KnowledgeGraph& wiki_graph);

}  // namespace fabkg::fusion

#endif  // FABKG_FUSION_FUSION_H_
