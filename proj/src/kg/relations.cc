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

#include "fabkg/kg/relations.h"

#include <array>
#include <regex>
#include <stdexcept>
#include <utility>

namespace fabkg::kg {
namespace {

// Property ids were looked up once on wikidata.org; the display names are
// the ones used throughout the toolkit.
constexpr std::array<std::pair<std::string_view, std::string_view>, 11>
    kWikidataRelations = {{
        {"Instance of", "P31"},
        {"Subclass of", "P279"},
        {"Use", "P366"},
        {"Color", "P462"},
        {"Part of", "P361"},
        {"Uses", "P2283"},
        {"Has quality", "P1552"},
        {"Has cause", "P828"},
        {"Has part", "P527"},
        {"Facet of", "P1269"},
        {"Different from", "P1889"},
    }};

bool is_pid(std::string_view s) {
  static const std::regex kPid("P[0-9]+");
  return std::regex_match(s.begin(), s.end(), kPid);
}

}  // namespace

const std::vector<std::string>& notes_relation_names() {
  static const std::vector<std::string> kNames = {
      "has",        "hasProperty", "uses",       "usedTo",
      "usedIn",     "causes",      "producedBy", "makes",
      "hasExpression", "hasPart",  "addedWith",  "hasValue",
      "includes",   "partOf",      "alsoCalled", "dueTo",
      "instanceOf", "isAbbrev",    "isAcronym",  "hasComparator"};
  return kNames;
}

std::string_view origin_name(RelationOrigin origin) {
  switch (origin) {
    case RelationOrigin::kWikidataP:
      return "wikidata";
    case RelationOrigin::kNotes:
      return "notes";
    case RelationOrigin::kPlumbing:
      return "plumbing";
  }
  return "plumbing";
}

RelationRegistry RelationRegistry::with_defaults() {
  RelationRegistry registry;
  for (const auto& [name, pid] : kWikidataRelations) {
    registry.add({std::string(name), RelationOrigin::kWikidataP,
                  std::string(pid)});
  }
  for (const std::string& name : notes_relation_names()) {
    registry.add({name, RelationOrigin::kNotes, ""});
  }
  return registry;
}

RelationId RelationRegistry::add(RelationKind kind) {
  if (kind.name.empty()) {
    throw std::invalid_argument("relation name must not be empty");
  }
  if (kind.origin == RelationOrigin::kWikidataP) {
    if (!is_pid(kind.pid)) {
      throw std::invalid_argument("relation '" + kind.name +
                                  "' needs a P-identifier, got '" + kind.pid +
                                  "'");
    }
  } else if (!kind.pid.empty()) {
    throw std::invalid_argument("only knowledge-base relations carry a pid");
  }
  if (auto it = by_name_.find(kind.name); it != by_name_.end()) {
    if (kinds_[it->second] == kind) return it->second;
    throw std::invalid_argument("relation '" + kind.name +
                                "' already registered differently");
  }
  if (kinds_.size() >= 0xFFFF) throw std::length_error("too many relations");
  const auto id = static_cast<RelationId>(kinds_.size());
  by_name_.emplace(kind.name, id);
  kinds_.push_back(std::move(kind));
  return id;
}

std::optional<RelationId> RelationRegistry::find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

std::optional<RelationId> RelationRegistry::find_by_pid(
    std::string_view pid) const {
  for (std::size_t i = 0; i < kinds_.size(); ++i) {
    if (kinds_[i].origin == RelationOrigin::kWikidataP && kinds_[i].pid == pid) {
      return static_cast<RelationId>(i);
    }
  }
  return std::nullopt;
}

std::vector<RelationId> RelationRegistry::with_origin(
    RelationOrigin origin) const {
  std::vector<RelationId> out;
  for (std::size_t i = 0; i < kinds_.size(); ++i) {
    if (kinds_[i].origin == origin) out.push_back(static_cast<RelationId>(i));
  }
  return out;
}

}  // namespace fabkg::kg
