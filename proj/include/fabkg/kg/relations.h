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

#ifndef FABKG_KG_RELATIONS_H_
#define FABKG_KG_RELATIONS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fabkg::kg {

enum class RelationOrigin : std::uint8_t { kWikidataP, kNotes, kPlumbing };

struct RelationKind {
  std::string name;
  RelationOrigin origin = RelationOrigin::kPlumbing;
  std::string pid;  // "P31" etc. for kWikidataP, empty otherwise

  friend bool operator==(const RelationKind&, const RelationKind&) = default;
};

using RelationId = std::uint16_t;

// Relation inventory. Names are case-sensitive: the knowledge-base relation
// "Uses" and the notes relation "uses" are distinct entries.
class RelationRegistry {
 public:
  // The startup inventory: 11 knowledge-base relations and 20 notes
  // relations.
  static RelationRegistry with_defaults();

  // Registers a relation, returning the existing id when the name is
  // already present with the same origin and pid. Throws
  // std::invalid_argument on malformed input or a conflicting
  // re-registration.
  RelationId add(RelationKind kind);

  std::optional<RelationId> find(std::string_view name) const;
  std::optional<RelationId> find_by_pid(std::string_view pid) const;
  const RelationKind& get(RelationId id) const { return kinds_.at(id); }
  std::size_t size() const { return kinds_.size(); }
  const std::vector<RelationKind>& kinds() const { return kinds_; }

  // Ids of every relation with the given origin, in registration order.
  std::vector<RelationId> with_origin(RelationOrigin origin) const;

 private:
  std::vector<RelationKind> kinds_;
  std::unordered_map<std::string, RelationId> by_name_;
};

// Names of the notes relations, in the order they are registered.
const std::vector<std::string>& notes_relation_names();

std::string_view origin_name(RelationOrigin origin);

}  // namespace fabkg::kg

#endif  // FABKG_KG_RELATIONS_H_
