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

#ifndef FABKG_KG_GRAPH_H_
#define FABKG_KG_GRAPH_H_

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "fabkg/error.h"
#include "fabkg/kg/relations.h"
#include "fabkg/source.h"

namespace fabkg::kg {

struct EntityId {
  std::uint32_t value = 0;
  auto operator<=>(const EntityId&) const = default;
};

struct TripleId {
  std::uint32_t value = 0;
  auto operator<=>(const TripleId&) const = default;
};

enum class LiteralKind : std::uint8_t {
  kText,
  kNumber,
  kQuantity,
  kExpressionRef
};

std::string_view literal_kind_name(LiteralKind kind);
std::optional<LiteralKind> parse_literal_kind(std::string_view name);

// A non-entity object. kText and kExpressionRef use `text` (the latter holds
// the right-hand side of a formula); kNumber and kQuantity use `number`,
// kQuantity also `unit`.
struct Literal {
  LiteralKind kind = LiteralKind::kText;
  std::string text;
  double number = 0.0;
  std::string unit;

  static Literal of_text(std::string text);
  static Literal of_number(double value);
  // Throws std::invalid_argument for non-finite values or unknown units.
  static Literal of_quantity(double value, std::string unit);
  static Literal of_expression(std::string formula);

  // Human-readable rendering: "0.2 %", "force / area", ...
  std::string display() const;

  friend bool operator==(const Literal&, const Literal&) = default;
};

using Object = std::variant<EntityId, Literal>;
using Qualifiers = std::map<std::string, std::string>;

struct Entity {
  EntityId id;
  std::string label;  // normalized, never empty, never in aliases
  std::set<std::string> aliases;
  std::set<std::string> categories;
  std::set<std::string> external_ids;  // Q-identifiers
  SourceSet provenance;
};

struct Triple {
  TripleId id;
  EntityId subject;
  RelationId relation = 0;
  Object object;
  Qualifiers qualifiers;
  SourceSet provenance;

  const EntityId* object_entity() const {
    return std::get_if<EntityId>(&object);
  }
  const Literal* object_literal() const { return std::get_if<Literal>(&object); }
};

enum class Direction : std::uint8_t { kForward, kBackward, kBoth };

using RelationFilter = std::optional<std::set<std::string>>;

class EmptyLabel : public Error {
 public:
  EmptyLabel() : Error("label is empty after normalization") {}
};

class UnknownEntity : public Error {
 public:
  explicit UnknownEntity(EntityId id)
      : Error("unknown entity id " + std::to_string(id.value)) {}
};

class UnregisteredRelation : public Error {
 public:
  explicit UnregisteredRelation(std::string_view name)
      : Error("unregistered relation '" + std::string(name) + "'") {}
};

struct AddTripleResult {
  TripleId id;
  bool inserted = false;
  bool duplicate() const { return !inserted; }
};

struct GraphStats {
  std::size_t entity_count = 0;
  std::size_t triple_count = 0;
  std::size_t relation_count = 0;  // distinct relations used by >= 1 triple
  std::map<Source, std::size_t> per_source_triples;
  std::map<Source, std::size_t> per_source_entities;

  friend bool operator==(const GraphStats&, const GraphStats&) = default;
};

// Append-only directed multigraph of entities and qualified triples. Labels
// and aliases are normalized on the way in and indexed. Merging is done by
// alias registration and relabeling; nothing is ever deleted.
//
// Const member functions do not mutate shared state, so a fully built graph
// can be read from many threads. Pointers returned by neighbors() stay
// valid until the next mutation.
class KnowledgeGraph {
 public:
  KnowledgeGraph();
  explicit KnowledgeGraph(RelationRegistry relations);

  // Returns the entity whose label or alias equals normalize_label(label),
  // creating one when none exists. Provenance and category are unioned into
  // the existing entity. Throws EmptyLabel.
  EntityId upsert_entity(std::string_view label,
                         std::optional<std::string_view> category,
                         Source source);

  // Always creates a new entity, even if the label is already taken.
  EntityId create_entity(std::string_view label, Source source);

  void add_alias(EntityId id, std::string_view alias);
  void add_category(EntityId id, std::string_view category);
  // Throws std::invalid_argument unless qid matches Q[0-9]+.
  void add_external_id(EntityId id, std::string_view qid);
  void add_provenance(EntityId id, Source source);
  // The previous label is kept as an alias.
  void set_label(EntityId id, std::string_view label);

  RelationId register_relation(RelationKind kind);

  // Adds (subject, relation, object, qualifiers). Re-adding an identical
  // quadruple returns the existing id with inserted == false and only
  // unions the provenance.
  AddTripleResult add_triple(EntityId subject, std::string_view relation,
                             Object object, Qualifiers qualifiers,
                             Source source);
  AddTripleResult add_triple(EntityId subject, RelationId relation,
                             Object object, Qualifiers qualifiers,
                             const SourceSet& provenance);

  // Triples touching `id`, ordered by TripleId.
  std::vector<const Triple*> neighbors(EntityId id, Direction direction,
                                       const RelationFilter& filter = {}) const;

  // Lowest-id entity whose canonical label matches, else lowest-id alias
  // match.
  std::optional<EntityId> find(std::string_view label) const;
  // Canonical-label matches followed by alias matches, each in id order.
  std::vector<EntityId> find_all(std::string_view label) const;
  std::optional<EntityId> find_by_external_id(std::string_view qid) const;
  std::optional<TripleId> find_triple(EntityId subject, RelationId relation,
                                      const Object& object,
                                      const Qualifiers& qualifiers) const;

  bool contains(EntityId id) const { return id.value < entities_.size(); }
  const Entity& entity(EntityId id) const;
  const Triple& triple(TripleId id) const { return triples_.at(id.value); }
  const std::vector<Entity>& entities() const { return entities_; }
  const std::vector<Triple>& triples() const { return triples_; }

  const RelationRegistry& relations() const { return relations_; }
  const std::string& relation_name(RelationId id) const {
    return relations_.get(id).name;
  }

  GraphStats stats() const;

 private:
  Entity& mutable_entity(EntityId id);
  void index(std::unordered_map<std::string, std::vector<EntityId>>& index,
             const std::string& key, EntityId id);
  void unindex(std::unordered_map<std::string, std::vector<EntityId>>& index,
               const std::string& key, EntityId id);

  RelationRegistry relations_;
  std::vector<Entity> entities_;
  std::vector<Triple> triples_;
  std::unordered_map<std::string, std::vector<EntityId>> label_index_;
  std::unordered_map<std::string, std::vector<EntityId>> alias_index_;
  std::unordered_map<std::string, EntityId> external_index_;
  std::unordered_map<std::string, TripleId> triple_index_;
  std::unordered_map<std::uint32_t, std::vector<TripleId>> by_subject_;
  std::unordered_map<std::uint32_t, std::vector<TripleId>> by_object_;
};

inline GraphStats stats(const KnowledgeGraph& graph) { return graph.stats(); }

}  // namespace fabkg::kg

#endif  // FABKG_KG_GRAPH_H_
