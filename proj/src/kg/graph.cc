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

#include "fabkg/kg/graph.h"

#include <algorithm>
#include <cmath>
#include <regex>
#include <stdexcept>
#include <utility>

#include "fabkg/format.h"
#include "fabkg/text/normalize.h"
#include "fabkg/units/units.h"

namespace fabkg::kg {
namespace {

constexpr char kSep = '\x1f';

bool is_qid(std::string_view s) {
  static const std::regex kQid("Q[0-9]+");
  return std::regex_match(s.begin(), s.end(), kQid);
}

std::string object_key(const Object& object) {
  if (const auto* id = std::get_if<EntityId>(&object)) {
    return "e" + std::to_string(id->value);
  }
  const Literal& lit = std::get<Literal>(object);
  std::string key = "l";
  key += literal_kind_name(lit.kind);
  key += kSep;
  key += lit.text;
  key += kSep;
  key += format_number(lit.number);
  key += kSep;
  key += lit.unit;
  return key;
}

std::string triple_key(EntityId subject, RelationId relation,
                       const Object& object, const Qualifiers& qualifiers) {
  std::string key = std::to_string(subject.value);
  key += kSep;
  key += std::to_string(relation);
  key += kSep;
  key += object_key(object);
  for (const auto& [k, v] : qualifiers) {
    key += kSep;
    key += k;
    key += '=';
    key += v;
  }
  return key;
}

}  // namespace

std::string_view literal_kind_name(LiteralKind kind) {
  switch (kind) {
    case LiteralKind::kText:
      return "text";
    case LiteralKind::kNumber:
      return "number";
    case LiteralKind::kQuantity:
      return "quantity";
    case LiteralKind::kExpressionRef:
      return "expression";
  }
  return "text";
}

std::optional<LiteralKind> parse_literal_kind(std::string_view name) {
  for (LiteralKind k : {LiteralKind::kText, LiteralKind::kNumber,
                        LiteralKind::kQuantity, LiteralKind::kExpressionRef}) {
    if (literal_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

Literal Literal::of_text(std::string text) {
  Literal l;
  l.kind = LiteralKind::kText;
  l.text = std::move(text);
  return l;
}

Literal Literal::of_number(double value) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument("number literal must be finite");
  }
  Literal l;
  l.kind = LiteralKind::kNumber;
  l.number = value;
  return l;
}

Literal Literal::of_quantity(double value, std::string unit) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument("quantity value must be finite");
  }
  if (!units::is_known_unit(unit)) {
    throw std::invalid_argument("unknown unit '" + unit + "'");
  }
  Literal l;
  l.kind = LiteralKind::kQuantity;
  l.number = value;
  l.unit = std::move(unit);
  return l;
}

Literal Literal::of_expression(std::string formula) {
  Literal l;
  l.kind = LiteralKind::kExpressionRef;
  l.text = std::move(formula);
  return l;
}

std::string Literal::display() const {
  switch (kind) {
    case LiteralKind::kText:
    case LiteralKind::kExpressionRef:
      return text;
    case LiteralKind::kNumber:
      return format_number(number);
    case LiteralKind::kQuantity:
      return unit.empty() ? format_number(number)
                          : format_number(number) + " " + unit;
  }
  return text;
}

KnowledgeGraph::KnowledgeGraph()
    : KnowledgeGraph(RelationRegistry::with_defaults()) {}

KnowledgeGraph::KnowledgeGraph(RelationRegistry relations)
    : relations_(std::move(relations)) {}

const Entity& KnowledgeGraph::entity(EntityId id) const {
  if (!contains(id)) throw UnknownEntity(id);
  return entities_[id.value];
}

Entity& KnowledgeGraph::mutable_entity(EntityId id) {
  if (!contains(id)) throw UnknownEntity(id);
  return entities_[id.value];
}

void KnowledgeGraph::index(
    std::unordered_map<std::string, std::vector<EntityId>>& index,
    const std::string& key, EntityId id) {
  auto& ids = index[key];
  auto pos = std::lower_bound(ids.begin(), ids.end(), id);
  if (pos == ids.end() || *pos != id) ids.insert(pos, id);
}

void KnowledgeGraph::unindex(
    std::unordered_map<std::string, std::vector<EntityId>>& index,
    const std::string& key, EntityId id) {
  auto it = index.find(key);
  if (it == index.end()) return;
  std::erase(it->second, id);
  if (it->second.empty()) index.erase(it);
}

EntityId KnowledgeGraph::upsert_entity(std::string_view label,
                                       std::optional<std::string_view> category,
                                       Source source) {
  std::string normalized = text::normalize_label(label);
  if (normalized.empty()) throw EmptyLabel();
  if (auto existing = find(normalized)) {
    Entity& e = entities_[existing->value];
    e.provenance.insert(source);
    if (category && !category->empty()) e.categories.emplace(*category);
    return *existing;
  }
  EntityId id = create_entity(normalized, source);
  if (category && !category->empty()) {
    entities_[id.value].categories.emplace(*category);
  }
  return id;
}

EntityId KnowledgeGraph::create_entity(std::string_view label, Source source) {
  std::string normalized = text::normalize_label(label);
  if (normalized.empty()) throw EmptyLabel();
  Entity e;
  e.id = EntityId{static_cast<std::uint32_t>(entities_.size())};
  e.label = normalized;
  e.provenance.insert(source);
  index(label_index_, e.label, e.id);
  entities_.push_back(std::move(e));
  return entities_.back().id;
}

void KnowledgeGraph::add_alias(EntityId id, std::string_view alias) {
  Entity& e = mutable_entity(id);
  std::string normalized = text::normalize_label(alias);
  if (normalized.empty() || normalized == e.label) return;
  if (e.aliases.insert(normalized).second) {
    index(alias_index_, normalized, id);
  }
}

void KnowledgeGraph::add_category(EntityId id, std::string_view category) {
  if (category.empty()) return;
  mutable_entity(id).categories.emplace(category);
}

void KnowledgeGraph::add_external_id(EntityId id, std::string_view qid) {
  Entity& e = mutable_entity(id);
  if (!is_qid(qid)) {
    throw std::invalid_argument("external id '" + std::string(qid) +
                                "' is not a Q-identifier");
  }
  if (e.external_ids.emplace(qid).second) {
    external_index_.try_emplace(std::string(qid), id);
  }
}

void KnowledgeGraph::add_provenance(EntityId id, Source source) {
  mutable_entity(id).provenance.insert(source);
}

void KnowledgeGraph::set_label(EntityId id, std::string_view label) {
  Entity& e = mutable_entity(id);
  std::string normalized = text::normalize_label(label);
  if (normalized.empty()) throw EmptyLabel();
  if (normalized == e.label) return;
  std::string old = e.label;
  unindex(label_index_, old, id);
  if (e.aliases.erase(normalized)) unindex(alias_index_, normalized, id);
  e.label = normalized;
  index(label_index_, normalized, id);
  if (e.aliases.insert(old).second) index(alias_index_, old, id);
}

RelationId KnowledgeGraph::register_relation(RelationKind kind) {
  return relations_.add(std::move(kind));
}

AddTripleResult KnowledgeGraph::add_triple(EntityId subject,
                                           std::string_view relation,
                                           Object object, Qualifiers qualifiers,
                                           Source source) {
  auto rel = relations_.find(relation);
  if (!rel) throw UnregisteredRelation(relation);
  return add_triple(subject, *rel, std::move(object), std::move(qualifiers),
                    SourceSet{source});
}

AddTripleResult KnowledgeGraph::add_triple(EntityId subject,
                                           RelationId relation, Object object,
                                           Qualifiers qualifiers,
                                           const SourceSet& provenance) {
  if (!contains(subject)) throw UnknownEntity(subject);
  if (const auto* o = std::get_if<EntityId>(&object); o && !contains(*o)) {
    throw UnknownEntity(*o);
  }
  if (relation >= relations_.size()) {
    throw UnregisteredRelation("#" + std::to_string(relation));
  }
  if (qualifiers.count("")) {
    throw std::invalid_argument("qualifier keys must be non-empty");
  }
  if (const auto* lit = std::get_if<Literal>(&object);
      lit && lit->kind == LiteralKind::kQuantity &&
      (!std::isfinite(lit->number) || !units::is_known_unit(lit->unit))) {
    throw std::invalid_argument("invalid quantity literal");
  }

  std::string key = triple_key(subject, relation, object, qualifiers);
  if (auto it = triple_index_.find(key); it != triple_index_.end()) {
    Triple& t = triples_[it->second.value];
    t.provenance.insert(provenance.begin(), provenance.end());
    return {it->second, false};
  }
  Triple t;
  t.id = TripleId{static_cast<std::uint32_t>(triples_.size())};
  t.subject = subject;
  t.relation = relation;
  t.object = std::move(object);
  t.qualifiers = std::move(qualifiers);
  t.provenance = provenance;
  by_subject_[subject.value].push_back(t.id);
  if (const auto* o = t.object_entity()) by_object_[o->value].push_back(t.id);
  triple_index_.emplace(std::move(key), t.id);
  triples_.push_back(std::move(t));
  return {triples_.back().id, true};
}

std::vector<const Triple*> KnowledgeGraph::neighbors(
    EntityId id, Direction direction, const RelationFilter& filter) const {
  if (!contains(id)) throw UnknownEntity(id);
  std::vector<TripleId> ids;
  auto collect = [&](const auto& idx) {
    if (auto it = idx.find(id.value); it != idx.end()) {
      ids.insert(ids.end(), it->second.begin(), it->second.end());
    }
  };
  if (direction != Direction::kBackward) collect(by_subject_);
  if (direction != Direction::kForward) collect(by_object_);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  std::vector<const Triple*> out;
  out.reserve(ids.size());
  for (TripleId t : ids) {
    const Triple& triple = triples_[t.value];
    if (filter && !filter->count(relation_name(triple.relation))) continue;
    out.push_back(&triple);
  }
  return out;
}

std::optional<EntityId> KnowledgeGraph::find(std::string_view label) const {
  std::string normalized = text::normalize_label(label);
  if (auto it = label_index_.find(normalized); it != label_index_.end()) {
    return it->second.front();
  }
  if (auto it = alias_index_.find(normalized); it != alias_index_.end()) {
    return it->second.front();
  }
  return std::nullopt;
}

std::vector<EntityId> KnowledgeGraph::find_all(std::string_view label) const {
  std::string normalized = text::normalize_label(label);
  std::vector<EntityId> out;
  if (auto it = label_index_.find(normalized); it != label_index_.end()) {
    out = it->second;
  }
  if (auto it = alias_index_.find(normalized); it != alias_index_.end()) {
    for (EntityId id : it->second) {
      if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
    }
  }
  return out;
}

std::optional<EntityId> KnowledgeGraph::find_by_external_id(
    std::string_view qid) const {
  auto it = external_index_.find(std::string(qid));
  if (it == external_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<TripleId> KnowledgeGraph::find_triple(
    EntityId subject, RelationId relation, const Object& object,
    const Qualifiers& qualifiers) const {
  auto it = triple_index_.find(triple_key(subject, relation, object, qualifiers));
  if (it == triple_index_.end()) return std::nullopt;
  return it->second;
}

GraphStats KnowledgeGraph::stats() const {
  GraphStats s;
  s.entity_count = entities_.size();
  s.triple_count = triples_.size();
  std::set<RelationId> used;
  for (const Triple& t : triples_) {
    used.insert(t.relation);
    for (Source src : t.provenance) ++s.per_source_triples[src];
  }
  for (const Entity& e : entities_) {
    for (Source src : e.provenance) ++s.per_source_entities[src];
  }
  s.relation_count = used.size();
  return s;
}

}  // namespace fabkg::kg
