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

#include "fabkg/fusion/fusion.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "fabkg/wikidata/ids.h"

namespace fabkg::fusion {
namespace {

using kg::EntityId;
using kg::KnowledgeGraph;

const std::set<std::string>& alias_relations() {
  static const std::set<std::string> kNames = {"alsoCalled", "isAbbrev",
                                               "isAcronym"};
  return kNames;
}

std::set<std::string> own_names(const kg::Entity& e) {
  std::set<std::string> names = e.aliases;
  names.insert(e.label);
  return names;
}

// Labels of entities joined to `id` by an alias-like edge.
std::set<std::string> promoted_names(const KnowledgeGraph& g, EntityId id) {
  std::set<std::string> names;
  for (const kg::Triple* t :
       g.neighbors(id, kg::Direction::kBoth, alias_relations())) {
    const EntityId* other = t->object_entity();
    if (!other) continue;
    EntityId peer = t->subject == id ? *other : t->subject;
    if (peer != id) names.insert(g.entity(peer).label);
  }
  return names;
}

void sort_unique(std::vector<EntityId>& ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
}

bool shares_source(const kg::Entity& x, const kg::Entity& y) {
  for (Source s : x.provenance) {
    if (y.provenance.count(s)) return true;
  }
  return false;
}

class Matcher {
 public:
  Matcher(const KnowledgeGraph& a, const KnowledgeGraph& b,
          const text::Threshold& threshold)
      : a_(a), b_(b), threshold_(threshold) {
    for (const kg::Entity& e : b.entities()) {
      for (const std::string& n : own_names(e)) own_[n].push_back(e.id);
      for (const std::string& n : promoted_names(b, e.id)) promoted_[n].push_back(e.id);
      by_length_[text::to_code_points(e.label).size()].push_back(e.id);
    }
    for (auto& [name, ids] : own_) sort_unique(ids);
    for (auto& [name, ids] : promoted_) sort_unique(ids);
  }

  std::vector<EntityId> candidates(EntityId id, MatchOrigin stage) const {
    const kg::Entity& e = a_.entity(id);
    std::vector<EntityId> out;
    switch (stage) {
      case MatchOrigin::kExternalId:
        for (const std::string& qid : e.external_ids) {
          if (auto hit = b_.find_by_external_id(qid)) out.push_back(*hit);
        }
        break;
      case MatchOrigin::kExactLabel:
        for (EntityId c : b_.find_all(e.label)) {
          if (b_.entity(c).label == e.label) out.push_back(c);
        }
        break;
      case MatchOrigin::kAliasList: {
        // Plain aliases on both sides are tried before edge-promoted names.
        const std::set<std::string> own = own_names(e);
        collect(own, own_, out);
        if (!out.empty()) break;
        const std::set<std::string> promoted = promoted_names(a_, id);
        collect(own, promoted_, out);
        collect(promoted, own_, out);
        collect(promoted, promoted_, out);
        break;
      }
      case MatchOrigin::kLevenshteinCluster: {
        const std::size_t len = text::to_code_points(e.label).size();
        const std::size_t lo = len > threshold_.absolute ? len - threshold_.absolute : 0;
        for (auto it = by_length_.lower_bound(lo);
             it != by_length_.end() && it->first <= len + threshold_.absolute;
             ++it) {
          for (EntityId c : it->second) {
            if (text::are_variants(e.label, b_.entity(c).label, threshold_)) {
              out.push_back(c);
            }
          }
        }
        break;
      }
      case MatchOrigin::kManual:
        break;
    }
    sort_unique(out);
    // A candidate that already carries this entity's sources is the result
    // of an earlier merge, so it wins over fresh ones.
    if (out.size() > 1) {
      std::vector<EntityId> seen;
      for (EntityId c : out) {
        if (shares_source(e, b_.entity(c))) seen.push_back(c);
      }
      if (seen.size() == 1) out = seen;
    }
    return out;
  }

 private:
  const KnowledgeGraph& a_;
  const KnowledgeGraph& b_;
  text::Threshold threshold_;
  using NameIndex = std::map<std::string, std::vector<EntityId>>;

  static void collect(const std::set<std::string>& names, const NameIndex& index,
                      std::vector<EntityId>& out) {
    for (const std::string& n : names) {
      auto it = index.find(n);
      if (it != index.end()) out.insert(out.end(), it->second.begin(), it->second.end());
    }
  }

  NameIndex own_;
  NameIndex promoted_;
  std::map<std::size_t, std::vector<EntityId>> by_length_;
};

std::optional<EntityId> resolve_canonical(const KnowledgeGraph& b,
                                          const std::string& canonical) {
  if (auto qid = wikidata::QId::parse(canonical)) {
    return b.find_by_external_id(qid->str());
  }
  return b.find(canonical);
}

void copy_entity_attributes(const kg::Entity& from, EntityId to,
                            KnowledgeGraph& g) {
  for (const std::string& a : from.aliases) g.add_alias(to, a);
  for (const std::string& c : from.categories) g.add_category(to, c);
  for (const std::string& q : from.external_ids) g.add_external_id(to, q);
  for (Source s : from.provenance) g.add_provenance(to, s);
}

Source first_source(const kg::Entity& e) {
  return e.provenance.empty() ? Source::kManual : *e.provenance.begin();
}

kg::RelationId map_relation(const KnowledgeGraph& from, kg::RelationId id,
                            KnowledgeGraph& to) {
  const kg::RelationKind& kind = from.relations().get(id);
  if (auto existing = to.relations().find(kind.name)) return *existing;
  return to.register_relation(kind);
}

}  // namespace

std::string_view match_origin_name(MatchOrigin origin) {
  switch (origin) {
    case MatchOrigin::kExternalId:
      return "ExternalId";
    case MatchOrigin::kExactLabel:
      return "ExactLabel";
    case MatchOrigin::kAliasList:
      return "AliasList";
    case MatchOrigin::kLevenshteinCluster:
      return "LevenshteinCluster";
    case MatchOrigin::kManual:
      return "Manual";
  }
  return "ExactLabel";
}

std::vector<Override> parse_overrides(std::string_view text) {
  std::vector<Override> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw OverrideFormatError(number, "expected exactly two tab-separated fields");
    }
    Override o{line.substr(0, tab), line.substr(tab + 1), number};
    if (text::normalize_label(o.alias).empty() ||
        text::normalize_label(o.canonical).empty()) {
      throw OverrideFormatError(number, "empty field");
    }
    out.push_back(std::move(o));
  }
  return out;
}

std::vector<Override> load_overrides(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read override file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_overrides(buf.str());
}

std::map<std::string, EntityId> SynonymTable::entries(
    const KnowledgeGraph& a) const {
  std::map<std::string, EntityId> out;
  for (const auto& [id, m] : matches) out[a.entity(id).label] = m.b;
  return out;
}

std::optional<EntityId> SynonymTable::canonical(EntityId a) const {
  auto it = matches.find(a);
  if (it == matches.end()) return std::nullopt;
  return it->second.b;
}

SynonymTable build_synonym_table(const KnowledgeGraph& a,
                                 const KnowledgeGraph& b,
                                 const text::Threshold& threshold,
                                 const std::vector<Override>& overrides) {
  SynonymTable table;
  Matcher matcher(a, b, threshold);
  for (const kg::Entity& e : a.entities()) {
    for (MatchOrigin stage :
         {MatchOrigin::kExternalId, MatchOrigin::kExactLabel,
          MatchOrigin::kAliasList, MatchOrigin::kLevenshteinCluster}) {
      std::vector<EntityId> found = matcher.candidates(e.id, stage);
      if (found.empty()) continue;
      if (found.size() == 1) {
        table.matches[e.id] = Match{e.id, found[0], stage};
      } else {
        table.conflicts.push_back(Conflict{e.id, e.label, stage, std::move(found)});
      }
      break;
    }
  }

  for (const Override& o : overrides) {
    std::optional<EntityId> from = a.find(o.alias);
    std::optional<EntityId> to = resolve_canonical(b, o.canonical);
    if (!from || !to) {
      table.unresolved_overrides.push_back(o);
      continue;
    }
    table.matches[*from] = Match{*from, *to, MatchOrigin::kManual};
    std::erase_if(table.conflicts,
                  [&](const Conflict& c) { return c.a == *from; });
  }
  return table;
}

MergeResult merge_graphs(const KnowledgeGraph& notes_graph,
                         const KnowledgeGraph& wiki_graph,
                         const SynonymTable& table) {
  for (const auto& [id, m] : table.matches) {
    if (!notes_graph.contains(m.a) || !wiki_graph.contains(m.b)) {
      throw std::invalid_argument("synonym table does not fit these graphs");
    }
  }

  MergeResult result{KnowledgeGraph(wiki_graph.relations()), {}, {}, {}};
  KnowledgeGraph& fused = result.graph;

  for (const kg::Entity& e : wiki_graph.entities()) {
    EntityId id = fused.create_entity(e.label, first_source(e));
    copy_entity_attributes(e, id, fused);
    result.b_to_fused.push_back(id);
  }
  for (const kg::Triple& t : wiki_graph.triples()) {
    kg::Object object = t.object;
    if (const EntityId* o = t.object_entity()) {
      object = result.b_to_fused[o->value];
    }
    fused.add_triple(result.b_to_fused[t.subject.value], t.relation, object,
                     t.qualifiers, t.provenance);
  }

  std::set<EntityId> relabeled;
  for (const kg::Entity& e : notes_graph.entities()) {
    EntityId id;
    if (auto target = table.canonical(e.id)) {
      id = result.b_to_fused[target->value];
      // The knowledge-base label stays canonical when it carries a QId.
      // Otherwise the first notes entity folded in names it, unless the
      // target came from an earlier merge with this source.
      const kg::Entity& target_entity = fused.entity(id);
      if (target_entity.external_ids.empty() &&
          !shares_source(e, target_entity) && relabeled.insert(id).second) {
        fused.set_label(id, e.label);
      } else {
        fused.add_alias(id, e.label);
      }
    } else {
      id = fused.create_entity(e.label, first_source(e));
    }
    copy_entity_attributes(e, id, fused);
    result.a_to_fused.push_back(id);
  }

  MergeReport& report = result.report;
  const std::size_t wiki_count = wiki_graph.entities().size();
  for (const kg::Triple& t : notes_graph.triples()) {
    const EntityId subject = result.a_to_fused[t.subject.value];
    kg::Object object = t.object;
    const EntityId* o = t.object_entity();
    if (o) object = result.a_to_fused[o->value];
    kg::AddTripleResult added =
        fused.add_triple(subject, map_relation(notes_graph, t.relation, fused),
                         object, t.qualifiers, t.provenance);
    if (added.inserted && o && subject.value < wiki_count &&
        std::get<EntityId>(object).value < wiki_count) {
      ++report.new_link_count;
    }
  }

  report.textbook_entity_count = notes_graph.entities().size();
  report.wiki_entity_count = wiki_count;
  report.matched_count = table.matches.size();
  report.overlap_fraction =
      report.textbook_entity_count == 0
          ? 0.0
          : static_cast<double>(report.matched_count) /
                static_cast<double>(report.textbook_entity_count);
  report.fused_entity_count = fused.entities().size();
  report.fused_triple_count = fused.triples().size();
  for (const auto& [id, m] : table.matches) ++report.matches_by_origin[m.origin];
  report.conflicts = table.conflicts;
  report.unresolved_overrides = table.unresolved_overrides;
  return result;
}

nlohmann::json report_to_json(const MergeReport& report,
                              const KnowledgeGraph& notes_graph,
                              const KnowledgeGraph& wiki_graph) {
  nlohmann::json j;
  j["textbook_entity_count"] = report.textbook_entity_count;
  j["wiki_entity_count"] = report.wiki_entity_count;
  j["matched_count"] = report.matched_count;
  j["overlap_fraction"] = report.overlap_fraction;
  j["new_link_count"] = report.new_link_count;
  j["fused_entity_count"] = report.fused_entity_count;
  j["fused_triple_count"] = report.fused_triple_count;
  nlohmann::json origins = nlohmann::json::object();
  for (const auto& [origin, n] : report.matches_by_origin) {
    origins[std::string(match_origin_name(origin))] = n;
  }
  j["matches_by_origin"] = origins;
  nlohmann::json conflicts = nlohmann::json::array();
  for (const Conflict& c : report.conflicts) {
    nlohmann::json candidates = nlohmann::json::array();
    for (EntityId id : c.candidates) {
      const kg::Entity& e = wiki_graph.entity(id);
      nlohmann::json cand = {{"label", e.label}};
      if (!e.external_ids.empty()) cand["qid"] = *e.external_ids.begin();
      candidates.push_back(cand);
    }
    conflicts.push_back({{"label", notes_graph.entity(c.a).label},
                         {"stage", std::string(match_origin_name(c.stage))},
                         {"candidates", candidates}});
  }
  j["conflicts"] = conflicts;
  nlohmann::json unresolved = nlohmann::json::array();
  for (const Override& o : report.unresolved_overrides) {
    unresolved.push_back(
        {{"line", o.line}, {"alias", o.alias}, {"canonical", o.canonical}});
  }
  j["unresolved_overrides"] = unresolved;
  return j;
}

}  // namespace fabkg::fusion
