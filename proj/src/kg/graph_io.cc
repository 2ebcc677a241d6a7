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

#include "fabkg/kg/graph_io.h"

#include <charconv>
#include <cmath>
#include <map>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "fabkg/format.h"
#include "fabkg/units/units.h"

namespace fabkg::kg {
namespace {

using nlohmann::json;

constexpr std::string_view kHeader =
    "subject_label\trelation\tobject_label\tqualifiers\tsource";

std::string escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\\':
        out += "\\\\";
        break;
      case '\t':
        out += "\\t";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\r':
        out += "\\r";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string unescape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\' || i + 1 == s.size()) {
      out += s[i];
      continue;
    }
    switch (s[++i]) {
      case 't':
        out += '\t';
        break;
      case 'n':
        out += '\n';
        break;
      case 'r':
        out += '\r';
        break;
      default:
        out += s[i];
    }
  }
  return out;
}

std::string dump(const json& j) {
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string sources_text(const SourceSet& sources) {
  std::string out;
  for (Source s : sources) {
    if (!out.empty()) out += ',';
    out += source_name(s);
  }
  return out;
}

std::string literal_text(const Literal& lit) {
  std::string value;
  switch (lit.kind) {
    case LiteralKind::kText:
    case LiteralKind::kExpressionRef:
      value = lit.text;
      break;
    case LiteralKind::kNumber:
      value = format_number(lit.number);
      break;
    case LiteralKind::kQuantity:
      value = format_number(lit.number);
      if (!lit.unit.empty()) value += " " + lit.unit;
      break;
  }
  return "\"" + value + "\"^^" + std::string(literal_kind_name(lit.kind));
}

std::optional<Literal> parse_literal(std::string_view field) {
  if (field.size() < 2 || field.front() != '"') return std::nullopt;
  auto marker = field.rfind("\"^^");
  if (marker == std::string_view::npos || marker == 0) return std::nullopt;
  auto kind = parse_literal_kind(field.substr(marker + 3));
  if (!kind) return std::nullopt;
  std::string value(field.substr(1, marker - 1));
  switch (*kind) {
    case LiteralKind::kText:
      return Literal::of_text(std::move(value));
    case LiteralKind::kExpressionRef:
      return Literal::of_expression(std::move(value));
    case LiteralKind::kNumber: {
      double v = 0;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc() || ptr != value.data() + value.size() ||
          !std::isfinite(v)) {
        return std::nullopt;
      }
      return Literal::of_number(v);
    }
    case LiteralKind::kQuantity: {
      auto q = units::parse_quantity(value);
      if (!q) return std::nullopt;
      return Literal::of_quantity(q->value, q->unit);
    }
  }
  return std::nullopt;
}

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    fields.emplace_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

SourceSet parse_sources(std::string_view text, std::size_t line) {
  SourceSet out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    std::string_view name = text.substr(start, comma - start);
    if (!name.empty()) {
      auto s = parse_source(name);
      if (!s) {
        throw GraphFormatError(line, "unknown source '" + std::string(name) + "'");
      }
      out.insert(*s);
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (out.empty()) out.insert(Source::kManual);
  return out;
}

std::vector<std::string> string_array(const json& j, const char* key,
                                      std::size_t line) {
  std::vector<std::string> out;
  if (!j.contains(key)) return out;
  if (!j[key].is_array()) {
    throw GraphFormatError(line, std::string(key) + " must be an array");
  }
  for (const auto& v : j[key]) {
    if (!v.is_string()) {
      throw GraphFormatError(line, std::string(key) + " must hold strings");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace

std::string percent_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    const bool unreserved = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                            (c >= '0' && c <= '9') || c == '-' || c == '.' ||
                            c == '_' || c == '~';
    if (unreserved) {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0xF];
    }
  }
  return out;
}

std::vector<std::string> entity_keys(const KnowledgeGraph& graph) {
  std::unordered_map<std::string, std::size_t> label_counts;
  for (const Entity& e : graph.entities()) ++label_counts[e.label];
  std::vector<std::string> keys;
  keys.reserve(graph.entities().size());
  std::unordered_map<std::string, std::size_t> taken;
  for (const Entity& e : graph.entities()) {
    std::string key = e.label;
    if (label_counts[e.label] > 1) {
      key += e.external_ids.empty() ? "|#" + std::to_string(e.id.value)
                                    : "|" + *e.external_ids.begin();
    }
    if (taken.count(key)) key = e.label + "|#" + std::to_string(e.id.value);
    taken.emplace(key, e.id.value);
    keys.push_back(std::move(key));
  }
  return keys;
}

void write_tsv(const KnowledgeGraph& graph, std::ostream& out) {
  out << kHeader << '\n';
  const RelationRegistry defaults = RelationRegistry::with_defaults();
  for (const RelationKind& kind : graph.relations().kinds()) {
    if (defaults.find(kind.name)) continue;
    json q = json::object();
    if (!kind.pid.empty()) q["pid"] = kind.pid;
    out << escape(kind.name) << "\t@relation\t" << origin_name(kind.origin)
        << '\t' << escape(dump(q)) << "\t\n";
  }

  const std::vector<std::string> keys = entity_keys(graph);
  for (const Entity& e : graph.entities()) {
    json meta = json::object();
    meta["label"] = e.label;
    if (!e.aliases.empty()) meta["aliases"] = e.aliases;
    if (!e.categories.empty()) meta["categories"] = e.categories;
    if (!e.external_ids.empty()) meta["external_ids"] = e.external_ids;
    out << escape(keys[e.id.value]) << "\t@entity\t\t" << escape(dump(meta))
        << '\t' << sources_text(e.provenance) << '\n';
  }

  for (const Triple& t : graph.triples()) {
    std::string object;
    if (const EntityId* o = t.object_entity()) {
      object = keys[o->value];
    } else {
      object = literal_text(*t.object_literal());
    }
    out << escape(keys[t.subject.value]) << '\t'
        << escape(graph.relation_name(t.relation)) << '\t' << escape(object)
        << '\t' << escape(dump(json(t.qualifiers))) << '\t'
        << sources_text(t.provenance) << '\n';
  }
}

KnowledgeGraph read_tsv(std::istream& in) {
  KnowledgeGraph graph;
  std::unordered_map<std::string, EntityId> by_key;
  std::string raw;
  std::size_t line_no = 0;

  auto resolve = [&](const std::string& key, const SourceSet& sources) {
    if (auto it = by_key.find(key); it != by_key.end()) return it->second;
    EntityId id = graph.upsert_entity(key, std::nullopt, *sources.begin());
    for (Source s : sources) graph.add_provenance(id, s);
    by_key.emplace(key, id);
    return id;
  };

  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.empty()) continue;
    if (line_no == 1 && raw == kHeader) continue;
    if (raw.front() == '#') continue;
    std::vector<std::string> fields = split_tabs(raw);
    if (fields.size() != 5) {
      throw GraphFormatError(line_no, "expected 5 tab-separated fields, got " +
                                          std::to_string(fields.size()));
    }
    for (auto& f : fields) f = unescape(f);
    const std::string& subject = fields[0];
    const std::string& relation = fields[1];
    json qualifiers;
    try {
      qualifiers = fields[3].empty() ? json::object() : json::parse(fields[3]);
    } catch (const json::exception& e) {
      throw GraphFormatError(line_no, std::string("bad JSON: ") + e.what());
    }
    if (!qualifiers.is_object()) {
      throw GraphFormatError(line_no, "qualifiers must be a JSON object");
    }

    try {
      if (relation == "@relation") {
        RelationKind kind;
        kind.name = subject;
        if (fields[2] == "wikidata") {
          kind.origin = RelationOrigin::kWikidataP;
        } else if (fields[2] == "notes") {
          kind.origin = RelationOrigin::kNotes;
        } else {
          kind.origin = RelationOrigin::kPlumbing;
        }
        kind.pid = qualifiers.value("pid", "");
        graph.register_relation(std::move(kind));
        continue;
      }

      const SourceSet sources = parse_sources(fields[4], line_no);
      if (relation == "@entity") {
        std::string label = qualifiers.value("label", subject);
        EntityId id = graph.create_entity(label, *sources.begin());
        for (Source s : sources) graph.add_provenance(id, s);
        for (const auto& a : string_array(qualifiers, "aliases", line_no)) {
          graph.add_alias(id, a);
        }
        for (const auto& c : string_array(qualifiers, "categories", line_no)) {
          graph.add_category(id, c);
        }
        for (const auto& q : string_array(qualifiers, "external_ids", line_no)) {
          graph.add_external_id(id, q);
        }
        if (!by_key.emplace(subject, id).second) {
          throw GraphFormatError(line_no, "duplicate entity key '" + subject + "'");
        }
        continue;
      }

      Qualifiers quals;
      for (const auto& [k, v] : qualifiers.items()) {
        if (!v.is_string()) {
          throw GraphFormatError(line_no, "qualifier '" + k + "' must be a string");
        }
        quals[k] = v.get<std::string>();
      }
      auto rel = graph.relations().find(relation);
      if (!rel) throw UnregisteredRelation(relation);
      EntityId s = resolve(subject, sources);
      Object object;
      if (auto it = by_key.find(fields[2]); it != by_key.end()) {
        object = it->second;
      } else if (auto lit = parse_literal(fields[2])) {
        object = *lit;
      } else {
        object = resolve(fields[2], sources);
      }
      graph.add_triple(s, *rel, std::move(object), std::move(quals), sources);
    } catch (const GraphFormatError&) {
      throw;
    } catch (const std::exception& e) {
      throw GraphFormatError(line_no, e.what());
    }
  }
  return graph;
}

void write_ntriples(const KnowledgeGraph& graph, std::ostream& out) {
  const std::vector<std::string> keys = entity_keys(graph);
  for (const Triple& t : graph.triples()) {
    out << '<' << percent_encode(keys[t.subject.value]) << "> <"
        << percent_encode(graph.relation_name(t.relation)) << "> ";
    if (const EntityId* o = t.object_entity()) {
      out << '<' << percent_encode(keys[o->value]) << '>';
    } else {
      const Literal& lit = *t.object_literal();
      std::string value = lit.kind == LiteralKind::kText ||
                                  lit.kind == LiteralKind::kExpressionRef
                              ? lit.text
                              : lit.display();
      out << '"';
      for (char c : value) {
        switch (c) {
          case '"':
            out << "\\\"";
            break;
          case '\\':
            out << "\\\\";
            break;
          case '\n':
            out << "\\n";
            break;
          case '\r':
            out << "\\r";
            break;
          case '\t':
            out << "\\t";
            break;
          default:
            out << c;
        }
      }
      out << "\"^^<" << literal_kind_name(lit.kind) << '>';
    }
    out << " .\n";
  }
}

}  // namespace fabkg::kg
