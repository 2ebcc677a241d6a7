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

#include "fabkg/qa/qa.h"

#include <algorithm>
#include <cmath>
#include <regex>
#include <set>
#include <stdexcept>

#include "fabkg/text/normalize.h"

namespace fabkg::qa {
namespace {

using kg::EntityId;
using kg::KnowledgeGraph;
using kg::TripleId;

const std::set<std::string> kUsage = {"uses", "usedTo", "usedIn", "usedFor", "Use"};
const std::set<std::string> kMemberOf = {"instanceOf", "Instance of", "Subclass of"};
const std::set<std::string> kHasMember = {"includes", "has"};
const std::set<std::string> kContains = {"has", "hasPart", "includes", "hasProperty"};
const std::set<std::string> kHasValue = {"hasValue"};
const std::set<std::string> kComparator = {"hasComparator"};

std::string strip_article(std::string s) {
  for (std::string_view article : {"the ", "a ", "an "}) {
    if (s.rfind(article, 0) == 0) return s.substr(article.size());
  }
  return s;
}

std::string strip_suffix_word(std::string s) {
  for (std::string_view word :
       {" operations", " operation", " processes", " process"}) {
    if (s.size() > word.size() &&
        s.compare(s.size() - word.size(), word.size(), word) == 0) {
      return s.substr(0, s.size() - word.size());
    }
  }
  return s;
}

std::string direction_of(const std::string& word) {
  return word == "more" || word == "higher" || word == "greater" ? "more" : "less";
}

// +1 when the subject exceeds the object, -1 for the reverse, 0 otherwise.
int polarity_of(const kg::Qualifiers& q) {
  auto it = q.find("polarity");
  if (it == q.end()) return 0;
  const std::string p = text::normalize_label(it->second);
  if (p == "greater" || p == "more" || p == "higher") return 1;
  if (p == "less" || p == "lower" || p == "smaller") return -1;
  return 0;
}

void sort_candidates(std::vector<Candidate>& c) {
  std::sort(c.begin(), c.end(), [](const Candidate& x, const Candidate& y) {
    return x.score != y.score ? x.score > y.score : x.id < y.id;
  });
}

std::set<std::string> names_of(const kg::Entity& e) {
  std::set<std::string> names = e.aliases;
  names.insert(e.label);
  return names;
}

bool qualifier_names(const kg::Qualifiers& q, const std::set<std::string>& names) {
  for (const auto& [key, value] : q) {
    if (names.count(text::normalize_label(value))) return true;
  }
  return false;
}

void add_unique(std::vector<TripleId>& ids, TripleId id) {
  if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
}

}  // namespace

std::string_view template_name(Template t) {
  switch (t) {
    case Template::kWhichXUsedForY:
      return "WhichXUsedForY";
    case Template::kComparatorMoreLess:
      return "ComparatorMoreLess";
    case Template::kCompositionOfXInY:
      return "CompositionOfXInY";
    case Template::kWhichXofCategoryForY:
      return "WhichXofCategoryForY";
    case Template::kValueOfPropertyForX:
      return "ValueOfPropertyForX";
    case Template::kUnrecognized:
      return "Unrecognized";
  }
  return "Unrecognized";
}

ParsedQuestion parse_question(std::string_view text) {
  std::string q = text::normalize_label(text);
  while (!q.empty() && (q.back() == '?' || q.back() == '.' || q.back() == '!' ||
                        q.back() == ' ')) {
    q.pop_back();
  }
  if (q.empty()) throw std::invalid_argument("question is empty");

  static const std::regex kComparator(
      R"(^(?:which|what)(?: (.+?))? (?:has|have|is|are) )"
      R"((more|less|higher|lower|greater|smaller) (.+?), (.+?) or (.+)$)");
  static const std::regex kComposition(
      R"(^what (?:is|are) the (?:composition|percentage|proportion|amount|content) )"
      R"(of (.+?) in (.+)$)");
  static const std::regex kValue(
      R"(^what (?:is|are) the (?:value of (?:the )?)?(.+?) (?:for|of) (.+)$)");
  static const std::regex kUsageQ(
      R"(^(?:which|what) (.+?) (?:is|are) (?:[a-z]+ly )?used (for|in|to) (.+)$)");

  ParsedQuestion out;
  std::smatch m;
  auto slot = [&](int i) { return strip_article(m[i].str()); };
  if (std::regex_match(q, m, kComparator)) {
    out.kind = Template::kComparatorMoreLess;
    if (m[1].matched) out.slots["category"] = slot(1);
    out.slots["direction"] = direction_of(m[2].str());
    out.slots["property"] = slot(3);
    out.slots["a"] = slot(4);
    out.slots["b"] = slot(5);
  } else if (std::regex_match(q, m, kComposition)) {
    out.kind = Template::kCompositionOfXInY;
    out.slots["component"] = slot(1);
    out.slots["mixture"] = slot(2);
  } else if (std::regex_match(q, m, kValue)) {
    out.kind = Template::kValueOfPropertyForX;
    out.slots["property"] = slot(1);
    out.slots["entity"] = slot(2);
  } else if (std::regex_match(q, m, kUsageQ)) {
    const std::string target = slot(3);
    const std::string bare = strip_suffix_word(target);
    out.slots["category"] = slot(1);
    // "used in X" and "used for X operations" name an operation rather than
    // a purpose.
    if (m[2].str() == "in" || bare != target) {
      out.kind = Template::kWhichXUsedForY;
      out.slots["operation"] = bare;
    } else {
      out.kind = Template::kWhichXofCategoryForY;
      out.slots["purpose"] = target;
    }
  }
  for (const auto& [name, value] : out.slots) {
    if (value.empty()) return ParsedQuestion{};
  }
  return out;
}

TrigramVector trigram_vector(std::string_view normalized_label) {
  std::u32string padded = U" " + text::to_code_points(normalized_label) + U" ";
  TrigramVector v;
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) v[padded.substr(i, 3)] += 1.0;
  return v;
}

double cosine(const TrigramVector& a, const TrigramVector& b) {
  const TrigramVector& small = a.size() <= b.size() ? a : b;
  const TrigramVector& large = a.size() <= b.size() ? b : a;
  double dot = 0.0;
  for (const auto& [key, x] : small) {
    auto it = large.find(key);
    if (it != large.end()) dot += x * it->second;
  }
  double na = 0.0;
  double nb = 0.0;
  for (const auto& [key, x] : a) na += x * x;
  for (const auto& [key, x] : b) nb += x * x;
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / std::sqrt(na * nb);
}

TrigramResolver::TrigramResolver(const KnowledgeGraph& graph) {
  for (const kg::Entity& e : graph.entities()) {
    for (const std::string& name : names_of(e)) {
      names_.push_back({e.id, trigram_vector(name)});
    }
  }
}

std::vector<Candidate> TrigramResolver::resolve(std::string_view surface,
                                                std::size_t k,
                                                double floor) const {
  const std::string normalized = text::normalize_label(surface);
  if (normalized.empty()) throw std::invalid_argument("mention is empty");
  const TrigramVector query = trigram_vector(normalized);
  std::map<EntityId, double> best;
  for (const Name& n : names_) {
    const double s = cosine(query, n.vector);
    if (s < floor) continue;
    double& slot = best[n.entity];
    slot = std::max(slot, s);
  }
  std::vector<Candidate> out;
  for (const auto& [id, s] : best) out.push_back({id, s});
  if (out.empty()) throw NoCandidate(normalized);
  sort_candidates(out);
  if (out.size() > k) out.resize(k);
  return out;
}

double TrigramResolver::similarity(std::string_view a, std::string_view b) const {
  return cosine(trigram_vector(text::normalize_label(a)),
                trigram_vector(text::normalize_label(b)));
}

void TrigramResolver::scale(double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw std::invalid_argument("scale factor must be positive");
  }
  for (Name& n : names_) {
    for (auto& [key, x] : n.vector) x *= factor;
  }
}

std::vector<Candidate> resolve_mention(std::string_view surface,
                                       const KnowledgeGraph& graph, std::size_t k,
                                       double floor) {
  return TrigramResolver(graph).resolve(surface, k, floor);
}

QaEngine::QaEngine(const KnowledgeGraph& graph, QaOptions options)
    : QaEngine(graph, std::make_unique<TrigramResolver>(graph), options) {}

QaEngine::QaEngine(const KnowledgeGraph& graph,
                   std::unique_ptr<MentionResolver> resolver, QaOptions options)
    : graph_(graph), resolver_(std::move(resolver)), options_(options) {}

Candidate QaEngine::resolve_one(const std::string& surface) const {
  std::vector<Candidate> c =
      resolver_->resolve(surface, options_.top_k, options_.min_similarity);
  if (c.size() > 1 && c[0].score - c[1].score <= options_.ambiguity_epsilon) {
    std::vector<Candidate> tied;
    for (const Candidate& x : c) {
      if (c[0].score - x.score <= options_.ambiguity_epsilon) tied.push_back(x);
    }
    throw AmbiguousEntity(surface, std::move(tied));
  }
  return c[0];
}

Answer QaEngine::answer(const ParsedQuestion& q) const {
  switch (q.kind) {
    case Template::kWhichXofCategoryForY:
      return usage(q, "purpose");
    case Template::kWhichXUsedForY:
      return usage(q, "operation");
    case Template::kComparatorMoreLess:
      return comparator(q);
    case Template::kCompositionOfXInY: {
      Answer a = qualified_value(q.slots.at("component"), q.slots.at("mixture"));
      a.kind = q.kind;
      return a;
    }
    case Template::kValueOfPropertyForX: {
      Answer a = qualified_value(q.slots.at("property"), q.slots.at("entity"));
      a.kind = q.kind;
      return a;
    }
    case Template::kUnrecognized:
      break;
  }
  throw std::invalid_argument("cannot answer an unrecognized question");
}

Answer QaEngine::ask(std::string_view text) const {
  ParsedQuestion q = parse_question(text);
  if (!q.recognized()) throw UnrecognizedQuestion();
  return answer(q);
}

// Entities in the category that reach the target through a usage edge.
Answer QaEngine::usage(const ParsedQuestion& q, const std::string& target_slot) const {
  const std::string& category = q.slots.at("category");
  const Candidate target = resolve_one(q.slots.at(target_slot));

  struct Hit {
    double category_score = 0.0;
    std::optional<TripleId> category_triple;
    std::vector<TripleId> usage_triples;
  };
  std::map<EntityId, Hit> hits;
  for (const kg::Triple* t : graph_.neighbors(target.id, kg::Direction::kBackward, kUsage)) {
    if (t->subject != target.id) hits[t->subject].usage_triples.push_back(t->id);
  }

  Answer out;
  out.kind = q.kind;
  for (auto& [id, hit] : hits) {
    auto consider = [&](const std::string& label, std::optional<TripleId> via) {
      const double s = resolver_->similarity(category, label);
      if (s > hit.category_score) {
        hit.category_score = s;
        hit.category_triple = via;
      }
    };
    for (const std::string& c : graph_.entity(id).categories) consider(c, std::nullopt);
    for (const kg::Triple* t : graph_.neighbors(id, kg::Direction::kForward, kMemberOf)) {
      if (const EntityId* o = t->object_entity()) consider(graph_.entity(*o).label, t->id);
    }
    for (const kg::Triple* t : graph_.neighbors(id, kg::Direction::kBackward, kHasMember)) {
      if (t->subject != id) consider(graph_.entity(t->subject).label, t->id);
    }
    if (hit.category_score < options_.min_similarity) continue;
    out.entities.push_back({id, hit.category_score * target.score});
  }
  if (out.entities.empty()) {
    throw NoAnswer("no " + category + " is linked to '" + q.slots.at(target_slot) + "'");
  }
  sort_candidates(out.entities);
  if (out.entities.size() > options_.top_k) out.entities.resize(options_.top_k);
  for (const Candidate& c : out.entities) {
    const Hit& hit = hits.at(c.id);
    for (TripleId t : hit.usage_triples) add_unique(out.supporting_triples, t);
    if (hit.category_triple) add_unique(out.supporting_triples, *hit.category_triple);
  }
  return out;
}

Answer QaEngine::comparator(const ParsedQuestion& q) const {
  const Candidate a = resolve_one(q.slots.at("a"));
  const Candidate b = resolve_one(q.slots.at("b"));
  if (a.id == b.id) throw NoAnswer("both sides name the same entity");
  const std::string property = text::normalize_label(q.slots.at("property"));
  const bool more = q.slots.at("direction") == "more";

  Answer out;
  out.kind = q.kind;
  std::optional<EntityId> winner;
  for (const kg::Triple* t :
       graph_.neighbors(a.id, kg::Direction::kBoth, kComparator)) {
    const EntityId* o = t->object_entity();
    if (!o) continue;
    const bool forward = t->subject == a.id && *o == b.id;
    const bool backward = t->subject == b.id && *o == a.id;
    if (!forward && !backward) continue;
    auto p = t->qualifiers.find("property");
    if (p == t->qualifiers.end() || text::normalize_label(p->second) != property) continue;
    const int polarity = polarity_of(t->qualifiers);
    if (polarity == 0) continue;
    // The stored edge says subject > object (or <); a "less" question or a
    // reversed edge flips which side wins.
    const bool subject_wins = (polarity > 0) == more;
    const EntityId w = subject_wins ? t->subject : *o;
    if (winner && *winner != w) throw NoAnswer("comparator edges disagree on " + property);
    winner = w;
    out.supporting_triples.push_back(t->id);
  }
  if (!winner) throw NoAnswer("no " + property + " comparison between these entities");
  out.entities.push_back({*winner, a.score * b.score});
  out.verdict = graph_.entity(*winner).label;
  return out;
}

// Literal values of `measured` in the context of `context`: a hasValue
// triple on one side qualified by the other, a qualified containment edge,
// or an unqualified value reached through a containment edge.
Answer QaEngine::qualified_value(const std::string& measured,
                                 const std::string& context) const {
  const Candidate x = resolve_one(measured);
  const Candidate y = resolve_one(context);
  const std::set<std::string> x_names = names_of(graph_.entity(x.id));
  const std::set<std::string> y_names = names_of(graph_.entity(y.id));

  Answer out;
  auto take = [&](const kg::Triple& t) {
    const std::string v = t.object_literal()->display();
    if (std::find(out.values.begin(), out.values.end(), v) == out.values.end()) {
      out.values.push_back(v);
    }
    add_unique(out.supporting_triples, t.id);
  };
  for (const kg::Triple* t : graph_.neighbors(x.id, kg::Direction::kForward, kHasValue)) {
    if (t->object_literal() && qualifier_names(t->qualifiers, y_names)) take(*t);
  }
  for (const kg::Triple* t : graph_.neighbors(y.id, kg::Direction::kForward, kHasValue)) {
    if (t->object_literal() && qualifier_names(t->qualifiers, x_names)) take(*t);
  }
  for (const kg::Triple* t : graph_.neighbors(y.id, kg::Direction::kForward, kContains)) {
    const EntityId* o = t->object_entity();
    if (!o || *o != x.id) continue;
    for (const auto& [key, value] : t->qualifiers) {
      if (key == "context") continue;
      out.values.push_back(key + ": " + value);
      add_unique(out.supporting_triples, t->id);
    }
    if (!out.values.empty()) continue;
    for (const kg::Triple* v :
         graph_.neighbors(x.id, kg::Direction::kForward, kHasValue)) {
      if (v->object_literal() && v->qualifiers.empty()) {
        take(*v);
        add_unique(out.supporting_triples, t->id);
      }
    }
  }
  if (out.values.empty()) {
    throw NoAnswer("no value of '" + measured + "' recorded for '" + context + "'");
  }
  out.entities.push_back({x.id, x.score * y.score});
  return out;
}

Answer answer(const ParsedQuestion& q, const KnowledgeGraph& graph) {
  return QaEngine(graph).answer(q);
}

nlohmann::json answer_to_json(const Answer& a, const KnowledgeGraph& graph) {
  nlohmann::json j;
  j["template"] = std::string(template_name(a.kind));
  if (a.verdict) {
    j["answer"] = *a.verdict;
  } else if (!a.values.empty()) {
    j["answer"] = a.values.front();
  } else if (!a.entities.empty()) {
    j["answer"] = graph.entity(a.entities.front().id).label;
  } else {
    j["answer"] = nullptr;
  }
  j["score"] = a.entities.empty() ? 0.0 : a.entities.front().score;
  nlohmann::json entities = nlohmann::json::array();
  for (const Candidate& c : a.entities) {
    entities.push_back({{"id", c.id.value},
                        {"label", graph.entity(c.id).label},
                        {"score", c.score}});
  }
  j["entities"] = entities;
  j["values"] = a.values;
  nlohmann::json triples = nlohmann::json::array();
  for (TripleId id : a.supporting_triples) {
    const kg::Triple& t = graph.triple(id);
    nlohmann::json row = {{"id", id.value},
                          {"subject", graph.entity(t.subject).label},
                          {"relation", graph.relation_name(t.relation)}};
    if (const EntityId* o = t.object_entity()) {
      row["object"] = graph.entity(*o).label;
    } else {
      row["object"] = t.object_literal()->display();
    }
    if (!t.qualifiers.empty()) row["qualifiers"] = t.qualifiers;
    triples.push_back(row);
  }
  j["supporting_triples"] = triples;
  return j;
}

}  // namespace fabkg::qa
