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

#include "fabkg/wikidata/extract.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "fabkg/format.h"
#include "fabkg/log.h"
#include "fabkg/text/normalize.h"

namespace fabkg::wikidata {

using json = nlohmann::json;

namespace {

constexpr std::string_view kEntityPrefix = "http://www.wikidata.org/entity/";
constexpr std::string_view kDbpediaResource = "dbpedia.org/resource/";
constexpr std::string_view kWikipediaArticle = "https://en.wikipedia.org/wiki/";
constexpr std::size_t kLabelBatch = 50;

std::string values_of(const std::set<PId>& relations) {
  std::string out;
  for (const PId& p : relations) {
    if (!out.empty()) out += ' ';
    out += "wdt:" + p.str();
  }
  return out;
}

// Characters that cannot appear inside a SPARQL IRI reference.
bool safe_iri(std::string_view iri) {
  return std::none_of(iri.begin(), iri.end(), [](char c) {
    return static_cast<unsigned char>(c) <= 0x20 || c == '<' || c == '>' ||
           c == '"' || c == '{' || c == '}' || c == '|' || c == '^' ||
           c == '`' || c == '\\';
  });
}

const json& bindings_of(const json& results) {
  static const json kEmpty = json::array();
  if (!results.is_object() || !results.contains("results") ||
      !results["results"].contains("bindings") ||
      !results["results"]["bindings"].is_array()) {
    throw MalformedResponse("SPARQL response has no results.bindings array");
  }
  return results["results"]["bindings"];
}

std::optional<std::string> binding_value(const json& binding,
                                         const std::string& var) {
  auto it = binding.find(var);
  if (it == binding.end() || !it->is_object()) return std::nullopt;
  auto v = it->find("value");
  if (v == it->end() || !v->is_string()) return std::nullopt;
  return v->get<std::string>();
}

std::optional<PId> property_from_uri(std::string_view uri) {
  const std::size_t slash = uri.rfind('/');
  return PId::parse(slash == std::string_view::npos ? uri : uri.substr(slash + 1));
}

// Spotlight encodes numbers as strings; accept either.
std::optional<double> number_field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) return std::nullopt;
  if (it->is_number()) return it->get<double>();
  if (it->is_string()) {
    try {
      std::size_t used = 0;
      const std::string s = it->get<std::string>();
      double v = std::stod(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
  }
  return std::nullopt;
}

enum class Direction { kForward, kBackward };

}  // namespace

void EndpointConfig::validate() const {
  if (max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
  if (!(confidence_threshold >= 0.0 && confidence_threshold <= 1.0)) {
    throw std::invalid_argument("confidence_threshold must be in [0, 1]");
  }
  if (!(rate_limit >= 0.0) || std::isinf(rate_limit)) {
    throw std::invalid_argument("rate_limit must be a finite value >= 0");
  }
  if (retries < 0) throw std::invalid_argument("retries must be >= 0");
  if (parallelism < 1) throw std::invalid_argument("parallelism must be >= 1");
  if (result_limit < 1) throw std::invalid_argument("result_limit must be >= 1");
  if (mode != FetchMode::kLive && !offline_fixture_dir) {
    throw std::invalid_argument("record and replay modes need a fixture directory");
  }
}

std::string_view fetch_mode_name(FetchMode mode) {
  switch (mode) {
    case FetchMode::kLive:
      return "live";
    case FetchMode::kRecord:
      return "record";
    case FetchMode::kReplay:
      return "replay";
  }
  return "live";
}

std::optional<FetchMode> parse_fetch_mode(std::string_view name) {
  for (FetchMode m : {FetchMode::kLive, FetchMode::kRecord, FetchMode::kReplay}) {
    if (fetch_mode_name(m) == name) return m;
  }
  return std::nullopt;
}

std::shared_ptr<HttpClient> make_transport(const EndpointConfig& cfg) {
  cfg.validate();
  if (cfg.mode == FetchMode::kReplay) {
    return std::make_shared<ReplayClient>(FixtureStore(*cfg.offline_fixture_dir));
  }
  auto live = std::make_shared<RateLimitedClient>(make_live_client(cfg.timeout),
                                                  cfg.rate_limit);
  if (cfg.mode == FetchMode::kRecord) {
    return std::make_shared<RecordingClient>(live,
                                             FixtureStore(*cfg.offline_fixture_dir));
  }
  return live;
}

std::set<PId> default_relations() {
  std::set<PId> out;
  kg::RelationRegistry r = kg::RelationRegistry::with_defaults();
  for (kg::RelationId id : r.with_origin(kg::RelationOrigin::kWikidataP)) {
    out.insert(PId(r.get(id).pid));
  }
  return out;
}

std::string forward_query(const QId& item, const std::set<PId>& relations,
                          int limit) {
  return "SELECT ?p ?o WHERE {\n"
         "  VALUES ?p { " + values_of(relations) + " }\n"
         "  wd:" + item.str() + " ?p ?o .\n"
         "  FILTER(STRSTARTS(STR(?o), \"" + std::string(kEntityPrefix) + "Q\"))\n"
         "}\n"
         "ORDER BY ?p ?o\n"
         "LIMIT " + std::to_string(limit) + "\n";
}

std::string backward_query(const QId& item, const std::set<PId>& relations,
                           int limit) {
  return "SELECT ?s ?p WHERE {\n"
         "  VALUES ?p { " + values_of(relations) + " }\n"
         "  ?s ?p wd:" + item.str() + " .\n"
         "  FILTER(STRSTARTS(STR(?s), \"" + std::string(kEntityPrefix) + "Q\"))\n"
         "}\n"
         "ORDER BY ?p ?s\n"
         "LIMIT " + std::to_string(limit) + "\n";
}

std::string label_query(const std::vector<QId>& items) {
  std::string values;
  for (const QId& q : items) {
    if (!values.empty()) values += ' ';
    values += "wd:" + q.str();
  }
  return "SELECT ?item ?label WHERE {\n"
         "  VALUES ?item { " + values + " }\n"
         "  ?item rdfs:label ?label .\n"
         "  FILTER(LANG(?label) = \"en\")\n"
         "}\n";
}

WikidataClient::WikidataClient(EndpointConfig cfg)
    : WikidataClient(cfg, make_transport(cfg)) {}

WikidataClient::WikidataClient(EndpointConfig cfg,
                               std::shared_ptr<HttpClient> transport)
    : cfg_(std::move(cfg)), transport_(std::move(transport)) {
  cfg_.validate();
  if (!transport_) throw std::invalid_argument("transport must not be null");
}

HttpResponse WikidataClient::fetch(const std::string& url) {
  for (int attempt = 0;; ++attempt) {
    try {
      HttpResponse r = transport_->get(url);
      if (r.status == 200) return r;
      const bool retryable = r.status == 429 || (r.status >= 500 && r.status < 600);
      throw NetworkError("HTTP " + std::to_string(r.status) + " from " + url,
                         retryable);
    } catch (const NetworkError& e) {
      if (!e.retryable() || attempt >= cfg_.retries) throw;
      log_debug(std::string("retrying after: ") + e.what());
      std::this_thread::sleep_for(cfg_.retry_backoff * (1 << std::min(attempt, 6)));
    }
  }
}

json WikidataClient::fetch_json(const std::string& url) {
  HttpResponse r = fetch(url);
  try {
    return json::parse(r.body);
  } catch (const json::parse_error& e) {
    throw MalformedResponse("invalid JSON from " + url + ": " + e.what());
  }
}

std::string WikidataClient::sparql_request_url(const std::string& query) const {
  return cfg_.sparql_url + "?format=json&query=" + url_encode(query);
}

json WikidataClient::sparql(const std::string& query) {
  return fetch_json(sparql_request_url(query));
}

std::map<std::string, QId> WikidataClient::resolve_articles(
    const std::set<std::string>& articles) {
  std::map<std::string, QId> out;
  if (articles.empty()) return out;
  std::string values;
  for (const std::string& a : articles) values += " <" + a + ">";
  json results = sparql("SELECT ?article ?item WHERE {\n  VALUES ?article {" +
                        values + " }\n  ?article schema:about ?item .\n}\n");
  for (const json& b : bindings_of(results)) {
    auto article = binding_value(b, "article");
    auto item = binding_value(b, "item");
    if (!article || !item) continue;
    if (auto q = QId::from_uri(*item)) {
      auto [it, inserted] = out.emplace(*article, *q);
      if (!inserted && *q < it->second) it->second = *q;
    }
  }
  return out;
}

std::vector<LinkedMention> WikidataClient::link_text(std::string_view text) {
  if (text::normalize_label(text).empty()) {
    throw std::invalid_argument("link_text needs non-empty text");
  }
  const std::string url = cfg_.linker_url + "?text=" + url_encode(text) +
                          "&confidence=" + format_number(cfg_.confidence_threshold);
  json response = fetch_json(url);
  if (!response.is_object()) throw MalformedResponse("annotate response is not an object");

  struct Candidate {
    std::string surface;
    std::size_t offset;
    double confidence;
    std::string uri;
  };
  std::vector<Candidate> candidates;
  std::set<std::string> articles;
  auto resources = response.find("Resources");
  if (resources != response.end()) {
    if (!resources->is_array()) throw MalformedResponse("Resources is not an array");
    for (const json& r : *resources) {
      if (!r.is_object() || !r.contains("@URI") || !r["@URI"].is_string()) {
        throw MalformedResponse("annotation without @URI");
      }
      auto confidence = number_field(r, "@similarityScore");
      if (!confidence) confidence = number_field(r, "@confidence");
      auto offset = number_field(r, "@offset");
      if (!confidence || !offset || *offset < 0) {
        throw MalformedResponse("annotation without score or offset");
      }
      if (*confidence < cfg_.confidence_threshold) continue;
      Candidate c{r.value("@surfaceForm", ""), static_cast<std::size_t>(*offset),
                  *confidence, r["@URI"].get<std::string>()};
      if (const std::size_t at = c.uri.find(kDbpediaResource);
          at != std::string::npos) {
        std::string article = std::string(kWikipediaArticle) +
                              c.uri.substr(at + kDbpediaResource.size());
        if (!safe_iri(article)) continue;
        articles.insert(article);
        c.uri = article;
      }
      candidates.push_back(std::move(c));
    }
  }
  const std::map<std::string, QId> resolved = resolve_articles(articles);

  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) {
                     return a.offset < b.offset;
                   });
  std::vector<LinkedMention> out;
  std::set<QId> seen;
  for (const Candidate& c : candidates) {
    std::optional<QId> item;
    if (auto it = resolved.find(c.uri); it != resolved.end()) {
      item = it->second;
    } else if (c.uri.find("wikidata.org/entity/") != std::string::npos) {
      item = QId::from_uri(c.uri);
    }
    if (!item) {
      log_debug("no item for " + c.uri);
      continue;
    }
    if (seen.insert(*item).second) {
      out.push_back({c.surface, c.offset, *item, c.confidence});
    }
  }
  return out;
}

std::optional<QId> WikidataClient::lookup_item(std::string_view term) {
  const std::string normalized = text::normalize_label(term);
  if (normalized.empty()) throw std::invalid_argument("lookup_item needs a term");
  const std::string url = cfg_.search_url +
                          "?action=wbsearchentities&format=json&language=en"
                          "&type=item&limit=10&search=" +
                          url_encode(normalized);
  json response = fetch_json(url);
  if (!response.is_object() || !response.contains("search") ||
      !response["search"].is_array()) {
    throw MalformedResponse("search response has no 'search' array");
  }
  auto same = [&](const json& v) {
    return v.is_string() && text::normalize_label(v.get<std::string>()) == normalized;
  };
  for (const json& hit : response["search"]) {
    if (!hit.is_object() || !hit.contains("id") || !hit["id"].is_string()) continue;
    auto q = QId::parse(hit["id"].get<std::string>());
    if (!q) continue;
    bool match = same(hit.value("label", json())) ||
                 (hit.contains("match") && same(hit["match"].value("text", json())));
    if (!match && hit.contains("aliases") && hit["aliases"].is_array()) {
      match = std::any_of(hit["aliases"].begin(), hit["aliases"].end(), same);
    }
    if (match) return q;
  }
  return std::nullopt;
}

ExpansionResult WikidataClient::expand(const std::set<QId>& seeds,
                                       const std::set<PId>& relations) {
  if (seeds.empty()) throw std::invalid_argument("expand needs at least one seed");
  for (const PId& p : relations) {
    if (!is_whitelisted(p)) {
      throw std::invalid_argument(p.str() + " is not a whitelisted relation");
    }
  }
  ExpansionResult result;
  result.seeds = seeds;
  if (relations.empty()) return result;

  // Fetches all urls with bounded parallelism. Transport failures are
  // recorded per request; anything else is rethrown after all workers stop.
  auto fetch_all = [&](const std::vector<std::string>& urls) {
    std::vector<std::optional<json>> out(urls.size());
    std::vector<std::string> errors(urls.size());
    std::vector<std::exception_ptr> fatal(urls.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i; (i = next++) < urls.size();) {
        try {
          out[i] = fetch_json(urls[i]);
        } catch (const NetworkError& e) {
          errors[i] = e.what();
        } catch (const MalformedResponse& e) {
          errors[i] = e.what();
        } catch (...) {
          fatal[i] = std::current_exception();
        }
      }
    };
    const std::size_t n = std::min<std::size_t>(cfg_.parallelism, urls.size());
    if (n <= 1) {
      worker();
    } else {
      std::vector<std::jthread> threads;
      for (std::size_t i = 0; i < n; ++i) threads.emplace_back(worker);
    }
    for (const auto& f : fatal) {
      if (f) std::rethrow_exception(f);
    }
    for (std::size_t i = 0; i < urls.size(); ++i) {
      if (!out[i]) {
        result.partial = true;
        result.skipped.push_back(errors[i]);
        log_warning("skipped request: " + errors[i]);
      }
    }
    return out;
  };

  std::set<RawTriple> triples;
  for (Direction dir : {Direction::kForward, Direction::kBackward}) {
    std::set<QId> visited = seeds;
    std::vector<QId> frontier(seeds.begin(), seeds.end());
    for (int hop = 0; hop < cfg_.max_depth && !frontier.empty(); ++hop) {
      std::vector<std::string> urls;
      for (const QId& q : frontier) {
        urls.push_back(sparql_request_url(
            dir == Direction::kForward
                ? forward_query(q, relations, cfg_.result_limit)
                : backward_query(q, relations, cfg_.result_limit)));
      }
      auto responses = fetch_all(urls);
      std::set<QId> next;
      for (std::size_t i = 0; i < frontier.size(); ++i) {
        if (!responses[i]) continue;
        const json* bindings = nullptr;
        try {
          bindings = &bindings_of(*responses[i]);
        } catch (const MalformedResponse& e) {
          result.partial = true;
          result.skipped.push_back(e.what());
          continue;
        }
        const char* other_var = dir == Direction::kForward ? "o" : "s";
        for (const json& b : *bindings) {
          auto p_uri = binding_value(b, "p");
          auto other_uri = binding_value(b, other_var);
          if (!p_uri || !other_uri) continue;
          auto p = property_from_uri(*p_uri);
          auto other = QId::from_uri(*other_uri);
          if (!p || !other || !relations.count(*p)) continue;
          if (dir == Direction::kForward) {
            triples.insert({frontier[i], *p, *other});
          } else {
            triples.insert({*other, *p, frontier[i]});
          }
          if (visited.insert(*other).second) next.insert(*other);
        }
      }
      frontier.assign(next.begin(), next.end());
    }
  }
  result.triples.assign(triples.begin(), triples.end());

  std::set<QId> items = seeds;
  for (const RawTriple& t : result.triples) {
    items.insert(t.subject);
    items.insert(t.object);
  }
  std::vector<QId> ordered(items.begin(), items.end());
  std::vector<std::string> urls;
  for (std::size_t i = 0; i < ordered.size(); i += kLabelBatch) {
    std::vector<QId> batch(ordered.begin() + i,
                           ordered.begin() + std::min(i + kLabelBatch, ordered.size()));
    urls.push_back(sparql_request_url(label_query(batch)));
  }
  auto responses = fetch_all(urls);
  for (const auto& response : responses) {
    if (!response) continue;
    try {
      for (const json& b : bindings_of(*response)) {
        auto item = binding_value(b, "item");
        auto label = binding_value(b, "label");
        if (!item || !label) continue;
        auto q = QId::from_uri(*item);
        if (!q || !items.count(*q)) continue;
        auto [it, inserted] = result.labels.emplace(*q, *label);
        if (!inserted && *label < it->second) it->second = *label;
      }
    } catch (const MalformedResponse& e) {
      result.partial = true;
      result.skipped.push_back(e.what());
    }
  }
  for (const QId& q : items) result.labels.emplace(q, q.str());
  return result;
}

std::vector<LinkedMention> link_text(std::string_view text,
                                     const EndpointConfig& cfg) {
  return WikidataClient(cfg).link_text(text);
}

std::optional<QId> lookup_item(std::string_view term, const EndpointConfig& cfg) {
  return WikidataClient(cfg).lookup_item(term);
}

ExpansionResult expand(const std::set<QId>& seeds, const std::set<PId>& relations,
                       const EndpointConfig& cfg) {
  return WikidataClient(cfg).expand(seeds, relations);
}

std::size_t import_raw(const ExpansionResult& raw, kg::KnowledgeGraph& graph) {
  std::map<QId, kg::EntityId> ids;
  auto entity_for = [&](const QId& q) {
    if (auto it = ids.find(q); it != ids.end()) return it->second;
    auto label_it = raw.labels.find(q);
    if (label_it == raw.labels.end()) {
      throw std::invalid_argument("no label for " + q.str());
    }
    std::optional<kg::EntityId> id = graph.find_by_external_id(q.str());
    if (!id) {
      for (kg::EntityId candidate : graph.find_all(label_it->second)) {
        if (graph.entity(candidate).external_ids.empty()) {
          id = candidate;
          break;
        }
      }
    }
    if (!id) {
      std::string label = text::normalize_label(label_it->second);
      id = graph.create_entity(label.empty() ? q.str() : label, Source::kWikidata);
    }
    graph.add_external_id(*id, q.str());
    graph.add_provenance(*id, Source::kWikidata);
    ids.emplace(q, *id);
    return *id;
  };

  for (const QId& q : raw.seeds) entity_for(q);
  std::size_t added = 0;
  for (const RawTriple& t : raw.triples) {
    auto relation = graph.relations().find_by_pid(t.property.str());
    if (!relation) throw std::invalid_argument(t.property.str() + " is not registered");
    const kg::EntityId s = entity_for(t.subject);
    const kg::EntityId o = entity_for(t.object);
    if (graph.add_triple(s, *relation, o, {}, SourceSet{Source::kWikidata}).inserted) {
      ++added;
    }
  }
  return added;
}

json expansion_to_json(const ExpansionResult& raw) {
  json j;
  j["seeds"] = json::array();
  for (const QId& q : raw.seeds) j["seeds"].push_back(q.str());
  j["triples"] = json::array();
  for (const RawTriple& t : raw.triples) {
    j["triples"].push_back({t.subject.str(), t.property.str(), t.object.str()});
  }
  j["labels"] = json::array();
  for (const auto& [q, label] : raw.labels) j["labels"].push_back({q.str(), label});
  j["partial"] = raw.partial;
  j["skipped"] = raw.skipped;
  return j;
}

ExpansionResult expansion_from_json(const json& j) {
  ExpansionResult raw;
  try {
    for (const json& q : j.at("seeds")) raw.seeds.insert(QId(q.get<std::string>()));
    for (const json& t : j.at("triples")) {
      raw.triples.push_back({QId(t.at(0).get<std::string>()),
                             PId(t.at(1).get<std::string>()),
                             QId(t.at(2).get<std::string>())});
    }
    for (const json& l : j.at("labels")) {
      raw.labels.emplace(QId(l.at(0).get<std::string>()), l.at(1).get<std::string>());
    }
    raw.partial = j.value("partial", false);
    if (j.contains("skipped")) raw.skipped = j["skipped"].get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw MalformedResponse(std::string("bad expansion file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw MalformedResponse(std::string("bad expansion file: ") + e.what());
  }
  std::sort(raw.triples.begin(), raw.triples.end());
  raw.triples.erase(std::unique(raw.triples.begin(), raw.triples.end()),
                    raw.triples.end());
  return raw;
}

}  // namespace fabkg::wikidata
