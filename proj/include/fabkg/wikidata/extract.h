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

#ifndef FABKG_WIKIDATA_EXTRACT_H_
#define FABKG_WIKIDATA_EXTRACT_H_

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "fabkg/kg/graph.h"
#include "fabkg/wikidata/http.h"
#include "fabkg/wikidata/ids.h"
#include "json.hpp"

namespace fabkg::wikidata {

enum class FetchMode { kLive, kRecord, kReplay };

struct EndpointConfig {
  std::string sparql_url = "https://query.wikidata.org/sparql";
  std::string linker_url = "https://api.dbpedia-spotlight.org/en/annotate";
  std::string search_url = "https://www.wikidata.org/w/api.php";
  double confidence_threshold = 0.5;
  int max_depth = 2;
  double rate_limit = 5.0;  // requests per second, 0 for unlimited
  int retries = 3;
  std::chrono::milliseconds retry_backoff{250};
  std::chrono::milliseconds timeout{30000};
  int parallelism = 4;
  int result_limit = 10000;  // LIMIT on each expansion query
  std::optional<std::filesystem::path> offline_fixture_dir;
  FetchMode mode = FetchMode::kLive;

  // Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

std::string_view fetch_mode_name(FetchMode mode);
std::optional<FetchMode> parse_fetch_mode(std::string_view name);

// Builds the transport stack for `cfg.mode`: rate-limited live requests,
// optionally recorded, or replay from fixtures.
std::shared_ptr<HttpClient> make_transport(const EndpointConfig& cfg);

struct LinkedMention {
  std::string surface;
  std::size_t offset = 0;
  QId item;
  double confidence = 0;

  bool operator==(const LinkedMention&) const = default;
};

struct RawTriple {
  QId subject;
  PId property;
  QId object;

  auto operator<=>(const RawTriple&) const = default;
  bool operator==(const RawTriple&) const = default;
};

struct ExpansionResult {
  std::set<QId> seeds;
  std::vector<RawTriple> triples;  // sorted, no repeats
  std::map<QId, std::string> labels;
  // Set when a request failed after retries and was skipped.
  bool partial = false;
  std::vector<std::string> skipped;
};

class WikidataClient {
 public:
  explicit WikidataClient(EndpointConfig cfg);
  WikidataClient(EndpointConfig cfg, std::shared_ptr<HttpClient> transport);

  const EndpointConfig& config() const { return cfg_; }

  // Annotates free text and keeps mentions at or above the confidence
  // threshold, one per item. DBpedia resources are mapped to items through
  // their English Wikipedia article.
  std::vector<LinkedMention> link_text(std::string_view text);

  // Exact label or alias match (after normalization) via entity search.
  std::optional<QId> lookup_item(std::string_view term);

  // Breadth-first expansion up to max_depth hops along forward edges and,
  // separately, along backward edges from the seeds.
  ExpansionResult expand(const std::set<QId>& seeds, const std::set<PId>& relations);

  // Runs a SELECT query and returns the parsed JSON results.
  nlohmann::json sparql(const std::string& query);
  std::string sparql_request_url(const std::string& query) const;

 private:
  HttpResponse fetch(const std::string& url);
  nlohmann::json fetch_json(const std::string& url);
  std::map<std::string, QId> resolve_articles(const std::set<std::string>& articles);

  EndpointConfig cfg_;
  std::shared_ptr<HttpClient> transport_;
};

std::vector<LinkedMention> link_text(std::string_view text, const EndpointConfig& cfg);
std::optional<QId> lookup_item(std::string_view term, const EndpointConfig& cfg);
ExpansionResult expand(const std::set<QId>& seeds, const std::set<PId>& relations,
                       const EndpointConfig& cfg);

// The full relation whitelist.
std::set<PId> default_relations();

// Query text used by expand, exposed for documentation and fake endpoints.
std::string forward_query(const QId& item, const std::set<PId>& relations, int limit);
std::string backward_query(const QId& item, const std::set<PId>& relations, int limit);
std::string label_query(const std::vector<QId>& items);

// Adds the expansion to `graph`: one entity per QId (matched by external id,
// then by an unlinked entity with the same label), and one triple per raw
// triple. Returns the number of triples that were new.
std::size_t import_raw(const ExpansionResult& raw, kg::KnowledgeGraph& graph);

// JSON form of an expansion, stable across runs.
nlohmann::json expansion_to_json(const ExpansionResult& raw);
ExpansionResult expansion_from_json(const nlohmann::json& j);

}  // namespace fabkg::wikidata

#endif  // FABKG_WIKIDATA_EXTRACT_H_
