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

#include "fabkg/cli/cli.h"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "fabkg/expr/expr.h"
#include "fabkg/fusion/fusion.h"
#include "fabkg/kg/graph_io.h"
#include "fabkg/notes/notes.h"
#include "fabkg/qa/qa.h"

namespace fabkg::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw EnvironmentError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw EnvironmentError("cannot write " + path.string());
  out << content;
  if (!out.flush()) throw EnvironmentError("cannot write " + path.string());
}

void require_file(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw EnvironmentError("no such file: " + path.string());
}

void require_writable(const std::optional<std::string>& path) {
  if (!path) return;
  fs::path parent = fs::path(*path).parent_path();
  std::error_code ec;
  if (!parent.empty() && !fs::is_directory(parent, ec)) {
    throw EnvironmentError("no such directory: " + parent.string());
  }
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

void emit(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

json stats_to_json(const kg::GraphStats& s) {
  json per_triples = json::object();
  for (const auto& [src, n] : s.per_source_triples) per_triples[std::string(source_name(src))] = n;
  json per_entities = json::object();
  for (const auto& [src, n] : s.per_source_entities) per_entities[std::string(source_name(src))] = n;
  return {{"entities", s.entity_count},
          {"triples", s.triple_count},
          {"relations", s.relation_count},
          {"per_source_triples", per_triples},
          {"per_source_entities", per_entities}};
}

template <typename T>
void set_if(std::optional<T>& dst, const std::optional<T>& src) {
  if (src) dst = src;
}

template <typename T>
std::optional<T> env_number(const EnvLookup& env, const std::string& name) {
  std::optional<std::string> v = env(name);
  if (!v) return std::nullopt;
  T out{};
  std::istringstream in(*v);
  in >> out;
  if (!in || !in.eof()) throw UsageError(name + " is not a number: '" + *v + "'");
  return out;
}

// Error object printed on stdout for exit code 1.
json error_json(const std::exception& e) {
  json j = {{"error", "Error"}, {"message", e.what()}};
  if (const auto* u = dynamic_cast<const expr::Unsolvable*>(&e)) {
    j["error"] = "Unsolvable";
    j["missing"] = u->missing();
  } else if (const auto* c = dynamic_cast<const expr::CyclicDefinition*>(&e)) {
    j["error"] = "CyclicDefinition";
    j["path"] = c->path();
  } else if (dynamic_cast<const expr::UnitMismatch*>(&e)) {
    j["error"] = "UnitMismatch";
  } else if (dynamic_cast<const expr::DepthLimitExceeded*>(&e)) {
    j["error"] = "DepthLimitExceeded";
  } else if (dynamic_cast<const expr::SyntaxError*>(&e)) {
    j["error"] = "SyntaxError";
  } else if (dynamic_cast<const qa::UnrecognizedQuestion*>(&e)) {
    j["error"] = "UnrecognizedQuestion";
  } else if (const auto* n = dynamic_cast<const qa::NoCandidate*>(&e)) {
    j["error"] = "NoCandidate";
    j["surface"] = n->surface();
  } else if (dynamic_cast<const qa::NoAnswer*>(&e)) {
    j["error"] = "NoAnswer";
  } else if (const auto* a = dynamic_cast<const qa::AmbiguousEntity*>(&e)) {
    j["error"] = "AmbiguousEntity";
    j["surface"] = a->surface();
  } else if (dynamic_cast<const kg::GraphFormatError*>(&e)) {
    j["error"] = "GraphFormatError";
  } else if (dynamic_cast<const fusion::OverrideFormatError*>(&e)) {
    j["error"] = "OverrideFormatError";
  }
  return j;
}

int classify(const std::exception& e) {
  if (dynamic_cast<const UsageError*>(&e) || dynamic_cast<const std::invalid_argument*>(&e)) {
    return kExitUsage;
  }
  if (dynamic_cast<const EnvironmentError*>(&e) ||
      dynamic_cast<const wikidata::FixtureMissing*>(&e) ||
      dynamic_cast<const wikidata::NetworkError*>(&e) ||
      dynamic_cast<const wikidata::MalformedResponse*>(&e)) {
    return kExitEnvironment;
  }
  if (dynamic_cast<const Error*>(&e)) return kExitNoAnswer;
  return kExitEnvironment;
}

// Flag values for one invocation.
struct Flags {
  ConfigLayer layer;
  std::optional<std::string> config_path;
  bool verbose = false;
  bool quiet = false;

  // Subcommand arguments.
  std::vector<std::string> inputs;
  std::optional<std::string> out_path;
  bool lenient = false;
  std::string source = "keywords";
  std::optional<std::string> into;
  std::optional<std::string> vocab;
  std::vector<std::string> seeds;
  std::vector<std::string> relations;
  bool record = false;
  bool replay = false;
  std::optional<std::string> graph_out;
  std::optional<std::string> notes_graph;
  std::optional<std::string> wiki_graph;
  std::optional<std::string> overrides;
  std::optional<std::string> graph;
  std::string question;
  std::string target;
  std::vector<std::string> given;
  std::string format = "tsv";
};

struct Io {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

json diagnostic_to_json(const std::string& path, const notes::ParseDiagnostic& d) {
  return {{"path", path},
          {"line", d.line},
          {"column", d.column},
          {"severity", std::string(notes::severity_name(d.severity))},
          {"message", d.message}};
}

int cmd_ingest_notes(const Flags& f, const PipelineConfig&, Io io) {
  for (const std::string& p : f.inputs) require_file(p);
  require_writable(f.out_path);

  kg::KnowledgeGraph graph;
  json diagnostics = json::array();
  std::size_t errors = 0;
  std::size_t warnings = 0;
  for (const std::string& p : f.inputs) {
    notes::ParseResult parsed = notes::parse_notes(read_text(p));
    for (const notes::ParseDiagnostic& d : parsed.diagnostics) {
      diagnostics.push_back(diagnostic_to_json(p, d));
      (d.severity == notes::Severity::kError ? errors : warnings) += 1;
    }
    notes::notes_to_triples(parsed.document, graph);
  }
  const bool failed = errors > 0 && !f.lenient;
  if (f.out_path && !failed) {
    std::ostringstream tsv;
    kg::write_tsv(graph, tsv);
    write_text(*f.out_path, tsv.str());
  }
  emit(io.out, {{"files", f.inputs.size()},
                {"errors", errors},
                {"warnings", warnings},
                {"diagnostics", diagnostics},
                {"stats", stats_to_json(graph.stats())},
                {"output", failed || !f.out_path ? json(nullptr) : json(*f.out_path)}});
  if (failed) {
    io.err << "fabkg: " << errors << " error diagnostic(s); rerun with --lenient to keep going\n";
    return kExitNoAnswer;
  }
  return kExitOk;
}

int cmd_ingest_vocab(const Flags& f, const PipelineConfig& cfg, Io io) {
  std::optional<Source> source = parse_source(f.source);
  if (!source) throw UsageError("unknown source '" + f.source + "'");
  for (const std::string& p : f.inputs) require_file(p);
  if (f.into) require_file(*f.into);
  require_writable(f.out_path);

  text::Vocabulary vocab;
  if (f.into) vocab = vocabulary_from_json(json::parse(read_text(*f.into)));
  for (const std::string& p : f.inputs) {
    vocab = text::ingest_term_list(split_lines(read_text(p)), *source, std::move(vocab),
                                   cfg.variant_threshold);
  }
  json v = vocabulary_to_json(vocab);
  if (!f.out_path) {
    emit(io.out, v);
    return kExitOk;
  }
  write_text(*f.out_path, v.dump(2) + "\n");
  emit(io.out, {{"terms", vocab.terms.size()},
                {"variants", vocab.variant_map.size()},
                {"source_counts", v["source_counts"]},
                {"output", *f.out_path}});
  return kExitOk;
}

std::vector<std::string> vocabulary_terms(const fs::path& path, const PipelineConfig& cfg) {
  const std::string text = read_text(path);
  if (path.extension() == ".json") {
    text::Vocabulary v = vocabulary_from_json(json::parse(text));
    return {v.terms.begin(), v.terms.end()};
  }
  text::Vocabulary v =
      text::ingest_term_list(split_lines(text), Source::kKeywords, {}, cfg.variant_threshold);
  return {v.terms.begin(), v.terms.end()};
}

int cmd_expand(const Flags& f, const PipelineConfig& cfg, Io io) {
  if (!f.vocab && f.seeds.empty()) throw UsageError("expand needs --vocab or --seed");
  if (f.vocab) require_file(*f.vocab);
  require_writable(f.out_path);
  require_writable(f.graph_out);
  if (cfg.endpoint.mode != wikidata::FetchMode::kLive) {
    std::error_code ec;
    const fs::path dir = *cfg.endpoint.offline_fixture_dir;
    if (cfg.endpoint.mode == wikidata::FetchMode::kReplay && !fs::is_directory(dir, ec)) {
      throw EnvironmentError("no such fixture directory: " + dir.string());
    }
    if (cfg.endpoint.mode == wikidata::FetchMode::kRecord) fs::create_directories(dir, ec);
  }

  std::set<wikidata::PId> relations;
  for (const std::string& r : f.relations) relations.insert(wikidata::PId(r));
  if (relations.empty()) relations = wikidata::default_relations();

  wikidata::WikidataClient client(cfg.endpoint);
  std::set<wikidata::QId> seeds;
  for (const std::string& s : f.seeds) seeds.insert(wikidata::QId(s));
  std::vector<std::string> terms;
  if (f.vocab) terms = vocabulary_terms(*f.vocab, cfg);
  json unresolved = json::array();
  json failed = json::array();
  for (const std::string& term : terms) {
    try {
      if (auto q = client.lookup_item(term)) {
        seeds.insert(*q);
      } else {
        unresolved.push_back(term);
      }
    } catch (const wikidata::NetworkError& e) {
      log_warning(std::string("lookup failed: ") + e.what());
      failed.push_back(term);
    }
  }

  wikidata::ExpansionResult result;
  result.seeds = seeds;
  if (!seeds.empty()) result = client.expand(seeds, relations);
  if (f.out_path) write_text(*f.out_path, wikidata::expansion_to_json(result).dump(2) + "\n");
  if (f.graph_out) {
    kg::KnowledgeGraph g;
    wikidata::import_raw(result, g);
    std::ostringstream tsv;
    kg::write_tsv(g, tsv);
    write_text(*f.graph_out, tsv.str());
  }

  json seed_list = json::array();
  for (const wikidata::QId& q : seeds) seed_list.push_back(q.str());
  json report = {{"mode", std::string(wikidata::fetch_mode_name(cfg.endpoint.mode))},
                 {"terms", terms.size()},
                 {"seed_count", seeds.size()},
                 {"seeds", seed_list},
                 {"unresolved", unresolved},
                 {"failed_lookups", failed},
                 {"triple_count", result.triples.size()},
                 {"label_count", result.labels.size()},
                 {"partial", result.partial},
                 {"skipped", result.skipped}};
  if (!f.out_path) report["expansion"] = wikidata::expansion_to_json(result);
  emit(io.out, report);

  if (!failed.empty() || result.partial) {
    io.err << "fabkg: " << failed.size() + result.skipped.size()
           << " request(s) failed; output is partial\n";
    return kExitEnvironment;
  }
  if (seeds.empty()) {
    io.err << "fabkg: no vocabulary term resolved to an item\n";
    return kExitNoAnswer;
  }
  return kExitOk;
}

int cmd_fuse(const Flags& f, const PipelineConfig& cfg, Io io) {
  require_file(*f.notes_graph);
  require_file(*f.wiki_graph);
  if (f.overrides) require_file(*f.overrides);
  require_writable(f.out_path);

  kg::KnowledgeGraph notes_graph = load_graph(*f.notes_graph, f.lenient);
  kg::KnowledgeGraph wiki_graph = load_graph(*f.wiki_graph, f.lenient);
  std::vector<fusion::Override> overrides;
  if (f.overrides) overrides = fusion::load_overrides(*f.overrides);
  fusion::SynonymTable table =
      fusion::build_synonym_table(notes_graph, wiki_graph, cfg.variant_threshold, overrides);
  fusion::MergeResult merged = fusion::merge_graphs(notes_graph, wiki_graph, table);
  if (f.out_path) {
    std::ostringstream tsv;
    kg::write_tsv(merged.graph, tsv);
    write_text(*f.out_path, tsv.str());
  }
  emit(io.out, fusion::report_to_json(merged.report, notes_graph, wiki_graph));
  return kExitOk;
}

qa::QaOptions qa_options(const PipelineConfig& cfg) {
  qa::QaOptions o;
  o.min_similarity = cfg.min_similarity;
  return o;
}

int cmd_ask(const Flags& f, const PipelineConfig& cfg, Io io) {
  require_file(*f.graph);
  kg::KnowledgeGraph g = load_graph(*f.graph, f.lenient);
  qa::QaEngine engine(g, qa_options(cfg));
  emit(io.out, qa::answer_to_json(engine.ask(f.question), g));
  return kExitOk;
}

expr::Binding bindings_from(const std::vector<std::string>& given) {
  std::string joined;
  for (const std::string& g : given) joined += (joined.empty() ? "" : ",") + g;
  try {
    return expr::parse_bindings(joined);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--given: ") + e.what());
  }
}

int cmd_calc(const Flags& f, const PipelineConfig& cfg, Io io) {
  require_file(*f.graph);
  expr::Binding bindings = bindings_from(f.given);
  kg::KnowledgeGraph g = load_graph(*f.graph, f.lenient);
  emit(io.out, expr::solution_to_json(
                   expr::solve(f.target, bindings, g, {cfg.max_chain_depth})));
  return kExitOk;
}

int cmd_export(const Flags& f, const PipelineConfig&, Io io) {
  require_file(*f.graph);
  require_writable(f.out_path);
  kg::KnowledgeGraph g = load_graph(*f.graph, f.lenient);
  std::ostringstream body;
  if (f.format == "tsv") {
    kg::write_tsv(g, body);
  } else {
    kg::write_ntriples(g, body);
  }
  if (!f.out_path) {
    io.out << body.str();
    return kExitOk;
  }
  write_text(*f.out_path, body.str());
  emit(io.out, {{"format", f.format},
                {"output", *f.out_path},
                {"stats", stats_to_json(g.stats())}});
  return kExitOk;
}

int cmd_stats(const Flags& f, const PipelineConfig&, Io io) {
  require_file(*f.graph);
  emit(io.out, stats_to_json(load_graph(*f.graph, f.lenient).stats()));
  return kExitOk;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// One command per line, one JSON object per reply:
//   ask <question>
//   calc <target> [| <bindings>]
//   stats
//   quit
int cmd_repl(const Flags& f, const PipelineConfig& cfg, Io io) {
  require_file(*f.graph);
  kg::KnowledgeGraph g = load_graph(*f.graph, f.lenient);
  qa::QaEngine engine(g, qa_options(cfg));
  std::string line;
  while (std::getline(io.in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const std::size_t space = line.find(' ');
    const std::string verb = line.substr(0, space);
    const std::string rest = space == std::string::npos ? "" : trim(line.substr(space + 1));
    if (verb == "quit" || verb == "exit") break;
    json reply;
    try {
      if (verb == "ask") {
        reply = qa::answer_to_json(engine.ask(rest), g);
      } else if (verb == "calc") {
        const std::size_t bar = rest.find('|');
        const std::string target = trim(rest.substr(0, bar));
        expr::Binding b;
        if (bar != std::string::npos) b = expr::parse_bindings(rest.substr(bar + 1));
        reply = expr::solution_to_json(expr::solve(target, b, g, {cfg.max_chain_depth}));
      } else if (verb == "stats") {
        reply = stats_to_json(g.stats());
      } else {
        reply = {{"error", "UnknownCommand"},
                 {"message", "commands: ask <question>, calc <target> [| a=1 m, ...], stats, quit"}};
      }
    } catch (const std::exception& e) {
      reply = error_json(e);
    }
    io.out << reply.dump() << '\n';
  }
  return kExitOk;
}

}  // namespace

EnvLookup process_environment() {
  return [](const std::string& name) -> std::optional<std::string> {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
  };
}

std::optional<LogLevel> parse_log_level(std::string_view name) {
  if (name == "debug") return LogLevel::kDebug;
  if (name == "info") return LogLevel::kInfo;
  if (name == "warning") return LogLevel::kWarning;
  if (name == "error") return LogLevel::kError;
  if (name == "quiet") return LogLevel::kQuiet;
  return std::nullopt;
}

ConfigLayer layer_from_json(const json& j) {
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");
  ConfigLayer l;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "fixture_dir") l.fixture_dir = v.get<std::string>();
      else if (key == "sparql_url") l.sparql_url = v.get<std::string>();
      else if (key == "linker_url") l.linker_url = v.get<std::string>();
      else if (key == "search_url") l.search_url = v.get<std::string>();
      else if (key == "mode") l.mode = v.get<std::string>();
      else if (key == "confidence_threshold") l.confidence_threshold = v.get<double>();
      else if (key == "max_depth") l.max_depth = v.get<int>();
      else if (key == "rate_limit") l.rate_limit = v.get<double>();
      else if (key == "retries") l.retries = v.get<int>();
      else if (key == "timeout_ms") l.timeout_ms = v.get<int>();
      else if (key == "parallelism") l.parallelism = v.get<int>();
      else if (key == "levenshtein_absolute") l.levenshtein_absolute = v.get<std::size_t>();
      else if (key == "levenshtein_relative") l.levenshtein_relative = v.get<double>();
      else if (key == "levenshtein_min_length") l.levenshtein_min_length = v.get<std::size_t>();
      else if (key == "min_similarity") l.min_similarity = v.get<double>();
      else if (key == "max_chain_depth") l.max_chain_depth = v.get<std::size_t>();
      else if (key == "log_level") l.log_level = v.get<std::string>();
      else throw UsageError("unknown config key '" + key + "'");
    }
  } catch (const json::type_error& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  return l;
}

ConfigLayer layer_from_env(const EnvLookup& env) {
  ConfigLayer l;
  l.fixture_dir = env("FABKG_FIXTURE_DIR");
  l.sparql_url = env("FABKG_SPARQL_URL");
  l.linker_url = env("FABKG_LINKER_URL");
  l.search_url = env("FABKG_SEARCH_URL");
  l.mode = env("FABKG_MODE");
  l.confidence_threshold = env_number<double>(env, "FABKG_CONFIDENCE_THRESHOLD");
  l.max_depth = env_number<int>(env, "FABKG_MAX_DEPTH");
  l.rate_limit = env_number<double>(env, "FABKG_RATE_LIMIT");
  l.retries = env_number<int>(env, "FABKG_RETRIES");
  l.timeout_ms = env_number<int>(env, "FABKG_TIMEOUT_MS");
  l.parallelism = env_number<int>(env, "FABKG_PARALLELISM");
  l.levenshtein_absolute = env_number<std::size_t>(env, "FABKG_LEVENSHTEIN_ABSOLUTE");
  l.levenshtein_relative = env_number<double>(env, "FABKG_LEVENSHTEIN_RELATIVE");
  l.levenshtein_min_length = env_number<std::size_t>(env, "FABKG_LEVENSHTEIN_MIN_LENGTH");
  l.min_similarity = env_number<double>(env, "FABKG_MIN_SIMILARITY");
  l.max_chain_depth = env_number<std::size_t>(env, "FABKG_MAX_CHAIN_DEPTH");
  l.log_level = env("FABKG_LOG_LEVEL");
  return l;
}

PipelineConfig resolve_config(const std::vector<ConfigLayer>& layers) {
  ConfigLayer m;
  for (const ConfigLayer& l : layers) {
    set_if(m.fixture_dir, l.fixture_dir);
    set_if(m.sparql_url, l.sparql_url);
    set_if(m.linker_url, l.linker_url);
    set_if(m.search_url, l.search_url);
    set_if(m.mode, l.mode);
    set_if(m.confidence_threshold, l.confidence_threshold);
    set_if(m.max_depth, l.max_depth);
    set_if(m.rate_limit, l.rate_limit);
    set_if(m.retries, l.retries);
    set_if(m.timeout_ms, l.timeout_ms);
    set_if(m.parallelism, l.parallelism);
    set_if(m.levenshtein_absolute, l.levenshtein_absolute);
    set_if(m.levenshtein_relative, l.levenshtein_relative);
    set_if(m.levenshtein_min_length, l.levenshtein_min_length);
    set_if(m.min_similarity, l.min_similarity);
    set_if(m.max_chain_depth, l.max_chain_depth);
    set_if(m.log_level, l.log_level);
  }

  PipelineConfig cfg;
  wikidata::EndpointConfig& e = cfg.endpoint;
  if (m.fixture_dir) e.offline_fixture_dir = fs::path(*m.fixture_dir);
  if (m.sparql_url) e.sparql_url = *m.sparql_url;
  if (m.linker_url) e.linker_url = *m.linker_url;
  if (m.search_url) e.search_url = *m.search_url;
  if (m.mode) {
    std::optional<wikidata::FetchMode> mode = wikidata::parse_fetch_mode(*m.mode);
    if (!mode) throw UsageError("unknown mode '" + *m.mode + "'");
    e.mode = *mode;
  }
  if (m.confidence_threshold) e.confidence_threshold = *m.confidence_threshold;
  if (m.max_depth) e.max_depth = *m.max_depth;
  if (m.rate_limit) e.rate_limit = *m.rate_limit;
  if (m.retries) e.retries = *m.retries;
  if (m.timeout_ms) e.timeout = std::chrono::milliseconds(*m.timeout_ms);
  if (m.parallelism) e.parallelism = *m.parallelism;
  if (m.levenshtein_absolute) cfg.variant_threshold.absolute = *m.levenshtein_absolute;
  if (m.levenshtein_relative) cfg.variant_threshold.relative = *m.levenshtein_relative;
  if (m.levenshtein_min_length) cfg.variant_threshold.min_length = *m.levenshtein_min_length;
  if (m.min_similarity) cfg.min_similarity = *m.min_similarity;
  if (m.max_chain_depth) cfg.max_chain_depth = *m.max_chain_depth;
  if (m.log_level) {
    std::optional<LogLevel> level = parse_log_level(*m.log_level);
    if (!level) throw UsageError("unknown log level '" + *m.log_level + "'");
    cfg.log_level = *level;
  }
  try {
    e.validate();
  } catch (const std::invalid_argument& ex) {
    throw UsageError(ex.what());
  }
  if (cfg.min_similarity < 0 || cfg.min_similarity > 1) {
    throw UsageError("min_similarity must be in [0, 1]");
  }
  if (cfg.max_chain_depth < 1) throw UsageError("max_chain_depth must be >= 1");
  return cfg;
}

json vocabulary_to_json(const text::Vocabulary& v) {
  json counts = json::object();
  for (const auto& [src, n] : v.source_counts) counts[std::string(source_name(src))] = n;
  return {{"terms", v.terms},
          {"variant_map", v.variant_map},
          {"source_counts", counts},
          {"surface_counts", v.surface_counts}};
}

text::Vocabulary vocabulary_from_json(const json& j) {
  text::Vocabulary v;
  try {
    v.terms = j.at("terms").get<std::set<std::string>>();
    v.variant_map = j.at("variant_map").get<std::map<std::string, std::string>>();
    v.surface_counts = j.at("surface_counts").get<std::map<std::string, std::size_t>>();
    for (const auto& [name, n] : j.at("source_counts").items()) {
      std::optional<Source> src = parse_source(name);
      if (!src) throw Error("unknown source '" + name + "' in vocabulary");
      v.source_counts[*src] = n.get<std::size_t>();
    }
  } catch (const json::exception& e) {
    throw Error(std::string("bad vocabulary file: ") + e.what());
  }
  return v;
}

kg::KnowledgeGraph load_graph(const fs::path& path, bool lenient) {
  const std::string text = read_text(path);
  kg::KnowledgeGraph g;
  if (path.extension() == ".notes") {
    notes::ParseResult parsed = notes::parse_notes(text);
    if (parsed.has_errors() && !lenient) {
      const notes::ParseDiagnostic* first = nullptr;
      for (const auto& d : parsed.diagnostics) {
        if (d.severity == notes::Severity::kError) {
          first = &d;
          break;
        }
      }
      throw Error(path.string() + ":" + std::to_string(first->line) + ": " + first->message);
    }
    notes::notes_to_triples(parsed.document, g);
    return g;
  }
  if (path.extension() == ".json") {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw Error(path.string() + ": " + e.what());
    }
    wikidata::import_raw(wikidata::expansion_from_json(j), g);
    return g;
  }
  std::istringstream in(text);
  return kg::read_tsv(in);
}

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err, const EnvLookup& env) {
  Flags f;
  CLI::App app{"Manufacturing knowledge graph toolkit", "fabkg"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", f.config_path, "JSON config file (also FABKG_CONFIG)");
  app.add_option("--fixture-dir", f.layer.fixture_dir, "Recorded HTTP fixtures");
  app.add_option("--sparql-url", f.layer.sparql_url);
  app.add_option("--linker-url", f.layer.linker_url);
  app.add_option("--search-url", f.layer.search_url);
  app.add_option("--confidence", f.layer.confidence_threshold, "Entity-linking threshold");
  app.add_option("--max-depth", f.layer.max_depth, "Expansion hops");
  app.add_option("--rate-limit", f.layer.rate_limit, "Requests per second, 0 = unlimited");
  app.add_option("--retries", f.layer.retries);
  app.add_option("--timeout-ms", f.layer.timeout_ms);
  app.add_option("--parallelism", f.layer.parallelism);
  app.add_option("--lev-absolute", f.layer.levenshtein_absolute, "Variant edit distance");
  app.add_option("--lev-relative", f.layer.levenshtein_relative, "Variant distance / length");
  app.add_option("--lev-min-length", f.layer.levenshtein_min_length);
  app.add_option("--min-similarity", f.layer.min_similarity, "Mention resolution floor");
  app.add_option("--max-chain-depth", f.layer.max_chain_depth, "Formula chaining limit");
  app.add_option("--log-level", f.layer.log_level, "debug|info|warning|error|quiet");
  app.add_flag("-v,--verbose", f.verbose);
  app.add_flag("-q,--quiet", f.quiet);

  auto* ingest_notes = app.add_subcommand("ingest-notes", "Parse notes files into a graph");
  ingest_notes->add_option("files", f.inputs)->required();
  ingest_notes->add_option("-o,--out", f.out_path, "Graph TSV");
  ingest_notes->add_flag("--lenient", f.lenient, "Exit 0 despite error diagnostics");

  auto* ingest_vocab = app.add_subcommand("ingest-vocab", "Normalize and cluster term lists");
  ingest_vocab->add_option("files", f.inputs)->required();
  ingest_vocab->add_option("--source", f.source, "keywords|index-words|ner-output|...");
  ingest_vocab->add_option("--into", f.into, "Existing vocabulary JSON to extend");
  ingest_vocab->add_option("-o,--out", f.out_path, "Vocabulary JSON");

  auto* expand = app.add_subcommand("expand", "Fetch the knowledge-base neighborhood");
  expand->add_option("--vocab", f.vocab, "Term list or vocabulary JSON");
  expand->add_option("--seed", f.seeds, "Seed item (Q-identifier)");
  expand->add_option("--relation", f.relations, "Whitelisted property to follow");
  auto* record = expand->add_flag("--record", f.record, "Record responses into the fixture dir");
  expand->add_flag("--replay", f.replay, "Serve responses from the fixture dir")->excludes(record);
  expand->add_option("-o,--out", f.out_path, "Raw expansion JSON");
  expand->add_option("--graph-out", f.graph_out, "Imported graph TSV");

  auto* fuse = app.add_subcommand("fuse", "Merge a notes graph into a knowledge-base graph");
  fuse->add_option("--notes", f.notes_graph)->required();
  fuse->add_option("--wiki", f.wiki_graph, "Graph TSV or raw expansion JSON")->required();
  fuse->add_option("--overrides", f.overrides, "alias<TAB>canonical lines");
  fuse->add_option("-o,--out", f.out_path, "Fused graph TSV");
  fuse->add_flag("--lenient", f.lenient);

  auto* ask = app.add_subcommand("ask", "Answer a templated question");
  ask->add_option("--graph", f.graph)->required();
  ask->add_option("question", f.question)->required();
  ask->add_flag("--lenient", f.lenient);

  auto* calc = app.add_subcommand("calc", "Solve for a quantity through stored formulas");
  calc->add_option("--graph", f.graph)->required();
  calc->add_option("--target", f.target)->required();
  calc->add_option("--given", f.given, "label=quantity, ...");
  calc->add_flag("--lenient", f.lenient);

  auto* export_cmd = app.add_subcommand("export", "Write a graph as TSV or N-Triples");
  export_cmd->add_option("--graph", f.graph)->required();
  export_cmd->add_option("--format", f.format)->check(CLI::IsMember({"tsv", "ntriples"}));
  export_cmd->add_option("-o,--out", f.out_path);
  export_cmd->add_flag("--lenient", f.lenient);

  auto* stats = app.add_subcommand("stats", "Entity, triple and relation counts");
  stats->add_option("--graph", f.graph)->required();
  stats->add_flag("--lenient", f.lenient);

  auto* repl = app.add_subcommand("repl", "Interactive ask/calc over one graph");
  repl->add_option("--graph", f.graph)->required();
  repl->add_flag("--lenient", f.lenient);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Io io{in, out, err};
  try {
    std::vector<ConfigLayer> layers;
    std::optional<std::string> config_path = f.config_path ? f.config_path : env("FABKG_CONFIG");
    if (config_path) {
      require_file(*config_path);
      json j;
      try {
        j = json::parse(read_text(*config_path));
      } catch (const json::parse_error& e) {
        throw UsageError(*config_path + ": " + e.what());
      }
      ConfigLayer file_layer = layer_from_json(j);
      // Relative fixture paths in a config file are relative to the file.
      if (file_layer.fixture_dir && fs::path(*file_layer.fixture_dir).is_relative()) {
        file_layer.fixture_dir =
            (fs::path(*config_path).parent_path() / *file_layer.fixture_dir).string();
      }
      layers.push_back(file_layer);
    }
    layers.push_back(layer_from_env(env));
    ConfigLayer flag_layer = f.layer;
    if (f.record) flag_layer.mode = "record";
    if (f.replay) flag_layer.mode = "replay";
    if (f.verbose) flag_layer.log_level = "info";
    if (f.quiet) flag_layer.log_level = "quiet";
    layers.push_back(flag_layer);
    PipelineConfig cfg = resolve_config(layers);
    set_log_level(cfg.log_level);

    if (*ingest_notes) return cmd_ingest_notes(f, cfg, io);
    if (*ingest_vocab) return cmd_ingest_vocab(f, cfg, io);
    if (*expand) return cmd_expand(f, cfg, io);
    if (*fuse) return cmd_fuse(f, cfg, io);
    if (*ask) return cmd_ask(f, cfg, io);
    if (*calc) return cmd_calc(f, cfg, io);
    if (*export_cmd) return cmd_export(f, cfg, io);
    if (*stats) return cmd_stats(f, cfg, io);
    if (*repl) return cmd_repl(f, cfg, io);
    throw UsageError("no command");
  } catch (const std::exception& e) {
    const int code = classify(e);
    if (code == kExitNoAnswer) emit(out, error_json(e));
    err << "fabkg: " << e.what() << '\n';
    return code;
  }
}

}  // namespace fabkg::cli
