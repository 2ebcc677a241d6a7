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

#ifndef FABKG_CLI_CLI_H_
#define FABKG_CLI_CLI_H_

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fabkg/error.h"
#include "fabkg/log.h"
#include "fabkg/text/normalize.h"
#include "fabkg/wikidata/extract.h"
#include "json.hpp"

namespace fabkg::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitNoAnswer = 1,  // no answer, or input that does not parse
  kExitUsage = 2,
  kExitEnvironment = 3,  // missing files or network failures
};

class UsageError : public Error {
 public:
  using Error::Error;
};

class EnvironmentError : public Error {
 public:
  using Error::Error;
};

// Returns the value of an environment variable, if set.
using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

EnvLookup process_environment();

// Settings shared by every command. Each field is resolved from, in order
// of preference: command-line flag, FABKG_* environment variable, the JSON
// config file (--config or FABKG_CONFIG), built-in default.
struct PipelineConfig {
  wikidata::EndpointConfig endpoint;
  text::Threshold variant_threshold;
  double min_similarity = 0.4;
  std::size_t max_chain_depth = 32;
  LogLevel log_level = LogLevel::kWarning;
};

// One layer of settings. Unset fields fall through to the next layer.
struct ConfigLayer {
  std::optional<std::string> fixture_dir;
  std::optional<std::string> sparql_url;
  std::optional<std::string> linker_url;
  std::optional<std::string> search_url;
  std::optional<std::string> mode;
  std::optional<double> confidence_threshold;
  std::optional<int> max_depth;
  std::optional<double> rate_limit;
  std::optional<int> retries;
  std::optional<int> timeout_ms;
  std::optional<int> parallelism;
  std::optional<std::size_t> levenshtein_absolute;
  std::optional<double> levenshtein_relative;
  std::optional<std::size_t> levenshtein_min_length;
  std::optional<double> min_similarity;
  std::optional<std::size_t> max_chain_depth;
  std::optional<std::string> log_level;
};

// Throws UsageError on unknown keys or values of the wrong type.
ConfigLayer layer_from_json(const nlohmann::json& j);
// Reads FABKG_FIXTURE_DIR, FABKG_SPARQL_URL, ... Throws UsageError on
// values that do not parse.
ConfigLayer layer_from_env(const EnvLookup& env);

// Later layers win. Throws UsageError when the result is invalid, for
// example replay mode without a fixture directory.
PipelineConfig resolve_config(const std::vector<ConfigLayer>& lowest_to_highest);

std::optional<LogLevel> parse_log_level(std::string_view name);

nlohmann::json vocabulary_to_json(const text::Vocabulary& v);
text::Vocabulary vocabulary_from_json(const nlohmann::json& j);

// Loads a graph by extension: .notes (notes notation), .json (a raw
// expansion from `expand`), anything else TSV.
kg::KnowledgeGraph load_graph(const std::filesystem::path& path, bool lenient = false);

// Runs the command line `args` (without the program name). Machine-readable
// output goes to `out`, messages to `err`. Returns an ExitCode.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err, const EnvLookup& env = process_environment());

}  // namespace fabkg::cli

#endif  // FABKG_CLI_CLI_H_
