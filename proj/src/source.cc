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

#include "fabkg/source.h"

#include <array>
#include <utility>

namespace fabkg {
namespace {

constexpr std::array<std::pair<Source, std::string_view>, 6> kNames = {{
    {Source::kNotes, "notes"},
    {Source::kWikidata, "wikidata"},
    {Source::kIndexWords, "index-words"},
    {Source::kKeywords, "keywords"},
    {Source::kNerOutput, "ner-output"},
    {Source::kManual, "manual"},
}};

}  // namespace

std::string_view source_name(Source source) {
  for (const auto& [s, name] : kNames) {
    if (s == source) return name;
  }
  return "unknown";
}

std::optional<Source> parse_source(std::string_view name) {
  for (const auto& [s, n] : kNames) {
    if (n == name) return s;
  }
  return std::nullopt;
}

}  // namespace fabkg
