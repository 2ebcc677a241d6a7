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

#ifndef FABKG_SOURCE_H_
#define FABKG_SOURCE_H_

#include <cstdint>
#include <optional>
#include <set>
#include <string_view>

namespace fabkg {

// Where a piece of knowledge came from. Entities and triples carry a set of
// these so fused graphs keep their provenance.
enum class Source : std::uint8_t {
  kNotes,
  kWikidata,
  kIndexWords,
  kKeywords,
  kNerOutput,
  kManual,
};

using SourceSet = std::set<Source>;

std::string_view source_name(Source source);
std::optional<Source> parse_source(std::string_view name);

}  // namespace fabkg

#endif  // FABKG_SOURCE_H_
