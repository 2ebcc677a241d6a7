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

#ifndef FABKG_WIKIDATA_IDS_H_
#define FABKG_WIKIDATA_IDS_H_

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace fabkg::wikidata {

// Item identifier such as "Q11427". Construction validates the pattern.
class QId {
 public:
  explicit QId(std::string_view value);
  static std::optional<QId> parse(std::string_view value);
  // Accepts "Q42" or an entity URI ending in "/Q42".
  static std::optional<QId> from_uri(std::string_view uri);

  const std::string& str() const { return value_; }
  std::uint64_t number() const;

  // Numeric order, so Q9 sorts before Q10.
  std::strong_ordering operator<=>(const QId& other) const;
  bool operator==(const QId& other) const = default;

 private:
  std::string value_;
};

// Property identifier such as "P279", paired with its registered display
// name.
class PId {
 public:
  explicit PId(std::string_view value);
  static std::optional<PId> parse(std::string_view value);

  const std::string& str() const { return value_; }
  std::uint64_t number() const;
  // Registered relation name ("Subclass of"); throws if not whitelisted.
  const std::string& display_name() const;

  std::strong_ordering operator<=>(const PId& other) const;
  bool operator==(const PId& other) const = default;

 private:
  std::string value_;
};

bool is_whitelisted(const PId& p);

}  // namespace fabkg::wikidata

#endif  // FABKG_WIKIDATA_IDS_H_
