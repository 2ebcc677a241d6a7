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

#include "fabkg/wikidata/ids.h"

#include <charconv>
#include <stdexcept>

#include "fabkg/kg/relations.h"

namespace fabkg::wikidata {
namespace {

bool matches(std::string_view value, char prefix) {
  if (value.size() < 2 || value.front() != prefix) return false;
  if (value[1] == '0') return false;
  for (char c : value.substr(1)) {
    if (c < '0' || c > '9') return false;
  }
  return value.size() <= 20;
}

std::uint64_t digits(const std::string& value) {
  std::uint64_t n = 0;
  std::from_chars(value.data() + 1, value.data() + value.size(), n);
  return n;
}

std::strong_ordering compare(const std::string& a, const std::string& b) {
  if (a.size() != b.size()) return a.size() <=> b.size();
  return a.compare(b) <=> 0;
}

const kg::RelationRegistry& registry() {
  static const kg::RelationRegistry r = kg::RelationRegistry::with_defaults();
  return r;
}

}  // namespace

QId::QId(std::string_view value) : value_(value) {
  if (!matches(value, 'Q')) {
    throw std::invalid_argument("not a Q-identifier: '" + value_ + "'");
  }
}

std::optional<QId> QId::parse(std::string_view value) {
  if (!matches(value, 'Q')) return std::nullopt;
  return QId(value);
}

std::optional<QId> QId::from_uri(std::string_view uri) {
  const std::size_t slash = uri.rfind('/');
  return parse(slash == std::string_view::npos ? uri : uri.substr(slash + 1));
}

std::uint64_t QId::number() const { return digits(value_); }

std::strong_ordering QId::operator<=>(const QId& other) const {
  return compare(value_, other.value_);
}

PId::PId(std::string_view value) : value_(value) {
  if (!matches(value, 'P')) {
    throw std::invalid_argument("not a P-identifier: '" + value_ + "'");
  }
}

std::optional<PId> PId::parse(std::string_view value) {
  if (!matches(value, 'P')) return std::nullopt;
  return PId(value);
}

std::uint64_t PId::number() const { return digits(value_); }

const std::string& PId::display_name() const {
  auto id = registry().find_by_pid(value_);
  if (!id) throw std::invalid_argument(value_ + " is not a whitelisted property");
  return registry().get(*id).name;
}

std::strong_ordering PId::operator<=>(const PId& other) const {
  return compare(value_, other.value_);
}

bool is_whitelisted(const PId& p) {
  return registry().find_by_pid(p.str()).has_value();
}

}  // namespace fabkg::wikidata
