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

#include "fabkg/units/units.h"

#include <array>
#include <charconv>
#include <cmath>
#include <string>
#include <utility>

namespace fabkg::units {
namespace {

struct Entry {
  std::string_view symbol;
  double factor;
  std::initializer_list<std::pair<const char*, int>> dims;
};

// Area and volume entries are listed explicitly so their factors are the
// exact decimal literals instead of a squared double.
const std::array<Entry, 41> kTable = {{
    {"%", 0.01, {}},
    {"N", 1.0, {{"N", 1}}},
    {"kN", 1e3, {{"N", 1}}},
    {"MN", 1e6, {{"N", 1}}},
    {"Pa", 1.0, {{"N", 1}, {"m", -2}}},
    {"kPa", 1e3, {{"N", 1}, {"m", -2}}},
    {"MPa", 1e6, {{"N", 1}, {"m", -2}}},
    {"GPa", 1e9, {{"N", 1}, {"m", -2}}},
    {"m", 1.0, {{"m", 1}}},
    {"km", 1e3, {{"m", 1}}},
    {"cm", 1e-2, {{"m", 1}}},
    {"mm", 1e-3, {{"m", 1}}},
    {"um", 1e-6, {{"m", 1}}},
    {"nm", 1e-9, {{"m", 1}}},
    {"m^2", 1.0, {{"m", 2}}},
    {"cm^2", 1e-4, {{"m", 2}}},
    {"mm^2", 1e-6, {{"m", 2}}},
    {"m^3", 1.0, {{"m", 3}}},
    {"cm^3", 1e-6, {{"m", 3}}},
    {"mm^3", 1e-9, {{"m", 3}}},
    {"s", 1.0, {{"s", 1}}},
    {"min", 60.0, {{"s", 1}}},
    {"h", 3600.0, {{"s", 1}}},
    {"Hz", 1.0, {{"s", -1}}},
    {"kg", 1.0, {{"kg", 1}}},
    {"g", 1e-3, {{"kg", 1}}},
    {"J", 1.0, {{"N", 1}, {"m", 1}}},
    {"kJ", 1e3, {{"N", 1}, {"m", 1}}},
    {"W", 1.0, {{"N", 1}, {"m", 1}, {"s", -1}}},
    {"kW", 1e3, {{"N", 1}, {"m", 1}, {"s", -1}}},
    {"K", 1.0, {{"K", 1}}},
    {"rev", 1.0, {{"rev", 1}}},
    {"rpm", 1.0 / 60.0, {{"rev", 1}, {"s", -1}}},
    {"m/s", 1.0, {{"m", 1}, {"s", -1}}},
    {"m/min", 1.0 / 60.0, {{"m", 1}, {"s", -1}}},
    {"mm/min", 1e-3 / 60.0, {{"m", 1}, {"s", -1}}},
    {"mm/rev", 1e-3, {{"m", 1}, {"rev", -1}}},
    {"m^3/s", 1.0, {{"m", 3}, {"s", -1}}},
    {"mm^3/s", 1e-9, {{"m", 3}, {"s", -1}}},
    {"mm^3/min", 1e-9 / 60.0, {{"m", 3}, {"s", -1}}},
    {"kg/m^3", 1.0, {{"kg", 1}, {"m", -3}}},
}};

// Preferred display name per dimension vector, first match wins.
constexpr std::array<std::string_view, 14> kDisplayOrder = {
    "N", "Pa", "m", "m^2", "m^3", "s", "kg", "J",
    "W", "K", "Hz", "m/s", "m^3/s", "kg/m^3"};

const Entry* find_entry(std::string_view symbol) {
  for (const Entry& e : kTable) {
    if (e.symbol == symbol) return &e;
  }
  return nullptr;
}

Unit to_unit(const Entry& e) {
  Unit u;
  u.factor = e.factor;
  for (const auto& [name, exp] : e.dims) u.dims[name] = exp;
  return u;
}

std::string replace_all(std::string s, std::string_view from,
                        std::string_view to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos;
       pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
  return s;
}

std::string canonical_text(std::string_view expression) {
  std::string s;
  for (char c : expression) {
    if (c != ' ' && c != '\t') s.push_back(c);
  }
  s = replace_all(std::move(s), "\xC2\xB2", "^2");   // superscript two
  s = replace_all(std::move(s), "\xC2\xB3", "^3");   // superscript three
  s = replace_all(std::move(s), "\xC2\xB5", "u");    // micro sign
  s = replace_all(std::move(s), "\xCE\xBC", "u");    // greek mu
  s = replace_all(std::move(s), "\xC2\xB7", "*");    // middle dot
  s = replace_all(std::move(s), "**", "^");
  return s;
}

// One factor of a unit product: a table symbol with an optional integer
// power, written "cm^2" or "cm2".
std::optional<Unit> parse_factor(std::string_view token) {
  if (token.empty()) return std::nullopt;
  if (const Entry* e = find_entry(token)) return to_unit(*e);
  std::string_view base = token;
  int exponent = 1;
  if (auto caret = token.find('^'); caret != std::string_view::npos) {
    base = token.substr(0, caret);
    std::string_view exp_text = token.substr(caret + 1);
    auto [ptr, ec] = std::from_chars(exp_text.data(),
                                     exp_text.data() + exp_text.size(),
                                     exponent);
    if (ec != std::errc() || ptr != exp_text.data() + exp_text.size()) {
      return std::nullopt;
    }
  } else if (token.size() > 1 && (token.back() == '2' || token.back() == '3')) {
    base = token.substr(0, token.size() - 1);
    exponent = token.back() - '0';
  } else {
    return std::nullopt;
  }
  const Entry* e = find_entry(base);
  if (e == nullptr || exponent == 0) return std::nullopt;
  Unit u = to_unit(*e);
  u.factor = std::pow(u.factor, exponent);
  u.dims = power(u.dims, exponent);
  return u;
}

}  // namespace

UnknownUnit::UnknownUnit(std::string_view symbol)
    : Error("unknown unit '" + std::string(symbol) + "'") {}

IncompatibleUnits::IncompatibleUnits(std::string_view from, std::string_view to)
    : Error("incompatible units: '" + std::string(from) + "' and '" +
            std::string(to) + "'") {}

Dimensions multiply(const Dimensions& a, const Dimensions& b) {
  Dimensions out = a;
  for (const auto& [name, exp] : b) {
    if ((out[name] += exp) == 0) out.erase(name);
  }
  return out;
}

Dimensions divide(const Dimensions& a, const Dimensions& b) {
  return multiply(a, power(b, -1));
}

Dimensions power(const Dimensions& a, int exponent) {
  Dimensions out;
  if (exponent == 0) return out;
  for (const auto& [name, exp] : a) out[name] = exp * exponent;
  return out;
}

std::optional<Unit> parse_unit(std::string_view expression) {
  const std::string text = canonical_text(expression);
  if (text.empty()) return Unit{};
  if (const Entry* e = find_entry(text)) return to_unit(*e);

  Unit result;
  bool divide_next = false;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i < text.size() && text[i] != '*' && text[i] != '/') continue;
    auto factor = parse_factor(std::string_view(text).substr(start, i - start));
    if (!factor) return std::nullopt;
    if (divide_next) {
      result.factor /= factor->factor;
      result.dims = divide(result.dims, factor->dims);
    } else {
      result.factor *= factor->factor;
      result.dims = multiply(result.dims, factor->dims);
    }
    divide_next = i < text.size() && text[i] == '/';
    start = i + 1;
  }
  return result;
}

bool is_known_unit(std::string_view expression) {
  return parse_unit(expression).has_value();
}

std::optional<std::string> named_unit(const Dimensions& dims) {
  if (dims.empty()) return std::string();
  for (std::string_view name : kDisplayOrder) {
    if (to_unit(*find_entry(name)).dims == dims) return std::string(name);
  }
  return std::nullopt;
}

std::string format_dimensions(const Dimensions& dims) {
  std::string out;
  for (const auto& [name, exp] : dims) {
    if (!out.empty()) out += '*';
    out += name;
    if (exp != 1) out += '^' + std::to_string(exp);
  }
  return out;
}

Quantity convert(const Quantity& q, std::string_view target_unit) {
  auto from = parse_unit(q.unit);
  if (!from) throw UnknownUnit(q.unit);
  auto to = parse_unit(target_unit);
  if (!to) throw UnknownUnit(target_unit);
  if (from->dims != to->dims) throw IncompatibleUnits(q.unit, target_unit);
  if (from->factor == to->factor) return {q.value, std::string(target_unit)};
  return {q.value * from->factor / to->factor, std::string(target_unit)};
}

std::optional<Quantity> parse_quantity(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) {
    text.remove_prefix(1);
  }
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) {
    text.remove_suffix(1);
  }
  if (text.empty()) return std::nullopt;
  // from_chars rejects a leading '+', so accept it here.
  std::string_view number = text;
  if (number.front() == '+') number.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(),
                                   value);
  if (ec != std::errc() || !std::isfinite(value)) return std::nullopt;
  std::string_view unit(ptr, number.data() + number.size() - ptr);
  while (!unit.empty() && (unit.front() == ' ' || unit.front() == '\t')) {
    unit.remove_prefix(1);
  }
  // "1e" or "2x3" style leftovers are not units.
  if (!unit.empty() && (unit.front() == '.' || unit.front() == '-')) {
    return std::nullopt;
  }
  if (!is_known_unit(unit)) return std::nullopt;
  return Quantity{value, std::string(unit)};
}

}  // namespace fabkg::units
