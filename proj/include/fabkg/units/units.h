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

#ifndef FABKG_UNITS_UNITS_H_
#define FABKG_UNITS_UNITS_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "fabkg/error.h"

namespace fabkg::units {

// Exponents over the symbolic base units (N, m, s, kg, K, rev). Pa is
// stored as N*m^-2 rather than being reduced to kg, which keeps the
// mechanics formulas this toolkit cares about readable.
using Dimensions = std::map<std::string, int>;

struct Unit {
  double factor = 1.0;  // multiply a value in this unit to get base units
  Dimensions dims;
};

class UnknownUnit : public Error {
 public:
  explicit UnknownUnit(std::string_view symbol);
};

class IncompatibleUnits : public Error {
 public:
  IncompatibleUnits(std::string_view from, std::string_view to);
};

// Parses a unit expression such as "GPa", "cm^2", "cm²", "N/mm^2" or
// "m/min". The empty string is dimensionless. Returns nullopt when any
// factor is not in the unit table.
std::optional<Unit> parse_unit(std::string_view expression);

// True when parse_unit succeeds.
bool is_known_unit(std::string_view expression);

// Name of the table entry with factor 1 and these dimensions ("Pa" for
// N*m^-2, "" for dimensionless), if any.
std::optional<std::string> named_unit(const Dimensions& dims);

// Symbolic rendering such as "N*m^-2"; "" for dimensionless.
std::string format_dimensions(const Dimensions& dims);

Dimensions multiply(const Dimensions& a, const Dimensions& b);
Dimensions divide(const Dimensions& a, const Dimensions& b);
Dimensions power(const Dimensions& a, int exponent);

struct Quantity {
  double value = 0.0;
  std::string unit;  // unit expression; "" is dimensionless

  friend bool operator==(const Quantity&, const Quantity&) = default;
};

// Rescales q into target_unit. Throws IncompatibleUnits when the
// dimensions differ and UnknownUnit for unparseable units.
Quantity convert(const Quantity& q, std::string_view target_unit);

// Parses "10N", "1 cm^2", "200 GPa", "0.8" into a Quantity. Returns
// nullopt unless the text is a finite number followed by a known unit.
std::optional<Quantity> parse_quantity(std::string_view text);

}  // namespace fabkg::units

#endif  // FABKG_UNITS_UNITS_H_
