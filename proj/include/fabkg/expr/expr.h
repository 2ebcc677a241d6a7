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

#ifndef FABKG_EXPR_EXPR_H_
#define FABKG_EXPR_EXPR_H_

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fabkg/error.h"
#include "fabkg/kg/graph.h"
#include "fabkg/units/units.h"
#include "json.hpp"

namespace fabkg::expr {

enum class Op : std::uint8_t { kConst, kVar, kAdd, kSub, kMul, kDiv, kPow, kNeg };

struct Expr {
  Op op = Op::kConst;
  double value = 0.0;         // kConst
  std::string name;           // kVar, normalized
  std::vector<Expr> args;     // two for binary operators, one for kNeg

  static Expr constant(double v);
  static Expr variable(std::string_view label);
  static Expr binary(Op op, Expr lhs, Expr rhs);
  static Expr negate(Expr operand);

  friend bool operator==(const Expr&, const Expr&) = default;
};

// Fully parenthesized rendering, e.g. "(stress / youngs modulus)".
std::string to_string(const Expr& e);

// Distinct variable names in order of first appearance.
std::vector<std::string> variables(const Expr& e);

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, const std::string& message)
      : Error("syntax error at " + std::to_string(position) + ": " + message),
        position_(position) {}
  // Byte offset into the formula; equals its length for "unexpected end".
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Returns true when a normalized label names something that may appear as
// a variable. Used to split a run of words such as "feed rate depth of cut"
// into known labels; a run that cannot be split is one variable.
using LabelSet = std::function<bool(const std::string&)>;

// Precedence: ^ (right-associative) > unary minus > * / > + -.
// "**" is accepted for ^, and the symbols × · ÷ − for * * / -.
Expr parse_expr(std::string_view raw, const LabelSet& known = {});

class UnitMismatch : public Error {
 public:
  using Error::Error;
};

// A value in SI base units together with its dimensions.
struct SiValue {
  double value = 0.0;
  units::Dimensions dims;

  friend bool operator==(const SiValue&, const SiValue&) = default;
};

SiValue to_si(const units::Quantity& q);
// Named unit when the dimensions have one, else the symbolic form.
units::Quantity from_si(const SiValue& v);

// Throws UnitMismatch, and std::out_of_range for an unbound variable.
SiValue evaluate(const Expr& e, const std::map<std::string, SiValue>& values);

using Binding = std::map<std::string, units::Quantity>;

// "area=1 cm^2, force=10N" (commas or semicolons). Labels are normalized.
// Throws std::invalid_argument on malformed entries.
Binding parse_bindings(std::string_view text);

class Unsolvable : public Error {
 public:
  explicit Unsolvable(std::vector<std::string> missing);
  const std::vector<std::string>& missing() const { return missing_; }

 private:
  std::vector<std::string> missing_;
};

class CyclicDefinition : public Error {
 public:
  explicit CyclicDefinition(std::vector<std::string> path);
  // First and last element are the same label.
  const std::vector<std::string>& path() const { return path_; }

 private:
  std::vector<std::string> path_;
};

class DepthLimitExceeded : public Error {
 public:
  explicit DepthLimitExceeded(std::size_t limit)
      : Error("expression chain deeper than " + std::to_string(limit)) {}
};

struct TraceStep {
  std::string entity;
  std::string expression;
  units::Quantity value;
};

struct Solution {
  units::Quantity value;
  SiValue si;
  std::vector<TraceStep> trace;  // evaluation order, dependencies first
  std::vector<std::string> warnings;
};

struct SolveOptions {
  std::size_t max_depth = 32;
};

// Backward chaining over hasExpression edges. A bound target is returned
// as given (converted to SI). Throws Unsolvable listing every variable that
// is neither bound nor defined, CyclicDefinition, UnitMismatch and
// DepthLimitExceeded.
Solution solve(std::string_view target, const Binding& bindings,
               const kg::KnowledgeGraph& graph, const SolveOptions& options = {});

// Formulas attached to the entity named `label`, in TripleId order.
std::vector<std::pair<kg::TripleId, std::string>> formulas_for(
    const kg::KnowledgeGraph& graph, const std::string& label);

nlohmann::json solution_to_json(const Solution& s);

}  // namespace fabkg::expr

#endif  // FABKG_EXPR_EXPR_H_
