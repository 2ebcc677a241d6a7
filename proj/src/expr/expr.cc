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

#include "fabkg/expr/expr.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "fabkg/format.h"
#include "fabkg/text/normalize.h"

namespace fabkg::expr {
namespace {

enum class Tok : std::uint8_t { kNumber, kWord, kOp, kEnd };

struct Token {
  Tok kind = Tok::kEnd;
  std::size_t pos = 0;
  char op = 0;          // + - * / ^ ( )
  double number = 0.0;
  std::string word;
};

bool starts_with(std::string_view s, std::size_t i, std::string_view prefix) {
  return s.substr(i, prefix.size()) == prefix;
}

// Multi-byte spellings of the operators.
std::optional<std::pair<char, std::size_t>> unicode_op(std::string_view s,
                                                       std::size_t i) {
  static const std::pair<std::string_view, char> kOps[] = {
      {"\xC3\x97", '*'}, {"\xC2\xB7", '*'}, {"\xC3\xB7", '/'},
      {"\xE2\x88\x92", '-'}, {"**", '^'}};
  for (const auto& [spelling, op] : kOps) {
    if (starts_with(s, i, spelling)) return std::make_pair(op, spelling.size());
  }
  return std::nullopt;
}

bool is_word_byte(unsigned char c) {
  return std::isalnum(c) || c == '_' || c == '\'' || c == '.' || c >= 0x80;
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (auto u = unicode_op(s, i)) {
      out.push_back({Tok::kOp, i, u->first, 0.0, {}});
      i += u->second;
      continue;
    }
    if (std::string_view("+-*/^()").find(static_cast<char>(c)) != std::string_view::npos) {
      out.push_back({Tok::kOp, i, static_cast<char>(c), 0.0, {}});
      ++i;
      continue;
    }
    if (!is_word_byte(c)) {
      throw SyntaxError(i, "unexpected character '" + std::string(1, s[i]) + "'");
    }
    const std::size_t start = i;
    if (std::isdigit(c) || (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      // Longest numeric prefix; a trailing letter makes the whole run a word
      // ("3d printing").
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      if (j < s.size() && s[j] == '.') {
        ++j;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      }
      if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
        if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
          while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
          j = k;
        }
      }
      if (j >= s.size() || !is_word_byte(static_cast<unsigned char>(s[j]))) {
        Token t{Tok::kNumber, start, 0, 0.0, {}};
        t.number = std::stod(std::string(s.substr(start, j - start)));
        out.push_back(std::move(t));
        i = j;
        continue;
      }
    }
    while (i < s.size() && is_word_byte(static_cast<unsigned char>(s[i])) &&
           !unicode_op(s, i)) {
      ++i;
    }
    out.push_back({Tok::kWord, start, 0, 0.0, std::string(s.substr(start, i - start))});
  }
  out.push_back({Tok::kEnd, s.size(), 0, 0.0, {}});
  return out;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, const LabelSet& known)
      : tokens_(std::move(tokens)), known_(known) {}

  Expr parse() {
    Expr e = sum();
    if (peek().kind != Tok::kEnd) fail(peek(), "expected an operator");
    return e;
  }

 private:
  const Token& peek() const { return tokens_[at_]; }
  bool is_op(char op) const { return peek().kind == Tok::kOp && peek().op == op; }

  [[noreturn]] void fail(const Token& t, const std::string& what) const {
    if (t.kind == Tok::kEnd) throw SyntaxError(t.pos, "unexpected end of formula");
    throw SyntaxError(t.pos, what);
  }

  Expr sum() {
    Expr lhs = product();
    while (is_op('+') || is_op('-')) {
      const Op op = peek().op == '+' ? Op::kAdd : Op::kSub;
      ++at_;
      lhs = Expr::binary(op, std::move(lhs), product());
    }
    return lhs;
  }

  Expr product() {
    Expr lhs = unary();
    while (is_op('*') || is_op('/')) {
      const Op op = peek().op == '*' ? Op::kMul : Op::kDiv;
      ++at_;
      lhs = Expr::binary(op, std::move(lhs), unary());
    }
    return lhs;
  }

  Expr unary() {
    if (is_op('-')) {
      ++at_;
      return Expr::negate(unary());
    }
    if (is_op('+')) {
      ++at_;
      return unary();
    }
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (is_op('^')) {
      ++at_;
      return Expr::binary(Op::kPow, std::move(base), unary());
    }
    return base;
  }

  Expr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::kNumber:
        ++at_;
        return Expr::constant(t.number);
      case Tok::kWord:
        return run();
      case Tok::kOp:
        if (t.op == '(') {
          ++at_;
          Expr inner = sum();
          if (!is_op(')')) fail(peek(), "expected ')'");
          ++at_;
          return inner;
        }
        fail(t, std::string("unexpected '") + t.op + "'");
      case Tok::kEnd:
        break;
    }
    fail(t, "unexpected end of formula");
  }

  // Consecutive words. Split into known labels by longest match when the
  // whole run can be covered, else keep it as one variable.
  Expr run() {
    std::vector<std::string> words;
    while (peek().kind == Tok::kWord) words.push_back(tokens_[at_++].word);
    auto join = [&](std::size_t from, std::size_t to) {
      std::string s;
      for (std::size_t k = from; k < to; ++k) {
        if (!s.empty()) s += ' ';
        s += words[k];
      }
      return text::normalize_label(s);
    };
    std::vector<std::string> pieces;
    if (known_ && words.size() > 1) {
      std::size_t i = 0;
      while (i < words.size()) {
        std::size_t j = words.size();
        while (j > i && !known_(join(i, j))) --j;
        if (j == i) {
          pieces.clear();
          break;
        }
        pieces.push_back(join(i, j));
        i = j;
      }
    }
    if (pieces.empty()) return Expr::variable(join(0, words.size()));
    Expr e = Expr::variable(pieces[0]);
    for (std::size_t k = 1; k < pieces.size(); ++k) {
      e = Expr::binary(Op::kMul, std::move(e), Expr::variable(pieces[k]));
    }
    return e;
  }

  std::vector<Token> tokens_;
  const LabelSet& known_;
  std::size_t at_ = 0;
};

char op_symbol(Op op) {
  switch (op) {
    case Op::kAdd:
      return '+';
    case Op::kSub:
      return '-';
    case Op::kMul:
      return '*';
    case Op::kDiv:
      return '/';
    case Op::kPow:
      return '^';
    default:
      return '?';
  }
}

void collect_variables(const Expr& e, std::vector<std::string>& out) {
  if (e.op == Op::kVar) {
    if (std::find(out.begin(), out.end(), e.name) == out.end()) out.push_back(e.name);
    return;
  }
  for (const Expr& a : e.args) collect_variables(a, out);
}

std::string describe(const units::Dimensions& d) {
  std::string s = units::format_dimensions(d);
  return s.empty() ? "dimensionless" : s;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string join_labels(const std::vector<std::string>& v, std::string_view sep) {
  std::string out;
  for (const std::string& s : v) {
    if (!out.empty()) out += sep;
    out += s;
  }
  return out;
}

class Solver {
 public:
  Solver(const kg::KnowledgeGraph& graph, const Binding& bindings,
         const SolveOptions& options)
      : graph_(graph), options_(options) {
    for (const auto& [label, q] : bindings) {
      bound_[text::normalize_label(label)] = to_si(q);
    }
    known_ = [this](const std::string& label) {
      return bound_.count(label) > 0 || !graph_.find_all(label).empty();
    };
  }

  Solution run(const std::string& target) {
    std::optional<SiValue> v = solve(target, 0);
    if (!v) throw Unsolvable({missing_.begin(), missing_.end()});
    Solution s;
    s.si = *v;
    s.value = from_si(*v);
    s.trace = std::move(trace_);
    s.warnings = std::move(warnings_);
    return s;
  }

 private:
  struct Formula {
    std::string text;
    std::optional<Expr> expr;
  };

  std::vector<Formula> formulas(const std::string& label) const {
    std::vector<Formula> out;
    for (const auto& [id, f] : formulas_for(graph_, label)) {
      Formula formula{f, std::nullopt};
      try {
        formula.expr = parse_expr(f, known_);
      } catch (const SyntaxError&) {
      }
      out.push_back(std::move(formula));
    }
    return out;
  }

  bool solvable(const std::string& label, std::set<std::string>& visiting) const {
    if (bound_.count(label) || memo_.count(label)) return true;
    if (visiting.count(label) || visiting.size() > options_.max_depth) return false;
    visiting.insert(label);
    bool ok = false;
    for (const Formula& f : formulas(label)) {
      if (!f.expr) continue;
      ok = true;
      for (const std::string& v : variables(*f.expr)) {
        if (!solvable(v, visiting)) {
          ok = false;
          break;
        }
      }
      if (ok) break;
    }
    visiting.erase(label);
    return ok;
  }

  std::optional<SiValue> solve(const std::string& label, std::size_t depth) {
    if (auto it = bound_.find(label); it != bound_.end()) return it->second;
    if (auto it = memo_.find(label); it != memo_.end()) return it->second;
    if (auto it = std::find(stack_.begin(), stack_.end(), label); it != stack_.end()) {
      std::vector<std::string> path(it, stack_.end());
      path.push_back(label);
      throw CyclicDefinition(std::move(path));
    }
    if (depth >= options_.max_depth) throw DepthLimitExceeded(options_.max_depth);

    std::vector<Formula> candidates = formulas(label);
    if (candidates.empty()) {
      missing_.insert(label);
      return std::nullopt;
    }
    std::size_t pick = 0;
    if (candidates.size() > 1) {
      for (std::size_t k = 0; k < candidates.size(); ++k) {
        std::set<std::string> visiting(stack_.begin(), stack_.end());
        visiting.insert(label);
        bool ok = candidates[k].expr.has_value();
        if (ok) {
          for (const std::string& v : variables(*candidates[k].expr)) {
            if (!solvable(v, visiting)) {
              ok = false;
              break;
            }
          }
        }
        if (ok) {
          pick = k;
          break;
        }
      }
      warnings_.push_back(label + " has " + std::to_string(candidates.size()) +
                          " formulas; using '" + candidates[pick].text + "'");
    }
    const Formula& chosen = candidates[pick];
    if (!chosen.expr) parse_expr(chosen.text, known_);  // rethrows the error

    stack_.push_back(label);
    std::map<std::string, SiValue> values;
    bool complete = true;
    for (const std::string& v : variables(*chosen.expr)) {
      if (auto value = solve(v, depth + 1)) {
        values[v] = *value;
      } else {
        complete = false;
      }
    }
    stack_.pop_back();
    if (!complete) return std::nullopt;

    SiValue result = evaluate(*chosen.expr, values);
    memo_[label] = result;
    trace_.push_back({label, chosen.text, from_si(result)});
    return result;
  }

  const kg::KnowledgeGraph& graph_;
  SolveOptions options_;
  std::map<std::string, SiValue> bound_;
  LabelSet known_;
  std::map<std::string, SiValue> memo_;
  std::vector<std::string> stack_;
  std::set<std::string> missing_;
  std::vector<TraceStep> trace_;
  std::vector<std::string> warnings_;
};

}  // namespace

Expr Expr::constant(double v) {
  Expr e;
  e.op = Op::kConst;
  e.value = v;
  return e;
}

Expr Expr::variable(std::string_view label) {
  Expr e;
  e.op = Op::kVar;
  e.name = text::normalize_label(label);
  return e;
}

Expr Expr::binary(Op op, Expr lhs, Expr rhs) {
  if (op == Op::kConst || op == Op::kVar || op == Op::kNeg) {
    throw std::invalid_argument("not a binary operator");
  }
  Expr e;
  e.op = op;
  e.args.push_back(std::move(lhs));
  e.args.push_back(std::move(rhs));
  return e;
}

Expr Expr::negate(Expr operand) {
  Expr e;
  e.op = Op::kNeg;
  e.args.push_back(std::move(operand));
  return e;
}

std::string to_string(const Expr& e) {
  switch (e.op) {
    case Op::kConst:
      return format_number(e.value);
    case Op::kVar:
      return e.name;
    case Op::kNeg:
      return "(-" + to_string(e.args[0]) + ")";
    default:
      return "(" + to_string(e.args[0]) + " " + op_symbol(e.op) + " " +
             to_string(e.args[1]) + ")";
  }
}

std::vector<std::string> variables(const Expr& e) {
  std::vector<std::string> out;
  collect_variables(e, out);
  return out;
}

Expr parse_expr(std::string_view raw, const LabelSet& known) {
  if (trim(raw).empty()) throw SyntaxError(raw.size(), "empty formula");
  return Parser(tokenize(raw), known).parse();
}

SiValue to_si(const units::Quantity& q) {
  std::optional<units::Unit> unit = units::parse_unit(q.unit);
  if (!unit) throw units::UnknownUnit(q.unit);
  if (!std::isfinite(q.value)) throw std::invalid_argument("quantity is not finite");
  return {q.value * unit->factor, unit->dims};
}

units::Quantity from_si(const SiValue& v) {
  if (auto name = units::named_unit(v.dims)) return {v.value, *name};
  return {v.value, units::format_dimensions(v.dims)};
}

SiValue evaluate(const Expr& e, const std::map<std::string, SiValue>& values) {
  SiValue out;
  switch (e.op) {
    case Op::kConst:
      return {e.value, {}};
    case Op::kVar:
      return values.at(e.name);
    case Op::kNeg: {
      out = evaluate(e.args[0], values);
      out.value = -out.value;
      return out;
    }
    default:
      break;
  }
  const SiValue a = evaluate(e.args[0], values);
  const SiValue b = evaluate(e.args[1], values);
  switch (e.op) {
    case Op::kAdd:
    case Op::kSub:
      if (a.dims != b.dims) {
        throw UnitMismatch("cannot " + std::string(e.op == Op::kAdd ? "add " : "subtract ") +
                           describe(b.dims) + (e.op == Op::kAdd ? " to " : " from ") +
                           describe(a.dims));
      }
      out = {e.op == Op::kAdd ? a.value + b.value : a.value - b.value, a.dims};
      break;
    case Op::kMul:
      out = {a.value * b.value, units::multiply(a.dims, b.dims)};
      break;
    case Op::kDiv:
      out = {a.value / b.value, units::divide(a.dims, b.dims)};
      break;
    case Op::kPow: {
      if (!b.dims.empty()) throw UnitMismatch("exponent must be dimensionless");
      if (!a.dims.empty()) {
        const double n = std::round(b.value);
        if (n != b.value || std::abs(n) > 64) {
          throw UnitMismatch("non-integer power of " + describe(a.dims));
        }
        out.dims = units::power(a.dims, static_cast<int>(n));
      }
      out.value = std::pow(a.value, b.value);
      break;
    }
    default:
      break;
  }
  if (!std::isfinite(out.value)) throw Error("result of " + to_string(e) + " is not finite");
  return out;
}

Binding parse_bindings(std::string_view text) {
  Binding out;
  std::string entry;
  std::string all(text);
  std::replace(all.begin(), all.end(), ';', ',');
  std::istringstream parts(all);
  while (std::getline(parts, entry, ',')) {
    if (trim(entry).empty()) continue;
    const auto eq = entry.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("expected label=value in '" + trim(entry) + "'");
    }
    const std::string label = text::normalize_label(entry.substr(0, eq));
    const std::string value = trim(entry.substr(eq + 1));
    auto q = units::parse_quantity(value);
    if (label.empty() || !q) {
      throw std::invalid_argument("cannot read binding '" + trim(entry) + "'");
    }
    out[label] = *q;
  }
  return out;
}

Unsolvable::Unsolvable(std::vector<std::string> missing)
    : Error("no value or formula for: " + join_labels(missing, ", ")),
      missing_(std::move(missing)) {}

CyclicDefinition::CyclicDefinition(std::vector<std::string> path)
    : Error("cyclic definition: " + join_labels(path, " -> ")), path_(std::move(path)) {}

Solution solve(std::string_view target, const Binding& bindings,
               const kg::KnowledgeGraph& graph, const SolveOptions& options) {
  const std::string label = text::normalize_label(target);
  if (label.empty()) throw std::invalid_argument("target is empty");
  return Solver(graph, bindings, options).run(label);
}

std::vector<std::pair<kg::TripleId, std::string>> formulas_for(
    const kg::KnowledgeGraph& graph, const std::string& label) {
  static const std::set<std::string> kHasExpression = {"hasExpression"};
  std::vector<std::pair<kg::TripleId, std::string>> out;
  for (kg::EntityId id : graph.find_all(label)) {
    for (const kg::Triple* t : graph.neighbors(id, kg::Direction::kForward, kHasExpression)) {
      const kg::Literal* lit = t->object_literal();
      if (t->subject == id && lit && lit->kind == kg::LiteralKind::kExpressionRef) {
        out.emplace_back(t->id, lit->text);
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

nlohmann::json solution_to_json(const Solution& s) {
  nlohmann::json j;
  j["value"] = s.value.value;
  j["unit"] = s.value.unit;
  nlohmann::json trace = nlohmann::json::array();
  for (const TraceStep& step : s.trace) {
    trace.push_back({{"entity", step.entity},
                     {"expression", step.expression},
                     {"value", step.value.value},
                     {"unit", step.value.unit}});
  }
  j["trace"] = trace;
  j["warnings"] = s.warnings;
  return j;
}

}  // namespace fabkg::expr
