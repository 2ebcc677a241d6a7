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

#ifndef FABKG_TESTS_INLINE_EVAL_H_
#define FABKG_TESTS_INLINE_EVAL_H_

// Reference evaluator for formula chains. Works on text only: definitions
// are substituted into the target until nothing changes, then bound labels
// become SI numbers and a shunting-yard pass evaluates the result. Shares no
// code with the solver.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fabkg::testing {

inline double si_factor(const std::string& unit) {
  static const std::map<std::string, double> kTable = {
      {"", 1.0},      {"%", 0.01},     {"N", 1.0},    {"kN", 1e3},
      {"Pa", 1.0},    {"kPa", 1e3},    {"MPa", 1e6},  {"GPa", 1e9},
      {"m", 1.0},     {"cm", 1e-2},    {"mm", 1e-3},  {"cm^2", 1e-4},
      {"mm^2", 1e-6}, {"m^2", 1.0},    {"kg", 1.0},   {"m/s", 1.0},
      {"m/min", 1.0 / 60.0},           {"Hz", 1.0},   {"kg/m^3", 1.0}};
  return kTable.at(unit);
}

// "200 GPa" -> 2e11.
inline double si_number(const std::string& text) {
  std::istringstream in(text);
  double v = 0.0;
  in >> v;
  std::string unit;
  std::getline(in, unit);
  unit.erase(0, unit.find_first_not_of(' '));
  unit.erase(unit.find_last_not_of(' ') + 1);
  return v * si_factor(unit);
}

inline std::string lower_collapsed(const std::string& s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

// "Name: a = b; c = d" lines; the first definition of a label wins.
inline std::map<std::string, std::string> formulas_in_notes(const std::string& notes) {
  std::map<std::string, std::string> out;
  std::istringstream in(notes);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    std::stringstream points(line.substr(colon + 1));
    std::string point;
    while (std::getline(points, point, ';')) {
      auto eq = point.find('=');
      if (eq == std::string::npos) continue;
      out.emplace(lower_collapsed(point.substr(0, eq)), lower_collapsed(point.substr(eq + 1)));
    }
  }
  return out;
}

inline bool name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

inline std::string substitute(const std::string& text, const std::string& name,
                              const std::string& replacement) {
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t at = text.find(name, i);
    if (at == std::string::npos) break;
    const bool left_ok = at == 0 || !name_char(text[at - 1]);
    const std::size_t end = at + name.size();
    const bool right_ok = end >= text.size() || !name_char(text[end]);
    out += text.substr(i, at - i);
    out += left_ok && right_ok ? "(" + replacement + ")" : name;
    i = end;
  }
  out += text.substr(i);
  return out;
}

inline std::vector<std::string> longest_first(std::vector<std::string> names) {
  std::stable_sort(names.begin(), names.end(),
                   [](const std::string& a, const std::string& b) { return a.size() > b.size(); });
  return names;
}

inline std::string inline_target(const std::string& target,
                                 const std::map<std::string, std::string>& defs,
                                 const std::map<std::string, double>& given) {
  std::vector<std::string> def_names;
  for (const auto& [k, v] : defs) {
    if (!given.count(k)) def_names.push_back(k);
  }
  def_names = longest_first(def_names);
  std::string text = target;
  for (int round = 0;; ++round) {
    if (round > 64) throw std::runtime_error("substitution does not converge");
    std::string before = text;
    for (const std::string& n : def_names) text = substitute(text, n, defs.at(n));
    if (text == before) break;
  }
  std::vector<std::string> given_names;
  for (const auto& [k, v] : given) given_names.push_back(k);
  for (const std::string& n : longest_first(given_names)) {
    std::ostringstream num;
    num.precision(17);
    num << given.at(n);
    text = substitute(text, n, num.str());
  }
  return text;
}

// Shunting-yard over + - * / ^ ( ) and numbers; '~' is unary minus.
inline double evaluate_arithmetic(const std::string& text) {
  auto prec = [](char op) {
    switch (op) {
      case '+':
      case '-':
        return 1;
      case '*':
      case '/':
        return 2;
      case '~':
        return 3;
      case '^':
        return 4;
    }
    return 0;
  };
  auto right_assoc = [](char op) { return op == '^' || op == '~'; };
  std::vector<double> values;
  std::vector<char> ops;
  auto apply = [&]() {
    char op = ops.back();
    ops.pop_back();
    if (op == '~') {
      values.back() = -values.back();
      return;
    }
    double b = values.back();
    values.pop_back();
    double& a = values.back();
    switch (op) {
      case '+': a += b; break;
      case '-': a -= b; break;
      case '*': a *= b; break;
      case '/': a /= b; break;
      case '^': a = std::pow(a, b); break;
    }
  };
  bool expect_operand = true;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (expect_operand && (std::isdigit(static_cast<unsigned char>(c)) || c == '.')) {
      std::size_t used = 0;
      values.push_back(std::stod(text.substr(i), &used));
      i += used;
      expect_operand = false;
      continue;
    }
    if (c == '(') {
      ops.push_back(c);
      ++i;
      continue;
    }
    if (c == ')') {
      while (ops.back() != '(') apply();
      ops.pop_back();
      ++i;
      continue;
    }
    char op = c;
    if (c == '*' && i + 1 < text.size() && text[i + 1] == '*') {
      op = '^';
      ++i;
    }
    if (expect_operand) {
      if (c == '+') {
        ++i;
        continue;
      }
      if (c != '-') throw std::runtime_error("unexpected '" + std::string(1, c) + "'");
      op = '~';
    }
    while (!ops.empty() && ops.back() != '(' &&
           (prec(ops.back()) > prec(op) ||
            (prec(ops.back()) == prec(op) && !right_assoc(op)))) {
      apply();
    }
    ops.push_back(op);
    expect_operand = true;
    ++i;
  }
  while (!ops.empty()) apply();
  if (values.size() != 1) throw std::runtime_error("leftover operands in " + text);
  return values[0];
}

}  // namespace fabkg::testing

#endif  // FABKG_TESTS_INLINE_EVAL_H_
