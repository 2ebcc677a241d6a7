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

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "fabkg/notes/notes.h"
#include "inline_eval.h"

namespace fabkg::expr {
namespace {

namespace fs = std::filesystem;
using kg::KnowledgeGraph;
using nlohmann::json;

KnowledgeGraph graph_from_notes(const std::string& text) {
  notes::ParseResult parsed = notes::parse_notes(text);
  EXPECT_FALSE(parsed.has_errors()) << text;
  KnowledgeGraph g;
  notes::notes_to_triples(parsed.document, g);
  return g;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Binding bind_given(const std::map<std::string, std::string>& given) {
  Binding b;
  for (const auto& [label, text] : given) {
    auto q = units::parse_quantity(text);
    if (!q) throw std::invalid_argument("bad quantity " + text);
    b[label] = *q;
  }
  return b;
}

void expect_rel(double actual, double expected, double tol = 1e-12) {
  EXPECT_LE(std::abs(actual - expected), tol * std::max(1.0, std::abs(expected)))
      << actual << " vs " << expected;
}

// Parsing

TEST(ParseExpr, DivisionOfTwoLabels) {
  Expr e = parse_expr("stress / youngs modulus");
  EXPECT_EQ(e, Expr::binary(Op::kDiv, Expr::variable("stress"),
                            Expr::variable("youngs modulus")));
  EXPECT_EQ(to_string(e), "(stress / youngs modulus)");
}

TEST(ParseExpr, ConstantTimesLabel) {
  Expr e = parse_expr("0.5 * cutoff length");
  EXPECT_EQ(e, Expr::binary(Op::kMul, Expr::constant(0.5), Expr::variable("cutoff length")));
}

TEST(ParseExpr, TrailingOperatorReportsEnd) {
  try {
    parse_expr("a +");
    FAIL() << "expected SyntaxError";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.position(), 3u);
  }
}

TEST(ParseExpr, ErrorPositions) {
  auto position = [](std::string_view s) -> std::size_t {
    try {
      parse_expr(s);
    } catch (const SyntaxError& e) {
      return e.position();
    }
    return std::string::npos;
  };
  EXPECT_EQ(position("(a + b"), 6u);
  EXPECT_EQ(position("a + * b"), 4u);
  EXPECT_EQ(position(""), 0u);
  EXPECT_EQ(position("a ) b"), 2u);
}

TEST(ParseExpr, Precedence) {
  EXPECT_EQ(to_string(parse_expr("1 + 2 * 3 ^ 2")), "(1 + (2 * (3 ^ 2)))");
  EXPECT_EQ(to_string(parse_expr("a - b - c")), "((a - b) - c)");
  EXPECT_EQ(to_string(parse_expr("a / b * c")), "((a / b) * c)");
  EXPECT_EQ(to_string(parse_expr("2 ^ 3 ^ 2")), "(2 ^ (3 ^ 2))");
}

TEST(ParseExpr, PowerBindsTighterThanUnaryMinus) {
  SiValue v = evaluate(parse_expr("-2 ^ 2"), {});
  EXPECT_DOUBLE_EQ(v.value, -4.0);
  EXPECT_DOUBLE_EQ(evaluate(parse_expr("2 ^ -1"), {}).value, 0.5);
  EXPECT_DOUBLE_EQ(evaluate(parse_expr("2 ^ 3 ^ 2"), {}).value, 512.0);
}

TEST(ParseExpr, AlternateOperatorSymbols) {
  EXPECT_EQ(parse_expr("a × b"), parse_expr("a * b"));
  EXPECT_EQ(parse_expr("a · b"), parse_expr("a * b"));
  EXPECT_EQ(parse_expr("a ÷ b"), parse_expr("a / b"));
  EXPECT_EQ(parse_expr("a − b"), parse_expr("a - b"));
  EXPECT_EQ(parse_expr("a ** 2"), parse_expr("a ^ 2"));
}

TEST(ParseExpr, LabelsAreNormalized) {
  EXPECT_EQ(parse_expr("Youngs   Modulus"), Expr::variable("youngs modulus"));
  EXPECT_EQ(variables(parse_expr("3d printing rate * 2")),
            std::vector<std::string>{"3d printing rate"});
}

TEST(ParseExpr, WordRunSplitsIntoKnownLabels) {
  std::set<std::string> labels{"feed rate", "depth of cut", "cutting speed"};
  LabelSet known = [&](const std::string& s) { return labels.count(s) > 0; };
  Expr e = parse_expr("feed rate depth of cut cutting speed", known);
  EXPECT_EQ(variables(e),
            (std::vector<std::string>{"feed rate", "depth of cut", "cutting speed"}));
  EXPECT_EQ(to_string(e), "((feed rate * depth of cut) * cutting speed)");
  // A run that cannot be covered stays one label.
  EXPECT_EQ(parse_expr("feed rate depth", known), Expr::variable("feed rate depth"));
}

TEST(ParseExpr, VariablesInFirstAppearanceOrder) {
  EXPECT_EQ(variables(parse_expr("b * a + b / c")), (std::vector<std::string>{"b", "a", "c"}));
}

// Units

TEST(Evaluate, ConvertsToSi) {
  SiValue area = to_si({1.0, "cm^2"});
  EXPECT_NEAR(area.value, 1e-4, 1e-18);
  EXPECT_EQ(from_si(area).unit, "m^2");
  SiValue e = to_si({200.0, "GPa"});
  EXPECT_DOUBLE_EQ(e.value, 2e11);
  EXPECT_EQ(from_si(e).unit, "Pa");
  EXPECT_EQ(from_si(to_si({10.0, "N"})), (units::Quantity{10.0, "N"}));
}

TEST(Evaluate, StressFromForceAndArea) {
  std::map<std::string, SiValue> vals{{"force", to_si({10.0, "N"})},
                                      {"area", to_si({1.0, "cm^2"})}};
  units::Quantity q = from_si(evaluate(parse_expr("force / area"), vals));
  EXPECT_EQ(q.unit, "Pa");
  expect_rel(q.value, 1e5);
}

TEST(Evaluate, AdditionNeedsMatchingDimensions) {
  std::map<std::string, SiValue> vals{{"force", to_si({10.0, "N"})},
                                      {"area", to_si({1.0, "cm^2"})}};
  EXPECT_THROW(evaluate(parse_expr("force + area"), vals), UnitMismatch);
  EXPECT_THROW(evaluate(parse_expr("force - 1"), vals), UnitMismatch);
  EXPECT_THROW(evaluate(parse_expr("2 ^ area"), vals), UnitMismatch);
  EXPECT_THROW(evaluate(parse_expr("area ^ 0.5"), vals), UnitMismatch);
  EXPECT_NO_THROW(evaluate(parse_expr("area ^ 2 + area * area"), vals));
}

TEST(Evaluate, NonFiniteResultThrows) {
  EXPECT_THROW(evaluate(parse_expr("1 / 0"), {}), Error);
}

TEST(Evaluate, UnboundVariable) {
  EXPECT_THROW(evaluate(parse_expr("x + 1"), {}), std::out_of_range);
}

TEST(ParseBindings, CommaAndSemicolon) {
  Binding b = parse_bindings("Area=1 cm^2, force = 10N; youngs modulus=200 GPa");
  EXPECT_EQ(b.size(), 3u);
  EXPECT_EQ(b.at("area"), (units::Quantity{1.0, "cm^2"}));
  EXPECT_EQ(b.at("force"), (units::Quantity{10.0, "N"}));
  EXPECT_THROW(parse_bindings("area"), std::invalid_argument);
  EXPECT_THROW(parse_bindings("area=fast"), std::invalid_argument);
  EXPECT_TRUE(parse_bindings("").empty());
}

// Fixture chains

struct FormulaCase {
  std::string name;
  fs::path notes;
  json spec;
};

std::vector<FormulaCase> formula_cases(bool errors) {
  std::vector<FormulaCase> out;
  for (const auto& entry : fs::directory_iterator(fs::path(FABKG_FIXTURE_DIR) / "formulas")) {
    if (entry.path().extension() != ".case") continue;
    fs::path notes = entry.path();
    notes.replace_extension(".notes");
    json spec = json::parse(slurp(entry.path()));
    if (spec.contains("error") != errors) continue;
    out.push_back({entry.path().stem().string(), notes, spec});
  }
  std::sort(out.begin(), out.end(),
            [](const FormulaCase& a, const FormulaCase& b) { return a.name < b.name; });
  return out;
}

class FormulaFixture : public ::testing::TestWithParam<FormulaCase> {};
class FormulaErrorFixture : public ::testing::TestWithParam<FormulaCase> {};

TEST_P(FormulaErrorFixture, FailsAsRecorded) {
  const FormulaCase& c = GetParam();
  KnowledgeGraph g = graph_from_notes(slurp(c.notes));
  Binding given = bind_given(c.spec.at("given").get<std::map<std::string, std::string>>());
  const std::string kind = c.spec.at("error");
  try {
    solve(c.spec.at("target").get<std::string>(), given, g);
    FAIL() << "expected " << kind;
  } catch (const CyclicDefinition& e) {
    EXPECT_EQ(kind, "CyclicDefinition");
    EXPECT_EQ(e.path(), c.spec.at("path").get<std::vector<std::string>>());
  } catch (const Unsolvable& e) {
    EXPECT_EQ(kind, "Unsolvable");
    EXPECT_EQ(e.missing(), c.spec.at("missing").get<std::vector<std::string>>());
  } catch (const UnitMismatch&) {
    EXPECT_EQ(kind, "UnitMismatch");
  }
}

TEST_P(FormulaFixture, SolvesAsRecorded) {
  const FormulaCase& c = GetParam();
  KnowledgeGraph g = graph_from_notes(slurp(c.notes));
  Binding given = bind_given(c.spec.at("given").get<std::map<std::string, std::string>>());
  const std::string target = c.spec.at("target");
  Solution s = solve(target, given, g);
  expect_rel(s.si.value, c.spec.at("expect").get<double>());
  EXPECT_EQ(s.value.unit, c.spec.at("unit").get<std::string>());
  if (c.spec.contains("trace")) {
    std::vector<std::string> labels;
    for (const TraceStep& step : s.trace) labels.push_back(step.entity);
    EXPECT_EQ(labels, c.spec.at("trace").get<std::vector<std::string>>());
  }
  ASSERT_FALSE(s.trace.empty());
  EXPECT_EQ(s.trace.back().entity, target);
}

TEST_P(FormulaFixture, AgreesWithTextualInliner) {
  const FormulaCase& c = GetParam();
  KnowledgeGraph g = graph_from_notes(slurp(c.notes));
  const auto given_text = c.spec.at("given").get<std::map<std::string, std::string>>();
  std::map<std::string, double> given_si;
  for (const auto& [k, v] : given_text) given_si[k] = testing::si_number(v);
  const std::string target = c.spec.at("target");
  std::string inlined =
      testing::inline_target(target, testing::formulas_in_notes(slurp(c.notes)), given_si);
  double reference = testing::evaluate_arithmetic(inlined);
  Solution s = solve(target, bind_given(given_text), g);
  expect_rel(s.si.value, reference);
}

TEST_P(FormulaFixture, TraceReplays) {
  const FormulaCase& c = GetParam();
  KnowledgeGraph g = graph_from_notes(slurp(c.notes));
  Binding given = bind_given(c.spec.at("given").get<std::map<std::string, std::string>>());
  Solution s = solve(c.spec.at("target").get<std::string>(), given, g);

  // Each step is computable from the bindings and the earlier steps alone.
  std::map<std::string, SiValue> known;
  for (const auto& [k, q] : given) known[k] = to_si(q);
  for (const TraceStep& step : s.trace) {
    LabelSet labels = [&](const std::string& l) { return !g.find_all(l).empty(); };
    SiValue v = evaluate(parse_expr(step.expression, labels), known);
    EXPECT_EQ(from_si(v).unit, step.value.unit) << step.entity;
    expect_rel(from_si(v).value, step.value.value);
    known[step.entity] = v;
  }
}

TEST_P(FormulaFixture, Deterministic) {
  const FormulaCase& c = GetParam();
  const std::string text = slurp(c.notes);
  Binding given = bind_given(c.spec.at("given").get<std::map<std::string, std::string>>());
  const std::string target = c.spec.at("target");
  json first = solution_to_json(solve(target, given, graph_from_notes(text)));
  json second = solution_to_json(solve(target, given, graph_from_notes(text)));
  EXPECT_EQ(first.dump(), second.dump());
}

auto case_name = [](const auto& info) { return info.param.name.substr(3); };
INSTANTIATE_TEST_SUITE_P(Chains, FormulaFixture, ::testing::ValuesIn(formula_cases(false)),
                         case_name);
INSTANTIATE_TEST_SUITE_P(Errors, FormulaErrorFixture, ::testing::ValuesIn(formula_cases(true)),
                         case_name);

TEST(FormulaFixtures, CoverAtLeastTenChains) {
  EXPECT_GE(formula_cases(false).size(), 10u);
}

// Solver behaviour

TEST(Solve, BoundTargetIsReturnedAsGiven) {
  KnowledgeGraph g = graph_from_notes("# M\nF: strain = stress / youngs modulus\n");
  Solution s = solve("strain", {{"strain", {0.5, ""}}}, g);
  EXPECT_DOUBLE_EQ(s.si.value, 0.5);
  EXPECT_TRUE(s.trace.empty());
}

TEST(Solve, ReportsEveryMissingInput) {
  KnowledgeGraph g = graph_from_notes("# M\nF: x = a + b * c; b = d / e\n");
  try {
    solve("x", {{"a", {1.0, ""}}}, g);
    FAIL();
  } catch (const Unsolvable& e) {
    EXPECT_EQ(e.missing(), (std::vector<std::string>{"c", "d", "e"}));
  }
}

TEST(Solve, UnknownTarget) {
  KnowledgeGraph g;
  try {
    solve("nothing", {}, g);
    FAIL();
  } catch (const Unsolvable& e) {
    EXPECT_EQ(e.missing(), std::vector<std::string>{"nothing"});
  }
}

TEST(Solve, CycleDetectedQuickly) {
  KnowledgeGraph g = graph_from_notes("# L\nD: p = q + 1; q = r * 2; r = p - 3\n");
  auto start = std::chrono::steady_clock::now();
  try {
    solve("p", {}, g);
    FAIL();
  } catch (const CyclicDefinition& e) {
    EXPECT_EQ(e.path(), (std::vector<std::string>{"p", "q", "r", "p"}));
  }
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::milliseconds(100));
}

TEST(Solve, BindingBreaksCycle) {
  KnowledgeGraph g = graph_from_notes("# L\nD: p = q + 1; q = r * 2; r = p - 3\n");
  Solution s = solve("p", {{"r", {4.0, ""}}}, g);
  EXPECT_DOUBLE_EQ(s.si.value, 9.0);
}

TEST(Solve, DepthLimit) {
  std::string notes = "# Deep\nChain: ";
  for (int i = 0; i < 40; ++i) {
    notes += "v" + std::to_string(i) + " = v" + std::to_string(i + 1) + " + 1; ";
  }
  notes += "v40 = 1\n";
  KnowledgeGraph g = graph_from_notes(notes);
  EXPECT_THROW(solve("v0", {}, g), DepthLimitExceeded);
  Solution s = solve("v0", {}, g, SolveOptions{64});
  EXPECT_DOUBLE_EQ(s.si.value, 41.0);
  EXPECT_EQ(s.trace.size(), 41u);
}

TEST(Solve, PicksFirstSolvableFormulaAndWarns) {
  KnowledgeGraph g = graph_from_notes(
      "# M\nF: stress = force / area; stress = youngs modulus * strain\n");
  Solution s = solve("stress", {{"youngs modulus", {200.0, "GPa"}}, {"strain", {1e-3, ""}}}, g);
  expect_rel(s.si.value, 2e8);
  EXPECT_EQ(s.value.unit, "Pa");
  ASSERT_EQ(s.warnings.size(), 1u);
  EXPECT_NE(s.warnings[0].find("youngs modulus * strain"), std::string::npos);

  Solution first = solve("stress", {{"force", {10.0, "N"}}, {"area", {1.0, "cm^2"}}}, g);
  expect_rel(first.si.value, 1e5);
}

TEST(Solve, SharedDependencyEvaluatedOnce) {
  KnowledgeGraph g = graph_from_notes("# M\nF: y = a * a + a; a = b + 1\n");
  Solution s = solve("y", {{"b", {2.0, ""}}}, g);
  EXPECT_DOUBLE_EQ(s.si.value, 12.0);
  ASSERT_EQ(s.trace.size(), 2u);
  EXPECT_EQ(s.trace[0].entity, "a");
}

TEST(Solve, JsonShape) {
  KnowledgeGraph g = graph_from_notes("# M\nF: stress = force / area\n");
  json j = solution_to_json(solve("stress", {{"force", {10.0, "N"}}, {"area", {1.0, "cm^2"}}}, g));
  EXPECT_EQ(j.at("unit"), "Pa");
  EXPECT_TRUE(j.at("trace").is_array());
  EXPECT_EQ(j.at("trace")[0].at("entity"), "stress");
  EXPECT_TRUE(j.at("warnings").empty());
}

// Random dimensionless chains checked against the textual inliner.
TEST(SolveProperty, RandomChainsMatchInliner) {
  std::mt19937 rng(11);
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  for (int round = 0; round < 300; ++round) {
    const int n = 1 + pick(6);
    const int leaves = 1 + pick(3);
    std::map<std::string, double> given;
    Binding binding;
    for (int i = 0; i < leaves; ++i) {
      double v = 0.5 + pick(40) / 8.0;
      given["g" + std::to_string(i)] = v;
      binding["g" + std::to_string(i)] = {v, ""};
    }
    auto operand = [&](int level) {
      int choice = pick(3);
      if (choice == 0 || level + 1 >= n) {
        if (pick(2) == 0) return "g" + std::to_string(pick(leaves));
        return std::to_string(1 + pick(9));
      }
      return "v" + std::to_string(level + 1 + pick(n - level - 1));
    };
    static const char* kOps[] = {" + ", " - ", " * ", " / "};
    std::string notes = "# Random\nChain: ";
    for (int i = 0; i < n; ++i) {
      std::string rhs = operand(i);
      const int terms = 1 + pick(3);
      for (int t = 0; t < terms; ++t) {
        std::string term = operand(i);
        if (pick(4) == 0) term = "(" + term + kOps[pick(4)] + operand(i) + ")";
        if (pick(5) == 0) term += " ^ 2";
        rhs += kOps[pick(4)] + term;
      }
      if (pick(6) == 0) rhs = "-" + rhs;
      notes += (i ? "; v" : "v") + std::to_string(i) + " = " + rhs;
    }
    notes += "\n";
    SCOPED_TRACE(notes);

    KnowledgeGraph g = graph_from_notes(notes);
    double reference = testing::evaluate_arithmetic(
        testing::inline_target("v0", testing::formulas_in_notes(notes), given));
    try {
      Solution s = solve("v0", binding, g);
      expect_rel(s.si.value, reference, 1e-9);
    } catch (const Error&) {
      // Only a non-finite intermediate may fail; the reference must hit one too.
      bool non_finite = !std::isfinite(reference);
      for (int i = 1; i < n; ++i) {
        non_finite = non_finite || !std::isfinite(testing::evaluate_arithmetic(testing::inline_target(
                                       "v" + std::to_string(i), testing::formulas_in_notes(notes), given)));
      }
      EXPECT_TRUE(non_finite);
    }
  }
}

}  // namespace
}  // namespace fabkg::expr
