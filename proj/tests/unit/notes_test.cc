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

#include "fabkg/notes/notes.h"

#include <gtest/gtest.h>

#include <random>

#include "fabkg/kg/relations.h"
#include "golden.h"
#include "random_notes.h"

namespace fabkg::notes {
namespace {

const std::filesystem::path kNotesDir =
    std::filesystem::path(FABKG_FIXTURE_DIR) / "notes";

std::vector<std::string> point_texts(const Subtopic& s) {
  std::vector<std::string> out;
  for (const Point& p : s.points) out.push_back(p.text);
  return out;
}

bool has_diagnostic(const ParseResult& r, Severity severity,
                    std::string_view fragment) {
  for (const ParseDiagnostic& d : r.diagnostics) {
    if (d.severity == severity && d.message.find(fragment) != std::string::npos) {
      return true;
    }
  }
  return false;
}

TEST(ParseNotes, TwoSubtopicsOnOneLine) {
  ParseResult r = parse_notes(
      "# Ch1\nDefects: point defect; line defect ;; Crystal structure: BCC; FCC");
  EXPECT_TRUE(r.diagnostics.empty());
  ASSERT_EQ(r.document.chapters.size(), 1u);
  const Chapter& ch = r.document.chapters[0];
  EXPECT_EQ(ch.title, "Ch1");
  ASSERT_EQ(ch.subtopics.size(), 2u);
  EXPECT_EQ(ch.subtopics[0].name, "Defects");
  EXPECT_EQ(ch.subtopics[1].name, "Crystal structure");
  EXPECT_EQ(point_texts(ch.subtopics[0]),
            (std::vector<std::string>{"point defect", "line defect"}));
  EXPECT_EQ(point_texts(ch.subtopics[1]), (std::vector<std::string>{"BCC", "FCC"}));
}

TEST(ParseNotes, BracketedAttribute) {
  ParseResult r = parse_notes("# Ch1\nDefects: displaced ion (Frenkel defect)");
  const auto& points = r.document.chapters.at(0).subtopics.at(0).points;
  ASSERT_EQ(points.size(), 1u);
  EXPECT_EQ(points[0].text, "displaced ion");
  EXPECT_EQ(points[0].attributes, (std::vector<std::string>{"Frenkel defect"}));
}

TEST(ParseNotes, AttributesKeptVerbatim) {
  ParseResult r = parse_notes("# c\ns: p ( spaced;  text )");
  EXPECT_EQ(r.document.chapters[0].subtopics[0].points[0].attributes,
            (std::vector<std::string>{" spaced;  text "}));
}

TEST(ParseNotes, EmptyInput) {
  ParseResult r = parse_notes("");
  EXPECT_TRUE(r.document.chapters.empty());
  ASSERT_EQ(r.diagnostics.size(), 1u);
  EXPECT_EQ(r.diagnostics[0].severity, Severity::kError);
  EXPECT_EQ(r.diagnostics[0].message, "no chapter found");
}

TEST(ParseNotes, UnclosedBracketSkipsOnlyThatPoint) {
  ParseResult r = parse_notes("# c\nS: a (b; c\n");
  ASSERT_EQ(r.diagnostics.size(), 1u);
  EXPECT_EQ(r.diagnostics[0].line, 2u);
  EXPECT_EQ(r.diagnostics[0].column, 6u);
  EXPECT_EQ(r.diagnostics[0].message, "unclosed '('");
  EXPECT_EQ(point_texts(r.document.chapters[0].subtopics[0]),
            (std::vector<std::string>{"c"}));
}

TEST(ParseNotes, StrayClosingBracket) {
  ParseResult r = parse_notes("# c\nS: a) b; c");
  EXPECT_TRUE(has_diagnostic(r, Severity::kError, "unmatched ')'"));
  EXPECT_EQ(r.document.chapters[0].subtopics[0].points.size(), 1u);
}

TEST(ParseNotes, EmptySubtopicName) {
  ParseResult r = parse_notes("# c\n  : a; b ;; T: x");
  ASSERT_EQ(r.diagnostics.size(), 1u);
  EXPECT_EQ(r.diagnostics[0].column, 3u);
  EXPECT_EQ(r.diagnostics[0].message, "empty subtopic name");
  ASSERT_EQ(r.document.chapters[0].subtopics.size(), 1u);
  EXPECT_EQ(r.document.chapters[0].subtopics[0].name, "T");
}

TEST(ParseNotes, ContentBeforeFirstChapter) {
  ParseResult r = parse_notes("a: b\nc: d\n# ch\nx: y");
  ASSERT_EQ(r.diagnostics.size(), 1u);
  EXPECT_EQ(r.diagnostics[0].line, 1u);
  EXPECT_EQ(r.document.chapters.size(), 1u);
  EXPECT_TRUE(r.has_errors());
}

TEST(ParseNotes, NestedBracketsWarn) {
  ParseResult r = parse_notes("# c\nS: cell (cube (simple))");
  ASSERT_EQ(r.diagnostics.size(), 1u);
  EXPECT_EQ(r.diagnostics[0].severity, Severity::kWarning);
  EXPECT_EQ(r.diagnostics[0].column, 15u);
  EXPECT_EQ(r.document.chapters[0].subtopics[0].points[0].attributes,
            (std::vector<std::string>{"cube (simple)"}));
}

TEST(ParseNotes, RelationHints) {
  ParseResult r = parse_notes(
      "# c\nS: uses carbon; Used In welding; hasProperty hardness; includes; has value");
  const auto& p = r.document.chapters[0].subtopics[0].points;
  ASSERT_EQ(p.size(), 5u);
  EXPECT_EQ(p[0].relation_hint, "uses");
  EXPECT_EQ(p[0].text, "carbon");
  EXPECT_EQ(p[1].relation_hint, "usedIn");
  EXPECT_EQ(p[2].relation_hint, "hasProperty");
  EXPECT_FALSE(p[3].relation_hint);
  EXPECT_EQ(p[3].text, "includes");
  EXPECT_EQ(p[4].relation_hint, "has");
  EXPECT_EQ(p[4].text, "value");
}

TEST(ParseNotes, ChapterMarkersAndLineEndings) {
  ParseResult r = parse_notes("\xEF\xBB\xBF## Two\r\nS: a\r\n#\r\nT: b\n# Three");
  ASSERT_EQ(r.document.chapters.size(), 2u);
  EXPECT_EQ(r.document.chapters[0].title, "Two");
  EXPECT_EQ(r.document.chapters[0].subtopics.size(), 1u);
  EXPECT_TRUE(r.document.chapters[1].subtopics.empty());
  EXPECT_TRUE(has_diagnostic(r, Severity::kError, "empty chapter title"));
}

TEST(ExtractExpressions, Examples) {
  ParseResult r = parse_notes(
      "# f\nFormulas: strain = stress / youngs_modulus; "
      "measuring length = 0.5 * cutoff length; a == b (comparison)");
  EXPECT_EQ(extract_expressions(r.document),
            (std::vector<ExtractedExpression>{
                {"strain", "stress / youngs_modulus"},
                {"measuring length", "0.5 * cutoff length"}}));
}

TEST(ExtractExpressions, BracketsInRightHandSideKept) {
  ParseResult r = parse_notes("# f\nS: mrr (removal rate) = v * (f * d)");
  auto e = extract_expressions(r.document);
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(e[0].formula, "v * (f * d)");
  EXPECT_EQ(r.document.chapters[0].subtopics[0].points[0].attributes,
            (std::vector<std::string>{"removal rate"}));
}

TEST(ExtractExpressions, EmptySidesWarn) {
  ParseResult r = parse_notes("# f\nS: = x; y =");
  EXPECT_TRUE(has_diagnostic(r, Severity::kWarning, "empty left-hand side"));
  EXPECT_TRUE(has_diagnostic(r, Severity::kWarning, "empty right-hand side"));
  EXPECT_TRUE(extract_expressions(r.document).empty());
  EXPECT_FALSE(r.has_errors());
}

TEST(NotesToTriples, ReturnsEmittedIdsOnce) {
  kg::KnowledgeGraph g;
  ParseResult r = parse_notes("# c\nS: a; a; b\nS: a");
  auto ids = notes_to_triples(r.document, g);
  EXPECT_EQ(ids.size(), 3u);
  EXPECT_EQ(g.triples().size(), 3u);
}

class GoldenNotes : public ::testing::TestWithParam<std::filesystem::path> {};

TEST_P(GoldenNotes, CompilesToGoldenTriples) {
  const std::filesystem::path notes = GetParam();
  std::filesystem::path golden = notes;
  golden.replace_extension(".triples");
  ParseResult r = parse_notes(fabkg::testing::read_file(notes));
  kg::KnowledgeGraph g;
  notes_to_triples(r.document, g);
  EXPECT_EQ(fabkg::testing::golden_lines(g), fabkg::testing::read_golden(golden));
}

INSTANTIATE_TEST_SUITE_P(
    Fixtures, GoldenNotes,
    ::testing::ValuesIn(fabkg::testing::fixtures(kNotesDir, ".notes")),
    [](const auto& info) { return info.param.stem().string(); });

TEST(GoldenNotesCorpus, HasAtLeastTwentyFixtures) {
  EXPECT_GE(fabkg::testing::fixtures(kNotesDir, ".notes").size(), 20u);
}

TEST(NotesProperties, ParserIsTotalOnRandomUtf8) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 2000; ++i) {
    std::string text = i % 2 ? fabkg::testing::random_utf8(rng, 200)
                             : fabkg::testing::random_notes(rng);
    ParseResult r = parse_notes(text);
    for (const ParseDiagnostic& d : r.diagnostics) {
      ASSERT_GE(d.line, 1u);
      ASSERT_GE(d.column, 1u);
    }
    kg::KnowledgeGraph g;
    notes_to_triples(r.document, g);
  }
}

TEST(NotesProperties, PrettyPrintRoundTrips) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 3000; ++i) {
    const std::string text = fabkg::testing::random_notes(rng);
    const NotesDocument doc = parse_notes(text).document;
    const std::string printed = pretty_print(doc);
    ASSERT_EQ(parse_notes(printed).document, doc) << text << "\n--\n" << printed;
  }
}

TEST(NotesProperties, AddingAPointNeverRemovesTriples) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 500; ++i) {
    NotesDocument doc = parse_notes("# c\n" + fabkg::testing::random_notes(rng)).document;
    kg::KnowledgeGraph before;
    notes_to_triples(doc, before);
    NotesDocument extra = parse_notes("# c\nS: " + fabkg::testing::random_notes(rng, 1)).document;
    if (extra.chapters.empty() || extra.chapters[0].subtopics.empty() ||
        extra.chapters[0].subtopics[0].points.empty()) {
      continue;
    }
    Chapter& target = doc.chapters.back();
    if (target.subtopics.empty()) target.subtopics.push_back({"S", {}});
    target.subtopics.back().points.push_back(extra.chapters[0].subtopics[0].points[0]);
    kg::KnowledgeGraph after;
    notes_to_triples(doc, after);
    ASSERT_GE(after.triples().size(), before.triples().size());
  }
}

TEST(NotesProperties, HintsAreRegisteredNotesRelations) {
  const auto names = kg::notes_relation_names();
  const std::set<std::string> inventory(names.begin(), names.end());
  std::mt19937_64 rng(4);
  for (int i = 0; i < 1000; ++i) {
    ParseResult r = parse_notes(fabkg::testing::random_notes(rng));
    for (const Chapter& c : r.document.chapters) {
      for (const Subtopic& s : c.subtopics) {
        for (const Point& p : s.points) {
          if (p.relation_hint) ASSERT_TRUE(inventory.count(*p.relation_hint));
        }
      }
    }
  }
}

}  // namespace
}  // namespace fabkg::notes
