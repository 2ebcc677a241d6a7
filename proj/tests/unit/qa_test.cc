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

#include "fabkg/qa/qa.h"

#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "fabkg/kg/graph_io.h"

namespace fabkg::qa {
namespace {

using kg::EntityId;
using kg::KnowledgeGraph;

KnowledgeGraph load_fixture() {
  std::ifstream in(std::filesystem::path(FABKG_FIXTURE_DIR) / "qa" / "graph.tsv");
  return kg::read_tsv(in);
}

std::string top_label(const KnowledgeGraph& g, const Answer& a) {
  return g.entity(a.entities.at(0).id).label;
}

using Slots = std::map<std::string, std::string>;

TEST(ParseQuestion, ToolGeometryForPlanning) {
  ParsedQuestion q = parse_question("Which tool geometry is used for planning?");
  EXPECT_EQ(q.kind, Template::kWhichXofCategoryForY);
  EXPECT_EQ(q.slots, (Slots{{"category", "tool geometry"}, {"purpose", "planning"}}));
}

TEST(ParseQuestion, ComparatorSlots) {
  ParsedQuestion q = parse_question("Which material has more hardness, cermet or alumina?");
  EXPECT_EQ(q.kind, Template::kComparatorMoreLess);
  EXPECT_EQ(q.slots, (Slots{{"category", "material"},
                            {"property", "hardness"},
                            {"a", "cermet"},
                            {"b", "alumina"},
                            {"direction", "more"}}));
  EXPECT_EQ(parse_question("Which has lower hardness, cermet or alumina")
                .slots.at("direction"),
            "less");
}

TEST(ParseQuestion, CompositionValueAndOperation) {
  ParsedQuestion c = parse_question("What is the composition of Tungsten in cast cobalt?");
  EXPECT_EQ(c.kind, Template::kCompositionOfXInY);
  EXPECT_EQ(c.slots, (Slots{{"component", "tungsten"}, {"mixture", "cast cobalt"}}));

  ParsedQuestion v = parse_question("What is the length to depth ratio for discontinuous fibers?");
  EXPECT_EQ(v.kind, Template::kValueOfPropertyForX);
  EXPECT_EQ(v.slots, (Slots{{"property", "length to depth ratio"},
                            {"entity", "discontinuous fibers"}}));

  ParsedQuestion d = parse_question(
      "Which nontraditional manufacturing process is used for coining operations?");
  EXPECT_EQ(d.kind, Template::kWhichXUsedForY);
  EXPECT_EQ(d.slots, (Slots{{"category", "nontraditional manufacturing process"},
                            {"operation", "coining"}}));
  EXPECT_EQ(parse_question("which tool is commonly used in the turning").slots,
            (Slots{{"category", "tool"}, {"operation", "turning"}}));
}

TEST(ParseQuestion, OutOfTemplateInputs) {
  const std::vector<std::string> inputs = {
      "hello",
      "Calculate the strain on the cylinder given the area 1 cm^2",
      "Who invented the lathe?",
      "Why does steel rust?",
      "List all materials",
      "Is cermet harder than alumina?",
      "How are gears made?",
      "Define annealing.",
      "What is welding?",
      "Which material has more hardness cermet or alumina?",
  };
  ASSERT_EQ(inputs.size(), 10u);
  for (const std::string& s : inputs) {
    EXPECT_EQ(parse_question(s).kind, Template::kUnrecognized) << s;
  }
  EXPECT_THROW(parse_question("  ?"), std::invalid_argument);
}

TEST(ResolveMention, IdenticalLabelScoresOne) {
  KnowledgeGraph g = load_fixture();
  auto c = resolve_mention("Frenkel defect", g);
  EXPECT_EQ(g.entity(c[0].id).label, "frenkel defect");
  EXPECT_EQ(c[0].score, 1.0);
}

TEST(ResolveMention, PluralMatchesStoredSingular) {
  KnowledgeGraph g = load_fixture();
  auto c = resolve_mention("frenkel defects", g);
  EXPECT_EQ(g.entity(c[0].id).label, "frenkel defect");
  // Reference value from tests/oracles/trigram_cosine.py.
  EXPECT_NEAR(c[0].score, 0.8970852271450606, 1e-12);
  for (const Candidate& x : c) {
    EXPECT_NE(g.entity(x.id).label, "schottky defect");  // 0.333 is below 0.4
  }
  bool found = false;
  for (const Candidate& x : resolve_mention("frenkel defects", g, 5, 0.3)) {
    if (g.entity(x.id).label == "schottky defect") {
      EXPECT_NEAR(x.score, 1.0 / 3.0, 1e-12);
      found = true;
    }
  }
  EXPECT_TRUE(found);
}

TEST(ResolveMention, NothingClearsTheFloor) {
  KnowledgeGraph g = load_fixture();
  EXPECT_THROW(resolve_mention("zzzz", g), NoCandidate);
  KnowledgeGraph empty;
  EXPECT_THROW(resolve_mention("steel", empty), NoCandidate);
}

TEST(ResolveMention, TopKAndOrdering) {
  KnowledgeGraph g = load_fixture();
  auto c = resolve_mention("machining", g, 2, 0.0);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_GE(c[0].score, c[1].score);
}

TEST(ResolveMention, AliasesCount) {
  KnowledgeGraph g;
  EntityId id = g.upsert_entity("electrical discharge machining", std::nullopt, Source::kNotes);
  g.add_alias(id, "EDM");
  auto c = resolve_mention("edm", g);
  EXPECT_EQ(c[0].id, id);
  EXPECT_EQ(c[0].score, 1.0);
}

TEST(ResolveMention, RankingSurvivesVectorScaling) {
  KnowledgeGraph g = load_fixture();
  TrigramResolver base(g);
  for (double factor : {1e-3, 0.5, 7.0, 1e6}) {
    TrigramResolver scaled(g);
    scaled.scale(factor);
    for (const char* s : {"frenkel defects", "tool", "cobalt", "fiber ratio", "coining"}) {
      auto x = base.resolve(s, 10, 0.0);
      auto y = scaled.resolve(s, 10, 0.0);
      ASSERT_EQ(x.size(), y.size());
      for (std::size_t i = 0; i < x.size(); ++i) {
        EXPECT_EQ(x[i].id, y[i].id) << s;
        EXPECT_NEAR(x[i].score, y[i].score, 1e-12);
      }
    }
  }
  EXPECT_THROW(base.scale(0.0), std::invalid_argument);
}

class FixtureQa : public ::testing::Test {
 protected:
  KnowledgeGraph g = load_fixture();
  QaEngine engine{g};
};

TEST_F(FixtureQa, ShapeA_ToolGeometryForPlanning) {
  Answer a = engine.ask("Which tool geometry is used for planning?");
  ASSERT_EQ(a.entities.size(), 1u);  // the lathe is a machine tool
  EXPECT_EQ(top_label(g, a), "tool signature");
  EXPECT_EQ(a.entities[0].score, 1.0);
}

TEST_F(FixtureQa, ShapeB_ComparatorAndInversion) {
  Answer more = engine.ask("Which material has more hardness, cermet or alumina?");
  EXPECT_EQ(more.verdict, "alumina");
  Answer less = engine.ask("Which material has less hardness, cermet or alumina?");
  EXPECT_EQ(less.verdict, "cermet");
  // The toughness edge is stored the other way round.
  EXPECT_EQ(engine.ask("Which material has more toughness, alumina or cermet?").verdict,
            "cermet");
  EXPECT_EQ(engine.ask("Which material has lower toughness, alumina or cermet?").verdict,
            "alumina");
  EXPECT_THROW(engine.ask("Which material has more density, alumina or cermet?"), NoAnswer);
}

TEST_F(FixtureQa, ShapeC_Composition) {
  Answer a = engine.ask("What is the composition of Tungsten in cast cobalt?");
  EXPECT_EQ(a.values, (std::vector<std::string>{"10-20 %"}));
  EXPECT_EQ(top_label(g, a), "tungsten");
}

TEST_F(FixtureQa, ShapeD_ProcessForCoining) {
  Answer a = engine.ask(
      "Which nontraditional manufacturing process is used for coining operations?");
  ASSERT_EQ(a.entities.size(), 1u);  // forging is a bulk deformation process
  EXPECT_EQ(top_label(g, a), "electrical discharge machining");
}

TEST_F(FixtureQa, ShapeE_PropertyValue) {
  Answer a = engine.ask("What is the length to depth ratio for discontinuous fibers?");
  EXPECT_EQ(a.values, (std::vector<std::string>{"20-60"}));
  EXPECT_THROW(engine.ask("What is the length to depth ratio for continuous fibers?"),
               NoAnswer);
}

TEST_F(FixtureQa, UnrecognizedQuestionThrows) {
  EXPECT_THROW(engine.ask("hello"), UnrecognizedQuestion);
  EXPECT_THROW(engine.answer(ParsedQuestion{}), std::invalid_argument);
}

TEST_F(FixtureQa, SupportingTriplesReplay) {
  const std::set<std::string> usage = {"uses", "usedTo", "usedIn", "usedFor", "Use"};
  for (const char* text : {"Which tool geometry is used for planning?",
                           "Which nontraditional manufacturing process is used in coining"}) {
    Answer a = engine.ask(text);
    std::set<EntityId> from_triples;
    for (kg::TripleId id : a.supporting_triples) {
      ASSERT_LT(id.value, g.triples().size());
      const kg::Triple& t = g.triple(id);
      if (usage.count(g.relation_name(t.relation))) from_triples.insert(t.subject);
    }
    std::set<EntityId> answered;
    for (const Candidate& c : a.entities) answered.insert(c.id);
    EXPECT_EQ(from_triples, answered) << text;
  }
  Answer v = engine.ask("What is the composition of tungsten in cast cobalt?");
  std::vector<std::string> replayed;
  for (kg::TripleId id : v.supporting_triples) {
    if (const kg::Literal* l = g.triple(id).object_literal()) replayed.push_back(l->display());
  }
  EXPECT_EQ(replayed, v.values);
}

TEST_F(FixtureQa, JsonShape) {
  nlohmann::json j =
      answer_to_json(engine.ask("Which material has more hardness, cermet or alumina?"), g);
  EXPECT_EQ(j["answer"], "alumina");
  EXPECT_EQ(j["template"], "ComparatorMoreLess");
  EXPECT_EQ(j["supporting_triples"][0]["qualifiers"]["property"], "hardness");
}

TEST(Qa, EmptyGraphHasNoAnswer) {
  KnowledgeGraph empty;
  EXPECT_THROW(answer(parse_question("Which tool geometry is used for planning?"), empty),
               NoAnswer);
}

TEST(Qa, TiedResolutionIsAmbiguous) {
  KnowledgeGraph g;
  EntityId s1 = g.create_entity("steel", Source::kWikidata);
  EntityId s2 = g.create_entity("steel", Source::kWikidata);
  g.add_triple(s1, "hasValue", kg::Literal::of_text("0.3 %"), {{"context", "carbon"}},
               Source::kNotes);
  g.upsert_entity("carbon", std::nullopt, Source::kNotes);
  try {
    QaEngine(g).ask("What is the composition of steel in carbon?");
    FAIL();
  } catch (const AmbiguousEntity& e) {
    EXPECT_EQ(e.tied(), (std::vector<Candidate>{{s1, 1.0}, {s2, 1.0}}));
  }
}

TEST(QaProperties, ComparatorAntisymmetry) {
  std::mt19937_64 rng(11);
  const std::vector<std::string> names = {"alumina", "cermet", "tungsten carbide",
                                          "high speed steel", "cubic boron nitride"};
  const std::vector<std::string> properties = {"hardness", "toughness", "density"};
  for (int i = 0; i < 200; ++i) {
    std::vector<std::string> pick = names;
    std::shuffle(pick.begin(), pick.end(), rng);
    KnowledgeGraph g;
    EntityId x = g.upsert_entity(pick[0], std::nullopt, Source::kManual);
    EntityId y = g.upsert_entity(pick[1], std::nullopt, Source::kManual);
    const std::string prop = properties[rng() % properties.size()];
    const bool greater = rng() % 2;
    g.add_triple(x, "hasComparator", y,
                 {{"property", prop}, {"polarity", greater ? "greater" : "less"}},
                 Source::kManual);
    const std::string bigger = greater ? pick[0] : pick[1];
    const std::string smaller = greater ? pick[1] : pick[0];
    // Ask with the pair in either order.
    const bool swap = rng() % 2;
    const std::string pair = swap ? pick[1] + " or " + pick[0] : pick[0] + " or " + pick[1];
    QaEngine engine(g);
    Answer more = engine.ask("Which material has more " + prop + ", " + pair + "?");
    Answer less = engine.ask("Which material has less " + prop + ", " + pair + "?");
    ASSERT_EQ(more.verdict, bigger);
    ASSERT_EQ(less.verdict, smaller);
  }
}

}  // namespace
}  // namespace fabkg::qa
