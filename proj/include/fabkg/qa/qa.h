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

#ifndef FABKG_QA_QA_H_
#define FABKG_QA_QA_H_

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fabkg/error.h"
#include "fabkg/kg/graph.h"
#include "json.hpp"

namespace fabkg::qa {

enum class Template : std::uint8_t {
  kWhichXUsedForY,
  kComparatorMoreLess,
  kCompositionOfXInY,
  kWhichXofCategoryForY,
  kValueOfPropertyForX,
  kUnrecognized
};

std::string_view template_name(Template t);

// Slot names per template:
//   WhichXofCategoryForY  category, purpose
//   WhichXUsedForY        category, operation
//   ComparatorMoreLess    property, a, b, direction ("more" or "less"),
//                         optionally category
//   CompositionOfXInY     component, mixture
//   ValueOfPropertyForX   property, entity
struct ParsedQuestion {
  Template kind = Template::kUnrecognized;
  std::map<std::string, std::string> slots;

  bool recognized() const { return kind != Template::kUnrecognized; }
  friend bool operator==(const ParsedQuestion&, const ParsedQuestion&) = default;
};

// Throws std::invalid_argument on blank input.
ParsedQuestion parse_question(std::string_view text);

struct Candidate {
  kg::EntityId id;
  double score = 0.0;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

class NoAnswer : public Error {
 public:
  using Error::Error;
};

class NoCandidate : public NoAnswer {
 public:
  explicit NoCandidate(const std::string& surface)
      : NoAnswer("no entity resembles '" + surface + "'"), surface_(surface) {}
  const std::string& surface() const { return surface_; }

 private:
  std::string surface_;
};

class UnrecognizedQuestion : public NoAnswer {
 public:
  UnrecognizedQuestion() : NoAnswer("question matches no known template") {}
};

class AmbiguousEntity : public Error {
 public:
  AmbiguousEntity(const std::string& surface, std::vector<Candidate> tied)
      : Error("'" + surface + "' resolves to several entities equally well"),
        surface_(surface),
        tied_(std::move(tied)) {}
  const std::string& surface() const { return surface_; }
  const std::vector<Candidate>& tied() const { return tied_; }

 private:
  std::string surface_;
  std::vector<Candidate> tied_;
};

// Sparse term-frequency vector over character trigrams of " label ".
using TrigramVector = std::unordered_map<std::u32string, double>;

TrigramVector trigram_vector(std::string_view normalized_label);
double cosine(const TrigramVector& a, const TrigramVector& b);

class MentionResolver {
 public:
  virtual ~MentionResolver() = default;
  // Best `k` entities scoring at least `floor`, by descending score then id.
  // Throws NoCandidate when none qualifies.
  virtual std::vector<Candidate> resolve(std::string_view surface, std::size_t k,
                                         double floor) const = 0;
  // Similarity of two free-text strings on the same scale.
  virtual double similarity(std::string_view a, std::string_view b) const = 0;
};

// Scores an entity by its best-matching label or alias.
class TrigramResolver : public MentionResolver {
 public:
  explicit TrigramResolver(const kg::KnowledgeGraph& graph);

  std::vector<Candidate> resolve(std::string_view surface, std::size_t k,
                                 double floor) const override;
  double similarity(std::string_view a, std::string_view b) const override;

  // Multiplies every stored vector by `factor` (> 0).
  void scale(double factor);

 private:
  struct Name {
    kg::EntityId entity;
    TrigramVector vector;
  };
  std::vector<Name> names_;
};

std::vector<Candidate> resolve_mention(std::string_view surface,
                                       const kg::KnowledgeGraph& graph,
                                       std::size_t k = 5, double floor = 0.4);

struct QaOptions {
  std::size_t top_k = 5;
  double min_similarity = 0.4;
  double ambiguity_epsilon = 0.01;
};

struct Answer {
  Template kind = Template::kUnrecognized;
  std::vector<Candidate> entities;  // descending score
  std::vector<kg::TripleId> supporting_triples;
  std::optional<std::string> verdict;  // comparator questions
  std::vector<std::string> values;     // literal answers
};

class QaEngine {
 public:
  explicit QaEngine(const kg::KnowledgeGraph& graph, QaOptions options = {});
  QaEngine(const kg::KnowledgeGraph& graph,
           std::unique_ptr<MentionResolver> resolver, QaOptions options = {});

  // Throws NoAnswer (or a subclass) and AmbiguousEntity.
  // std::invalid_argument for an unrecognized question.
  Answer answer(const ParsedQuestion& q) const;
  // parse_question + answer; an unrecognized question throws
  // UnrecognizedQuestion.
  Answer ask(std::string_view text) const;

  const MentionResolver& resolver() const { return *resolver_; }

 private:
  Candidate resolve_one(const std::string& surface) const;
  Answer usage(const ParsedQuestion& q, const std::string& target_slot) const;
  Answer comparator(const ParsedQuestion& q) const;
  Answer qualified_value(const std::string& measured,
                         const std::string& context) const;

  const kg::KnowledgeGraph& graph_;
  std::unique_ptr<MentionResolver> resolver_;
  QaOptions options_;
};

Answer answer(const ParsedQuestion& q, const kg::KnowledgeGraph& graph);

nlohmann::json answer_to_json(const Answer& a, const kg::KnowledgeGraph& graph);

}  // namespace fabkg::qa

#endif  // FABKG_QA_QA_H_
