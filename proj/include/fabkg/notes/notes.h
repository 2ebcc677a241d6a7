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

#ifndef FABKG_NOTES_NOTES_H_
#define FABKG_NOTES_NOTES_H_

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fabkg/kg/graph.h"

namespace fabkg::notes {

// One point of a subtopic. For "point defect: displaced ion (Frenkel defect)"
// the text is "point defect", the detail is "displaced ion" and the single
// attribute is "Frenkel defect".
struct Point {
  std::string text;
  // Canonical notes-relation name found at the start of the point.
  std::optional<std::string> relation_hint;
  // Inner text of each top-level (...) group, verbatim.
  std::vector<std::string> attributes;
  // Right-hand side of a "lhs = rhs" point, brackets kept.
  std::optional<std::string> expression;
  // Text after an inner ':' in a point.
  std::optional<std::string> detail;

  bool operator==(const Point&) const = default;
};

struct Subtopic {
  std::string name;
  std::vector<Point> points;

  bool operator==(const Subtopic&) const = default;
};

struct Chapter {
  std::string title;
  std::vector<Subtopic> subtopics;

  bool operator==(const Chapter&) const = default;
};

struct NotesDocument {
  std::vector<Chapter> chapters;

  bool operator==(const NotesDocument&) const = default;
};

enum class Severity { kWarning, kError };

struct ParseDiagnostic {
  std::size_t line = 0;    // 1-based
  std::size_t column = 0;  // 1-based, in bytes
  Severity severity = Severity::kError;
  std::string message;
};

struct ParseResult {
  NotesDocument document;
  std::vector<ParseDiagnostic> diagnostics;

  bool has_errors() const;
};

// Parses the notes notation. Never throws; malformed segments are reported
// and skipped.
//
//   # Chapter title
//   Subtopic: point; point (attribute) ;; Other subtopic: lhs = rhs
ParseResult parse_notes(std::string_view text);

// Renders a document back to notes notation. Parsing the output yields a
// document equal to `doc` for any document produced by parse_notes.
std::string pretty_print(const NotesDocument& doc);

// Detects a leading notes-relation keyword ("used in", "usedIn", "Uses").
// Returns the canonical relation name and the remaining text. A keyword only
// counts if some text follows it.
std::optional<std::pair<std::string, std::string>> split_relation_hint(
    std::string_view text);

// Compiles the document into `graph` and returns the ids of the emitted
// triples in emission order, without repeats.
std::vector<kg::TripleId> notes_to_triples(const NotesDocument& doc,
                                           kg::KnowledgeGraph& graph);

struct ExtractedExpression {
  std::string entity_label;
  std::string formula;

  bool operator==(const ExtractedExpression&) const = default;
};

std::vector<ExtractedExpression> extract_expressions(const NotesDocument& doc);

std::string_view severity_name(Severity s);

}  // namespace fabkg::notes

#endif  // FABKG_NOTES_NOTES_H_
