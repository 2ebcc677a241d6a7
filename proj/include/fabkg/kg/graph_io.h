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

#ifndef FABKG_KG_GRAPH_IO_H_
#define FABKG_KG_GRAPH_IO_H_

#include <istream>
#include <ostream>
#include <string>

#include "fabkg/error.h"
#include "fabkg/kg/graph.h"

namespace fabkg::kg {

class GraphFormatError : public Error {
 public:
  GraphFormatError(std::size_t line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// TSV with the header
//   subject_label  relation  object_label  qualifiers  source
// Three kinds of rows:
//   @relation rows declare non-default relations (object = origin,
//   qualifiers = {"pid": ...}).
//   @entity rows declare entities in id order (qualifiers hold the label,
//   aliases, categories and external ids as JSON).
//   Everything else is a triple. Objects are entity keys or literals written
//   "<value>"^^<kind> with kind one of text, number, quantity, expression.
// Entity keys are labels, suffixed with "|Q.." or "|#<id>" when several
// entities share a label. Backslash, tab, CR and LF are escaped.
void write_tsv(const KnowledgeGraph& graph, std::ostream& out);

// Reads write_tsv output. Hand-written files may omit @entity rows; unknown
// labels are then upserted. Throws GraphFormatError.
KnowledgeGraph read_tsv(std::istream& in);

// One "<subject> <relation> <object> ." line per triple, labels
// percent-encoded. Qualifiers are not represented.
void write_ntriples(const KnowledgeGraph& graph, std::ostream& out);

std::string percent_encode(std::string_view s);

// Unique export key per entity (see write_tsv).
std::vector<std::string> entity_keys(const KnowledgeGraph& graph);

}  // namespace fabkg::kg

#endif  // FABKG_KG_GRAPH_IO_H_
