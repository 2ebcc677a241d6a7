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

#include <algorithm>
#include <cctype>
#include <set>

#include "fabkg/kg/relations.h"
#include "fabkg/text/normalize.h"
#include "fabkg/units/units.h"

namespace fabkg::notes {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f';
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string collapse(std::string_view s) {
  std::string out;
  bool pending = false;
  for (char c : s) {
    if (is_space(c)) {
      pending = !out.empty();
      continue;
    }
    if (pending) out += ' ';
    pending = false;
    out += c;
  }
  return out;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// One body line with its bracket structure resolved. Only matched pairs
// count as brackets for splitting; unmatched ones are plain characters
// there and are reported when the enclosing point is parsed.
class Line {
 public:
  Line(std::string_view text, std::size_t number)
      : text_(text), number_(number), depth_(text.size(), 0) {
    std::vector<std::size_t> open;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (text[i] == '(') {
        open.push_back(i);
      } else if (text[i] == ')') {
        if (open.empty()) {
          unmatched_.push_back(i);
        } else {
          pairs.emplace_back(open.back(), i);
          open.pop_back();
        }
      }
    }
    unmatched_.insert(unmatched_.end(), open.begin(), open.end());
    std::sort(unmatched_.begin(), unmatched_.end());
    for (auto [a, b] : pairs) {
      for (std::size_t i = a; i <= b; ++i) ++depth_[i];
    }
    for (auto [a, b] : pairs) {
      if (depth_[a] == 1) top_pairs_.emplace_back(a, b);
      else nested_.push_back(a);
    }
    std::sort(top_pairs_.begin(), top_pairs_.end());
    std::sort(nested_.begin(), nested_.end());
  }

  std::string_view text() const { return text_; }
  std::size_t number() const { return number_; }
  bool top(std::size_t i) const { return depth_[i] == 0; }

  std::optional<std::size_t> first_unmatched(std::size_t b, std::size_t e) const {
    auto it = std::lower_bound(unmatched_.begin(), unmatched_.end(), b);
    if (it != unmatched_.end() && *it < e) return *it;
    return std::nullopt;
  }

  std::vector<std::size_t> nested_in(std::size_t b, std::size_t e) const {
    std::vector<std::size_t> out;
    for (std::size_t i : nested_) {
      if (i >= b && i < e) out.push_back(i);
    }
    return out;
  }

  // Top-level pairs fully inside [b, e).
  std::vector<std::pair<std::size_t, std::size_t>> pairs_in(std::size_t b,
                                                            std::size_t e) const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (auto p : top_pairs_) {
      if (p.first >= b && p.second < e) out.push_back(p);
    }
    return out;
  }

  // Finds `needle` at top level in [b, e).
  std::optional<std::size_t> find(std::string_view needle, std::size_t b,
                                  std::size_t e) const {
    for (std::size_t i = b; i + needle.size() <= e; ++i) {
      if (top(i) && text_.substr(i, needle.size()) == needle) return i;
    }
    return std::nullopt;
  }

  // Top-level '=' that is not part of ==, <=, >=, != or =>.
  std::optional<std::size_t> find_assignment(std::size_t b, std::size_t e) const {
    auto is_op = [](char c) {
      return c == '=' || c == '<' || c == '>' || c == '!';
    };
    for (std::size_t i = b; i < e; ++i) {
      if (!top(i) || text_[i] != '=') continue;
      const bool before = i > b && is_op(text_[i - 1]);
      const bool after = i + 1 < e && is_op(text_[i + 1]);
      if (!before && !after) return i;
    }
    return std::nullopt;
  }

 private:
  std::string_view text_;
  std::size_t number_;
  std::vector<int> depth_;
  std::vector<std::size_t> unmatched_;
  std::vector<std::pair<std::size_t, std::size_t>> top_pairs_;
  std::vector<std::size_t> nested_;
};

class Parser {
 public:
  ParseResult run(std::string_view text) {
    if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
    std::size_t number = 0;
    bool skipping_chapter = false;
    bool reported_orphan = false;
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      std::string_view raw = text.substr(start, end - start);
      ++number;
      start = end + 1;
      if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);

      std::string_view body = trim(raw);
      if (body.empty()) continue;
      const std::size_t indent = static_cast<std::size_t>(body.data() - raw.data());
      if (body.front() == '#') {
        std::string_view title = body;
        while (!title.empty() && title.front() == '#') title.remove_prefix(1);
        title = trim(title);
        if (title.empty()) {
          error(number, indent, "empty chapter title");
          skipping_chapter = true;
          continue;
        }
        skipping_chapter = false;
        result_.document.chapters.push_back({std::string(title), {}});
        continue;
      }
      if (skipping_chapter) continue;
      if (result_.document.chapters.empty()) {
        if (!reported_orphan) {
          error(number, indent, "content before the first chapter");
          reported_orphan = true;
        }
        continue;
      }
      parse_body(Line(raw, number));
    }
    if (result_.document.chapters.empty()) {
      error(1, 0, "no chapter found");
    }
    return std::move(result_);
  }

 private:
  void diag(Severity severity, std::size_t line, std::size_t offset,
            std::string message) {
    result_.diagnostics.push_back(
        {line, offset + 1, severity, std::move(message)});
  }
  void error(std::size_t line, std::size_t offset, std::string message) {
    diag(Severity::kError, line, offset, std::move(message));
  }
  void warning(std::size_t line, std::size_t offset, std::string message) {
    diag(Severity::kWarning, line, offset, std::move(message));
  }

  void parse_body(const Line& line) {
    for (std::size_t i : line.nested_in(0, line.text().size())) {
      warning(line.number(), i, "nested brackets are kept as text");
    }
    std::size_t b = 0;
    const std::size_t n = line.text().size();
    while (b <= n) {
      std::size_t e = line.find(";;", b, n).value_or(n);
      parse_subtopic(line, b, e);
      if (e == n) break;
      b = e + 2;
    }
  }

  void parse_subtopic(const Line& line, std::size_t b, std::size_t e) {
    std::string_view seg = line.text().substr(b, e - b);
    if (trim(seg).empty()) return;
    const std::size_t colon = line.find(":", b, e).value_or(e);
    std::string_view name = trim(line.text().substr(b, colon - b));
    const std::size_t name_at = first_non_space(line, b, e);
    if (name.empty()) {
      error(line.number(), name_at, "empty subtopic name");
      return;
    }
    if (auto bad = line.first_unmatched(b, colon)) {
      bracket_error(line, *bad);
      return;
    }
    Subtopic subtopic{std::string(name), {}};
    if (colon < e) {
      std::size_t pb = colon + 1;
      while (pb <= e) {
        std::size_t pe = line.find(";", pb, e).value_or(e);
        if (auto point = parse_point(line, pb, pe)) {
          subtopic.points.push_back(std::move(*point));
        }
        if (pe == e) break;
        pb = pe + 1;
      }
    }
    result_.document.chapters.back().subtopics.push_back(std::move(subtopic));
  }

  static std::size_t first_non_space(const Line& line, std::size_t b,
                                     std::size_t e) {
    while (b < e && is_space(line.text()[b])) ++b;
    return b;
  }

  void bracket_error(const Line& line, std::size_t at) {
    error(line.number(), at,
          line.text()[at] == '(' ? "unclosed '('" : "unmatched ')'");
  }

  // Text of [b, e) without its top-level bracket groups, whose inner text
  // is appended to `attributes`.
  static std::string strip(const Line& line, std::size_t b, std::size_t e,
                           std::vector<std::string>& attributes) {
    std::string rest;
    std::size_t at = b;
    for (auto [open, close] : line.pairs_in(b, e)) {
      rest.append(line.text().substr(at, open - at));
      rest += ' ';
      attributes.emplace_back(line.text().substr(open + 1, close - open - 1));
      at = close + 1;
    }
    rest.append(line.text().substr(at, e - at));
    return collapse(rest);
  }

  std::optional<Point> parse_point(const Line& line, std::size_t b,
                                   std::size_t e) {
    if (trim(line.text().substr(b, e - b)).empty()) return std::nullopt;
    const std::size_t at = first_non_space(line, b, e);
    if (auto bad = line.first_unmatched(b, e)) {
      bracket_error(line, *bad);
      return std::nullopt;
    }
    Point point;
    if (auto eq = line.find_assignment(b, e)) {
      std::string_view rhs = trim(line.text().substr(*eq + 1, e - *eq - 1));
      if (rhs.empty()) {
        warning(line.number(), *eq, "expression has an empty right-hand side");
        e = *eq;
        if (trim(line.text().substr(b, e - b)).empty()) return std::nullopt;
      } else {
        point.text = strip(line, b, *eq, point.attributes);
        if (point.text.empty()) {
          warning(line.number(), *eq, "expression has an empty left-hand side");
          return std::nullopt;
        }
        point.expression = std::string(rhs);
        return point;
      }
    }
    const std::size_t colon = line.find(":", b, e).value_or(e);
    std::string head = strip(line, b, colon, point.attributes);
    if (colon < e) {
      std::string detail = strip(line, colon + 1, e, point.attributes);
      if (!detail.empty()) point.detail = std::move(detail);
    }
    if (head.empty()) {
      error(line.number(), at, "point has no text outside brackets");
      return std::nullopt;
    }
    if (auto hint = split_relation_hint(head)) {
      point.relation_hint = std::move(hint->first);
      point.text = std::move(hint->second);
    } else {
      point.text = std::move(head);
    }
    return point;
  }

  ParseResult result_;
};

struct HintForm {
  std::string relation;
  std::vector<std::string> tokens;  // lowercase
};

// Both spellings of every notes relation: "usedIn" as one token and
// "used in" as two.
const std::vector<HintForm>& hint_forms() {
  static const std::vector<HintForm> forms = [] {
    std::vector<HintForm> out;
    for (const std::string& name : kg::notes_relation_names()) {
      out.push_back({name, {ascii_lower(name)}});
      std::vector<std::string> words(1);
      for (char c : name) {
        if (std::isupper(static_cast<unsigned char>(c)) && !words.back().empty()) {
          words.emplace_back();
        }
        words.back() += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      }
      if (words.size() > 1) out.push_back({name, std::move(words)});
    }
    return out;
  }();
  return forms;
}

std::vector<std::string_view> split_words(std::string_view s) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) words.push_back(s.substr(i, j - i));
    i = j;
  }
  return words;
}

std::optional<kg::EntityId> try_upsert(kg::KnowledgeGraph& graph,
                                       std::string_view label) {
  try {
    return graph.upsert_entity(label, std::nullopt, Source::kNotes);
  } catch (const kg::EmptyLabel&) {
    return std::nullopt;
  }
}

std::string attribute_text(const std::string& a) { return "(" + a + ")"; }

}  // namespace

bool ParseResult::has_errors() const {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const ParseDiagnostic& d) {
                       return d.severity == Severity::kError;
                     });
}

std::string_view severity_name(Severity s) {
  return s == Severity::kError ? "error" : "warning";
}

ParseResult parse_notes(std::string_view text) { return Parser().run(text); }

std::optional<std::pair<std::string, std::string>> split_relation_hint(
    std::string_view text) {
  const std::vector<std::string_view> words = split_words(text);
  const HintForm* best = nullptr;
  for (const HintForm& form : hint_forms()) {
    if (form.tokens.size() >= words.size()) continue;  // nothing would remain
    bool match = true;
    for (std::size_t i = 0; i < form.tokens.size() && match; ++i) {
      match = ascii_lower(words[i]) == form.tokens[i];
    }
    if (match && (!best || form.tokens.size() > best->tokens.size())) {
      best = &form;
    }
  }
  if (!best) return std::nullopt;
  std::string rest;
  for (std::size_t i = best->tokens.size(); i < words.size(); ++i) {
    if (!rest.empty()) rest += ' ';
    rest.append(words[i]);
  }
  return std::pair{best->relation, rest};
}

std::string pretty_print(const NotesDocument& doc) {
  std::string out;
  for (const Chapter& chapter : doc.chapters) {
    out += "# " + chapter.title + "\n";
    std::string line;
    for (const Subtopic& subtopic : chapter.subtopics) {
      // A leading '#' would read as a chapter marker.
      line += line.empty() ? (subtopic.name.front() == '#' ? ";; " : "") : " ;; ";
      line += subtopic.name;
      for (std::size_t i = 0; i < subtopic.points.size(); ++i) {
        const Point& p = subtopic.points[i];
        line += i == 0 ? ": " : "; ";
        if (p.relation_hint) line += *p.relation_hint + " ";
        line += p.text;
        if (p.expression) {
          for (const std::string& a : p.attributes) line += " " + attribute_text(a);
          line += " = " + *p.expression;
          continue;
        }
        if (p.detail) line += ": " + *p.detail;
        for (const std::string& a : p.attributes) line += " " + attribute_text(a);
      }
    }
    if (!line.empty()) out += line + "\n";
  }
  return out;
}

std::vector<kg::TripleId> notes_to_triples(const NotesDocument& doc,
                                           kg::KnowledgeGraph& graph) {
  std::vector<kg::TripleId> emitted;
  std::set<kg::TripleId> seen;
  auto emit = [&](kg::EntityId s, std::string_view rel, kg::Object o,
                  kg::Qualifiers q = {}) {
    if (const auto* e = std::get_if<kg::EntityId>(&o); e && *e == s) return;
    kg::TripleId id = graph.add_triple(s, rel, std::move(o), std::move(q),
                                       Source::kNotes).id;
    if (seen.insert(id).second) emitted.push_back(id);
  };

  for (const Chapter& chapter : doc.chapters) {
    auto c = try_upsert(graph, chapter.title);
    for (const Subtopic& subtopic : chapter.subtopics) {
      auto s = try_upsert(graph, subtopic.name);
      if (c && s) emit(*c, "includes", *s);
      for (const Point& point : subtopic.points) {
        auto h = try_upsert(graph, point.text);
        if (!h) continue;
        if (s) emit(*s, point.relation_hint.value_or("has"), *h);
        if (point.expression) {
          emit(*h, "hasExpression", kg::Literal::of_expression(*point.expression));
        }
        kg::Qualifiers context;
        if (point.detail && !point.attributes.empty()) {
          context["context"] = *point.detail;
        }
        for (const std::string& attribute : point.attributes) {
          if (auto q = units::parse_quantity(attribute)) {
            emit(*h, "hasValue", kg::Literal::of_quantity(q->value, q->unit),
                 context);
          } else if (auto a = try_upsert(graph, attribute)) {
            emit(*h, "alsoCalled", *a, context);
          }
        }
        if (point.detail && point.attributes.empty()) {
          std::string rel = "has";
          std::string target = *point.detail;
          if (auto hint = split_relation_hint(target)) {
            rel = hint->first;
            target = hint->second;
          }
          if (auto d = try_upsert(graph, target)) emit(*h, rel, *d);
        }
      }
    }
  }
  return emitted;
}

std::vector<ExtractedExpression> extract_expressions(const NotesDocument& doc) {
  std::vector<ExtractedExpression> out;
  for (const Chapter& chapter : doc.chapters) {
    for (const Subtopic& subtopic : chapter.subtopics) {
      for (const Point& point : subtopic.points) {
        if (point.expression) out.push_back({point.text, *point.expression});
      }
    }
  }
  return out;
}

}  // namespace fabkg::notes
