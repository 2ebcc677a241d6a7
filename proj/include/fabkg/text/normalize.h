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

#ifndef FABKG_TEXT_NORMALIZE_H_
#define FABKG_TEXT_NORMALIZE_H_

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "fabkg/source.h"

namespace fabkg::text {

// Lowercase, Unicode NFC, typographic dashes to '-', whitespace runs to a
// single space, trimmed. Idempotent. Invalid UTF-8 sequences become U+FFFD.
std::string normalize_label(std::string_view s);

// Decodes UTF-8 into Unicode scalar values (invalid bytes -> U+FFFD).
std::u32string to_code_points(std::string_view s);
std::string to_utf8(std::u32string_view s);

// Unit-cost edit distance over Unicode scalar values.
std::size_t levenshtein(std::string_view a, std::string_view b);
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);

struct Threshold {
  std::size_t absolute = 3;
  double relative = 0.15;
  // Labels shorter than this (in code points) never link.
  std::size_t min_length = 6;
};

// Whether two labels are spelling variants of each other under `threshold`.
bool are_variants(std::string_view a, std::string_view b,
                  const Threshold& threshold);

struct Cluster {
  std::string representative;
  std::vector<std::string> members;  // sorted, distinct, has representative
};

// Single-linkage clustering of `labels`. Duplicates in the input count as
// frequency when choosing the representative (most frequent, ties broken
// lexicographically). Clusters are ordered by representative.
std::vector<Cluster> cluster_variants(const std::vector<std::string>& labels,
                                      const Threshold& threshold = {});

// Same, with explicit frequencies per distinct label.
std::vector<Cluster> cluster_variants(
    const std::map<std::string, std::size_t>& counts,
    const Threshold& threshold);

// Deduplicated vocabulary of domain terms. Every surface form ever seen is
// kept with its frequency so later ingests can re-cluster.
struct Vocabulary {
  std::set<std::string> terms;
  std::map<std::string, std::string> variant_map;  // variant -> term
  std::map<Source, std::size_t> source_counts;
  std::map<std::string, std::size_t> surface_counts;

  // Canonical term for `label` (normalized first), or "" if unknown.
  std::string canonical(std::string_view label) const;
};

// Normalizes, drops blank and '#'-comment lines, and re-clusters the
// vocabulary with the new terms. source_counts[source] grows by the number
// of distinct normalized terms in `lines`.
Vocabulary ingest_term_list(const std::vector<std::string>& lines,
                            Source source, Vocabulary vocab,
                            const Threshold& threshold = {});

}  // namespace fabkg::text

#endif  // FABKG_TEXT_NORMALIZE_H_
