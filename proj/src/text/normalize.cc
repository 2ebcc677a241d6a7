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

#include "fabkg/text/normalize.h"

#include <unicode/normalizer2.h>
#include <unicode/locid.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace fabkg::text {
namespace {

bool is_dash(UChar32 c) {
  return (c >= 0x2010 && c <= 0x2015) || c == 0x2212 || c == 0xFE58 ||
         c == 0xFE63 || c == 0xFF0D;
}

const icu::Normalizer2& nfc() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status) || n == nullptr) {
    throw std::runtime_error("ICU NFC normalizer unavailable");
  }
  return *n;
}

icu::UnicodeString to_nfc(const icu::UnicodeString& s) {
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString out = nfc().normalize(s, status);
  if (U_FAILURE(status)) return s;
  return out;
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string normalize_label(std::string_view s) {
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  u = to_nfc(u);
  u.toLower(icu::Locale::getRoot());
  u = to_nfc(u);

  icu::UnicodeString out;
  bool pending_space = false;
  for (int32_t i = 0; i < u.length();) {
    UChar32 c = u.char32At(i);
    i += U16_LENGTH(c);
    if (u_isUWhiteSpace(c)) {
      pending_space = !out.isEmpty();
      continue;
    }
    if (pending_space) {
      out.append(static_cast<UChar32>(' '));
      pending_space = false;
    }
    out.append(is_dash(c) ? static_cast<UChar32>('-') : c);
  }
  std::string result;
  out.toUTF8String(result);
  return result;
}

std::u32string to_code_points(std::string_view s) {
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  std::u32string out;
  out.reserve(static_cast<std::size_t>(u.length()));
  for (int32_t i = 0; i < u.length();) {
    UChar32 c = u.char32At(i);
    i += U16_LENGTH(c);
    out.push_back(static_cast<char32_t>(c));
  }
  return out;
}

std::string to_utf8(std::u32string_view s) {
  icu::UnicodeString u;
  for (char32_t c : s) u.append(static_cast<UChar32>(c));
  std::string out;
  u.toUTF8String(out);
  return out;
}

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t substitution = prev[j - 1] + (a[i - 1] != b[j - 1]);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, substitution});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  return levenshtein(to_code_points(a), to_code_points(b));
}

namespace {

bool linked(const std::u32string& a, const std::u32string& b,
            const Threshold& threshold) {
  if (a.size() < threshold.min_length || b.size() < threshold.min_length) {
    return false;
  }
  const std::size_t longest = std::max(a.size(), b.size());
  const std::size_t gap = longest - std::min(a.size(), b.size());
  if (gap > threshold.absolute) return false;
  const std::size_t d = levenshtein(a, b);
  return d <= threshold.absolute &&
         static_cast<double>(d) / static_cast<double>(longest) <=
             threshold.relative;
}

}  // namespace

bool are_variants(std::string_view a, std::string_view b,
                  const Threshold& threshold) {
  return linked(to_code_points(a), to_code_points(b), threshold);
}

std::vector<Cluster> cluster_variants(
    const std::map<std::string, std::size_t>& counts,
    const Threshold& threshold) {
  std::vector<std::string> labels;
  std::vector<std::u32string> points;
  labels.reserve(counts.size());
  for (const auto& [label, count] : counts) {
    labels.push_back(label);
    points.push_back(to_code_points(label));
  }

  // Visit pairs in length order so the length-gap test can stop early.
  std::vector<std::size_t> by_length(labels.size());
  std::iota(by_length.begin(), by_length.end(), 0);
  std::stable_sort(by_length.begin(), by_length.end(),
                   [&](std::size_t x, std::size_t y) {
                     return points[x].size() < points[y].size();
                   });
  DisjointSets sets(labels.size());
  for (std::size_t i = 0; i < by_length.size(); ++i) {
    const auto& a = points[by_length[i]];
    if (a.size() < threshold.min_length) continue;
    for (std::size_t j = i + 1; j < by_length.size(); ++j) {
      const auto& b = points[by_length[j]];
      if (b.size() - a.size() > threshold.absolute) break;
      if (linked(a, b, threshold)) sets.unite(by_length[i], by_length[j]);
    }
  }

  std::map<std::size_t, Cluster> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    groups[sets.find(i)].members.push_back(labels[i]);
  }
  std::vector<Cluster> clusters;
  clusters.reserve(groups.size());
  for (auto& [root, cluster] : groups) {
    // Members arrive in lexicographic order, so the first maximum wins ties.
    std::size_t best = 0;
    for (const std::string& m : cluster.members) {
      const std::size_t c = counts.at(m);
      if (c > best) {
        best = c;
        cluster.representative = m;
      }
    }
    clusters.push_back(std::move(cluster));
  }
  std::sort(clusters.begin(), clusters.end(),
            [](const Cluster& x, const Cluster& y) {
              return x.representative < y.representative;
            });
  return clusters;
}

std::vector<Cluster> cluster_variants(const std::vector<std::string>& labels,
                                      const Threshold& threshold) {
  std::map<std::string, std::size_t> counts;
  for (const std::string& label : labels) ++counts[label];
  return cluster_variants(counts, threshold);
}

std::string Vocabulary::canonical(std::string_view label) const {
  std::string n = normalize_label(label);
  if (terms.count(n)) return n;
  if (auto it = variant_map.find(n); it != variant_map.end()) return it->second;
  return "";
}

Vocabulary ingest_term_list(const std::vector<std::string>& lines,
                            Source source, Vocabulary vocab,
                            const Threshold& threshold) {
  std::set<std::string> batch;
  for (const std::string& raw : lines) {
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    std::string label = normalize_label(line);
    if (label.empty()) continue;
    ++vocab.surface_counts[label];
    batch.insert(std::move(label));
  }
  vocab.source_counts[source] += batch.size();

  vocab.terms.clear();
  vocab.variant_map.clear();
  for (const Cluster& c : cluster_variants(vocab.surface_counts, threshold)) {
    vocab.terms.insert(c.representative);
    for (const std::string& m : c.members) {
      if (m != c.representative) vocab.variant_map[m] = c.representative;
    }
  }
  return vocab;
}

}  // namespace fabkg::text
