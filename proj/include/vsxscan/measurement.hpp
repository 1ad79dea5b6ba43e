// Copyright 2026 The vsxscan Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VSXSCAN_MEASUREMENT_HPP_
#define VSXSCAN_MEASUREMENT_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "vsxscan/marketplace.hpp"
#include "vsxscan/report.hpp"

namespace vsxscan::measure {

using Reports = std::vector<scan::ExtensionReport>;

// ---- per-vector accounting ----------------------------------------------------

enum class ExposureGroup : uint8_t { kStorageAccess, kClipboardAccess, kCredentialControl };
std::string_view ExposureGroupName(ExposureGroup g);
ExposureGroup GroupOf(classify::Vector v);

struct VectorRow {
  classify::Vector vector = classify::Vector::kGlobalState;
  int users = 0;     // extensions with any data point of the vector
  int flagged = 0;   // extensions with a finding of the vector
  int findings = 0;
  double flagged_fraction = 0;  // flagged / users
  double mean_items = 0;        // findings / flagged
};

struct PerVectorTable {
  std::array<VectorRow, classify::kAllVectors.size()> rows{};
  std::array<int, 3> group_flagged{};  // indexed by ExposureGroup
  int total_extensions = 0;
  int flagged = 0;
  int total_findings = 0;
  double flagged_fraction = 0;
  double mean_items_per_flagged = 0;
};

PerVectorTable AggregatePerVector(const Reports& reports);

// ---- metadata joins ------------------------------------------------------------

struct CategoryRow {
  std::string category;
  int scanned = 0;
  int flagged = 0;
  double impacted_fraction = 0;
};

struct CategoryBreakdown {
  // Flagged count descending, then name. Categories nobody scanned are absent.
  std::vector<CategoryRow> rows;
  std::vector<std::string> missing_metadata;  // report ids absent from the snapshot
};

// An extension counts once in every category it lists; one without
// categories counts as "Other". With `strict`, a missing id raises
// Error(kMissingMetadata) instead of being listed.
CategoryBreakdown AggregateByCategory(const Reports& reports,
                                      const market::MetadataSnapshot& metadata,
                                      bool strict = false);

struct PopularityBucket {
  int64_t lower = 0;
  std::optional<int64_t> upper;  // exclusive; none for the last bucket
  int scanned = 0;
  int flagged = 0;
  double impacted_fraction = 0;

  bool Contains(int64_t installs) const {
    return installs >= lower && (!upper || installs < *upper);
  }
};

struct PopularityTable {
  std::vector<PopularityBucket> buckets;
  std::vector<std::string> missing_metadata;
};

// 1k, 10k, 100k, 1M.
std::vector<int64_t> DefaultBucketBounds();

// Buckets [0, b0), [b0, b1), ..., [bn, inf). Bounds must be positive and
// strictly increasing (Error(kUsage) otherwise).
std::vector<PopularityBucket> MakeBuckets(const std::vector<int64_t>& bounds);

PopularityTable AggregateByPopularity(
    const Reports& reports, const market::MetadataSnapshot& metadata,
    const std::vector<int64_t>& bounds = DefaultBucketBounds());

struct YearRow {
  int year = 0;
  int scanned = 0;
  int flagged = 0;
  double impacted_fraction = 0;
};

// Grouped by the year of published_date; undated entries are skipped.
std::vector<YearRow> AggregateByPublishedYear(const Reports& reports,
                                              const market::MetadataSnapshot& metadata);

// ---- exposed tokens ---------------------------------------------------------------

struct TokenCount {
  std::string token;
  int64_t count = 0;

  friend bool operator==(const TokenCount&, const TokenCount&) = default;
};

// Word tokens of every finding text (lowercased, split on separators, not on
// camelCase), count descending then token ascending.
std::vector<TokenCount> TokenFrequencies(const Reports& reports);
std::vector<TokenCount> TokenFrequencies(const std::vector<std::string>& texts);

// ---- AI coding assistants ------------------------------------------------------

std::vector<std::string> DefaultAiKeywords();

// Case-insensitive substring match on the description or any tag.
bool IsAiAssistant(const market::MarketplaceEntry& entry,
                   const std::vector<std::string>& keywords);
std::vector<market::MarketplaceEntry> SelectAiAssistants(
    const market::MetadataSnapshot& metadata,
    const std::vector<std::string>& keywords = DefaultAiKeywords());

struct SubsetSummary {
  int selected = 0;  // entries matched in the snapshot
  int scanned = 0;   // of those, with a report
  int flagged = 0;
  double flagged_fraction = 0;  // flagged / scanned
};

SubsetSummary SummarizeAiAssistants(
    const Reports& reports, const market::MetadataSnapshot& metadata,
    const std::vector<std::string>& keywords = DefaultAiKeywords());

// ---- confusable commands -------------------------------------------------------

struct HomoglyphTable {
  std::map<char32_t, char32_t> canonical;  // applied before case folding
  std::set<char32_t> invisible;            // dropped

  // Latin look-alikes: l/I/1/| to 'l', O/0 to 'o', common Cyrillic and Greek
  // twins of Latin letters; zero-width characters and the soft hyphen.
  static HomoglyphTable Default();
};

// Homoglyph-mapped, invisible-stripped, ASCII case-folded, whitespace
// collapsed.
std::string NormalizeLabel(std::string_view label, const HomoglyphTable& table);

// Levenshtein distance over code points.
int EditDistance(std::u32string_view a, std::u32string_view b);

struct CommandLabel {
  std::string extension_id;
  std::string label;  // "Category: Title" when a category is set

  friend bool operator==(const CommandLabel&, const CommandLabel&) = default;
};

struct ConfusablePair {
  std::string extension_a;  // extension_a < extension_b
  std::string label_a;
  std::string extension_b;
  std::string label_b;
  std::string normalized_form;  // of label_a
  int distance = 0;

  friend bool operator==(const ConfusablePair&, const ConfusablePair&) = default;
};

struct ConfusableOptions {
  int max_distance = 1;
  HomoglyphTable table = HomoglyphTable::Default();
};

std::string DisplayLabel(const ingest::CommandContribution& c);
std::vector<CommandLabel> CommandLabels(const Reports& reports);

// Pairs across different extensions, each once, sorted.
std::vector<ConfusablePair> DetectConfusableCommands(
    const std::vector<CommandLabel>& labels, const ConfusableOptions& options = {});

// ---- CSV tables ---------------------------------------------------------------------

std::string PerVectorCsv(const PerVectorTable& t);
std::string CategoryCsv(const CategoryBreakdown& t);
std::string PopularityCsv(const PopularityTable& t);
std::string TokenCsv(const std::vector<TokenCount>& t);
std::string ConfusableCsv(const std::vector<ConfusablePair>& t);
std::string YearCsv(const std::vector<YearRow>& t);

// Every *.json report bundle in `dir`, in file-name order.
Reports LoadReportDirectory(const std::filesystem::path& dir);

}  // namespace vsxscan::measure

#endif  // VSXSCAN_MEASUREMENT_HPP_
