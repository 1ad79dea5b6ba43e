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

#include "vsxscan/measurement.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_map>

#include "vsxscan/error.hpp"
#include "vsxscan/text.hpp"

namespace vsxscan::measure {

namespace fs = std::filesystem;
using classify::Vector;

namespace {

double Ratio(int64_t num, int64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::string_view ExposureGroupName(ExposureGroup g) {
  switch (g) {
    case ExposureGroup::kStorageAccess: return "StorageAccess";
    case ExposureGroup::kClipboardAccess: return "ClipboardAccess";
    case ExposureGroup::kCredentialControl: return "CredentialControl";
  }
  return "?";
}

ExposureGroup GroupOf(Vector v) {
  switch (v) {
    case Vector::kGlobalState:
    case Vector::kRequestedConfiguration:
    case Vector::kUsedConfiguration:
      return ExposureGroup::kStorageAccess;
    case Vector::kInputBox:
      return ExposureGroup::kClipboardAccess;
    case Vector::kRequestedCommand:
    case Vector::kUsedCommand:
      return ExposureGroup::kCredentialControl;
  }
  return ExposureGroup::kStorageAccess;
}

PerVectorTable AggregatePerVector(const Reports& reports) {
  PerVectorTable t;
  for (Vector v : classify::kAllVectors) t.rows[static_cast<size_t>(v)].vector = v;
  t.total_extensions = static_cast<int>(reports.size());
  for (const scan::ExtensionReport& r : reports) {
    std::array<int, classify::kAllVectors.size()> n{};
    for (const scan::FindingRecord& f : r.findings) ++n[static_cast<size_t>(f.point.vector)];
    std::array<bool, 3> group{};
    for (size_t v = 0; v < n.size(); ++v) {
      VectorRow& row = t.rows[v];
      if (r.points_per_vector[v] > 0 || n[v] > 0) ++row.users;
      if (n[v] == 0) continue;
      ++row.flagged;
      row.findings += n[v];
      group[static_cast<size_t>(GroupOf(row.vector))] = true;
    }
    for (size_t g = 0; g < group.size(); ++g) t.group_flagged[g] += group[g] ? 1 : 0;
    if (r.flagged()) {
      ++t.flagged;
      t.total_findings += static_cast<int>(r.findings.size());
    }
  }
  for (VectorRow& row : t.rows) {
    row.flagged_fraction = Ratio(row.flagged, row.users);
    row.mean_items = Ratio(row.findings, row.flagged);
  }
  t.flagged_fraction = Ratio(t.flagged, t.total_extensions);
  t.mean_items_per_flagged = Ratio(t.total_findings, t.flagged);
  return t;
}

// ---- metadata joins ----------------------------------------------------------------

namespace {

template <typename F>
std::vector<std::string> Join(const Reports& reports,
                              const market::MetadataSnapshot& metadata, F&& each) {
  std::vector<std::string> missing;
  for (const scan::ExtensionReport& r : reports) {
    const market::MarketplaceEntry* e = metadata.Find(r.extension_id);
    if (e == nullptr) {
      missing.push_back(r.extension_id);
      continue;
    }
    each(r, *e);
  }
  return missing;
}

}  // namespace

CategoryBreakdown AggregateByCategory(const Reports& reports,
                                      const market::MetadataSnapshot& metadata,
                                      bool strict) {
  std::map<std::string, CategoryRow> rows;
  CategoryBreakdown out;
  out.missing_metadata = Join(reports, metadata, [&](const auto& r, const auto& e) {
    std::set<std::string> cats(e.categories.begin(), e.categories.end());
    if (cats.empty()) cats.insert("Other");
    for (const std::string& c : cats) {
      CategoryRow& row = rows[c];
      row.category = c;
      ++row.scanned;
      if (r.flagged()) ++row.flagged;
    }
  });
  if (strict && !out.missing_metadata.empty()) {
    throw Error(ErrorCode::kMissingMetadata,
                std::to_string(out.missing_metadata.size()) +
                    " reports have no metadata, first: " + out.missing_metadata.front());
  }
  for (auto& [name, row] : rows) {
    row.impacted_fraction = Ratio(row.flagged, row.scanned);
    out.rows.push_back(row);
  }
  std::stable_sort(out.rows.begin(), out.rows.end(),
                   [](const CategoryRow& a, const CategoryRow& b) {
                     return a.flagged > b.flagged;
                   });
  return out;
}

std::vector<int64_t> DefaultBucketBounds() { return {1000, 10000, 100000, 1000000}; }

std::vector<PopularityBucket> MakeBuckets(const std::vector<int64_t>& bounds) {
  std::vector<PopularityBucket> out;
  int64_t lower = 0;
  for (int64_t b : bounds) {
    if (b <= lower) {
      throw Error(ErrorCode::kUsage, "bucket bounds must be positive and increasing");
    }
    PopularityBucket p;
    p.lower = lower;
    p.upper = b;
    out.push_back(p);
    lower = b;
  }
  PopularityBucket last;
  last.lower = lower;
  out.push_back(last);
  return out;
}

PopularityTable AggregateByPopularity(const Reports& reports,
                                      const market::MetadataSnapshot& metadata,
                                      const std::vector<int64_t>& bounds) {
  PopularityTable t;
  t.buckets = MakeBuckets(bounds);
  t.missing_metadata = Join(reports, metadata, [&](const auto& r, const auto& e) {
    for (PopularityBucket& b : t.buckets) {
      if (!b.Contains(e.install_count)) continue;
      ++b.scanned;
      if (r.flagged()) ++b.flagged;
      break;
    }
  });
  for (PopularityBucket& b : t.buckets) b.impacted_fraction = Ratio(b.flagged, b.scanned);
  return t;
}

std::vector<YearRow> AggregateByPublishedYear(const Reports& reports,
                                              const market::MetadataSnapshot& metadata) {
  std::map<int, YearRow> rows;
  Join(reports, metadata, [&](const auto& r, const auto& e) {
    const std::string& d = e.published_date;
    if (d.size() < 4 || !std::all_of(d.begin(), d.begin() + 4, [](char c) {
          return c >= '0' && c <= '9';
        })) {
      return;
    }
    const int year = std::stoi(d.substr(0, 4));
    YearRow& row = rows[year];
    row.year = year;
    ++row.scanned;
    if (r.flagged()) ++row.flagged;
  });
  std::vector<YearRow> out;
  for (auto& [y, row] : rows) {
    row.impacted_fraction = Ratio(row.flagged, row.scanned);
    out.push_back(row);
  }
  return out;
}

// ---- tokens -----------------------------------------------------------------------------

std::vector<TokenCount> TokenFrequencies(const std::vector<std::string>& texts) {
  std::map<std::string, int64_t> counts;
  for (const std::string& t : texts) {
    for (std::string& tok : classify::Tokenize(t, /*split_camel_case=*/false)) {
      ++counts[std::move(tok)];
    }
  }
  std::vector<TokenCount> out;
  out.reserve(counts.size());
  for (auto& [tok, n] : counts) out.push_back({tok, n});
  std::stable_sort(out.begin(), out.end(), [](const TokenCount& a, const TokenCount& b) {
    return a.count > b.count;
  });
  return out;
}

std::vector<TokenCount> TokenFrequencies(const Reports& reports) {
  std::vector<std::string> texts;
  for (const auto& r : reports) {
    for (const auto& f : r.findings) texts.push_back(f.point.text);
  }
  return TokenFrequencies(texts);
}

// ---- AI assistants ------------------------------------------------------------------

std::vector<std::string> DefaultAiKeywords() {
  return {"ai code",        "code completion", "gpt",     "openai",
          "intellicode",    "autocomplete",    "language model", "chatbot"};
}

bool IsAiAssistant(const market::MarketplaceEntry& entry,
                   const std::vector<std::string>& keywords) {
  std::vector<std::string> fields = {text::ToLowerAscii(entry.description)};
  for (const std::string& t : entry.tags) fields.push_back(text::ToLowerAscii(t));
  for (const std::string& k : keywords) {
    const std::string needle = text::ToLowerAscii(k);
    if (needle.empty()) continue;
    for (const std::string& f : fields) {
      if (f.find(needle) != std::string::npos) return true;
    }
  }
  return false;
}

std::vector<market::MarketplaceEntry> SelectAiAssistants(
    const market::MetadataSnapshot& metadata, const std::vector<std::string>& keywords) {
  std::vector<market::MarketplaceEntry> out;
  for (const auto& [id, e] : metadata.entries()) {
    if (IsAiAssistant(e, keywords)) out.push_back(e);
  }
  return out;
}

SubsetSummary SummarizeAiAssistants(const Reports& reports,
                                    const market::MetadataSnapshot& metadata,
                                    const std::vector<std::string>& keywords) {
  SubsetSummary s;
  std::set<std::string> selected;
  for (const auto& e : SelectAiAssistants(metadata, keywords)) selected.insert(e.extension_id);
  s.selected = static_cast<int>(selected.size());
  std::set<std::string> seen;
  for (const auto& r : reports) {
    if (!selected.count(r.extension_id) || !seen.insert(r.extension_id).second) continue;
    ++s.scanned;
    if (r.flagged()) ++s.flagged;
  }
  s.flagged_fraction = Ratio(s.flagged, s.scanned);
  return s;
}

// ---- confusables ----------------------------------------------------------------

HomoglyphTable HomoglyphTable::Default() {
  HomoglyphTable t;
  for (char32_t c : {U'I', U'1', U'|', U'ı' /* dotless i */, U'І', U'Ӏ',
                     U'Ι', U'ℓ', U'ǀ', U'I'}) {
    t.canonical[c] = U'l';
  }
  for (char32_t c : {U'0', U'O', U'О', U'о', U'Ο', U'ο'}) {
    t.canonical[c] = U'o';
  }
  const std::pair<char32_t, char32_t> twins[] = {
      {U'а', U'a'}, {U'А', U'a'}, {U'Α', U'a'}, {U'α', U'a'},
      {U'е', U'e'}, {U'Е', U'e'}, {U'Ε', U'e'},
      {U'р', U'p'}, {U'Р', U'p'}, {U'Ρ', U'p'},
      {U'с', U'c'}, {U'С', U'c'},
      {U'х', U'x'}, {U'Х', U'x'}, {U'Χ', U'x'},
      {U'у', U'y'}, {U'У', U'y'},
      {U'і', U'i'}, {U'ј', U'j'}, {U'ѕ', U's'},
      {U'М', U'm'}, {U'Μ', U'm'}, {U'Н', U'h'}, {U'Η', U'h'},
      {U'Т', U't'}, {U'Τ', U't'}, {U'В', U'b'}, {U'Β', U'b'},
      {U'К', U'k'}, {U'Κ', U'k'}, {U'Ν', U'n'}, {U'Ζ', U'z'},
  };
  for (const auto& [from, to] : twins) t.canonical[from] = to;
  for (char32_t c : {U'​', U'‌', U'‍', U'⁠', U'﻿', U'­'}) {
    t.invisible.insert(c);
  }
  return t;
}

namespace {

std::u32string NormalizeCodepoints(std::string_view label, const HomoglyphTable& table) {
  std::u32string out;
  bool pending_space = false;
  for (char32_t c : text::DecodeUtf8(label)) {
    if (table.invisible.count(c)) continue;
    if (c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U' ') {
      pending_space = !out.empty();
      continue;
    }
    if (auto it = table.canonical.find(c); it != table.canonical.end()) {
      c = it->second;
    } else if (c >= U'A' && c <= U'Z') {
      c = c - U'A' + U'a';
    }
    if (pending_space) out.push_back(U' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::string ToUtf8(const std::u32string& s) {
  std::string out;
  for (char32_t c : s) text::AppendUtf8(out, c);
  return out;
}

// Every string reachable by deleting up to `d` code points.
void Deletions(const std::u32string& s, int d, std::set<std::u32string>& out) {
  if (!out.insert(s).second || d == 0) return;
  for (size_t i = 0; i < s.size(); ++i) {
    std::u32string t = s;
    t.erase(i, 1);
    Deletions(t, d - 1, out);
  }
}

}  // namespace

std::string NormalizeLabel(std::string_view label, const HomoglyphTable& table) {
  return ToUtf8(NormalizeCodepoints(label, table));
}

int EditDistance(std::u32string_view a, std::u32string_view b) {
  std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
  for (size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (size_t j = 1; j <= b.size(); ++j) {
      const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::string DisplayLabel(const ingest::CommandContribution& c) {
  if (c.category && !c.category->empty()) return *c.category + ": " + c.title;
  return c.title;
}

std::vector<CommandLabel> CommandLabels(const Reports& reports) {
  std::vector<CommandLabel> out;
  for (const auto& r : reports) {
    for (const auto& c : r.commands) {
      const std::string label = DisplayLabel(c);
      if (!label.empty()) out.push_back({r.extension_id, label});
    }
  }
  return out;
}

std::vector<ConfusablePair> DetectConfusableCommands(const std::vector<CommandLabel>& labels,
                                                     const ConfusableOptions& options) {
  if (options.max_distance < 0) throw Error(ErrorCode::kUsage, "max_distance must be >= 0");

  // Unique (extension, label) in sorted order.
  std::set<std::pair<std::string, std::string>> unique;
  for (const auto& l : labels) unique.emplace(l.extension_id, l.label);
  struct Item {
    std::string ext, label;
    std::u32string norm;
  };
  std::vector<Item> items;
  for (const auto& [ext, label] : unique) {
    items.push_back({ext, label, NormalizeCodepoints(label, options.table)});
  }

  // Candidate pairs share a deletion variant; small distances only.
  std::set<std::pair<size_t, size_t>> candidates;
  const int d = options.max_distance;
  if (d <= 2) {
    std::unordered_map<std::u32string, std::vector<size_t>> index;
    for (size_t i = 0; i < items.size(); ++i) {
      std::set<std::u32string> vars;
      Deletions(items[i].norm, d, vars);
      for (const auto& v : vars) index[v].push_back(i);
    }
    for (const auto& [v, ids] : index) {
      for (size_t a = 0; a < ids.size(); ++a) {
        for (size_t b = a + 1; b < ids.size(); ++b) candidates.emplace(ids[a], ids[b]);
      }
    }
  } else {
    for (size_t a = 0; a < items.size(); ++a) {
      for (size_t b = a + 1; b < items.size(); ++b) candidates.emplace(a, b);
    }
  }

  std::vector<ConfusablePair> out;
  for (const auto& [a, b] : candidates) {
    const Item& x = items[a];
    const Item& y = items[b];
    if (x.ext == y.ext) continue;
    const int dist = EditDistance(x.norm, y.norm);
    if (dist > d) continue;
    const bool x_first = std::tie(x.ext, x.label) < std::tie(y.ext, y.label);
    const Item& p = x_first ? x : y;
    const Item& q = x_first ? y : x;
    out.push_back({p.ext, p.label, q.ext, q.label, ToUtf8(p.norm), dist});
  }
  std::sort(out.begin(), out.end(), [](const ConfusablePair& l, const ConfusablePair& r) {
    return std::tie(l.extension_a, l.label_a, l.extension_b, l.label_b) <
           std::tie(r.extension_a, r.label_a, r.extension_b, r.label_b);
  });
  return out;
}

// ---- CSV ------------------------------------------------------------------------

namespace {

std::string Csv(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string Percent(double fraction) { return Fixed(fraction * 100.0, 2); }

}  // namespace

std::string PerVectorCsv(const PerVectorTable& t) {
  std::string out =
      "group,vector,users,flagged,flagged_percent,findings,items_per_extension,group_flagged\n";
  for (const VectorRow& r : t.rows) {
    const ExposureGroup g = GroupOf(r.vector);
    out += std::string(ExposureGroupName(g)) + "," + std::string(classify::VectorName(r.vector)) +
           "," + std::to_string(r.users) + "," + std::to_string(r.flagged) + "," +
           Percent(r.flagged_fraction) + "," + std::to_string(r.findings) + "," +
           Fixed(r.mean_items, 2) + "," +
           std::to_string(t.group_flagged[static_cast<size_t>(g)]) + "\n";
  }
  out += "all,all," + std::to_string(t.total_extensions) + "," + std::to_string(t.flagged) +
         "," + Percent(t.flagged_fraction) + "," + std::to_string(t.total_findings) + "," +
         Fixed(t.mean_items_per_flagged, 2) + "," + std::to_string(t.flagged) + "\n";
  return out;
}

std::string CategoryCsv(const CategoryBreakdown& t) {
  std::string out = "category,scanned,flagged,impacted_percent\n";
  for (const CategoryRow& r : t.rows) {
    out += Csv(r.category) + "," + std::to_string(r.scanned) + "," + std::to_string(r.flagged) +
           "," + Percent(r.impacted_fraction) + "\n";
  }
  return out;
}

std::string PopularityCsv(const PopularityTable& t) {
  std::string out = "lower,upper,scanned,flagged,impacted_percent\n";
  for (const PopularityBucket& b : t.buckets) {
    out += std::to_string(b.lower) + "," + (b.upper ? std::to_string(*b.upper) : "") + "," +
           std::to_string(b.scanned) + "," + std::to_string(b.flagged) + "," +
           Percent(b.impacted_fraction) + "\n";
  }
  return out;
}

std::string TokenCsv(const std::vector<TokenCount>& t) {
  std::string out = "token,count\n";
  for (const TokenCount& c : t) out += Csv(c.token) + "," + std::to_string(c.count) + "\n";
  return out;
}

std::string ConfusableCsv(const std::vector<ConfusablePair>& t) {
  std::string out = "extension_a,label_a,extension_b,label_b,normalized_form,distance\n";
  for (const ConfusablePair& p : t) {
    out += Csv(p.extension_a) + "," + Csv(p.label_a) + "," + Csv(p.extension_b) + "," +
           Csv(p.label_b) + "," + Csv(p.normalized_form) + "," + std::to_string(p.distance) +
           "\n";
  }
  return out;
}

std::string YearCsv(const std::vector<YearRow>& t) {
  std::string out = "year,scanned,flagged,impacted_percent\n";
  for (const YearRow& r : t) {
    out += std::to_string(r.year) + "," + std::to_string(r.scanned) + "," +
           std::to_string(r.flagged) + "," + Percent(r.impacted_fraction) + "\n";
  }
  return out;
}

Reports LoadReportDirectory(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorCode::kIo, dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  Reports out;
  for (const fs::path& f : files) {
    scan::ReportBundle b = scan::LoadJsonReport(f);
    for (auto& r : b.reports) out.push_back(std::move(r));
  }
  return out;
}

}  // namespace vsxscan::measure
