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

#ifndef VSXSCAN_REPORT_HPP_
#define VSXSCAN_REPORT_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vsxscan/classifier.hpp"
#include "vsxscan/package.hpp"

namespace vsxscan::scan {

enum class OutputFormat : uint8_t { kJson, kCsv, kSarif };
std::string_view OutputFormatName(OutputFormat f);
// Throws Error(kUnsupportedFormat).
OutputFormat ParseOutputFormat(std::string_view name);

enum class EvidenceKind : uint8_t { kManifest, kSink, kClipboard };
std::string_view EvidenceKindName(EvidenceKind k);

struct Evidence {
  EvidenceKind kind = EvidenceKind::kSink;
  classify::Location location;

  friend bool operator==(const Evidence&, const Evidence&) = default;
};

struct FindingRecord {
  classify::DataPoint point;
  classify::Label label = classify::Label::kCredentialRelated;
  double score = 0;
  // The point's own location first, then clipboard reads in the extension.
  std::vector<Evidence> evidence;

  friend bool operator==(const FindingRecord&, const FindingRecord&) = default;
};

enum class ScanStatus : uint8_t { kFull, kMetadataOnly, kFailed };
std::string_view ScanStatusName(ScanStatus s);

struct Diagnostics {
  int files_total = 0;
  int files_analyzed = 0;  // parsed and graphed
  int parse_errors = 0;
  int timeouts = 0;
  int files_skipped = 0;  // bundled dependencies and size cap
  int sinks = 0;
  int unresolved_sinks = 0;  // traced values without a constant
  int empty_values = 0;
  int duplicate_points = 0;
  int unclassifiable_points = 0;  // no token survives normalization

  friend bool operator==(const Diagnostics&, const Diagnostics&) = default;
};

using VectorCounts = std::array<int, classify::kAllVectors.size()>;

struct ExtensionReport {
  std::string extension_id;
  std::string version;
  std::string source;  // path as discovered
  ScanStatus status = ScanStatus::kFull;
  std::string message;  // failure reason
  std::vector<FindingRecord> findings;
  VectorCounts points_per_vector{};  // all extracted points, flagged or not
  // Command labels as the palette shows them, for confusable detection.
  std::vector<ingest::CommandContribution> commands;
  Diagnostics diagnostics;
  double timing_seconds = 0;

  bool flagged() const { return !findings.empty(); }
  friend bool operator==(const ExtensionReport&,
                         const ExtensionReport&) = default;
};

struct VectorSummary {
  int extensions = 0;  // with at least one finding of the vector
  int findings = 0;
  double mean_items = 0;  // findings / extensions, 0 when none

  friend bool operator==(const VectorSummary&, const VectorSummary&) = default;
};

struct ScanSummary {
  int total_scanned = 0;
  int flagged = 0;
  double flagged_fraction = 0;
  int full = 0;
  int metadata_only = 0;
  int failed = 0;
  int filtered_out = 0;  // below the install threshold, not reported
  int total_findings = 0;
  double mean_items_per_flagged = 0;
  std::array<VectorSummary, classify::kAllVectors.size()> per_vector{};
  double wall_seconds = 0;

  friend bool operator==(const ScanSummary&, const ScanSummary&) = default;
};

// Aggregates exactly `reports`; wall_seconds and filtered_out stay zero.
ScanSummary Summarize(const std::vector<ExtensionReport>& reports);

struct EmitOptions {
  // Off for byte-comparable output; timings then read back as zero.
  bool include_timing = true;
};

std::string EmitReport(const std::vector<ExtensionReport>& reports,
                       const ScanSummary& summary, OutputFormat format,
                       const EmitOptions& options = {});

struct ReportBundle {
  ScanSummary summary;
  std::vector<ExtensionReport> reports;
};

// Reads EmitReport(..., kJson) output. Throws Error(kCorpusFormat).
ReportBundle ParseJsonReport(std::string_view json_text);
ReportBundle LoadJsonReport(const std::filesystem::path& path);

std::string RuleId(classify::Vector v);

}  // namespace vsxscan::scan

#endif  // VSXSCAN_REPORT_HPP_
