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

#include "vsxscan/report.hpp"

#include <cstdio>

#include <json.hpp>

#include "vsxscan/error.hpp"
#include "vsxscan/text.hpp"

namespace vsxscan::scan {

using classify::Vector;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr const char* kToolName = "vsxscan";
constexpr const char* kToolVersion = "0.1.0";
constexpr int kReportSchemaVersion = 1;

size_t VectorIndex(Vector v) { return static_cast<size_t>(v); }

}  // namespace

std::string_view OutputFormatName(OutputFormat f) {
  switch (f) {
    case OutputFormat::kJson: return "json";
    case OutputFormat::kCsv: return "csv";
    case OutputFormat::kSarif: return "sarif";
  }
  return "?";
}

OutputFormat ParseOutputFormat(std::string_view name) {
  const std::string n = text::ToLowerAscii(name);
  for (OutputFormat f : {OutputFormat::kJson, OutputFormat::kCsv, OutputFormat::kSarif}) {
    if (n == OutputFormatName(f)) return f;
  }
  throw Error(ErrorCode::kUnsupportedFormat,
              "unknown output format: " + std::string(name));
}

std::string_view EvidenceKindName(EvidenceKind k) {
  switch (k) {
    case EvidenceKind::kManifest: return "manifest";
    case EvidenceKind::kSink: return "sink";
    case EvidenceKind::kClipboard: return "clipboard";
  }
  return "?";
}

std::string_view ScanStatusName(ScanStatus s) {
  switch (s) {
    case ScanStatus::kFull: return "full";
    case ScanStatus::kMetadataOnly: return "metadata_only";
    case ScanStatus::kFailed: return "failed";
  }
  return "?";
}

std::string RuleId(Vector v) {
  return "VSX-EXPOSE-" + std::string(classify::VectorName(v));
}

ScanSummary Summarize(const std::vector<ExtensionReport>& reports) {
  ScanSummary s;
  s.total_scanned = static_cast<int>(reports.size());
  for (const ExtensionReport& r : reports) {
    switch (r.status) {
      case ScanStatus::kFull: ++s.full; break;
      case ScanStatus::kMetadataOnly: ++s.metadata_only; break;
      case ScanStatus::kFailed: ++s.failed; break;
    }
    if (!r.flagged()) continue;
    ++s.flagged;
    s.total_findings += static_cast<int>(r.findings.size());
    std::array<int, classify::kAllVectors.size()> n{};
    for (const FindingRecord& f : r.findings) ++n[VectorIndex(f.point.vector)];
    for (size_t v = 0; v < n.size(); ++v) {
      if (n[v] == 0) continue;
      ++s.per_vector[v].extensions;
      s.per_vector[v].findings += n[v];
    }
  }
  for (VectorSummary& v : s.per_vector) {
    if (v.extensions > 0) {
      v.mean_items = static_cast<double>(v.findings) / v.extensions;
    }
  }
  if (s.total_scanned > 0) {
    s.flagged_fraction = static_cast<double>(s.flagged) / s.total_scanned;
  }
  if (s.flagged > 0) {
    s.mean_items_per_flagged = static_cast<double>(s.total_findings) / s.flagged;
  }
  return s;
}

// ---- JSON ---------------------------------------------------------------------

namespace {

ordered_json LocationJson(const classify::Location& l) {
  ordered_json j;
  if (l.in_manifest()) {
    j["manifest_path"] = l.manifest_path;
  } else {
    j["file"] = l.file;
    j["begin"] = l.span.begin;
    j["end"] = l.span.end;
    j["line"] = l.position.line;
    j["column"] = l.position.column;
  }
  return j;
}

ordered_json DiagnosticsJson(const Diagnostics& d) {
  return ordered_json{{"files_total", d.files_total},
                      {"files_analyzed", d.files_analyzed},
                      {"parse_errors", d.parse_errors},
                      {"timeouts", d.timeouts},
                      {"files_skipped", d.files_skipped},
                      {"sinks", d.sinks},
                      {"unresolved_sinks", d.unresolved_sinks},
                      {"empty_values", d.empty_values},
                      {"duplicate_points", d.duplicate_points},
                      {"unclassifiable_points", d.unclassifiable_points}};
}

ordered_json ReportJson(const ExtensionReport& r, const EmitOptions& o) {
  ordered_json j;
  j["extension_id"] = r.extension_id;
  j["version"] = r.version;
  j["source"] = r.source;
  j["status"] = ScanStatusName(r.status);
  if (!r.message.empty()) j["message"] = r.message;
  ordered_json points;
  for (Vector v : classify::kAllVectors) {
    points[std::string(classify::VectorName(v))] = r.points_per_vector[VectorIndex(v)];
  }
  j["points_per_vector"] = points;
  ordered_json cmds = ordered_json::array();
  for (const ingest::CommandContribution& c : r.commands) {
    ordered_json cj = {{"command", c.command_id}, {"title", c.title}};
    if (c.category) cj["category"] = *c.category;
    cmds.push_back(std::move(cj));
  }
  j["commands"] = std::move(cmds);
  j["diagnostics"] = DiagnosticsJson(r.diagnostics);
  if (o.include_timing) j["timing_seconds"] = r.timing_seconds;
  ordered_json findings = ordered_json::array();
  for (const FindingRecord& f : r.findings) {
    ordered_json fj;
    fj["rule_id"] = RuleId(f.point.vector);
    fj["vector"] = classify::VectorName(f.point.vector);
    fj["text"] = f.point.text;
    fj["resolution"] = graph::ResolutionName(f.point.resolution);
    fj["label"] = classify::LabelName(f.label);
    fj["score"] = f.score;
    fj["location"] = LocationJson(f.point.location);
    ordered_json ev = ordered_json::array();
    for (const Evidence& e : f.evidence) {
      ordered_json ej = LocationJson(e.location);
      ej["kind"] = EvidenceKindName(e.kind);
      ev.push_back(std::move(ej));
    }
    fj["evidence"] = std::move(ev);
    findings.push_back(std::move(fj));
  }
  j["findings"] = std::move(findings);
  return j;
}

ordered_json SummaryJson(const ScanSummary& s, const EmitOptions& o) {
  ordered_json j;
  j["total_scanned"] = s.total_scanned;
  j["flagged"] = s.flagged;
  j["flagged_fraction"] = s.flagged_fraction;
  j["full"] = s.full;
  j["metadata_only"] = s.metadata_only;
  j["failed"] = s.failed;
  j["filtered_out"] = s.filtered_out;
  j["total_findings"] = s.total_findings;
  j["mean_items_per_flagged"] = s.mean_items_per_flagged;
  ordered_json pv;
  for (Vector v : classify::kAllVectors) {
    const VectorSummary& x = s.per_vector[VectorIndex(v)];
    pv[std::string(classify::VectorName(v))] = {
        {"extensions", x.extensions},
        {"findings", x.findings},
        {"mean_items", x.mean_items}};
  }
  j["per_vector"] = std::move(pv);
  if (o.include_timing) j["wall_seconds"] = s.wall_seconds;
  return j;
}

std::string EmitJson(const std::vector<ExtensionReport>& reports,
                     const ScanSummary& summary, const EmitOptions& o) {
  ordered_json doc;
  doc["tool"] = kToolName;
  doc["tool_version"] = kToolVersion;
  doc["schema_version"] = kReportSchemaVersion;
  doc["summary"] = SummaryJson(summary, o);
  ordered_json rs = ordered_json::array();
  for (const ExtensionReport& r : reports) rs.push_back(ReportJson(r, o));
  doc["reports"] = std::move(rs);
  return doc.dump(2) + "\n";
}

// ---- CSV ------------------------------------------------------------------------

std::string CsvField(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string FormatScore(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string EmitCsv(const std::vector<ExtensionReport>& reports) {
  std::string out =
      "extension_id,version,status,rule_id,vector,label,score,resolution,text,"
      "file,line,column,manifest_path\r\n";
  for (const ExtensionReport& r : reports) {
    for (const FindingRecord& f : r.findings) {
      const classify::Location& l = f.point.location;
      const std::vector<std::string> row = {
          r.extension_id,
          r.version,
          std::string(ScanStatusName(r.status)),
          RuleId(f.point.vector),
          std::string(classify::VectorName(f.point.vector)),
          std::string(classify::LabelName(f.label)),
          FormatScore(f.score),
          std::string(graph::ResolutionName(f.point.resolution)),
          f.point.text,
          l.file,
          l.in_manifest() ? "" : std::to_string(l.position.line),
          l.in_manifest() ? "" : std::to_string(l.position.column),
          l.manifest_path};
      for (size_t i = 0; i < row.size(); ++i) {
        if (i > 0) out += ',';
        out += CsvField(row[i]);
      }
      out += "\r\n";
    }
  }
  return out;
}

// ---- SARIF ----------------------------------------------------------------------

std::string UriEncode(std::string_view path) {
  static const char* kHex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : path) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                      (c >= '0' && c <= '9') || c == '-' || c == '.' ||
                      c == '_' || c == '~' || c == '/' || c == '@' || c == '+';
    if (keep) {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 15];
    }
  }
  return out;
}

std::string ArtifactUri(const ExtensionReport& r, const std::string& file) {
  std::string base = r.source.empty() ? r.extension_id : r.source;
  while (!base.empty() && base.back() == '/') base.pop_back();
  std::string path = base.empty() ? file : base + "/" + file;
  if (!path.empty() && path.front() == '/') return "file://" + UriEncode(path);
  return UriEncode(path);
}

std::string_view RuleText(Vector v) {
  switch (v) {
    case Vector::kGlobalState:
      return "Credential-related key stored in the shared global state database.";
    case Vector::kRequestedConfiguration:
      return "Credential-related setting declared in the manifest configuration.";
    case Vector::kUsedConfiguration:
      return "Credential-related setting read or written through the configuration API.";
    case Vector::kInputBox:
      return "Input box prompting for a credential that may be pasted from the clipboard.";
    case Vector::kRequestedCommand:
      return "Credential-handling command contributed by the extension.";
    case Vector::kUsedCommand:
      return "Credential-handling command executed or listened to by the extension.";
  }
  return "";
}

ordered_json SarifLocation(const ExtensionReport& r, const classify::Location& l) {
  ordered_json phys;
  if (l.in_manifest()) {
    phys["artifactLocation"] = {{"uri", ArtifactUri(r, "package.json")}};
  } else {
    phys["artifactLocation"] = {{"uri", ArtifactUri(r, l.file)}};
    phys["region"] = {{"startLine", l.position.line},
                      {"startColumn", l.position.column},
                      {"charOffset", l.span.begin},
                      {"charLength", l.span.end - l.span.begin}};
  }
  ordered_json loc;
  loc["physicalLocation"] = std::move(phys);
  if (l.in_manifest()) {
    loc["logicalLocations"] = ordered_json::array(
        {{{"fullyQualifiedName", l.manifest_path}, {"kind", "member"}}});
  }
  return loc;
}

std::string EmitSarif(const std::vector<ExtensionReport>& reports,
                      const ScanSummary& summary, const EmitOptions& o) {
  ordered_json rules = ordered_json::array();
  for (Vector v : classify::kAllVectors) {
    rules.push_back({{"id", RuleId(v)},
                     {"name", "CredentialExposure" + std::string(classify::VectorName(v))},
                     {"shortDescription", {{"text", RuleText(v)}}},
                     {"defaultConfiguration", {{"level", "warning"}}}});
  }
  ordered_json results = ordered_json::array();
  for (const ExtensionReport& r : reports) {
    for (const FindingRecord& f : r.findings) {
      ordered_json res;
      res["ruleId"] = RuleId(f.point.vector);
      res["ruleIndex"] = VectorIndex(f.point.vector);
      res["level"] = "warning";
      res["message"] = {{"text", std::string(classify::VectorName(f.point.vector)) +
                                     " item in " + r.extension_id + ": " +
                                     f.point.text}};
      res["locations"] = ordered_json::array({SarifLocation(r, f.point.location)});
      ordered_json related = ordered_json::array();
      int id = 1;
      for (const Evidence& e : f.evidence) {
        if (e.kind != EvidenceKind::kClipboard) continue;
        ordered_json rl = SarifLocation(r, e.location);
        rl["id"] = id++;
        rl["message"] = {{"text", "clipboard read in the same extension"}};
        related.push_back(std::move(rl));
      }
      if (!related.empty()) res["relatedLocations"] = std::move(related);
      res["properties"] = {{"extensionId", r.extension_id},
                           {"extensionVersion", r.version},
                           {"score", f.score},
                           {"resolution", graph::ResolutionName(f.point.resolution)}};
      results.push_back(std::move(res));
    }
  }
  ordered_json run;
  run["tool"] = {{"driver",
                  {{"name", kToolName},
                   {"version", kToolVersion},
                   {"rules", std::move(rules)}}}};
  run["results"] = std::move(results);
  ordered_json props = {{"totalScanned", summary.total_scanned},
                        {"flagged", summary.flagged},
                        {"flaggedFraction", summary.flagged_fraction}};
  if (o.include_timing) props["wallSeconds"] = summary.wall_seconds;
  run["properties"] = std::move(props);

  ordered_json doc;
  doc["$schema"] = "https://json.schemastore.org/sarif-2.1.0.json";
  doc["version"] = "2.1.0";
  doc["runs"] = ordered_json::array({std::move(run)});
  return doc.dump(2) + "\n";
}

}  // namespace

std::string EmitReport(const std::vector<ExtensionReport>& reports,
                       const ScanSummary& summary, OutputFormat format,
                       const EmitOptions& options) {
  switch (format) {
    case OutputFormat::kJson: return EmitJson(reports, summary, options);
    case OutputFormat::kCsv: return EmitCsv(reports);
    case OutputFormat::kSarif: return EmitSarif(reports, summary, options);
  }
  throw Error(ErrorCode::kUnsupportedFormat, "unknown output format");
}

// ---- reload ---------------------------------------------------------------------

namespace {

[[noreturn]] void Bad(const std::string& what) {
  throw Error(ErrorCode::kCorpusFormat, "report: " + what);
}

classify::Location ParseLocation(const json& j) {
  classify::Location l;
  if (j.contains("manifest_path")) {
    l.manifest_path = j.at("manifest_path").get<std::string>();
    return l;
  }
  l.file = j.at("file").get<std::string>();
  l.span.begin = j.at("begin").get<uint32_t>();
  l.span.end = j.at("end").get<uint32_t>();
  l.position.line = j.at("line").get<uint32_t>();
  l.position.column = j.at("column").get<uint32_t>();
  return l;
}

template <typename T, typename F>
T FromName(const json& j, F parse, const char* what) {
  auto v = parse(j.get<std::string>());
  if (!v) Bad(std::string("unknown ") + what + " " + j.get<std::string>());
  return *v;
}

std::optional<ScanStatus> StatusFromName(std::string_view n) {
  for (ScanStatus s : {ScanStatus::kFull, ScanStatus::kMetadataOnly, ScanStatus::kFailed}) {
    if (n == ScanStatusName(s)) return s;
  }
  return std::nullopt;
}

std::optional<EvidenceKind> EvidenceFromName(std::string_view n) {
  for (EvidenceKind k : {EvidenceKind::kManifest, EvidenceKind::kSink, EvidenceKind::kClipboard}) {
    if (n == EvidenceKindName(k)) return k;
  }
  return std::nullopt;
}

Diagnostics ParseDiagnostics(const json& j) {
  Diagnostics d;
  d.files_total = j.at("files_total").get<int>();
  d.files_analyzed = j.at("files_analyzed").get<int>();
  d.parse_errors = j.at("parse_errors").get<int>();
  d.timeouts = j.at("timeouts").get<int>();
  d.files_skipped = j.at("files_skipped").get<int>();
  d.sinks = j.at("sinks").get<int>();
  d.unresolved_sinks = j.at("unresolved_sinks").get<int>();
  d.empty_values = j.at("empty_values").get<int>();
  d.duplicate_points = j.at("duplicate_points").get<int>();
  d.unclassifiable_points = j.at("unclassifiable_points").get<int>();
  return d;
}

ExtensionReport ParseOneReport(const json& j) {
  ExtensionReport r;
  r.extension_id = j.at("extension_id").get<std::string>();
  r.version = j.at("version").get<std::string>();
  r.source = j.at("source").get<std::string>();
  r.status = FromName<ScanStatus>(j.at("status"), StatusFromName, "status");
  r.message = j.value("message", std::string());
  for (Vector v : classify::kAllVectors) {
    r.points_per_vector[VectorIndex(v)] =
        j.at("points_per_vector").at(std::string(classify::VectorName(v))).get<int>();
  }
  for (const json& cj : j.at("commands")) {
    ingest::CommandContribution c;
    c.command_id = cj.at("command").get<std::string>();
    c.title = cj.at("title").get<std::string>();
    if (cj.contains("category")) c.category = cj.at("category").get<std::string>();
    r.commands.push_back(std::move(c));
  }
  r.diagnostics = ParseDiagnostics(j.at("diagnostics"));
  r.timing_seconds = j.value("timing_seconds", 0.0);
  for (const json& fj : j.at("findings")) {
    FindingRecord f;
    f.point.vector = FromName<Vector>(fj.at("vector"), classify::VectorFromName, "vector");
    f.point.text = fj.at("text").get<std::string>();
    f.point.extension_id = r.extension_id;
    f.point.resolution =
        FromName<graph::Resolution>(fj.at("resolution"), graph::ResolutionFromName, "resolution");
    f.point.location = ParseLocation(fj.at("location"));
    f.label = FromName<classify::Label>(fj.at("label"), classify::LabelFromName, "label");
    f.score = fj.at("score").get<double>();
    for (const json& ej : fj.at("evidence")) {
      Evidence e;
      e.kind = FromName<EvidenceKind>(ej.at("kind"), EvidenceFromName, "evidence kind");
      e.location = ParseLocation(ej);
      f.evidence.push_back(std::move(e));
    }
    r.findings.push_back(std::move(f));
  }
  return r;
}

ScanSummary ParseSummary(const json& j) {
  ScanSummary s;
  s.total_scanned = j.at("total_scanned").get<int>();
  s.flagged = j.at("flagged").get<int>();
  s.flagged_fraction = j.at("flagged_fraction").get<double>();
  s.full = j.at("full").get<int>();
  s.metadata_only = j.at("metadata_only").get<int>();
  s.failed = j.at("failed").get<int>();
  s.filtered_out = j.at("filtered_out").get<int>();
  s.total_findings = j.at("total_findings").get<int>();
  s.mean_items_per_flagged = j.at("mean_items_per_flagged").get<double>();
  for (Vector v : classify::kAllVectors) {
    const json& x = j.at("per_vector").at(std::string(classify::VectorName(v)));
    VectorSummary& out = s.per_vector[VectorIndex(v)];
    out.extensions = x.at("extensions").get<int>();
    out.findings = x.at("findings").get<int>();
    out.mean_items = x.at("mean_items").get<double>();
  }
  s.wall_seconds = j.value("wall_seconds", 0.0);
  return s;
}

}  // namespace

ReportBundle ParseJsonReport(std::string_view json_text) {
  json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) Bad("not a JSON object");
  try {
    if (doc.at("tool").get<std::string>() != kToolName) Bad("unknown producer");
    if (doc.at("schema_version").get<int>() != kReportSchemaVersion) {
      Bad("unsupported schema version");
    }
    ReportBundle b;
    b.summary = ParseSummary(doc.at("summary"));
    for (const json& rj : doc.at("reports")) b.reports.push_back(ParseOneReport(rj));
    return b;
  } catch (const json::exception& e) {
    Bad(e.what());
  }
}

ReportBundle LoadJsonReport(const std::filesystem::path& path) {
  return ParseJsonReport(text::ReadFile(path));
}

}  // namespace vsxscan::scan
