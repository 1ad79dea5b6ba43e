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

#include "vsxscan/scanner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <optional>
#include <thread>

#include "vsxscan/error.hpp"
#include "vsxscan/js_parser.hpp"

namespace vsxscan::scan {

namespace fs = std::filesystem;
using Clock = js::Clock;

namespace {

double SecondsSince(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::chrono::milliseconds ToMillis(double seconds) {
  return std::chrono::milliseconds(static_cast<int64_t>(seconds * 1000.0));
}

ExtensionReport FailedReport(const fs::path& path, const std::string& message) {
  ExtensionReport r;
  fs::path name = path.filename();
  if (name.empty()) name = path.parent_path().filename();
  r.extension_id = name.extension() == ".vsix" ? name.stem().string() : name.string();
  r.source = path.generic_string();
  r.status = ScanStatus::kFailed;
  r.message = message;
  return r;
}

graph::SinkCatalog BuildCatalog(const ScanConfig& config) {
  graph::SinkCatalog c = graph::SinkCatalog::Default();
  for (const CatalogOverride& o : config.catalog_overrides) c.Add(o.suffix, o.api);
  return c;
}

std::shared_ptr<const classify::Classifier> LoadModel(const ScanConfig& config) {
  classify::ClassifierModel m = config.model_path.empty()
                                    ? classify::ClassifierModel::Default()
                                    : classify::ClassifierModel::Load(config.model_path);
  return std::make_shared<classify::LinearClassifier>(std::move(m));
}

ExtensionReport ScanLoaded(const ingest::ExtensionPackage& pkg,
                           const ScanConfig& config,
                           const graph::SinkCatalog& catalog,
                           const classify::Classifier& model,
                           Clock::time_point t0) {
  ExtensionReport r;
  r.extension_id = pkg.extension_id;
  r.version = pkg.version;
  r.source = pkg.origin_path.generic_string();

  r.commands = ingest::RequestedCommands(pkg.manifest);
  Diagnostics& d = r.diagnostics;
  d.files_total = static_cast<int>(pkg.sources.files.size());
  d.files_skipped = static_cast<int>(pkg.sources.skipped.size());

  graph::AnalysisOptions ao;
  ao.depth_budget = config.depth_budget;
  ao.file_budget = ToMillis(config.file_budget_seconds);
  ao.deadline = t0 + ToMillis(config.budget_seconds);
  ao.catalog = &catalog;

  std::vector<graph::TracedSite> sites;
  std::vector<Evidence> clipboard;
  for (const ingest::SourceFile& f : pkg.sources.files) {
    graph::FileAnalysis fa = graph::AnalyzeSource(f.content, f.path, ao);
    switch (fa.outcome) {
      case graph::FileOutcome::kAnalyzed: ++d.files_analyzed; break;
      case graph::FileOutcome::kParseError: ++d.parse_errors; break;
      case graph::FileOutcome::kBudgetExceeded: ++d.timeouts; break;
    }
    for (graph::TracedSite& ts : fa.sites) {
      ++d.sinks;
      if (ts.site.api == graph::SinkApi::kClipboardReadText) {
        Evidence e;
        e.kind = EvidenceKind::kClipboard;
        e.location.file = ts.site.file;
        e.location.span = ts.site.span;
        e.location.position = ts.site.position;
        clipboard.push_back(std::move(e));
      }
      sites.push_back(std::move(ts));
    }
  }

  classify::ExtractionStats stats;
  const std::vector<classify::DataPoint> points =
      classify::ExtractDataPoints(pkg, sites, &stats);
  d.unresolved_sinks = stats.unresolved;
  d.empty_values = stats.empty;
  d.duplicate_points = stats.duplicates;

  for (const classify::DataPoint& p : points) {
    ++r.points_per_vector[static_cast<size_t>(p.vector)];
    classify::Prediction pred;
    try {
      pred = model.Classify(p);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kEmptyText) throw;
      ++d.unclassifiable_points;
      continue;
    }
    if (pred.label != classify::Label::kCredentialRelated) continue;
    FindingRecord f;
    f.point = p;
    f.label = pred.label;
    f.score = pred.score;
    f.evidence.push_back(
        {p.location.in_manifest() ? EvidenceKind::kManifest : EvidenceKind::kSink,
         p.location});
    f.evidence.insert(f.evidence.end(), clipboard.begin(), clipboard.end());
    r.findings.push_back(std::move(f));
  }

  r.status = d.files_analyzed > 0 ? ScanStatus::kFull : ScanStatus::kMetadataOnly;
  r.timing_seconds = SecondsSince(t0);
  return r;
}

}  // namespace

void ScanConfig::Validate() const {
  if (workers < 1) throw Error(ErrorCode::kUsage, "worker count must be >= 1");
  if (!(budget_seconds > 0) || !(file_budget_seconds > 0)) {
    throw Error(ErrorCode::kUsage, "budgets must be positive");
  }
  if (min_installs < 0) throw Error(ErrorCode::kUsage, "min_installs must be >= 0");
  if (depth_budget < 1) throw Error(ErrorCode::kUsage, "depth budget must be >= 1");
}

Scanner::Scanner(ScanConfig config)
    : Scanner(config, nullptr) {}

Scanner::Scanner(ScanConfig config,
                 std::shared_ptr<const classify::Classifier> model)
    : config_(std::move(config)) {
  config_.Validate();
  catalog_ = BuildCatalog(config_);
  model_ = model ? std::move(model) : LoadModel(config_);
}

ExtensionReport Scanner::ScanPackage(const ingest::ExtensionPackage& package) const {
  return ScanLoaded(package, config_, catalog_, *model_, Clock::now());
}

ExtensionReport Scanner::ScanExtension(const fs::path& path) const {
  const Clock::time_point t0 = Clock::now();
  ingest::ExtensionPackage pkg;
  try {
    pkg = ingest::LoadPackage(path, config_.ingest);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIo) throw;
    ExtensionReport r = FailedReport(path, e.what());
    r.timing_seconds = SecondsSince(t0);
    return r;
  }
  ExtensionReport r = ScanLoaded(pkg, config_, catalog_, *model_, t0);
  r.source = path.generic_string();
  return r;
}

CorpusResult Scanner::ScanCorpus(const fs::path& root,
                                 const market::MetadataSnapshot* metadata) const {
  const Clock::time_point wall0 = Clock::now();
  const std::vector<fs::path> paths = DiscoverPackages(root);
  const bool root_is_package = paths.size() == 1 && paths[0] == root;

  std::vector<std::optional<ExtensionReport>> slots(paths.size());
  std::atomic<size_t> next{0};
  std::atomic<int> filtered{0};

  auto task = [&](size_t i) {
    const fs::path& path = paths[i];
    const std::string source =
        root_is_package ? path.filename().generic_string()
                        : fs::relative(path, root).generic_string();
    const Clock::time_point t0 = Clock::now();
    try {
      ingest::ExtensionPackage pkg = ingest::LoadPackage(path, config_.ingest);
      if (metadata != nullptr) {
        const market::MarketplaceEntry* e = metadata->Find(pkg.extension_id);
        if (e != nullptr && e->install_count < config_.min_installs) {
          ++filtered;
          return;
        }
      }
      ExtensionReport r = ScanLoaded(pkg, config_, catalog_, *model_, t0);
      r.source = source;
      slots[i] = std::move(r);
    } catch (const std::exception& ex) {
      // One bad package never stops the corpus.
      ExtensionReport r = FailedReport(path, ex.what());
      r.source = source;
      r.timing_seconds = SecondsSince(t0);
      slots[i] = std::move(r);
    }
  };

  auto worker = [&] {
    for (size_t i = next++; i < paths.size(); i = next++) task(i);
  };
  const size_t n = std::min<size_t>(static_cast<size_t>(config_.workers), paths.size());
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (size_t i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  CorpusResult out;
  for (auto& s : slots) {
    if (s) out.reports.push_back(std::move(*s));
  }
  std::sort(out.reports.begin(), out.reports.end(),
            [](const ExtensionReport& a, const ExtensionReport& b) {
              if (a.extension_id != b.extension_id) return a.extension_id < b.extension_id;
              return a.source < b.source;
            });
  out.summary = Summarize(out.reports);
  out.summary.filtered_out = filtered.load();
  out.summary.wall_seconds = SecondsSince(wall0);
  return out;
}

ExtensionReport ScanExtension(const fs::path& path, const ScanConfig& config) {
  return Scanner(config).ScanExtension(path);
}

CorpusResult ScanCorpus(const fs::path& root, const ScanConfig& config,
                        const market::MetadataSnapshot* metadata) {
  return Scanner(config).ScanCorpus(root, metadata);
}

namespace {

void Walk(const fs::path& dir, std::vector<fs::path>& out) {
  std::vector<fs::path> children;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(dir, ec)) children.push_back(e.path());
  std::sort(children.begin(), children.end());
  for (const fs::path& c : children) {
    const std::string name = c.filename().string();
    if (ingest::IsPackagePath(c)) {
      out.push_back(c);
    } else if (fs::is_directory(c, ec) && !name.empty() && name[0] != '.' &&
               name != "node_modules") {
      Walk(c, out);
    }
  }
}

}  // namespace

std::vector<fs::path> DiscoverPackages(const fs::path& root) {
  std::error_code ec;
  if (!fs::exists(root, ec)) {
    throw Error(ErrorCode::kIo, root.string() + " does not exist");
  }
  if (ingest::IsPackagePath(root)) return {root};
  std::vector<fs::path> out;
  if (fs::is_directory(root, ec)) Walk(root, out);
  if (out.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, root.string() + " contains no packages");
  }
  return out;
}

}  // namespace vsxscan::scan
