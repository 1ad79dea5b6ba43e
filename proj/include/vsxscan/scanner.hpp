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

#ifndef VSXSCAN_SCANNER_HPP_
#define VSXSCAN_SCANNER_HPP_

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "vsxscan/classifier.hpp"
#include "vsxscan/marketplace.hpp"
#include "vsxscan/package.hpp"
#include "vsxscan/report.hpp"
#include "vsxscan/sinks.hpp"

namespace vsxscan::scan {

struct CatalogOverride {
  std::string suffix;  // dotted member path, e.g. "secrets.store"
  graph::SinkApi api;
};

struct ScanConfig {
  std::filesystem::path model_path;  // empty: lexicon-only default model
  double budget_seconds = 120;        // per extension
  double file_budget_seconds = 10;    // per source file
  int workers = 1;
  int64_t min_installs = 10;
  OutputFormat format = OutputFormat::kJson;
  std::vector<CatalogOverride> catalog_overrides;
  int depth_budget = graph::kDefaultDepthBudget;
  ingest::IngestOptions ingest;

  // Throws Error(kUsage).
  void Validate() const;
};

struct CorpusResult {
  ScanSummary summary;
  std::vector<ExtensionReport> reports;  // sorted by extension_id
};

class Scanner {
 public:
  // Loads the model named by the config.
  explicit Scanner(ScanConfig config);
  Scanner(ScanConfig config, std::shared_ptr<const classify::Classifier> model);

  // Never throws for content problems; unreadable paths raise kIo.
  ExtensionReport ScanExtension(const std::filesystem::path& path) const;
  ExtensionReport ScanPackage(const ingest::ExtensionPackage& package) const;

  // `metadata` enables the install filter; null scans everything.
  CorpusResult ScanCorpus(const std::filesystem::path& root,
                          const market::MetadataSnapshot* metadata = nullptr) const;

  const ScanConfig& config() const { return config_; }

 private:
  ScanConfig config_;
  graph::SinkCatalog catalog_;
  std::shared_ptr<const classify::Classifier> model_;
};

ExtensionReport ScanExtension(const std::filesystem::path& path,
                              const ScanConfig& config);
CorpusResult ScanCorpus(const std::filesystem::path& root,
                        const ScanConfig& config,
                        const market::MetadataSnapshot* metadata = nullptr);

// Package roots below `root` in path order: `root` itself when it is a
// package, otherwise every nested package outside node_modules and dot
// directories. Throws Error(kEmptyCorpus) when none is found.
std::vector<std::filesystem::path> DiscoverPackages(
    const std::filesystem::path& root);

}  // namespace vsxscan::scan

#endif  // VSXSCAN_SCANNER_HPP_
