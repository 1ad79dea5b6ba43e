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

#ifndef VSXSCAN_SINKS_HPP_
#define VSXSCAN_SINKS_HPP_

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vsxscan/js_ast.hpp"
#include "vsxscan/js_parser.hpp"
#include "vsxscan/pdg.hpp"

namespace vsxscan::graph {

enum class SinkApi : uint8_t {
  kRegisterCommand,
  kRegisterTextEditorCommand,
  kGetConfiguration,
  kShowInputBox,
  kGlobalStateUpdate,
  kGlobalStateGet,
  kExecuteCommand,
  kClipboardReadText,
};

std::string_view SinkApiName(SinkApi api);
std::optional<SinkApi> SinkApiFromName(std::string_view name);

// Member-path suffix patterns. "globalState.update" matches any callee whose
// trailing property names are `globalState` then `update`.
class SinkCatalog {
 public:
  struct Pattern {
    std::vector<std::string> suffix;
    SinkApi api;
  };

  static const SinkCatalog& Default();

  // Longest suffix wins; ties go to the earlier pattern.
  std::optional<SinkApi> Match(const std::vector<std::string_view>& path) const;
  void Add(std::string_view dotted_suffix, SinkApi api);
  const std::vector<Pattern>& patterns() const { return patterns_; }

 private:
  std::vector<Pattern> patterns_;
};

struct ApiCallSite {
  SinkApi api = SinkApi::kRegisterCommand;
  js::NodeId node_id = js::kNoNode;  // kNoNode for text-scan sites
  js::Span span;
  js::Position position;
  std::string file;
};

enum class Resolution : uint8_t {
  kLiteral,
  kConcatenated,
  kPropagatedConst,
  kUnresolved,
};

std::string_view ResolutionName(Resolution r);
std::optional<Resolution> ResolutionFromName(std::string_view name);

struct ResolvedString {
  Resolution status = Resolution::kUnresolved;
  std::string value;
  std::vector<js::Span> origin_spans;

  bool resolved() const { return status != Resolution::kUnresolved; }
  static ResolvedString Unresolved() { return {}; }
};

inline constexpr int kDefaultDepthBudget = 32;

// Call expressions whose callee matches the catalog, in source order.
std::vector<ApiCallSite> FindApiCallSites(
    const ProgramDependencyGraph& pdg,
    const SinkCatalog& catalog = SinkCatalog::Default());

// Constant string value of the expression at `node`. The budget counts
// data-edge hops.
ResolvedString ResolveString(const ProgramDependencyGraph& pdg,
                             js::NodeId node,
                             int depth_budget = kDefaultDepthBudget);

// Values of the traced argument(s) of a call site: one entry for most sinks,
// one per `.get`/`.update` accessor for configuration handles, none for
// clipboard reads.
std::vector<ResolvedString> TraceArguments(
    const ProgramDependencyGraph& pdg, const ApiCallSite& site,
    int depth_budget = kDefaultDepthBudget);

struct TracedSite {
  ApiCallSite site;
  std::vector<ResolvedString> values;
};

// Text-scan fallback for files that cannot be parsed or graphed: finds
// `<pattern>(` followed by a single string literal.
std::vector<TracedSite> ScanSinksByText(
    std::string_view source, const std::string& file,
    const SinkCatalog& catalog = SinkCatalog::Default());

enum class FileOutcome : uint8_t { kAnalyzed, kParseError, kBudgetExceeded };

struct AnalysisOptions {
  int depth_budget = kDefaultDepthBudget;
  std::chrono::milliseconds file_budget{10000};
  // Hard stop shared by all files of one extension.
  std::optional<js::Clock::time_point> deadline;
  const SinkCatalog* catalog = nullptr;  // default catalog when null
};

struct FileAnalysis {
  std::string file;
  FileOutcome outcome = FileOutcome::kAnalyzed;
  std::string message;
  std::vector<TracedSite> sites;
};

// Parse, graph, locate and trace; degrades to ScanSinksByText on parse or
// budget failure.
FileAnalysis AnalyzeSource(std::string_view source, const std::string& file,
                           const AnalysisOptions& options = {});

}  // namespace vsxscan::graph

#endif  // VSXSCAN_SINKS_HPP_
