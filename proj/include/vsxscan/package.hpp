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

// Extension package ingestion: .vsix archives (or unpacked directories) are
// turned into an ExtensionPackage holding the parsed manifest, the
// contribution points a scan cares about, and the script sources.

#ifndef VSXSCAN_PACKAGE_HPP_
#define VSXSCAN_PACKAGE_HPP_

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vsxscan::ingest {

// Opaque holder of the parsed manifest document; see manifest_tree.hpp.
struct ManifestTree;

struct CommandContribution {
  std::string command_id;
  std::string title;
  std::optional<std::string> category;

  friend bool operator==(const CommandContribution&,
                         const CommandContribution&) = default;
};

struct ConfigurationContribution {
  std::string key;
  std::string description;
  std::string value_type;
  bool default_present = false;

  friend bool operator==(const ConfigurationContribution&,
                         const ConfigurationContribution&) = default;
};

struct ExtensionManifest {
  std::shared_ptr<const ManifestTree> raw;
  std::string publisher;
  std::string name;
  std::string version;
  std::string display_name;
  std::string description;
  std::vector<std::string> categories;
  std::vector<CommandContribution> commands;
  std::vector<ConfigurationContribution> configurations;
  std::vector<std::string> activation_events;
};

struct SourceFile {
  std::string path;  // relative to the extension root
  std::string content;
};

struct SkippedFile {
  std::string path;
  std::string reason;  // "node_modules" or "size-cap"
};

struct SourceFileSet {
  std::vector<SourceFile> files;
  std::vector<SkippedFile> skipped;

  bool metadata_only() const { return files.empty(); }
  size_t total_bytes() const;
};

struct IngestOptions {
  size_t source_cap_bytes = size_t{20} * 1024 * 1024;
};

struct ExtensionPackage {
  std::string extension_id;  // "publisher.name"
  std::string version;
  ExtensionManifest manifest;
  SourceFileSet sources;
  std::filesystem::path origin_path;
};

// Parses a manifest document. Comments and trailing commas are tolerated on a
// second, lenient pass. `nls` is the optional package.nls.json text used to
// substitute "%key%" placeholders. Throws Error(kManifestUnparseable).
ExtensionManifest ParseManifest(std::string_view manifest_text,
                                std::string_view nls_text = {});

// Reads a .vsix archive. Throws kNotAnArchive, kManifestMissing or
// kManifestUnparseable.
ExtensionPackage UnpackVsix(const std::filesystem::path& archive_path,
                            const IngestOptions& options = {});

// Reads an already-unpacked extension: `dir/extension/package.json` or
// `dir/package.json`.
ExtensionPackage LoadDirectory(const std::filesystem::path& dir,
                               const IngestOptions& options = {});

// Dispatches to UnpackVsix or LoadDirectory.
ExtensionPackage LoadPackage(const std::filesystem::path& path,
                             const IngestOptions& options = {});

// True when `path` is something LoadPackage accepts.
bool IsPackagePath(const std::filesystem::path& path);

std::vector<CommandContribution> RequestedCommands(
    const ExtensionManifest& manifest);
std::vector<ConfigurationContribution> RequestedConfigurations(
    const ExtensionManifest& manifest);

// Ids named by "onCommand:<id>" activation events that the extension does not
// declare itself.
std::vector<std::string> ForeignCommandListeners(
    const ExtensionManifest& manifest,
    const std::vector<CommandContribution>& own_commands);

// Applies the script-suffix, node_modules and size-cap rules to a list of
// candidate (relative path, content) files.
SourceFileSet CollectSources(std::vector<SourceFile> candidates,
                             const IngestOptions& options);

bool IsScriptPath(std::string_view path);
bool IsBundledDependencyPath(std::string_view path);

}  // namespace vsxscan::ingest

#endif  // VSXSCAN_PACKAGE_HPP_
