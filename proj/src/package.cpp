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

#include "vsxscan/package.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "vsxscan/error.hpp"
#include "vsxscan/manifest_tree.hpp"
#include "vsxscan/text.hpp"
#include "vsxscan/zip.hpp"

namespace vsxscan::ingest {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kArchiveManifest = "extension/package.json";
constexpr std::string_view kArchiveRoot = "extension/";

// Removes // and /* */ comments and commas that directly precede a closing
// bracket, leaving string literals untouched.
std::string RelaxedToStrict(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  size_t i = 0;
  const size_t n = in.size();
  while (i < n) {
    char c = in[i];
    if (c == '"') {
      size_t j = i + 1;
      while (j < n && in[j] != '"') j += (in[j] == '\\') ? 2 : 1;
      j = std::min(j + 1, n);
      out.append(in.substr(i, j - i));
      i = j;
    } else if (c == '/' && i + 1 < n && in[i + 1] == '/') {
      while (i < n && in[i] != '\n') ++i;
    } else if (c == '/' && i + 1 < n && in[i + 1] == '*') {
      size_t end = in.find("*/", i + 2);
      i = end == std::string_view::npos ? n : end + 2;
    } else if (c == ',') {
      // Look past whitespace and comments for a closing bracket.
      size_t j = i + 1;
      while (j < n) {
        if (in[j] == ' ' || in[j] == '\t' || in[j] == '\n' || in[j] == '\r') {
          ++j;
        } else if (in[j] == '/' && j + 1 < n && in[j + 1] == '/') {
          while (j < n && in[j] != '\n') ++j;
        } else if (in[j] == '/' && j + 1 < n && in[j + 1] == '*') {
          size_t end = in.find("*/", j + 2);
          j = end == std::string_view::npos ? n : end + 2;
        } else {
          break;
        }
      }
      if (j < n && (in[j] == '}' || in[j] == ']')) {
        ++i;
      } else {
        out += c;
        ++i;
      }
    } else {
      out += c;
      ++i;
    }
  }
  return out;
}

std::string_view StripBom(std::string_view s) {
  if (text::StartsWith(s, "\xEF\xBB\xBF")) s.remove_prefix(3);
  return s;
}

std::optional<Json> TryParse(std::string_view s) {
  Json doc = Json::parse(s.begin(), s.end(), nullptr,
                         /*allow_exceptions=*/false);
  if (doc.is_discarded()) return std::nullopt;
  return doc;
}

Json ParseNls(std::string_view nls_text) {
  if (nls_text.empty()) return Json::object();
  auto doc = TryParse(StripBom(nls_text));
  if (!doc) doc = TryParse(RelaxedToStrict(StripBom(nls_text)));
  if (!doc || !doc->is_object()) return Json::object();
  return *doc;
}

class NlsTable {
 public:
  explicit NlsTable(const Json& doc) {
    for (const auto& [key, value] : doc.items()) {
      if (value.is_string()) {
        entries_.emplace_back(key, value.get<std::string>());
      } else if (value.is_object() && value.contains("message") &&
                 value["message"].is_string()) {
        entries_.emplace_back(key, value["message"].get<std::string>());
      }
    }
  }

  std::string Resolve(const std::string& s) const {
    if (s.size() < 3 || s.front() != '%' || s.back() != '%') return s;
    const std::string key = s.substr(1, s.size() - 2);
    for (const auto& [k, v] : entries_) {
      if (k == key) return v;
    }
    return s;
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

// Accepts a string, or a localized {value, original} object.
std::string StringField(const Json& obj, const char* key,
                        const NlsTable& nls) {
  if (!obj.is_object() || !obj.contains(key)) return {};
  const Json& v = obj[key];
  if (v.is_string()) return nls.Resolve(v.get<std::string>());
  if (v.is_object() && v.contains("value") && v["value"].is_string()) {
    return nls.Resolve(v["value"].get<std::string>());
  }
  return {};
}

const Json* Contributes(const Json& doc) {
  if (!doc.is_object()) return nullptr;
  auto it = doc.find("contributes");
  if (it == doc.end() || !it->is_object()) return nullptr;
  return &*it;
}

std::vector<CommandContribution> CommandsFrom(const Json& doc,
                                              const NlsTable& nls) {
  std::vector<CommandContribution> out;
  const Json* contributes = Contributes(doc);
  if (contributes == nullptr) return out;
  auto it = contributes->find("commands");
  if (it == contributes->end()) return out;
  std::vector<const Json*> items;
  if (it->is_array()) {
    for (const Json& c : *it) items.push_back(&c);
  } else if (it->is_object()) {
    items.push_back(&*it);
  }
  std::unordered_set<std::string> seen;
  for (const Json* item : items) {
    std::string id = StringField(*item, "command", nls);
    if (id.empty() || !seen.insert(id).second) continue;
    CommandContribution c;
    c.command_id = std::move(id);
    c.title = StringField(*item, "title", nls);
    if (item->contains("category")) {
      c.category = StringField(*item, "category", nls);
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<ConfigurationContribution> ConfigurationsFrom(
    const Json& doc, const NlsTable& nls) {
  std::vector<ConfigurationContribution> out;
  const Json* contributes = Contributes(doc);
  if (contributes == nullptr) return out;
  auto it = contributes->find("configuration");
  if (it == contributes->end()) return out;
  std::vector<const Json*> blocks;
  if (it->is_array()) {
    for (const Json& b : *it) blocks.push_back(&b);
  } else if (it->is_object()) {
    blocks.push_back(&*it);
  }
  std::unordered_set<std::string> seen;
  for (const Json* block : blocks) {
    if (!block->is_object()) continue;
    auto props = block->find("properties");
    if (props == block->end() || !props->is_object()) continue;
    for (const auto& [key, prop] : props->items()) {
      if (key.empty() || !seen.insert(key).second) continue;
      ConfigurationContribution c;
      c.key = key;
      c.description = StringField(prop, "description", nls);
      if (c.description.empty()) {
        c.description = StringField(prop, "markdownDescription", nls);
      }
      if (prop.is_object() && prop.contains("type")) {
        const Json& t = prop["type"];
        if (t.is_string()) {
          c.value_type = t.get<std::string>();
        } else if (t.is_array()) {
          std::vector<std::string> types;
          for (const Json& x : t) {
            if (x.is_string()) types.push_back(x.get<std::string>());
          }
          c.value_type = text::Join(types, "|");
        }
      }
      c.default_present = prop.is_object() && prop.contains("default");
      out.push_back(std::move(c));
    }
  }
  return out;
}

std::string IdPart(std::string s) {
  std::replace(s.begin(), s.end(), '.', '_');
  return s;
}

ExtensionPackage Assemble(ExtensionManifest manifest, SourceFileSet sources,
                          const fs::path& origin) {
  ExtensionPackage pkg;
  std::string publisher =
      manifest.publisher.empty() ? "undefined_publisher" : manifest.publisher;
  pkg.extension_id = IdPart(publisher) + "." + IdPart(manifest.name);
  pkg.version = manifest.version;
  pkg.manifest = std::move(manifest);
  pkg.sources = std::move(sources);
  pkg.origin_path = origin;
  return pkg;
}

}  // namespace

size_t SourceFileSet::total_bytes() const {
  size_t total = 0;
  for (const SourceFile& f : files) total += f.content.size();
  return total;
}

ExtensionManifest ParseManifest(std::string_view manifest_text,
                                std::string_view nls_text) {
  std::string_view body = StripBom(manifest_text);
  std::optional<Json> doc = TryParse(body);
  if (!doc) doc = TryParse(RelaxedToStrict(body));
  if (!doc || !doc->is_object()) {
    throw Error(ErrorCode::kManifestUnparseable,
                "package.json is not a valid JSON object");
  }
  auto tree = std::make_shared<ManifestTree>();
  tree->doc = std::move(*doc);
  tree->nls = ParseNls(nls_text);
  const Json& d = tree->doc;
  const NlsTable nls(tree->nls);

  ExtensionManifest m;
  m.publisher = StringField(d, "publisher", nls);
  m.name = StringField(d, "name", nls);
  if (m.name.empty()) {
    throw Error(ErrorCode::kManifestUnparseable, "manifest has no name");
  }
  m.version = StringField(d, "version", nls);
  m.display_name = StringField(d, "displayName", nls);
  m.description = StringField(d, "description", nls);
  if (auto it = d.find("categories"); it != d.end() && it->is_array()) {
    for (const Json& c : *it) {
      if (c.is_string()) m.categories.push_back(c.get<std::string>());
    }
  }
  if (auto it = d.find("activationEvents"); it != d.end() && it->is_array()) {
    for (const Json& e : *it) {
      if (e.is_string()) m.activation_events.push_back(e.get<std::string>());
    }
  }
  m.commands = CommandsFrom(d, nls);
  m.configurations = ConfigurationsFrom(d, nls);
  m.raw = std::move(tree);
  return m;
}

std::vector<CommandContribution> RequestedCommands(
    const ExtensionManifest& manifest) {
  if (manifest.raw == nullptr) return manifest.commands;
  return CommandsFrom(manifest.raw->doc, NlsTable(manifest.raw->nls));
}

std::vector<ConfigurationContribution> RequestedConfigurations(
    const ExtensionManifest& manifest) {
  if (manifest.raw == nullptr) return manifest.configurations;
  return ConfigurationsFrom(manifest.raw->doc, NlsTable(manifest.raw->nls));
}

std::vector<std::string> ForeignCommandListeners(
    const ExtensionManifest& manifest,
    const std::vector<CommandContribution>& own_commands) {
  constexpr std::string_view kPrefix = "onCommand:";
  std::set<std::string> own;
  for (const CommandContribution& c : own_commands) own.insert(c.command_id);
  std::vector<std::string> out;
  std::set<std::string> emitted;
  for (const std::string& event : manifest.activation_events) {
    if (!text::StartsWith(event, kPrefix)) continue;
    std::string id(text::Trim(std::string_view(event).substr(kPrefix.size())));
    if (id.empty() || own.count(id) > 0) continue;
    if (emitted.insert(id).second) out.push_back(std::move(id));
  }
  return out;
}

bool IsScriptPath(std::string_view path) {
  return text::EndsWith(path, ".js") || text::EndsWith(path, ".cjs") ||
         text::EndsWith(path, ".mjs");
}

bool IsBundledDependencyPath(std::string_view path) {
  return text::StartsWith(path, "node_modules/") ||
         path.find("/node_modules/") != std::string_view::npos;
}

SourceFileSet CollectSources(std::vector<SourceFile> candidates,
                             const IngestOptions& options) {
  SourceFileSet set;
  std::vector<SourceFile> kept;
  for (SourceFile& f : candidates) {
    if (!IsScriptPath(f.path)) continue;
    if (IsBundledDependencyPath(f.path)) {
      set.skipped.push_back({f.path, "node_modules"});
      continue;
    }
    kept.push_back(std::move(f));
  }
  size_t total = 0;
  for (const SourceFile& f : kept) total += f.content.size();
  if (total > options.source_cap_bytes) {
    // Drop the largest files first until the remainder fits.
    std::vector<size_t> order(kept.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      if (kept[a].content.size() != kept[b].content.size()) {
        return kept[a].content.size() > kept[b].content.size();
      }
      return kept[a].path < kept[b].path;
    });
    std::vector<bool> dropped(kept.size(), false);
    for (size_t idx : order) {
      if (total <= options.source_cap_bytes) break;
      dropped[idx] = true;
      total -= kept[idx].content.size();
    }
    std::vector<SourceFile> remaining;
    for (size_t i = 0; i < kept.size(); ++i) {
      if (dropped[i]) {
        set.skipped.push_back({kept[i].path, "size-cap"});
      } else {
        remaining.push_back(std::move(kept[i]));
      }
    }
    kept = std::move(remaining);
  }
  std::sort(kept.begin(), kept.end(),
            [](const SourceFile& a, const SourceFile& b) {
              return a.path < b.path;
            });
  std::sort(set.skipped.begin(), set.skipped.end(),
            [](const SkippedFile& a, const SkippedFile& b) {
              return a.path < b.path;
            });
  set.files = std::move(kept);
  return set;
}

ExtensionPackage UnpackVsix(const fs::path& archive_path,
                            const IngestOptions& options) {
  std::string bytes = text::ReadFile(archive_path);
  if (!zip::LooksLikeZip(bytes)) {
    throw Error(ErrorCode::kNotAnArchive,
                archive_path.string() + " is not a ZIP archive");
  }
  zip::ZipReader reader(std::move(bytes));
  auto manifest_index = reader.Find(kArchiveManifest);
  if (!manifest_index) {
    throw Error(ErrorCode::kManifestMissing,
                archive_path.string() + " has no extension/package.json");
  }
  std::string nls;
  if (auto nls_index = reader.Find("extension/package.nls.json")) {
    nls = reader.Read(reader.entries()[*nls_index]);
  }
  ExtensionManifest manifest =
      ParseManifest(reader.Read(reader.entries()[*manifest_index]), nls);

  std::vector<SourceFile> candidates;
  for (const zip::ZipEntry& e : reader.entries()) {
    if (e.is_directory() || !text::StartsWith(e.name, kArchiveRoot)) continue;
    std::string rel = e.name.substr(kArchiveRoot.size());
    if (!IsScriptPath(rel)) continue;
    if (IsBundledDependencyPath(rel)) {
      candidates.push_back({std::move(rel), {}});
      continue;
    }
    candidates.push_back({std::move(rel), reader.Read(e)});
  }
  return Assemble(std::move(manifest),
                  CollectSources(std::move(candidates), options),
                  archive_path);
}

ExtensionPackage LoadDirectory(const fs::path& dir,
                               const IngestOptions& options) {
  fs::path root;
  if (fs::is_regular_file(dir / "extension" / "package.json")) {
    root = dir / "extension";
  } else if (fs::is_regular_file(dir / "package.json")) {
    root = dir;
  } else {
    throw Error(ErrorCode::kManifestMissing,
                dir.string() + " has no package.json");
  }
  std::string nls;
  if (fs::is_regular_file(root / "package.nls.json")) {
    nls = text::ReadFile(root / "package.nls.json");
  }
  ExtensionManifest manifest =
      ParseManifest(text::ReadFile(root / "package.json"), nls);

  std::vector<SourceFile> candidates;
  std::error_code ec;
  for (auto it = fs::recursive_directory_iterator(root, ec);
       it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (ec) break;
    if (!it->is_regular_file()) continue;
    std::string rel = fs::relative(it->path(), root).generic_string();
    if (!IsScriptPath(rel)) continue;
    if (IsBundledDependencyPath(rel)) {
      candidates.push_back({std::move(rel), {}});
      continue;
    }
    candidates.push_back({std::move(rel), text::ReadFile(it->path())});
  }
  return Assemble(std::move(manifest),
                  CollectSources(std::move(candidates), options), dir);
}

bool IsPackagePath(const fs::path& path) {
  std::error_code ec;
  if (fs::is_directory(path, ec)) {
    return fs::is_regular_file(path / "extension" / "package.json", ec) ||
           fs::is_regular_file(path / "package.json", ec);
  }
  return fs::is_regular_file(path, ec) && path.extension() == ".vsix";
}

ExtensionPackage LoadPackage(const fs::path& path,
                             const IngestOptions& options) {
  std::error_code ec;
  if (fs::is_directory(path, ec)) return LoadDirectory(path, options);
  if (!fs::exists(path, ec)) {
    throw Error(ErrorCode::kIo, path.string() + " does not exist");
  }
  return UnpackVsix(path, options);
}

}  // namespace vsxscan::ingest
