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

#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <string>

#include "support/temp_dir.hpp"
#include "vsxscan/error.hpp"
#include "vsxscan/text.hpp"
#include "vsxscan/zip.hpp"

namespace vsxscan::ingest {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

template <typename F>
ErrorCode CodeOf(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kIo;
}

fs::path WriteVsix(const fs::path& dir, const std::string& name,
                   const std::vector<std::pair<std::string, std::string>>& entries) {
  zip::ZipWriter w;
  for (const auto& [path, content] : entries) w.Add(path, content);
  const fs::path out = dir / name;
  w.WriteTo(out);
  return out;
}

std::set<std::string> Paths(const std::vector<SourceFile>& files) {
  std::set<std::string> out;
  for (const auto& f : files) out.insert(f.path);
  return out;
}

TEST(UnpackVsixTest, AssemblesIdFromManifest) {
  TempDir dir("vsix");
  const fs::path p = WriteVsix(
      dir.path(), "a.vsix",
      {{"extension/package.json",
        R"({"publisher": "easycode", "name": "easycode", "version": "0.9.1"})"},
       {"extension/out/extension.js", "exports.activate = () => 1;"},
       {"extension/README.md", "# readme"},
       {"[Content_Types].xml", "<Types/>"}});
  const ExtensionPackage pkg = UnpackVsix(p);
  EXPECT_EQ(pkg.extension_id, "easycode.easycode");
  EXPECT_EQ(pkg.version, "0.9.1");
  EXPECT_EQ(Paths(pkg.sources.files), std::set<std::string>{"out/extension.js"});
  EXPECT_TRUE(RequestedCommands(pkg.manifest).empty());
  EXPECT_TRUE(RequestedConfigurations(pkg.manifest).empty());
  // Same bytes, same package.
  const ExtensionPackage again = UnpackVsix(p);
  EXPECT_EQ(again.sources.files.size(), pkg.sources.files.size());
  EXPECT_EQ(again.sources.files[0].content, pkg.sources.files[0].content);
}

TEST(UnpackVsixTest, NodeModulesAreSkipped) {
  TempDir dir("nm");
  const fs::path p = WriteVsix(
      dir.path(), "b.vsix",
      {{"extension/package.json", R"({"publisher": "p", "name": "n"})"},
       {"extension/node_modules/x.js", "module.exports = 1;"},
       {"extension/lib/a.mjs", "export const a = 1;"},
       {"extension/lib/b.cjs", "module.exports = 2;"}});
  const ExtensionPackage pkg = UnpackVsix(p);
  EXPECT_EQ(Paths(pkg.sources.files), (std::set<std::string>{"lib/a.mjs", "lib/b.cjs"}));
  ASSERT_EQ(pkg.sources.skipped.size(), 1u);
  EXPECT_EQ(pkg.sources.skipped[0].path, "node_modules/x.js");
  EXPECT_EQ(pkg.sources.skipped[0].reason, "node_modules");
}

TEST(UnpackVsixTest, Errors) {
  TempDir dir("err");
  text::WriteFile(dir.path() / "junk.vsix", "this is not a zip");
  EXPECT_EQ(CodeOf([&] { UnpackVsix(dir.path() / "junk.vsix"); }), ErrorCode::kNotAnArchive);
  const fs::path nomanifest =
      WriteVsix(dir.path(), "nm.vsix", {{"extension/out/a.js", "1;"}});
  EXPECT_EQ(CodeOf([&] { UnpackVsix(nomanifest); }), ErrorCode::kManifestMissing);
  const fs::path bad =
      WriteVsix(dir.path(), "bad.vsix", {{"extension/package.json", "{ not json at all"}});
  EXPECT_EQ(CodeOf([&] { UnpackVsix(bad); }), ErrorCode::kManifestUnparseable);
}

TEST(LoadDirectoryTest, AcceptsBothLayouts) {
  TempDir dir("layout");
  testing::WriteMiniExtension(dir.path() / "flat", R"({"publisher": "a", "name": "flat"})",
                              "1;");
  fs::create_directories(dir.path() / "nested" / "extension");
  text::WriteFile(dir.path() / "nested" / "extension" / "package.json",
                  R"({"publisher": "a", "name": "nested"})");
  EXPECT_EQ(LoadPackage(dir.path() / "flat").extension_id, "a.flat");
  EXPECT_EQ(LoadPackage(dir.path() / "nested").extension_id, "a.nested");
  EXPECT_TRUE(IsPackagePath(dir.path() / "flat"));
  EXPECT_FALSE(IsPackagePath(dir.path()));
}

TEST(SourceCapTest, LargestFilesGoFirst) {
  IngestOptions o;
  o.source_cap_bytes = 100;
  const SourceFileSet s = CollectSources({{"a.js", std::string(60, 'a')},
                                          {"b.js", std::string(30, 'b')},
                                          {"c.js", std::string(50, 'c')},
                                          {"d.txt", std::string(500, 'd')}},
                                         o);
  EXPECT_EQ(Paths(s.files), (std::set<std::string>{"b.js", "c.js"}));
  EXPECT_LE(s.total_bytes(), 100u);
  ASSERT_EQ(s.skipped.size(), 1u);
  EXPECT_EQ(s.skipped[0].path, "a.js");
  EXPECT_EQ(s.skipped[0].reason, "size-cap");
}

TEST(ManifestTest, CommandsTakenVerbatimAndDeduplicated) {
  const ExtensionManifest m = ParseManifest(R"({
    "publisher": "codegpt", "name": "codegpt",
    "contributes": {"commands": [
      {"command": "codegpt.removeApiKeyCodeGPT", "title": "Remove API Key", "category": "CodeGPT"},
      {"command": "codegpt.removeApiKeyCodeGPT", "title": "Second title"},
      {"command": "codegpt.untitled"}
    ]}})");
  const auto cmds = RequestedCommands(m);
  ASSERT_EQ(cmds.size(), 2u);
  EXPECT_EQ(cmds[0].command_id, "codegpt.removeApiKeyCodeGPT");
  EXPECT_EQ(cmds[0].title, "Remove API Key");
  EXPECT_EQ(cmds[0].category, std::optional<std::string>("CodeGPT"));
  EXPECT_EQ(cmds[1].title, "");
  EXPECT_TRUE(RequestedCommands(ParseManifest(R"({"publisher": "a", "name": "b"})")).empty());
}

TEST(ManifestTest, ConfigurationObjectOrList) {
  const ExtensionManifest single = ParseManifest(R"({
    "publisher": "easycode", "name": "easycode",
    "contributes": {"configuration": {"properties": {
      "easycode.openAI ApiKey": {"type": "string", "description": "Your OpenAI Api Key"}}}}})");
  const auto a = RequestedConfigurations(single);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0].key, "easycode.openAI ApiKey");
  EXPECT_EQ(a[0].description, "Your OpenAI Api Key");

  const ExtensionManifest list = ParseManifest(R"({
    "publisher": "d", "name": "share",
    "contributes": {"configuration": [
      {"properties": {"discordCodeShare.webhook":
          {"type": "string", "description": "Webhook used to deliver your code to."}}},
      {"properties": {}}]}})");
  const auto b = RequestedConfigurations(list);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b[0].key, "discordCodeShare.webhook");
  EXPECT_EQ(b[0].description, "Webhook used to deliver your code to.");
}

TEST(ManifestTest, LenientDialectAndNlsPlaceholders) {
  const ExtensionManifest m = ParseManifest(
      "{\n  // comment\n  \"publisher\": \"p\", \"name\": \"n\",\n"
      "  \"contributes\": {\"commands\": [{\"command\": \"p.go\", \"title\": \"%go.title%\"},],},\n}",
      R"({"go.title": "Go Now"})");
  const auto cmds = RequestedCommands(m);
  ASSERT_EQ(cmds.size(), 1u);
  EXPECT_EQ(cmds[0].title, "Go Now");
}

TEST(ManifestTest, ForeignListeners) {
  const ExtensionManifest m = ParseManifest(R"({
    "publisher": "x", "name": "y",
    "activationEvents": ["onCommand:github.copilot.generate", "onCommand:my.own",
                         "onLanguage:python"],
    "contributes": {"commands": [{"command": "my.own", "title": "Mine"}]}})");
  const auto own = RequestedCommands(m);
  const auto foreign = ForeignCommandListeners(m, own);
  EXPECT_EQ(foreign, std::vector<std::string>{"github.copilot.generate"});
  for (const auto& c : own) {
    EXPECT_EQ(std::count(foreign.begin(), foreign.end(), c.command_id), 0);
  }
  EXPECT_EQ(m.activation_events.front(), "onCommand:github.copilot.generate");
}

}  // namespace
}  // namespace vsxscan::ingest
