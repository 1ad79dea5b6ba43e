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

#ifndef VSXSCAN_TESTS_SUPPORT_TEMP_DIR_HPP_
#define VSXSCAN_TESTS_SUPPORT_TEMP_DIR_HPP_

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <string>

#include "vsxscan/text.hpp"

namespace vsxscan::testing {

// Fresh directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("vsxscan-" + tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Writes <dir>/package.json and, when `script` is non-empty,
// <dir>/out/extension.js.
inline void WriteMiniExtension(const std::filesystem::path& dir,
                               const std::string& manifest_json,
                               const std::string& script = {}) {
  std::filesystem::create_directories(dir / "out");
  text::WriteFile(dir / "package.json", manifest_json);
  if (!script.empty()) text::WriteFile(dir / "out" / "extension.js", script);
}

// Twenty extensions; ids "corpus.ext00".."corpus.ext19". Every fourth one
// (00, 04, ...) stores an API key in its configuration.
inline void WritePlantedCorpus(const std::filesystem::path& root) {
  for (int i = 0; i < 20; ++i) {
    char name[16];
    std::snprintf(name, sizeof name, "ext%02d", i);
    const bool planted = i % 4 == 0;
    const std::string key = std::string("corpus") + name;
    const std::string manifest =
        std::string(R"({"publisher": "corpus", "name": ")") + name +
        R"(", "version": "1.0.)" + std::to_string(i) +
        R"(", "contributes": {"commands": [{"command": ")" + key +
        R"(.run", "title": "Run Task )" + std::to_string(i) + R"("}]}})";
    const std::string script =
        planted ? "const v = require('vscode');\n"
                  "exports.activate = () => v.workspace.getConfiguration('" +
                      key + "').get('openaiApiKey');\n"
                : "const v = require('vscode');\n"
                  "exports.activate = () => v.workspace.getConfiguration('" +
                      key + "').get('tabSize');\n";
    WriteMiniExtension(root / name, manifest, script);
  }
}

}  // namespace vsxscan::testing

#endif  // VSXSCAN_TESTS_SUPPORT_TEMP_DIR_HPP_
