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

// Minimal ZIP container support: enough of the format to read .vsix packages
// (stored and deflated entries, central directory) and to write fixture
// archives.

#ifndef VSXSCAN_ZIP_HPP_
#define VSXSCAN_ZIP_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vsxscan::zip {

struct ZipEntry {
  std::string name;
  uint16_t method = 0;
  uint32_t crc32 = 0;
  uint64_t compressed_size = 0;
  uint64_t uncompressed_size = 0;
  uint64_t local_header_offset = 0;

  bool is_directory() const { return !name.empty() && name.back() == '/'; }
};

class ZipReader {
 public:
  // Throws Error(kNotAnArchive) when the bytes carry no end-of-central-
  // directory record or the directory is inconsistent.
  explicit ZipReader(std::string bytes);
  static ZipReader FromFile(const std::filesystem::path& path);

  const std::vector<ZipEntry>& entries() const { return entries_; }
  std::optional<size_t> Find(std::string_view name) const;

  // Decompresses one entry and checks its CRC.
  std::string Read(const ZipEntry& entry) const;

 private:
  std::string bytes_;
  std::vector<ZipEntry> entries_;
};

class ZipWriter {
 public:
  void Add(std::string name, std::string_view content, bool deflate = true);
  std::string Finish() const;
  void WriteTo(const std::filesystem::path& path) const;

 private:
  struct Pending {
    ZipEntry entry;
    std::string data;
  };
  std::vector<Pending> pending_;
};

bool LooksLikeZip(std::string_view bytes);

}  // namespace vsxscan::zip

#endif  // VSXSCAN_ZIP_HPP_
