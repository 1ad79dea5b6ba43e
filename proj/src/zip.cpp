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

#include "vsxscan/zip.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstring>

#include "vsxscan/error.hpp"
#include "vsxscan/text.hpp"

namespace vsxscan::zip {
namespace {

constexpr uint32_t kLocalHeaderSig = 0x04034b50;
constexpr uint32_t kCentralHeaderSig = 0x02014b50;
constexpr uint32_t kEndOfDirSig = 0x06054b50;
constexpr uint32_t kZip64EndOfDirSig = 0x06064b50;
constexpr uint32_t kZip64LocatorSig = 0x07064b50;

uint16_t Le16(std::string_view b, size_t at) {
  if (at + 2 > b.size()) throw Error(ErrorCode::kNotAnArchive, "truncated");
  return static_cast<uint16_t>(static_cast<unsigned char>(b[at]) |
                               (static_cast<unsigned char>(b[at + 1]) << 8));
}

uint32_t Le32(std::string_view b, size_t at) {
  return static_cast<uint32_t>(Le16(b, at)) |
         (static_cast<uint32_t>(Le16(b, at + 2)) << 16);
}

uint64_t Le64(std::string_view b, size_t at) {
  return static_cast<uint64_t>(Le32(b, at)) |
         (static_cast<uint64_t>(Le32(b, at + 4)) << 32);
}

void Put16(std::string& out, uint16_t v) {
  out += static_cast<char>(v & 0xFF);
  out += static_cast<char>(v >> 8);
}

void Put32(std::string& out, uint32_t v) {
  Put16(out, static_cast<uint16_t>(v & 0xFFFF));
  Put16(out, static_cast<uint16_t>(v >> 16));
}

uint32_t Crc(std::string_view data) {
  uLong crc = crc32(0L, Z_NULL, 0);
  size_t off = 0;
  while (off < data.size()) {
    const auto chunk =
        static_cast<uInt>(std::min<size_t>(data.size() - off, 1u << 30));
    crc = crc32(crc, reinterpret_cast<const Bytef*>(data.data() + off), chunk);
    off += chunk;
  }
  return static_cast<uint32_t>(crc);
}

std::string Inflate(std::string_view in, uint64_t expected) {
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) {
    throw Error(ErrorCode::kNotAnArchive, "inflateInit failed");
  }
  std::string out;
  out.resize(static_cast<size_t>(expected));
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  int rc = inflate(&zs, Z_FINISH);
  const uLong produced = zs.total_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || produced != expected) {
    throw Error(ErrorCode::kNotAnArchive, "corrupt deflate stream");
  }
  return out;
}

std::string Deflate(std::string_view in) {
  z_stream zs{};
  if (deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, -MAX_WBITS, 8,
                   Z_DEFAULT_STRATEGY) != Z_OK) {
    throw Error(ErrorCode::kIo, "deflateInit failed");
  }
  std::string out;
  out.resize(deflateBound(&zs, static_cast<uLong>(in.size())));
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  int rc = deflate(&zs, Z_FINISH);
  out.resize(zs.total_out);
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw Error(ErrorCode::kIo, "deflate failed");
  return out;
}

}  // namespace

bool LooksLikeZip(std::string_view bytes) {
  return bytes.size() >= 22 && Le32(bytes, 0) == kLocalHeaderSig;
}

ZipReader::ZipReader(std::string bytes) : bytes_(std::move(bytes)) {
  std::string_view b = bytes_;
  if (b.size() < 22) throw Error(ErrorCode::kNotAnArchive, "too short");
  // The end record sits in the last 22 + 65535 bytes (trailing comment).
  size_t eocd = std::string_view::npos;
  const size_t lowest = b.size() > 22 + 0xFFFF ? b.size() - 22 - 0xFFFF : 0;
  for (size_t pos = b.size() - 22 + 1; pos-- > lowest;) {
    if (Le32(b, pos) == kEndOfDirSig) {
      eocd = pos;
      break;
    }
  }
  if (eocd == std::string_view::npos) {
    throw Error(ErrorCode::kNotAnArchive, "no end of central directory");
  }
  uint64_t count = Le16(b, eocd + 10);
  uint64_t dir_offset = Le32(b, eocd + 16);
  if ((count == 0xFFFF || dir_offset == 0xFFFFFFFF) && eocd >= 20 &&
      Le32(b, eocd - 20) == kZip64LocatorSig) {
    const uint64_t z64 = Le64(b, eocd - 20 + 8);
    if (z64 + 56 > b.size() || Le32(b, z64) != kZip64EndOfDirSig) {
      throw Error(ErrorCode::kNotAnArchive, "bad zip64 end record");
    }
    count = Le64(b, z64 + 32);
    dir_offset = Le64(b, z64 + 48);
  }
  size_t pos = static_cast<size_t>(dir_offset);
  entries_.reserve(static_cast<size_t>(std::min<uint64_t>(count, 1u << 20)));
  for (uint64_t i = 0; i < count; ++i) {
    if (pos + 46 > b.size() || Le32(b, pos) != kCentralHeaderSig) {
      throw Error(ErrorCode::kNotAnArchive, "bad central directory entry");
    }
    ZipEntry e;
    e.method = Le16(b, pos + 10);
    e.crc32 = Le32(b, pos + 16);
    e.compressed_size = Le32(b, pos + 20);
    e.uncompressed_size = Le32(b, pos + 24);
    const uint16_t name_len = Le16(b, pos + 28);
    const uint16_t extra_len = Le16(b, pos + 30);
    const uint16_t comment_len = Le16(b, pos + 32);
    e.local_header_offset = Le32(b, pos + 42);
    if (pos + 46 + name_len + extra_len > b.size()) {
      throw Error(ErrorCode::kNotAnArchive, "truncated central directory");
    }
    e.name.assign(b.substr(pos + 46, name_len));
    // zip64 extended information overrides saturated 32-bit fields in order.
    size_t extra = pos + 46 + name_len;
    const size_t extra_end = extra + extra_len;
    while (extra + 4 <= extra_end) {
      const uint16_t id = Le16(b, extra);
      const uint16_t len = Le16(b, extra + 2);
      if (id == 0x0001) {
        size_t f = extra + 4;
        if (e.uncompressed_size == 0xFFFFFFFF) {
          e.uncompressed_size = Le64(b, f);
          f += 8;
        }
        if (e.compressed_size == 0xFFFFFFFF) {
          e.compressed_size = Le64(b, f);
          f += 8;
        }
        if (e.local_header_offset == 0xFFFFFFFF) {
          e.local_header_offset = Le64(b, f);
        }
      }
      extra += 4 + len;
    }
    entries_.push_back(std::move(e));
    pos += 46 + name_len + extra_len + comment_len;
  }
}

ZipReader ZipReader::FromFile(const std::filesystem::path& path) {
  return ZipReader(text::ReadFile(path));
}

std::optional<size_t> ZipReader::Find(std::string_view name) const {
  for (size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].name == name) return i;
  }
  return std::nullopt;
}

std::string ZipReader::Read(const ZipEntry& entry) const {
  std::string_view b = bytes_;
  const auto at = static_cast<size_t>(entry.local_header_offset);
  if (at + 30 > b.size() || Le32(b, at) != kLocalHeaderSig) {
    throw Error(ErrorCode::kNotAnArchive, "bad local header for " + entry.name);
  }
  const size_t data_at = at + 30 + Le16(b, at + 26) + Le16(b, at + 28);
  if (data_at + entry.compressed_size > b.size()) {
    throw Error(ErrorCode::kNotAnArchive, "truncated entry " + entry.name);
  }
  std::string_view data =
      b.substr(data_at, static_cast<size_t>(entry.compressed_size));
  std::string out;
  if (entry.method == 0) {
    out.assign(data);
  } else if (entry.method == 8) {
    out = Inflate(data, entry.uncompressed_size);
  } else {
    throw Error(ErrorCode::kNotAnArchive,
                "unsupported compression method for " + entry.name);
  }
  if (Crc(out) != entry.crc32) {
    throw Error(ErrorCode::kNotAnArchive, "crc mismatch for " + entry.name);
  }
  return out;
}

void ZipWriter::Add(std::string name, std::string_view content,
                    bool deflate) {
  Pending p;
  p.entry.name = std::move(name);
  p.entry.crc32 = Crc(content);
  p.entry.uncompressed_size = content.size();
  if (deflate && !content.empty()) {
    p.entry.method = 8;
    p.data = Deflate(content);
  } else {
    p.entry.method = 0;
    p.data.assign(content);
  }
  p.entry.compressed_size = p.data.size();
  pending_.push_back(std::move(p));
}

std::string ZipWriter::Finish() const {
  std::string out;
  std::vector<uint32_t> offsets;
  for (const Pending& p : pending_) {
    offsets.push_back(static_cast<uint32_t>(out.size()));
    Put32(out, kLocalHeaderSig);
    Put16(out, 20);  // version needed
    Put16(out, 0);   // flags
    Put16(out, p.entry.method);
    Put16(out, 0);  // mod time
    Put16(out, 0x21);  // mod date: 1980-01-01
    Put32(out, p.entry.crc32);
    Put32(out, static_cast<uint32_t>(p.entry.compressed_size));
    Put32(out, static_cast<uint32_t>(p.entry.uncompressed_size));
    Put16(out, static_cast<uint16_t>(p.entry.name.size()));
    Put16(out, 0);
    out += p.entry.name;
    out += p.data;
  }
  const auto dir_start = static_cast<uint32_t>(out.size());
  for (size_t i = 0; i < pending_.size(); ++i) {
    const ZipEntry& e = pending_[i].entry;
    Put32(out, kCentralHeaderSig);
    Put16(out, 20);
    Put16(out, 20);
    Put16(out, 0);
    Put16(out, e.method);
    Put16(out, 0);
    Put16(out, 0x21);
    Put32(out, e.crc32);
    Put32(out, static_cast<uint32_t>(e.compressed_size));
    Put32(out, static_cast<uint32_t>(e.uncompressed_size));
    Put16(out, static_cast<uint16_t>(e.name.size()));
    Put16(out, 0);  // extra
    Put16(out, 0);  // comment
    Put16(out, 0);  // disk
    Put16(out, 0);  // internal attrs
    Put32(out, 0);  // external attrs
    Put32(out, offsets[i]);
    out += e.name;
  }
  const auto dir_size = static_cast<uint32_t>(out.size() - dir_start);
  Put32(out, kEndOfDirSig);
  Put16(out, 0);
  Put16(out, 0);
  Put16(out, static_cast<uint16_t>(pending_.size()));
  Put16(out, static_cast<uint16_t>(pending_.size()));
  Put32(out, dir_size);
  Put32(out, dir_start);
  Put16(out, 0);
  return out;
}

void ZipWriter::WriteTo(const std::filesystem::path& path) const {
  text::WriteFile(path, Finish());
}

}  // namespace vsxscan::zip
