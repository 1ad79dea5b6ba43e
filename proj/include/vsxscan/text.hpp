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

// Small string helpers shared by the record-file formats and the featurizer.

#ifndef VSXSCAN_TEXT_HPP_
#define VSXSCAN_TEXT_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace vsxscan::text {

std::string ToLowerAscii(std::string_view s);
bool StartsWith(std::string_view s, std::string_view prefix);
bool EndsWith(std::string_view s, std::string_view suffix);
std::string_view Trim(std::string_view s);
std::vector<std::string> Split(std::string_view s, char sep);
std::string Join(const std::vector<std::string>& parts, std::string_view sep);

// Tab-separated record fields. Backslash, tab, CR and LF inside a field are
// written as \\ \t \r \n so that one record always occupies one line.
std::string EscapeField(std::string_view field);
std::string UnescapeField(std::string_view field);
std::string JoinRecord(const std::vector<std::string>& fields);
std::vector<std::string> SplitRecord(std::string_view line);

// Decodes UTF-8 into code points. Malformed bytes decode to U+FFFD.
std::vector<char32_t> DecodeUtf8(std::string_view s);
std::string EncodeUtf8(const std::vector<char32_t>& cps);
void AppendUtf8(std::string& out, char32_t cp);

// Exact hexadecimal rendering of a double ("%a"), parsed back bit-exactly.
std::string DoubleToHex(double v);
double HexToDouble(std::string_view s);

std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, std::string_view content);

}  // namespace vsxscan::text

#endif  // VSXSCAN_TEXT_HPP_
