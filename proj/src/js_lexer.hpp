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

#ifndef VSXSCAN_SRC_JS_LEXER_HPP_
#define VSXSCAN_SRC_JS_LEXER_HPP_

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "vsxscan/js_parser.hpp"

namespace vsxscan::js {

enum class TokKind : uint8_t {
  kEof,
  kIdentifier,  // includes reserved words; the parser decides
  kPrivateName,
  kString,
  kTemplateFull,
  kTemplateHead,
  kTemplateMiddle,
  kTemplateTail,
  kNumber,
  kBigInt,
  kRegExp,
  kPunct,
};

inline constexpr uint32_t kNoCooked = std::numeric_limits<uint32_t>::max();

struct Token {
  TokKind kind = TokKind::kEof;
  bool newline_before = false;
  uint32_t begin = 0;
  uint32_t end = 0;
  uint32_t cooked = kNoCooked;  // index into Lexer::cooked()
};

// Tokenizes a whole file up front. Regular-expression versus division is
// decided from the previous significant token; template substitutions are
// tracked with a brace stack.
class Lexer {
 public:
  Lexer(std::string_view source, std::string_view path,
        const ParseOptions& options);

  std::vector<Token> Tokenize();
  std::vector<std::string> TakeCooked() { return std::move(cooked_); }

  [[noreturn]] static void Fail(std::string_view source, std::string_view path,
                                uint32_t offset, const std::string& message);

 private:
  [[noreturn]] void Fail(uint32_t offset, const std::string& message) const;
  bool SkipTrivia();  // returns whether a line terminator was crossed
  void LexIdentifier(Token& tok);
  void LexNumber(Token& tok);
  void LexString(Token& tok);
  void LexTemplate(Token& tok, bool continuation);
  void LexRegExp(Token& tok);
  void LexPunct(Token& tok);
  bool RegexAllowed() const;
  bool PrevIsControlKeyword() const;
  uint32_t ReadEscape(std::string& out, bool in_template);
  uint32_t AddCooked(std::string s);

  std::string_view src_;
  std::string_view path_;
  const ParseOptions& options_;
  size_t pos_ = 0;
  std::vector<std::string> cooked_;
  std::vector<bool> brace_is_template_;
  std::vector<bool> paren_is_control_;
  bool prev_closes_control_ = false;
  Token prev_;
  bool have_prev_ = false;
};

}  // namespace vsxscan::js

#endif  // VSXSCAN_SRC_JS_LEXER_HPP_
