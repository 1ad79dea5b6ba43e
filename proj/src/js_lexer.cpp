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

#include "js_lexer.hpp"

#include <array>
#include <cstdlib>

#include "vsxscan/error.hpp"
#include "vsxscan/text.hpp"

namespace vsxscan::js {
namespace {

bool IsAsciiIdStart(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '$' ||
         c == '_';
}

bool IsDigit(char c) { return c >= '0' && c <= '9'; }

bool IsHex(char c) {
  return IsDigit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

int HexValue(char c) {
  if (IsDigit(c)) return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return c - 'A' + 10;
}

// Length of a Unicode whitespace sequence at `i` (0 when none) and whether it
// is a line terminator.
size_t UnicodeSpace(std::string_view s, size_t i, bool* newline) {
  *newline = false;
  auto at = [&](size_t k) {
    return k < s.size() ? static_cast<unsigned char>(s[k]) : 0u;
  };
  const unsigned b0 = at(i);
  if (b0 == 0xC2 && at(i + 1) == 0xA0) return 2;  // NBSP
  if (b0 == 0xEF && at(i + 1) == 0xBB && at(i + 2) == 0xBF) return 3;  // BOM
  if (b0 == 0xE1 && at(i + 1) == 0x9A && at(i + 2) == 0x80) return 3;
  if (b0 == 0xE3 && at(i + 1) == 0x80 && at(i + 2) == 0x80) return 3;
  if (b0 == 0xE2) {
    const unsigned b1 = at(i + 1);
    const unsigned b2 = at(i + 2);
    if (b1 == 0x80 && (b2 == 0xA8 || b2 == 0xA9)) {
      *newline = true;
      return 3;
    }
    if (b1 == 0x80 && ((b2 >= 0x80 && b2 <= 0x8A) || b2 == 0xAF)) return 3;
    if (b1 == 0x81 && b2 == 0x9F) return 3;
  }
  return 0;
}

size_t Utf8Length(unsigned char b0) {
  if (b0 < 0x80) return 1;
  if ((b0 & 0xE0) == 0xC0) return 2;
  if ((b0 & 0xF0) == 0xE0) return 3;
  if ((b0 & 0xF8) == 0xF0) return 4;
  return 1;
}

constexpr std::array<std::string_view, 48> kPunctuators = {
    ">>>=", "...", "===", "!==", "**=", "<<=", ">>=", ">>>", "&&=", "||=",
    "??=",  "=>",  "==",  "!=",  "<=",  ">=",  "&&",  "||",  "??",  "?.",
    "++",   "--",  "+=",  "-=",  "*=",  "/=",  "%=",  "&=",  "|=",  "^=",
    "**",   "<<",  ">>",  "{",   "}",   "(",   ")",   "[",   "]",   ";",
    ",",    "<",   ">",   "+",   "-",   "*",   "/",   "%",
};

constexpr std::string_view kSingleExtra = "&|^!~?:=.@";

bool KeywordBeforeExpression(std::string_view word) {
  static constexpr std::array<std::string_view, 15> kWords = {
      "return", "typeof", "instanceof", "in",    "of",
      "new",    "delete", "void",       "throw", "case",
      "do",     "else",   "yield",      "await", "extends"};
  for (std::string_view w : kWords) {
    if (w == word) return true;
  }
  return false;
}

}  // namespace

Lexer::Lexer(std::string_view source, std::string_view path,
             const ParseOptions& options)
    : src_(source), path_(path), options_(options) {}

void Lexer::Fail(std::string_view source, std::string_view path,
                 uint32_t offset, const std::string& message) {
  uint32_t line = 1;
  uint32_t col = 1;
  for (uint32_t i = 0; i < offset && i < source.size(); ++i) {
    if (source[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  throw Error(ErrorCode::kParseError, std::string(path) + ":" +
                                          std::to_string(line) + ":" +
                                          std::to_string(col) + ": " + message);
}

void Lexer::Fail(uint32_t offset, const std::string& message) const {
  Fail(src_, path_, offset, message);
}

uint32_t Lexer::AddCooked(std::string s) {
  cooked_.push_back(std::move(s));
  return static_cast<uint32_t>(cooked_.size() - 1);
}

bool Lexer::SkipTrivia() {
  bool newline = false;
  while (pos_ < src_.size()) {
    const char c = src_[pos_];
    if (c == ' ' || c == '\t' || c == '\v' || c == '\f') {
      ++pos_;
    } else if (c == '\n' || c == '\r') {
      newline = true;
      ++pos_;
    } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
      while (pos_ < src_.size() && src_[pos_] != '\n' && src_[pos_] != '\r') {
        ++pos_;
      }
    } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
      const size_t end = src_.find("*/", pos_ + 2);
      if (end == std::string_view::npos) {
        Fail(static_cast<uint32_t>(pos_), "unterminated comment");
      }
      if (src_.substr(pos_, end - pos_).find_first_of("\n\r") !=
          std::string_view::npos) {
        newline = true;
      }
      pos_ = end + 2;
    } else if (static_cast<unsigned char>(c) >= 0x80) {
      bool nl = false;
      const size_t len = UnicodeSpace(src_, pos_, &nl);
      if (len == 0) break;
      newline = newline || nl;
      pos_ += len;
    } else {
      break;
    }
  }
  return newline;
}

bool Lexer::PrevIsControlKeyword() const {
  if (!have_prev_ || prev_.kind != TokKind::kIdentifier) return false;
  std::string_view w = src_.substr(prev_.begin, prev_.end - prev_.begin);
  return w == "if" || w == "for" || w == "while" || w == "with";
}

bool Lexer::RegexAllowed() const {
  if (!have_prev_) return true;
  switch (prev_.kind) {
    case TokKind::kIdentifier:
      return KeywordBeforeExpression(
          src_.substr(prev_.begin, prev_.end - prev_.begin));
    case TokKind::kTemplateHead:
    case TokKind::kTemplateMiddle:
      return true;
    case TokKind::kPunct: {
      std::string_view p = src_.substr(prev_.begin, prev_.end - prev_.begin);
      if (p == ")") return prev_closes_control_;
      return !(p == "]" || p == "++" || p == "--");
    }
    default:
      return false;
  }
}

uint32_t Lexer::ReadEscape(std::string& out, bool in_template) {
  // pos_ is just past the backslash.
  if (pos_ >= src_.size()) Fail(static_cast<uint32_t>(pos_), "bad escape");
  const char c = src_[pos_++];
  switch (c) {
    case 'n': out += '\n'; return 0;
    case 't': out += '\t'; return 0;
    case 'r': out += '\r'; return 0;
    case 'b': out += '\b'; return 0;
    case 'f': out += '\f'; return 0;
    case 'v': out += '\v'; return 0;
    case '\r':
      if (pos_ < src_.size() && src_[pos_] == '\n') ++pos_;
      return 0;
    case '\n':
      return 0;
    case 'x': {
      if (pos_ + 2 > src_.size() || !IsHex(src_[pos_]) ||
          !IsHex(src_[pos_ + 1])) {
        if (in_template) return 1;
        Fail(static_cast<uint32_t>(pos_), "bad \\x escape");
      }
      text::AppendUtf8(out, static_cast<char32_t>(HexValue(src_[pos_]) * 16 +
                                                  HexValue(src_[pos_ + 1])));
      pos_ += 2;
      return 0;
    }
    case 'u': {
      char32_t cp = 0;
      if (pos_ < src_.size() && src_[pos_] == '{') {
        size_t j = pos_ + 1;
        while (j < src_.size() && IsHex(src_[j])) {
          cp = cp * 16 + static_cast<char32_t>(HexValue(src_[j]));
          ++j;
        }
        if (j >= src_.size() || src_[j] != '}' || j == pos_ + 1) {
          if (in_template) return 1;
          Fail(static_cast<uint32_t>(pos_), "bad \\u{} escape");
        }
        pos_ = j + 1;
      } else {
        if (pos_ + 4 > src_.size()) {
          if (in_template) return 1;
          Fail(static_cast<uint32_t>(pos_), "bad \\u escape");
        }
        for (int k = 0; k < 4; ++k) {
          if (!IsHex(src_[pos_ + k])) {
            if (in_template) return 1;
            Fail(static_cast<uint32_t>(pos_), "bad \\u escape");
          }
          cp = cp * 16 + static_cast<char32_t>(HexValue(src_[pos_ + k]));
        }
        pos_ += 4;
        // Surrogate pair written as two \u escapes.
        if (cp >= 0xD800 && cp <= 0xDBFF && pos_ + 6 <= src_.size() &&
            src_[pos_] == '\\' && src_[pos_ + 1] == 'u') {
          char32_t lo = 0;
          bool ok = true;
          for (int k = 0; k < 4; ++k) {
            if (!IsHex(src_[pos_ + 2 + k])) ok = false;
            else lo = lo * 16 + static_cast<char32_t>(HexValue(src_[pos_ + 2 + k]));
          }
          if (ok && lo >= 0xDC00 && lo <= 0xDFFF) {
            cp = 0x10000 + ((cp - 0xD800) << 10) + (lo - 0xDC00);
            pos_ += 6;
          }
        }
      }
      text::AppendUtf8(out, cp);
      return 0;
    }
    default:
      break;
  }
  if (c >= '0' && c <= '7') {
    // \0 or a legacy octal escape.
    int value = c - '0';
    int digits = 1;
    while (digits < 3 && pos_ < src_.size() && src_[pos_] >= '0' &&
           src_[pos_] <= '7' && value * 8 + (src_[pos_] - '0') <= 255) {
      value = value * 8 + (src_[pos_] - '0');
      ++pos_;
      ++digits;
    }
    text::AppendUtf8(out, static_cast<char32_t>(value));
    return 0;
  }
  // Identity escape, including multi-byte characters and U+2028/2029.
  const size_t len = Utf8Length(static_cast<unsigned char>(c));
  bool nl = false;
  if (UnicodeSpace(src_, pos_ - 1, &nl) == 3 && nl) {
    pos_ += 2;
    return 0;
  }
  out.append(src_.substr(pos_ - 1, len));
  pos_ += len - 1;
  return 0;
}

void Lexer::LexIdentifier(Token& tok) {
  std::string name;
  bool escaped = false;
  while (pos_ < src_.size()) {
    const char c = src_[pos_];
    if (IsAsciiIdStart(c) || IsDigit(c)) {
      name += c;
      ++pos_;
    } else if (c == '\\' && pos_ + 1 < src_.size() && src_[pos_ + 1] == 'u') {
      escaped = true;
      ++pos_;
      ReadEscape(name, false);
    } else if (static_cast<unsigned char>(c) >= 0x80) {
      bool nl = false;
      if (UnicodeSpace(src_, pos_, &nl) > 0) break;
      const size_t len = Utf8Length(static_cast<unsigned char>(c));
      name.append(src_.substr(pos_, len));
      pos_ += len;
    } else {
      break;
    }
  }
  if (escaped) tok.cooked = AddCooked(std::move(name));
}

void Lexer::LexNumber(Token& tok) {
  tok.kind = TokKind::kNumber;
  const auto is_part = [](char c) { return IsHex(c) || c == '_'; };
  if (src_[pos_] == '0' && pos_ + 1 < src_.size() &&
      std::string_view("xXoObB").find(src_[pos_ + 1]) != std::string_view::npos) {
    pos_ += 2;
    while (pos_ < src_.size() && is_part(src_[pos_])) ++pos_;
  } else {
    while (pos_ < src_.size() && (IsDigit(src_[pos_]) || src_[pos_] == '_')) {
      ++pos_;
    }
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && (IsDigit(src_[pos_]) || src_[pos_] == '_')) {
        ++pos_;
      }
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      size_t j = pos_ + 1;
      if (j < src_.size() && (src_[j] == '+' || src_[j] == '-')) ++j;
      if (j < src_.size() && IsDigit(src_[j])) {
        pos_ = j;
        while (pos_ < src_.size() && (IsDigit(src_[pos_]) || src_[pos_] == '_')) {
          ++pos_;
        }
      }
    }
  }
  if (pos_ < src_.size() && src_[pos_] == 'n') {
    ++pos_;
    tok.kind = TokKind::kBigInt;
  }
}

void Lexer::LexString(Token& tok) {
  const char quote = src_[pos_++];
  std::string cooked;
  while (true) {
    if (pos_ >= src_.size()) Fail(tok.begin, "unterminated string literal");
    const char c = src_[pos_];
    if (c == quote) {
      ++pos_;
      break;
    }
    if (c == '\n' || c == '\r') Fail(tok.begin, "unterminated string literal");
    if (c == '\\') {
      ++pos_;
      ReadEscape(cooked, false);
      continue;
    }
    cooked += c;
    ++pos_;
  }
  tok.kind = TokKind::kString;
  tok.cooked = AddCooked(std::move(cooked));
}

void Lexer::LexTemplate(Token& tok, bool continuation) {
  ++pos_;  // opening backtick or closing brace of a substitution
  std::string cooked;
  while (true) {
    if (pos_ >= src_.size()) Fail(tok.begin, "unterminated template literal");
    const char c = src_[pos_];
    if (c == '`') {
      ++pos_;
      tok.kind = continuation ? TokKind::kTemplateTail : TokKind::kTemplateFull;
      break;
    }
    if (c == '$' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '{') {
      pos_ += 2;
      tok.kind =
          continuation ? TokKind::kTemplateMiddle : TokKind::kTemplateHead;
      brace_is_template_.push_back(true);
      break;
    }
    if (c == '\\') {
      ++pos_;
      ReadEscape(cooked, true);
      continue;
    }
    if (c == '\r') {
      cooked += '\n';
      ++pos_;
      if (pos_ < src_.size() && src_[pos_] == '\n') ++pos_;
      continue;
    }
    cooked += c;
    ++pos_;
  }
  tok.cooked = AddCooked(std::move(cooked));
}

void Lexer::LexRegExp(Token& tok) {
  ++pos_;
  bool in_class = false;
  while (true) {
    if (pos_ >= src_.size()) Fail(tok.begin, "unterminated regular expression");
    const char c = src_[pos_];
    if (c == '\n' || c == '\r') {
      Fail(tok.begin, "unterminated regular expression");
    }
    ++pos_;
    if (c == '\\') {
      if (pos_ < src_.size()) ++pos_;
    } else if (c == '[') {
      in_class = true;
    } else if (c == ']') {
      in_class = false;
    } else if (c == '/' && !in_class) {
      break;
    }
  }
  while (pos_ < src_.size() &&
         (IsAsciiIdStart(src_[pos_]) || IsDigit(src_[pos_]))) {
    ++pos_;
  }
  tok.kind = TokKind::kRegExp;
}

void Lexer::LexPunct(Token& tok) {
  tok.kind = TokKind::kPunct;
  for (std::string_view p : kPunctuators) {
    if (src_.substr(pos_, p.size()) == p) {
      if (p == "?." && pos_ + 2 < src_.size() && IsDigit(src_[pos_ + 2])) {
        continue;  // `a?.5:b` is a conditional
      }
      pos_ += p.size();
      return;
    }
  }
  if (kSingleExtra.find(src_[pos_]) != std::string_view::npos) {
    ++pos_;
    return;
  }
  Fail(static_cast<uint32_t>(pos_),
       std::string("unexpected character '") + src_[pos_] + "'");
}

std::vector<Token> Lexer::Tokenize() {
  std::vector<Token> tokens;
  tokens.reserve(src_.size() / 4 + 16);
  if (text::StartsWith(src_, "#!")) {
    while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
  }
  size_t counter = 0;
  while (true) {
    if (options_.deadline && (++counter & 0xFFFF) == 0 &&
        Clock::now() > *options_.deadline) {
      throw Error(ErrorCode::kBudgetExceeded,
                  std::string(path_) + ": time budget exhausted while lexing");
    }
    Token tok;
    tok.newline_before = SkipTrivia();
    tok.begin = static_cast<uint32_t>(pos_);
    if (pos_ >= src_.size()) {
      tok.kind = TokKind::kEof;
      tok.end = tok.begin;
      tokens.push_back(tok);
      break;
    }
    const char c = src_[pos_];
    const char next = pos_ + 1 < src_.size() ? src_[pos_ + 1] : '\0';
    if (IsAsciiIdStart(c) || c == '\\' ||
        (static_cast<unsigned char>(c) >= 0x80)) {
      tok.kind = TokKind::kIdentifier;
      LexIdentifier(tok);
      if (pos_ == tok.begin) {
        Fail(tok.begin, "unexpected character");
      }
    } else if (c == '#' && (IsAsciiIdStart(next) || next == '\\' ||
                            static_cast<unsigned char>(next) >= 0x80)) {
      ++pos_;
      tok.kind = TokKind::kPrivateName;
      LexIdentifier(tok);
    } else if (IsDigit(c) || (c == '.' && IsDigit(next))) {
      LexNumber(tok);
    } else if (c == '"' || c == '\'') {
      LexString(tok);
    } else if (c == '`') {
      LexTemplate(tok, false);
    } else if (c == '}' && !brace_is_template_.empty() &&
               brace_is_template_.back()) {
      brace_is_template_.pop_back();
      LexTemplate(tok, true);
    } else if (c == '/' && RegexAllowed()) {
      LexRegExp(tok);
    } else {
      LexPunct(tok);
      if (c == '{') {
        brace_is_template_.push_back(false);
      } else if (c == '}' && !brace_is_template_.empty()) {
        brace_is_template_.pop_back();
      } else if (c == '(') {
        paren_is_control_.push_back(PrevIsControlKeyword());
      }
    }
    tok.end = static_cast<uint32_t>(pos_);
    prev_closes_control_ = false;
    if (tok.kind == TokKind::kPunct && tok.end == tok.begin + 1 &&
        src_[tok.begin] == ')' && !paren_is_control_.empty()) {
      prev_closes_control_ = paren_is_control_.back();
      paren_is_control_.pop_back();
    }
    tokens.push_back(tok);
    prev_ = tok;
    have_prev_ = true;
  }
  return tokens;
}

}  // namespace vsxscan::js
