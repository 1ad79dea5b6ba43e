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

// Recursive-descent parser over a pre-lexed token vector. Patterns share the
// expression grammar (object/array literals, assignments for defaults,
// spreads for rest elements); consumers interpret them by position.

#include "vsxscan/js_parser.hpp"

#include <algorithm>
#include <array>

#include "js_lexer.hpp"
#include "vsxscan/error.hpp"
#include "vsxscan/text.hpp"

namespace vsxscan::js {
namespace {

constexpr size_t kMaxTreeDepth = 10000;

bool IsReservedWord(std::string_view w) {
  static constexpr std::array<std::string_view, 36> kReserved = {
      "break",    "case",     "catch",  "class",      "const",  "continue",
      "debugger", "default",  "delete", "do",         "else",   "export",
      "extends",  "finally",  "for",    "function",   "if",     "import",
      "in",       "instanceof", "new",  "return",     "super",  "switch",
      "this",     "throw",    "try",    "typeof",     "var",    "void",
      "while",    "with",     "null",   "true",       "false",  "enum"};
  for (std::string_view r : kReserved) {
    if (r == w) return true;
  }
  return false;
}

bool IsAssignOp(std::string_view p) {
  static constexpr std::array<std::string_view, 16> kOps = {
      "=",  "+=",  "-=",  "*=",   "/=",  "%=",  "**=", "<<=",
      ">>=", ">>>=", "&=", "|=", "^=", "&&=", "||=", "??="};
  for (std::string_view op : kOps) {
    if (op == p) return true;
  }
  return false;
}

class Parser {
 public:
  Parser(std::string_view source, std::string path, const ParseOptions& options)
      : options_(options),
        builder_(std::move(path), std::string(source)),
        src_(builder_.tree().source()),
        path_(builder_.tree().file()) {
    Lexer lexer(src_, path_, options_);
    toks_ = lexer.Tokenize();
    cooked_ = lexer.TakeCooked();
    is_module_ = text::EndsWith(path_, ".mjs");
    MatchParens();
  }

  SyntaxTree Parse() && {
    std::vector<NodeId> body;
    while (Cur().kind != TokKind::kEof) body.push_back(ParseStatement());
    NodeId root = builder_.Add(
        NodeKind::kProgram, {0, static_cast<uint32_t>(src_.size())}, body);
    SyntaxTree tree = std::move(builder_).Finish(root);
    CheckDepth(tree);
    return tree;
  }

 private:
  class DepthGuard {
   public:
    explicit DepthGuard(Parser& p) : p_(p) {
      if (++p_.depth_ > p_.options_.max_depth) {
        p_.Fail(p_.Cur().begin, "nesting too deep");
      }
    }
    ~DepthGuard() { --p_.depth_; }
    DepthGuard(const DepthGuard&) = delete;
    DepthGuard& operator=(const DepthGuard&) = delete;

   private:
    Parser& p_;
  };

  class NoInScope {
   public:
    NoInScope(Parser& p, bool value) : p_(p), saved_(p.no_in_) {
      p_.no_in_ = value;
    }
    ~NoInScope() { p_.no_in_ = saved_; }
    NoInScope(const NoInScope&) = delete;
    NoInScope& operator=(const NoInScope&) = delete;

   private:
    Parser& p_;
    bool saved_;
  };

  struct FunctionContext {
    bool is_async;
    bool is_generator;
  };

  class FunctionScope {
   public:
    FunctionScope(Parser& p, bool is_async, bool is_generator)
        : p_(p), saved_(p.fn_), saved_no_in_(p.no_in_) {
      p_.fn_ = FunctionContext{is_async, is_generator};
      p_.no_in_ = false;
      ++p_.function_depth_;
    }
    ~FunctionScope() {
      p_.fn_ = saved_;
      p_.no_in_ = saved_no_in_;
      --p_.function_depth_;
    }
    FunctionScope(const FunctionScope&) = delete;
    FunctionScope& operator=(const FunctionScope&) = delete;

   private:
    Parser& p_;
    FunctionContext saved_;
    bool saved_no_in_;
  };

  // ---- tokens ------------------------------------------------------------

  void MatchParens() {
    match_.assign(toks_.size(), 0);
    std::vector<size_t> stack;
    for (size_t i = 0; i < toks_.size(); ++i) {
      if (toks_[i].kind != TokKind::kPunct) continue;
      std::string_view t = Raw(toks_[i]);
      if (t == "(") {
        stack.push_back(i);
      } else if (t == ")" && !stack.empty()) {
        match_[stack.back()] = i;
        stack.pop_back();
      }
    }
  }

  const Token& Cur() const { return toks_[i_]; }
  const Token& Peek(size_t k = 1) const {
    return toks_[std::min(i_ + k, toks_.size() - 1)];
  }
  std::string_view Raw(const Token& t) const {
    return src_.substr(t.begin, t.end - t.begin);
  }
  std::string_view Name(const Token& t) const {
    if (t.cooked != kNoCooked) return cooked_[t.cooked];
    std::string_view raw = Raw(t);
    if (t.kind == TokKind::kPrivateName) raw.remove_prefix(1);
    return raw;
  }
  bool IsPunct(std::string_view p, size_t k = 0) const {
    const Token& t = k == 0 ? Cur() : Peek(k);
    return t.kind == TokKind::kPunct && Raw(t) == p;
  }
  bool IsWord(std::string_view w, size_t k = 0) const {
    const Token& t = k == 0 ? Cur() : Peek(k);
    return t.kind == TokKind::kIdentifier && t.cooked == kNoCooked &&
           Raw(t) == w;
  }
  bool IsIdentifierName(size_t k = 0) const {
    const Token& t = k == 0 ? Cur() : Peek(k);
    return t.kind == TokKind::kIdentifier;
  }
  bool IsBindingIdentifier(size_t k = 0) const {
    const Token& t = k == 0 ? Cur() : Peek(k);
    return t.kind == TokKind::kIdentifier &&
           (t.cooked != kNoCooked || !IsReservedWord(Raw(t)));
  }

  const Token& Advance() {
    const Token& t = toks_[i_];
    prev_end_ = t.end;
    if (i_ + 1 < toks_.size()) ++i_;
    if ((steps_++ & 0x1FFF) == 0) CheckBudget();
    return t;
  }

  bool EatPunct(std::string_view p) {
    if (!IsPunct(p)) return false;
    Advance();
    return true;
  }

  void ExpectPunct(std::string_view p) {
    if (!IsPunct(p)) {
      Fail(Cur().begin, "expected '" + std::string(p) + "' but found " +
                            Describe(Cur()));
    }
    Advance();
  }

  void ExpectWord(std::string_view w) {
    if (!IsWord(w)) {
      Fail(Cur().begin, "expected '" + std::string(w) + "' but found " +
                            Describe(Cur()));
    }
    Advance();
  }

  std::string Describe(const Token& t) const {
    if (t.kind == TokKind::kEof) return "end of input";
    std::string raw(Raw(t).substr(0, 20));
    return "'" + raw + "'";
  }

  [[noreturn]] void Fail(uint32_t offset, const std::string& message) const {
    Lexer::Fail(src_, path_, offset, message);
  }
  [[noreturn]] void Unexpected() const {
    Fail(Cur().begin, "unexpected " + Describe(Cur()));
  }

  void CheckBudget() const {
    if (builder_.size() > options_.max_nodes) {
      throw Error(ErrorCode::kBudgetExceeded,
                  path_ + ": syntax tree node budget exhausted");
    }
    if (options_.deadline && Clock::now() > *options_.deadline) {
      throw Error(ErrorCode::kBudgetExceeded,
                  path_ + ": time budget exhausted while parsing");
    }
  }

  void CheckDepth(const SyntaxTree& tree) const {
    std::vector<uint32_t> depth(tree.size(), 0);
    for (NodeId id = static_cast<NodeId>(tree.size()); id-- > 0;) {
      const NodeId p = tree.parent(id);
      depth[id] = p == kNoNode ? 0 : depth[p] + 1;
      if (depth[id] > kMaxTreeDepth) {
        Fail(tree.node(id).span.begin, "syntax tree nesting too deep");
      }
    }
  }

  void ConsumeSemicolon() {
    if (EatPunct(";")) return;
    if (IsPunct("}") || Cur().kind == TokKind::kEof || Cur().newline_before) {
      return;
    }
    Unexpected();
  }

  Span From(uint32_t begin) const { return {begin, prev_end_}; }

  NodeId Add(NodeKind kind, uint32_t begin, std::span<const NodeId> kids,
             std::string_view text = {}, uint8_t f = 0) {
    return builder_.Add(kind, From(begin), kids, text, f);
  }
  NodeId Add(NodeKind kind, uint32_t begin, std::initializer_list<NodeId> kids,
             std::string_view text = {}, uint8_t f = 0) {
    return builder_.Add(kind, From(begin), kids, text, f);
  }

  NodeId IdentifierFrom(const Token& t) {
    return builder_.Add(NodeKind::kIdentifier, {t.begin, t.end}, {}, Name(t));
  }

  NodeId ParseBindingIdentifier() {
    if (!IsBindingIdentifier()) {
      Fail(Cur().begin, "expected identifier but found " + Describe(Cur()));
    }
    return IdentifierFrom(Advance());
  }

  // ---- statements ---------------------------------------------------------

  NodeId ParseStatement() {
    DepthGuard guard(*this);
    const Token& t = Cur();
    const uint32_t begin = t.begin;
    if (t.kind == TokKind::kPunct) {
      if (IsPunct("{")) return ParseBlock();
      if (IsPunct(";")) {
        Advance();
        return Add(NodeKind::kEmpty, begin, {});
      }
    }
    if (t.kind == TokKind::kIdentifier && t.cooked == kNoCooked) {
      std::string_view w = Raw(t);
      if (w == "var" || w == "const") return ParseVarStatement();
      if (w == "let" && (IsBindingIdentifier(1) || IsPunct("[", 1) ||
                         IsPunct("{", 1) || IsWord("yield", 1) ||
                         IsWord("await", 1))) {
        return ParseVarStatement();
      }
      if (w == "function") return ParseFunction(/*is_decl=*/true, false);
      if (w == "async" && IsWord("function", 1) && !Peek().newline_before) {
        Advance();
        return ParseFunction(/*is_decl=*/true, true, begin);
      }
      if (w == "class") return ParseClass(/*is_decl=*/true);
      if (w == "if") return ParseIf();
      if (w == "for") return ParseFor();
      if (w == "while") {
        Advance();
        ExpectPunct("(");
        NodeId test = ParseParenthesizedBody();
        NodeId body = ParseStatement();
        return Add(NodeKind::kWhile, begin, {test, body});
      }
      if (w == "do") {
        Advance();
        NodeId body = ParseStatement();
        ExpectWord("while");
        ExpectPunct("(");
        NodeId test = ParseParenthesizedBody();
        EatPunct(";");
        return Add(NodeKind::kDoWhile, begin, {body, test});
      }
      if (w == "return" || w == "throw") {
        Advance();
        NodeId arg = kNoNode;
        if (!IsPunct(";") && !IsPunct("}") && Cur().kind != TokKind::kEof &&
            !Cur().newline_before) {
          arg = ParseExpression();
        }
        ConsumeSemicolon();
        return Add(w == "return" ? NodeKind::kReturn : NodeKind::kThrow, begin,
                   {arg});
      }
      if (w == "break" || w == "continue") {
        Advance();
        std::string_view label;
        if (IsBindingIdentifier() && !Cur().newline_before) {
          label = Name(Advance());
        }
        ConsumeSemicolon();
        return Add(w == "break" ? NodeKind::kBreak : NodeKind::kContinue,
                   begin, {}, label);
      }
      if (w == "try") return ParseTry();
      if (w == "switch") return ParseSwitch();
      if (w == "with") {
        Advance();
        ExpectPunct("(");
        NodeId object = ParseParenthesizedBody();
        NodeId body = ParseStatement();
        return Add(NodeKind::kWith, begin, {object, body});
      }
      if (w == "debugger") {
        Advance();
        ConsumeSemicolon();
        return Add(NodeKind::kDebugger, begin, {});
      }
      if (w == "import" && !IsPunct("(", 1) && !IsPunct(".", 1)) {
        return ParseImport();
      }
      if (w == "export") return ParseExport();
    }
    if (IsBindingIdentifier() && IsPunct(":", 1)) {
      std::string label(Name(Advance()));
      Advance();  // ':'
      NodeId body = ParseStatement();
      return Add(NodeKind::kLabeled, begin, {body}, label);
    }
    NodeId expr = ParseExpression();
    ConsumeSemicolon();
    return Add(NodeKind::kExprStmt, begin, {expr});
  }

  NodeId ParseBlock() {
    const uint32_t begin = Cur().begin;
    ExpectPunct("{");
    std::vector<NodeId> body;
    while (!IsPunct("}")) {
      if (Cur().kind == TokKind::kEof) Unexpected();
      body.push_back(ParseStatement());
    }
    Advance();
    return Add(NodeKind::kBlock, begin, body);
  }

  // After '(' has been consumed: expression then ')'.
  NodeId ParseParenthesizedBody() {
    NoInScope in_allowed(*this, false);
    NodeId e = ParseExpression();
    ExpectPunct(")");
    return e;
  }

  NodeId ParseVarStatement() {
    NodeId decl = ParseVarDeclaration();
    ConsumeSemicolon();
    return decl;
  }

  NodeId ParseVarDeclaration() {
    const uint32_t begin = Cur().begin;
    std::string kind(Raw(Advance()));
    std::vector<NodeId> decls;
    do {
      const uint32_t dbegin = Cur().begin;
      NodeId target = ParseBindingTarget();
      NodeId init = kNoNode;
      if (EatPunct("=")) init = ParseAssignment();
      decls.push_back(Add(NodeKind::kDeclarator, dbegin, {target, init}));
    } while (EatPunct(","));
    return Add(NodeKind::kVarDecl, begin, decls, kind);
  }

  NodeId ParseBindingTarget() {
    if (IsPunct("[") || IsPunct("{")) return ParsePrimary();
    return ParseBindingIdentifier();
  }

  NodeId ParseIf() {
    const uint32_t begin = Cur().begin;
    Advance();
    ExpectPunct("(");
    NodeId test = ParseParenthesizedBody();
    NodeId cons = ParseStatement();
    NodeId alt = kNoNode;
    if (IsWord("else")) {
      Advance();
      alt = ParseStatement();
    }
    return Add(NodeKind::kIf, begin, {test, cons, alt});
  }

  NodeId ParseFor() {
    const uint32_t begin = Cur().begin;
    Advance();
    uint8_t f = 0;
    if (IsWord("await")) {
      Advance();
      f |= flags::kAwaitOrDelegate;
    }
    ExpectPunct("(");
    NodeId init = kNoNode;
    if (!IsPunct(";")) {
      NoInScope no_in(*this, true);
      const bool is_decl =
          IsWord("var") || IsWord("const") ||
          (IsWord("let") && (IsBindingIdentifier(1) || IsPunct("[", 1) ||
                             IsPunct("{", 1)));
      init = is_decl ? ParseVarDeclaration() : ParseExpression();
    }
    if (IsWord("of") || IsWord("in")) {
      const bool is_of = IsWord("of");
      Advance();
      NodeId right = is_of ? ParseAssignmentNoInReset() : ParseExpressionNoInReset();
      ExpectPunct(")");
      NodeId body = ParseStatement();
      return Add(is_of ? NodeKind::kForOf : NodeKind::kForIn, begin,
                 {init, right, body}, {}, f);
    }
    ExpectPunct(";");
    NodeId test = kNoNode;
    if (!IsPunct(";")) test = ParseExpressionNoInReset();
    ExpectPunct(";");
    NodeId update = kNoNode;
    if (!IsPunct(")")) update = ParseExpressionNoInReset();
    ExpectPunct(")");
    NodeId body = ParseStatement();
    return Add(NodeKind::kFor, begin, {init, test, update, body});
  }

  NodeId ParseTry() {
    const uint32_t begin = Cur().begin;
    Advance();
    NodeId block = ParseBlock();
    NodeId handler = kNoNode;
    NodeId finalizer = kNoNode;
    if (IsWord("catch")) {
      const uint32_t cbegin = Cur().begin;
      Advance();
      NodeId param = kNoNode;
      if (EatPunct("(")) {
        param = ParseBindingTarget();
        ExpectPunct(")");
      }
      NodeId body = ParseBlock();
      handler = Add(NodeKind::kCatch, cbegin, {param, body});
    }
    if (IsWord("finally")) {
      Advance();
      finalizer = ParseBlock();
    }
    if (handler == kNoNode && finalizer == kNoNode) {
      Fail(Cur().begin, "try without catch or finally");
    }
    return Add(NodeKind::kTry, begin, {block, handler, finalizer});
  }

  NodeId ParseSwitch() {
    const uint32_t begin = Cur().begin;
    Advance();
    ExpectPunct("(");
    NodeId disc = ParseParenthesizedBody();
    ExpectPunct("{");
    std::vector<NodeId> kids{disc};
    while (!EatPunct("}")) {
      const uint32_t cbegin = Cur().begin;
      std::vector<NodeId> ckids;
      if (IsWord("case")) {
        Advance();
        ckids.push_back(ParseExpressionNoInReset());
      } else if (IsWord("default")) {
        Advance();
        ckids.push_back(kNoNode);
      } else {
        Unexpected();
      }
      ExpectPunct(":");
      while (!IsWord("case") && !IsWord("default") && !IsPunct("}")) {
        if (Cur().kind == TokKind::kEof) Unexpected();
        ckids.push_back(ParseStatement());
      }
      kids.push_back(Add(NodeKind::kCase, cbegin, ckids));
    }
    return Add(NodeKind::kSwitch, begin, kids);
  }

  NodeId ParseModuleSource() {
    if (Cur().kind != TokKind::kString) Unexpected();
    const Token& t = Advance();
    return builder_.Add(NodeKind::kStringLiteral, {t.begin, t.end}, {},
                        cooked_[t.cooked]);
  }

  void SkipImportAttributes() {
    if ((IsWord("with") || IsWord("assert")) && IsPunct("{", 1) &&
        !Cur().newline_before) {
      Advance();
      ParsePrimary();
    }
  }

  NodeId ParseImport() {
    const uint32_t begin = Cur().begin;
    Advance();
    std::vector<NodeId> locals;
    if (Cur().kind != TokKind::kString) {
      if (IsBindingIdentifier()) {
        locals.push_back(ParseBindingIdentifier());
        EatPunct(",");
      }
      if (EatPunct("*")) {
        ExpectWord("as");
        locals.push_back(ParseBindingIdentifier());
      } else if (EatPunct("{")) {
        while (!EatPunct("}")) {
          const Token& imported = Advance();
          if (IsWord("as")) {
            Advance();
            locals.push_back(ParseBindingIdentifier());
          } else {
            locals.push_back(IdentifierFrom(imported));
          }
          if (!IsPunct("}")) ExpectPunct(",");
        }
      }
      ExpectWord("from");
    }
    NodeId source = ParseModuleSource();
    SkipImportAttributes();
    ConsumeSemicolon();
    std::vector<NodeId> kids{source};
    kids.insert(kids.end(), locals.begin(), locals.end());
    return Add(NodeKind::kImportDecl, begin, kids);
  }

  NodeId ParseExport() {
    const uint32_t begin = Cur().begin;
    Advance();
    if (IsWord("default")) {
      Advance();
      NodeId decl;
      if (IsWord("function")) {
        decl = ParseFunction(/*is_decl=*/true, false, Cur().begin,
                             /*name_optional=*/true);
      } else if (IsWord("async") && IsWord("function", 1) &&
                 !Peek().newline_before) {
        const uint32_t fbegin = Cur().begin;
        Advance();
        decl = ParseFunction(/*is_decl=*/true, true, fbegin,
                             /*name_optional=*/true);
      } else if (IsWord("class")) {
        decl = ParseClass(/*is_decl=*/true, /*name_optional=*/true);
      } else {
        decl = ParseAssignment();
        ConsumeSemicolon();
      }
      return Add(NodeKind::kExportDecl, begin, {decl}, "default");
    }
    if (EatPunct("*")) {
      if (IsWord("as")) {
        Advance();
        Advance();
      }
      ExpectWord("from");
      ParseModuleSource();
      SkipImportAttributes();
      ConsumeSemicolon();
      return Add(NodeKind::kExportDecl, begin, {kNoNode}, "all");
    }
    if (EatPunct("{")) {
      while (!EatPunct("}")) {
        Advance();
        if (IsWord("as")) {
          Advance();
          Advance();
        }
        if (!IsPunct("}")) ExpectPunct(",");
      }
      if (IsWord("from")) {
        Advance();
        ParseModuleSource();
        SkipImportAttributes();
      }
      ConsumeSemicolon();
      return Add(NodeKind::kExportDecl, begin, {kNoNode}, "named");
    }
    NodeId decl = ParseStatement();
    return Add(NodeKind::kExportDecl, begin, {decl}, "named");
  }

  // ---- functions and classes -----------------------------------------------

  NodeId ParseFunction(bool is_decl, bool is_async, uint32_t begin = UINT32_MAX,
                       bool name_optional = false) {
    if (begin == UINT32_MAX) begin = Cur().begin;
    ExpectWord("function");
    bool is_gen = EatPunct("*");
    NodeId name = kNoNode;
    if (IsBindingIdentifier() || IsWord("yield") || IsWord("await")) {
      name = IdentifierFrom(Advance());
    } else if (is_decl && !name_optional) {
      Fail(Cur().begin, "function declaration requires a name");
    }
    return ParseFunctionRest(
        begin, is_decl ? NodeKind::kFunctionDecl : NodeKind::kFunctionExpr,
        name, is_async, is_gen);
  }

  NodeId ParseFunctionRest(uint32_t begin, NodeKind kind, NodeId name,
                           bool is_async, bool is_gen) {
    FunctionScope scope(*this, is_async, is_gen);
    NodeId params = ParseParams();
    NodeId body = ParseBlock();
    uint8_t f = 0;
    if (is_async) f |= flags::kAsync;
    if (is_gen) f |= flags::kGenerator;
    return Add(kind, begin, {name, params, body}, {}, f);
  }

  NodeId ParseParams() {
    const uint32_t begin = Cur().begin;
    ExpectPunct("(");
    std::vector<NodeId> params;
    while (!IsPunct(")")) {
      params.push_back(ParseParam());
      if (!IsPunct(")")) ExpectPunct(",");
    }
    Advance();
    return Add(NodeKind::kParams, begin, params);
  }

  NodeId ParseParam() {
    const uint32_t begin = Cur().begin;
    if (EatPunct("...")) {
      NodeId target = ParseBindingTarget();
      return Add(NodeKind::kSpread, begin, {target});
    }
    NodeId target = ParseBindingTarget();
    if (IsPunct("=")) {
      Advance();
      NodeId value = ParseAssignment();
      return Add(NodeKind::kAssign, begin, {target, value}, "=");
    }
    return target;
  }

  NodeId ParseClass(bool is_decl, bool name_optional = false) {
    const uint32_t begin = Cur().begin;
    ExpectWord("class");
    NodeId name = kNoNode;
    if (IsBindingIdentifier() && !IsWord("extends")) {
      name = ParseBindingIdentifier();
    } else if (is_decl && !name_optional) {
      Fail(Cur().begin, "class declaration requires a name");
    }
    NodeId super_class = kNoNode;
    if (IsWord("extends")) {
      Advance();
      super_class = ParseLeftHandSide();
    }
    const uint32_t body_begin = Cur().begin;
    ExpectPunct("{");
    std::vector<NodeId> members;
    while (!EatPunct("}")) {
      if (EatPunct(";")) continue;
      if (Cur().kind == TokKind::kEof) Unexpected();
      members.push_back(ParseClassMember());
    }
    NodeId body = Add(NodeKind::kClassBody, body_begin, members);
    return Add(is_decl ? NodeKind::kClassDecl : NodeKind::kClassExpr, begin,
               {name, super_class, body});
  }

  bool ModifierApplies() const {
    // `get`, `set`, `static`, `async` are modifiers only when a key follows.
    const Token& n = Peek();
    if (n.kind == TokKind::kPunct) {
      std::string_view p = Raw(n);
      return p == "[" || p == "*" || p == "{" || p == "#";
    }
    return n.kind != TokKind::kEof;
  }

  NodeId ParseClassMember() {
    const uint32_t begin = Cur().begin;
    uint8_t f = 0;
    if (IsWord("static") && ModifierApplies()) {
      Advance();
      f |= flags::kStatic;
      if (IsPunct("{")) {
        FunctionScope scope(*this, false, false);
        NodeId block = ParseBlock();
        return Add(NodeKind::kStaticBlock, begin, {block});
      }
    }
    std::string_view method_kind = "method";
    bool is_async = false;
    bool is_gen = false;
    if (IsWord("async") && ModifierApplies() && !Peek().newline_before) {
      Advance();
      is_async = true;
    }
    if (EatPunct("*")) is_gen = true;
    if ((IsWord("get") || IsWord("set")) && ModifierApplies()) {
      method_kind = Raw(Advance());
    }
    bool computed = false;
    NodeId key = ParsePropertyKey(&computed);
    if (computed) f |= flags::kComputed;
    if (IsPunct("(")) {
      if (!computed && method_kind == "method" &&
          tree_text(key) == "constructor" && (f & flags::kStatic) == 0) {
        method_kind = "constructor";
      }
      NodeId fn = ParseFunctionRest(builder_.tree().node(key).span.begin,
                                    NodeKind::kFunctionExpr, kNoNode, is_async,
                                    is_gen);
      return Add(NodeKind::kMethod, begin, {key, fn}, method_kind, f);
    }
    NodeId value = kNoNode;
    if (EatPunct("=")) {
      FunctionScope scope(*this, false, false);
      value = ParseAssignment();
    }
    ConsumeSemicolon();
    return Add(NodeKind::kField, begin, {key, value}, {}, f);
  }

  std::string_view tree_text(NodeId id) const {
    return builder_.tree().text(id);
  }

  NodeId ParsePropertyKey(bool* computed) {
    *computed = false;
    const Token& t = Cur();
    switch (t.kind) {
      case TokKind::kIdentifier:
        return IdentifierFrom(Advance());
      case TokKind::kPrivateName:
        Advance();
        return builder_.Add(NodeKind::kPrivateName, {t.begin, t.end}, {},
                            Name(t));
      case TokKind::kString:
        Advance();
        return builder_.Add(NodeKind::kStringLiteral, {t.begin, t.end}, {},
                            cooked_[t.cooked]);
      case TokKind::kNumber:
      case TokKind::kBigInt:
        Advance();
        return builder_.Add(NodeKind::kNumberLiteral, {t.begin, t.end}, {},
                            Raw(t));
      case TokKind::kPunct:
        if (IsPunct("[")) {
          Advance();
          *computed = true;
          NoInScope in_allowed(*this, false);
          NodeId e = ParseAssignment();
          ExpectPunct("]");
          return e;
        }
        break;
      default:
        break;
    }
    Unexpected();
  }

  // ---- expressions ----------------------------------------------------------

  NodeId ParseExpressionNoInReset() {
    NoInScope in_allowed(*this, false);
    return ParseExpression();
  }

  NodeId ParseAssignmentNoInReset() {
    NoInScope in_allowed(*this, false);
    return ParseAssignment();
  }

  NodeId ParseExpression() {
    const uint32_t begin = Cur().begin;
    NodeId first = ParseAssignment();
    if (!IsPunct(",")) return first;
    std::vector<NodeId> items{first};
    while (EatPunct(",")) items.push_back(ParseAssignment());
    return Add(NodeKind::kSequence, begin, items);
  }

  bool ArrowAhead(size_t paren_index) const {
    const size_t close = match_[paren_index];
    if (close == 0 || close + 1 >= toks_.size()) return false;
    const Token& next = toks_[close + 1];
    return next.kind == TokKind::kPunct && Raw(next) == "=>" &&
           !next.newline_before;
  }

  NodeId ParseAssignment() {
    DepthGuard guard(*this);
    const uint32_t begin = Cur().begin;

    // Arrow functions.
    if (IsBindingIdentifier() && IsPunct("=>", 1) && !Peek().newline_before &&
        !IsWord("async")) {
      NodeId param = IdentifierFrom(Advance());
      NodeId params = builder_.Add(NodeKind::kParams,
                                   builder_.tree().node(param).span, {param});
      return ParseArrowBody(begin, params, false);
    }
    if (IsWord("async") && !Peek().newline_before) {
      if (IsBindingIdentifier(1) && IsPunct("=>", 2)) {
        Advance();
        NodeId param = IdentifierFrom(Advance());
        NodeId params = builder_.Add(
            NodeKind::kParams, builder_.tree().node(param).span, {param});
        return ParseArrowBody(begin, params, true);
      }
      if (IsPunct("(", 1) && ArrowAhead(i_ + 1)) {
        Advance();
        NodeId params = ParseArrowParams();
        return ParseArrowBody(begin, params, true);
      }
    }
    if (IsWord("async") && IsPunct("=>", 1)) {
      NodeId param = IdentifierFrom(Advance());
      NodeId params = builder_.Add(NodeKind::kParams,
                                   builder_.tree().node(param).span, {param});
      return ParseArrowBody(begin, params, false);
    }
    if (IsPunct("(") && ArrowAhead(i_)) {
      NodeId params = ParseArrowParams();
      return ParseArrowBody(begin, params, false);
    }
    if (IsWord("yield") && fn_.is_generator) return ParseYield();

    NodeId left = ParseConditional();
    if (Cur().kind == TokKind::kPunct && IsAssignOp(Raw(Cur()))) {
      std::string op(Raw(Advance()));
      NodeId right = ParseAssignment();
      return Add(NodeKind::kAssign, begin, {left, right}, op);
    }
    return left;
  }

  NodeId ParseArrowParams() {
    // Same grammar as function parameters.
    NoInScope in_allowed(*this, false);
    return ParseParams();
  }

  NodeId ParseArrowBody(uint32_t begin, NodeId params, bool is_async) {
    ExpectPunct("=>");
    FunctionScope scope(*this, is_async, false);
    NodeId body;
    if (IsPunct("{")) {
      body = ParseBlock();
    } else {
      body = ParseAssignment();
    }
    return Add(NodeKind::kArrowFunction, begin, {kNoNode, params, body}, {},
               is_async ? flags::kAsync : 0);
  }

  NodeId ParseYield() {
    const uint32_t begin = Cur().begin;
    Advance();
    uint8_t f = 0;
    NodeId arg = kNoNode;
    if (!Cur().newline_before) {
      if (EatPunct("*")) {
        f |= flags::kAwaitOrDelegate;
        arg = ParseAssignment();
      } else if (!(IsPunct(")") || IsPunct("]") || IsPunct("}") ||
                   IsPunct(",") || IsPunct(";") || IsPunct(":") ||
                   Cur().kind == TokKind::kEof ||
                   Cur().kind == TokKind::kTemplateMiddle ||
                   Cur().kind == TokKind::kTemplateTail || IsWord("in"))) {
        arg = ParseAssignment();
      }
    }
    return Add(NodeKind::kYield, begin, {arg}, {}, f);
  }

  NodeId ParseConditional() {
    const uint32_t begin = Cur().begin;
    NodeId test = ParseBinary(0);
    if (!IsPunct("?")) return test;
    Advance();
    NodeId cons;
    {
      NoInScope in_allowed(*this, false);
      cons = ParseAssignment();
    }
    ExpectPunct(":");
    NodeId alt = ParseAssignment();
    return Add(NodeKind::kConditional, begin, {test, cons, alt});
  }

  int BinaryPrecedence(const Token& t) const {
    if (t.kind == TokKind::kIdentifier && t.cooked == kNoCooked) {
      std::string_view w = Raw(t);
      if (w == "instanceof") return 8;
      if (w == "in" && !no_in_) return 8;
      return -1;
    }
    if (t.kind != TokKind::kPunct) return -1;
    std::string_view p = Raw(t);
    if (p == "??") return 1;
    if (p == "||") return 2;
    if (p == "&&") return 3;
    if (p == "|") return 4;
    if (p == "^") return 5;
    if (p == "&") return 6;
    if (p == "==" || p == "!=" || p == "===" || p == "!==") return 7;
    if (p == "<" || p == ">" || p == "<=" || p == ">=") return 8;
    if (p == "<<" || p == ">>" || p == ">>>") return 9;
    if (p == "+" || p == "-") return 10;
    if (p == "*" || p == "/" || p == "%") return 11;
    if (p == "**") return 12;
    return -1;
  }

  NodeId ParseBinary(int min_prec) {
    const uint32_t begin = Cur().begin;
    NodeId left = ParseUnary();
    while (true) {
      const int prec = BinaryPrecedence(Cur());
      if (prec < 0 || prec < min_prec) break;
      std::string op(Raw(Advance()));
      NodeId right;
      {
        DepthGuard guard(*this);
        right = ParseBinary(op == "**" ? prec : prec + 1);
      }
      const bool logical = op == "&&" || op == "||" || op == "??";
      left = Add(logical ? NodeKind::kLogical : NodeKind::kBinary, begin,
                 {left, right}, op);
    }
    return left;
  }

  NodeId ParseUnary() {
    DepthGuard guard(*this);
    const uint32_t begin = Cur().begin;
    const Token& t = Cur();
    if (t.kind == TokKind::kPunct) {
      std::string_view p = Raw(t);
      if (p == "!" || p == "~" || p == "+" || p == "-") {
        std::string op(p);
        Advance();
        NodeId arg = ParseUnary();
        return Add(NodeKind::kUnary, begin, {arg}, op);
      }
      if (p == "++" || p == "--") {
        std::string op(p);
        Advance();
        NodeId arg = ParseUnary();
        return Add(NodeKind::kUpdate, begin, {arg}, op, flags::kPrefix);
      }
    } else if (t.kind == TokKind::kIdentifier && t.cooked == kNoCooked) {
      std::string_view w = Raw(t);
      if (w == "typeof" || w == "void" || w == "delete") {
        std::string op(w);
        Advance();
        NodeId arg = ParseUnary();
        return Add(NodeKind::kUnary, begin, {arg}, op);
      }
      if (w == "await" && AwaitIsOperator()) {
        Advance();
        NodeId arg = ParseUnary();
        return Add(NodeKind::kAwait, begin, {arg});
      }
    }
    NodeId expr = ParseLeftHandSide();
    if ((IsPunct("++") || IsPunct("--")) && !Cur().newline_before) {
      std::string op(Raw(Advance()));
      return Add(NodeKind::kUpdate, begin, {expr}, op);
    }
    return expr;
  }

  // Outside async functions `await` is an operator only at the top level,
  // when an operand follows on the same line.
  bool AwaitIsOperator() const {
    if (fn_.is_async) return true;
    if (function_depth_ > 0) return false;
    const Token& n = Peek();
    if (n.newline_before && !is_module_) return false;
    switch (n.kind) {
      case TokKind::kEof:
        return false;
      case TokKind::kIdentifier: {
        std::string_view w = Raw(n);
        return n.cooked != kNoCooked ||
               !(w == "in" || w == "instanceof" || w == "of");
      }
      case TokKind::kPunct: {
        std::string_view p = Raw(n);
        return p == "(" || p == "[" || p == "{" || p == "!" || p == "~";
      }
      default:
        return true;
    }
  }

  NodeId ParseLeftHandSide() {
    NodeId e = IsWord("new") ? ParseNew() : ParsePrimary();
    return ParseCallTail(e, /*allow_call=*/true);
  }

  NodeId ParseNew() {
    DepthGuard guard(*this);
    const uint32_t begin = Cur().begin;
    Advance();  // new
    if (IsPunct(".")) {
      Advance();
      if (!IsIdentifierName()) Unexpected();
      Advance();
      return Add(NodeKind::kMetaProperty, begin, {}, "new.target");
    }
    NodeId callee = IsWord("new") ? ParseNew() : ParsePrimary();
    callee = ParseCallTail(callee, /*allow_call=*/false);
    std::vector<NodeId> kids{callee};
    if (IsPunct("(")) ParseArguments(kids);
    return Add(NodeKind::kNew, begin, kids);
  }

  void ParseArguments(std::vector<NodeId>& out) {
    ExpectPunct("(");
    NoInScope in_allowed(*this, false);
    while (!IsPunct(")")) {
      const uint32_t begin = Cur().begin;
      if (EatPunct("...")) {
        NodeId arg = ParseAssignment();
        out.push_back(Add(NodeKind::kSpread, begin, {arg}));
      } else {
        out.push_back(ParseAssignment());
      }
      if (!IsPunct(")")) ExpectPunct(",");
    }
    Advance();
  }

  NodeId ParseMemberName() {
    const Token& t = Cur();
    if (t.kind == TokKind::kIdentifier) return IdentifierFrom(Advance());
    if (t.kind == TokKind::kPrivateName) {
      Advance();
      return builder_.Add(NodeKind::kPrivateName, {t.begin, t.end}, {},
                          Name(t));
    }
    Unexpected();
  }

  NodeId ParseCallTail(NodeId e, bool allow_call) {
    const uint32_t begin = builder_.tree().node(e).span.begin;
    while (true) {
      if (IsPunct(".")) {
        Advance();
        NodeId prop = ParseMemberName();
        e = Add(NodeKind::kMember, begin, {e, prop});
      } else if (IsPunct("?.") && allow_call) {
        Advance();
        if (IsPunct("(")) {
          std::vector<NodeId> kids{e};
          ParseArguments(kids);
          e = Add(NodeKind::kCall, begin, kids, {}, flags::kOptional);
        } else if (IsPunct("[")) {
          Advance();
          NodeId prop = ParseExpressionNoInReset();
          ExpectPunct("]");
          e = Add(NodeKind::kMember, begin, {e, prop}, {},
                  flags::kComputed | flags::kOptional);
        } else {
          NodeId prop = ParseMemberName();
          e = Add(NodeKind::kMember, begin, {e, prop}, {}, flags::kOptional);
        }
      } else if (IsPunct("[")) {
        Advance();
        NodeId prop = ParseExpressionNoInReset();
        ExpectPunct("]");
        e = Add(NodeKind::kMember, begin, {e, prop}, {}, flags::kComputed);
      } else if (Cur().kind == TokKind::kTemplateFull ||
                 Cur().kind == TokKind::kTemplateHead) {
        NodeId tpl = ParseTemplate();
        e = Add(NodeKind::kTaggedTemplate, begin, {e, tpl});
      } else if (IsPunct("(") && allow_call) {
        std::vector<NodeId> kids{e};
        ParseArguments(kids);
        e = Add(NodeKind::kCall, begin, kids);
      } else {
        return e;
      }
    }
  }

  NodeId ParseTemplate() {
    const uint32_t begin = Cur().begin;
    std::vector<NodeId> kids;
    const Token& first = Advance();
    kids.push_back(builder_.Add(NodeKind::kTemplateElement,
                                {first.begin, first.end}, {},
                                cooked_[first.cooked]));
    if (first.kind == TokKind::kTemplateHead) {
      NoInScope in_allowed(*this, false);
      while (true) {
        kids.push_back(ParseExpression());
        const Token& t = Cur();
        if (t.kind != TokKind::kTemplateMiddle &&
            t.kind != TokKind::kTemplateTail) {
          Fail(t.begin, "expected end of template substitution");
        }
        Advance();
        kids.push_back(builder_.Add(NodeKind::kTemplateElement,
                                    {t.begin, t.end}, {},
                                    cooked_[t.cooked]));
        if (t.kind == TokKind::kTemplateTail) break;
      }
    }
    return Add(NodeKind::kTemplateLiteral, begin, kids);
  }

  NodeId ParsePrimary() {
    DepthGuard guard(*this);
    const Token& t = Cur();
    const uint32_t begin = t.begin;
    switch (t.kind) {
      case TokKind::kString:
        Advance();
        return builder_.Add(NodeKind::kStringLiteral, {t.begin, t.end}, {},
                            cooked_[t.cooked]);
      case TokKind::kNumber:
        Advance();
        return builder_.Add(NodeKind::kNumberLiteral, {t.begin, t.end}, {},
                            Raw(t));
      case TokKind::kBigInt:
        Advance();
        return builder_.Add(NodeKind::kBigIntLiteral, {t.begin, t.end}, {},
                            Raw(t));
      case TokKind::kRegExp:
        Advance();
        return builder_.Add(NodeKind::kRegExpLiteral, {t.begin, t.end}, {},
                            Raw(t));
      case TokKind::kTemplateFull:
      case TokKind::kTemplateHead:
        return ParseTemplate();
      case TokKind::kPrivateName:
        Advance();
        return builder_.Add(NodeKind::kPrivateName, {t.begin, t.end}, {},
                            Name(t));
      case TokKind::kPunct:
        if (IsPunct("(")) {
          Advance();
          return ParseParenthesizedBody();
        }
        if (IsPunct("[")) return ParseArrayLiteral();
        if (IsPunct("{")) return ParseObjectLiteral();
        break;
      case TokKind::kIdentifier: {
        if (t.cooked != kNoCooked) return IdentifierFrom(Advance());
        std::string_view w = Raw(t);
        if (w == "function") return ParseFunction(false, false);
        if (w == "async" && IsWord("function", 1) && !Peek().newline_before) {
          Advance();
          return ParseFunction(false, true, begin);
        }
        if (w == "class") return ParseClass(false);
        if (w == "this") {
          Advance();
          return Add(NodeKind::kThis, begin, {});
        }
        if (w == "super") {
          Advance();
          return Add(NodeKind::kSuper, begin, {});
        }
        if (w == "null") {
          Advance();
          return Add(NodeKind::kNullLiteral, begin, {}, "null");
        }
        if (w == "true" || w == "false") {
          Advance();
          return Add(NodeKind::kBooleanLiteral, begin, {}, w);
        }
        if (w == "import") {
          Advance();
          if (EatPunct(".")) {
            if (!IsIdentifierName()) Unexpected();
            Advance();
            return Add(NodeKind::kMetaProperty, begin, {}, "import.meta");
          }
          ExpectPunct("(");
          NoInScope in_allowed(*this, false);
          NodeId arg = ParseAssignment();
          if (EatPunct(",") && !IsPunct(")")) {
            ParseAssignment();
            EatPunct(",");
          }
          ExpectPunct(")");
          return Add(NodeKind::kImportCall, begin, {arg});
        }
        if (w == "new") return ParseNew();
        if (IsReservedWord(w)) break;
        return IdentifierFrom(Advance());
      }
      default:
        break;
    }
    Unexpected();
  }

  NodeId ParseArrayLiteral() {
    const uint32_t begin = Cur().begin;
    Advance();
    NoInScope in_allowed(*this, false);
    std::vector<NodeId> elements;
    while (!IsPunct("]")) {
      if (IsPunct(",")) {
        Advance();
        elements.push_back(kNoNode);
        continue;
      }
      const uint32_t ebegin = Cur().begin;
      if (EatPunct("...")) {
        NodeId arg = ParseAssignment();
        elements.push_back(Add(NodeKind::kSpread, ebegin, {arg}));
      } else {
        elements.push_back(ParseAssignment());
      }
      if (!IsPunct("]")) ExpectPunct(",");
    }
    Advance();
    return Add(NodeKind::kArray, begin, elements);
  }

  bool PropertyModifierApplies() const {
    const Token& n = Peek();
    if (n.kind == TokKind::kPunct) {
      std::string_view p = Raw(n);
      return p == "[" || p == "*";
    }
    return n.kind != TokKind::kEof;
  }

  NodeId ParseObjectLiteral() {
    const uint32_t begin = Cur().begin;
    Advance();
    NoInScope in_allowed(*this, false);
    std::vector<NodeId> props;
    while (!IsPunct("}")) {
      props.push_back(ParseObjectMember());
      if (!IsPunct("}")) ExpectPunct(",");
    }
    Advance();
    return Add(NodeKind::kObject, begin, props);
  }

  NodeId ParseObjectMember() {
    const uint32_t begin = Cur().begin;
    if (EatPunct("...")) {
      NodeId arg = ParseAssignment();
      return Add(NodeKind::kSpread, begin, {arg});
    }
    bool is_async = false;
    bool is_gen = false;
    std::string_view kind = "init";
    if (IsWord("async") && PropertyModifierApplies() &&
        !Peek().newline_before) {
      Advance();
      is_async = true;
    }
    if (EatPunct("*")) is_gen = true;
    if ((IsWord("get") || IsWord("set")) && PropertyModifierApplies()) {
      kind = Raw(Advance());
    }
    const Token& key_tok = Cur();
    bool computed = false;
    NodeId key = ParsePropertyKey(&computed);
    uint8_t f = computed ? flags::kComputed : 0;
    if (IsPunct("(")) {
      NodeId fn = ParseFunctionRest(key_tok.begin, NodeKind::kFunctionExpr,
                                    kNoNode, is_async, is_gen);
      return Add(NodeKind::kProperty, begin, {key, fn},
                 kind == "init" ? std::string_view("method") : kind, f);
    }
    if (is_async || is_gen || kind != "init") Unexpected();
    if (EatPunct(":")) {
      NodeId value = ParseAssignment();
      return Add(NodeKind::kProperty, begin, {key, value}, "init", f);
    }
    if (computed || key_tok.kind != TokKind::kIdentifier) Unexpected();
    // Shorthand `{a}` or cover-grammar default `{a = 1}`.
    NodeId value = IdentifierFrom(key_tok);
    if (IsPunct("=")) {
      Advance();
      NodeId def = ParseAssignment();
      value = Add(NodeKind::kAssign, begin, {value, def}, "=");
    }
    return Add(NodeKind::kProperty, begin, {key, value}, "init",
               flags::kShorthand);
  }

  const ParseOptions& options_;
  TreeBuilder builder_;
  std::string_view src_;
  const std::string& path_;
  std::vector<Token> toks_;
  std::vector<std::string> cooked_;
  std::vector<size_t> match_;
  size_t i_ = 0;
  uint32_t prev_end_ = 0;
  size_t steps_ = 0;
  size_t depth_ = 0;
  bool no_in_ = false;
  bool is_module_ = false;
  int function_depth_ = 0;
  FunctionContext fn_{false, false};
};

}  // namespace

SyntaxTree ParseSource(std::string_view text, std::string path,
                       const ParseOptions& options) {
  Parser parser(text, std::move(path), options);
  return std::move(parser).Parse();
}

}  // namespace vsxscan::js
