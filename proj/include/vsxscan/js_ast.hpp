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

// Arena syntax tree for script sources.
//
// Every node has a kind, a byte span, an optional text payload and an ordered
// child list. Absent optional children are stored as kNoNode so that child
// positions are fixed per kind:
//
//   Program            statements...
//   VarDecl  (text: var|let|const)  Declarator...
//   Declarator         [target, init?]
//   FunctionDecl / FunctionExpr / ArrowFunction   [name?, Params, body]
//   Params             patterns...
//   ClassDecl / ClassExpr          [name?, superclass?, ClassBody]
//   ClassBody          Method | Field | StaticBlock ...
//   Method (text: method|get|set|constructor)    [key, FunctionExpr]
//   Field              [key, value?]
//   ExprStmt           [expr]
//   If                 [test, consequent, alternate?]
//   For                [init?, test?, update?, body]
//   ForIn / ForOf      [left, right, body]
//   While              [test, body]
//   DoWhile            [body, test]
//   Return / Throw     [argument?]
//   Break / Continue   (text: label)
//   Try                [block, Catch?, finalizer?]
//   Catch              [param?, body]
//   Switch             [discriminant, Case...]
//   Case               [test?, statements...]
//   Labeled (text: label)          [body]
//   With               [object, body]
//   ImportDecl         [source, local identifiers...]
//   ExportDecl (text: default|named|all)         [declaration-or-expr?]
//   TemplateLiteral    [TemplateElement, expr, TemplateElement, ...]
//   Array              elements... (holes are kNoNode)
//   Object             Property | Spread ...
//   Property (text: init|get|set|method)         [key, value]
//   Spread             [argument]
//   Call / New         [callee, arguments...]
//   Member             [object, property]
//   Unary / Update / Binary / Logical / Assign   (text: operator)
//   Conditional        [test, consequent, alternate]
//   Sequence           expressions...
//   Await / Yield      [argument?]
//   TaggedTemplate     [tag, TemplateLiteral]
//   ImportCall         [argument]
//
// Identifier, PrivateName, StringLiteral and TemplateElement carry their
// cooked text; other literals carry raw source text.

#ifndef VSXSCAN_JS_AST_HPP_
#define VSXSCAN_JS_AST_HPP_

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vsxscan::js {

using NodeId = uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

enum class NodeKind : uint8_t {
  kProgram,
  kVarDecl,
  kDeclarator,
  kFunctionDecl,
  kClassDecl,
  kExprStmt,
  kBlock,
  kEmpty,
  kIf,
  kFor,
  kForIn,
  kForOf,
  kWhile,
  kDoWhile,
  kReturn,
  kBreak,
  kContinue,
  kThrow,
  kTry,
  kCatch,
  kSwitch,
  kCase,
  kLabeled,
  kDebugger,
  kWith,
  kImportDecl,
  kExportDecl,
  kIdentifier,
  kPrivateName,
  kStringLiteral,
  kTemplateLiteral,
  kTemplateElement,
  kNumberLiteral,
  kBigIntLiteral,
  kRegExpLiteral,
  kBooleanLiteral,
  kNullLiteral,
  kThis,
  kSuper,
  kArray,
  kObject,
  kProperty,
  kSpread,
  kFunctionExpr,
  kArrowFunction,
  kClassExpr,
  kClassBody,
  kMethod,
  kField,
  kStaticBlock,
  kParams,
  kCall,
  kNew,
  kMember,
  kUnary,
  kUpdate,
  kBinary,
  kLogical,
  kAssign,
  kConditional,
  kSequence,
  kAwait,
  kYield,
  kTaggedTemplate,
  kMetaProperty,
  kImportCall,
};

std::string_view NodeKindName(NodeKind kind);

namespace flags {
inline constexpr uint8_t kComputed = 1 << 0;
inline constexpr uint8_t kOptional = 1 << 1;  // ?. member or call
inline constexpr uint8_t kPrefix = 1 << 2;    // ++x
inline constexpr uint8_t kStatic = 1 << 3;
inline constexpr uint8_t kAsync = 1 << 4;
inline constexpr uint8_t kGenerator = 1 << 5;
inline constexpr uint8_t kShorthand = 1 << 6;
inline constexpr uint8_t kAwaitOrDelegate = 1 << 7;  // for await / yield*
}  // namespace flags

struct Span {
  uint32_t begin = 0;
  uint32_t end = 0;

  friend bool operator==(const Span&, const Span&) = default;
};

struct Position {
  uint32_t line = 1;    // 1-based
  uint32_t column = 1;  // 1-based, in bytes

  friend bool operator==(const Position&, const Position&) = default;
};

struct Node {
  NodeKind kind = NodeKind::kEmpty;
  uint8_t flags = 0;
  Span span;
  uint32_t first_child = 0;
  uint32_t child_count = 0;
  uint32_t text_offset = 0;
  uint32_t text_length = 0;

  bool has(uint8_t f) const { return (flags & f) != 0; }
};

class SyntaxTree {
 public:
  SyntaxTree() = default;

  const std::string& file() const { return file_; }
  std::string_view source() const { return source_; }
  NodeId root() const { return root_; }
  size_t size() const { return nodes_.size(); }

  const Node& node(NodeId id) const { return nodes_[id]; }
  NodeKind kind(NodeId id) const { return nodes_[id].kind; }
  std::span<const NodeId> children(NodeId id) const {
    const Node& n = nodes_[id];
    return {children_.data() + n.first_child, n.child_count};
  }
  // kNoNode when `index` is past the end or the slot is empty.
  NodeId child(NodeId id, size_t index) const {
    const Node& n = nodes_[id];
    return index < n.child_count ? children_[n.first_child + index] : kNoNode;
  }
  std::string_view text(NodeId id) const {
    const Node& n = nodes_[id];
    return std::string_view(texts_).substr(n.text_offset, n.text_length);
  }
  NodeId parent(NodeId id) const { return parents_[id]; }
  std::string_view source_text(NodeId id) const {
    const Span s = nodes_[id].span;
    return std::string_view(source_).substr(s.begin, s.end - s.begin);
  }
  Position position(uint32_t offset) const;

 private:
  friend class TreeBuilder;

  std::string file_;
  std::string source_;
  std::vector<Node> nodes_;
  std::vector<NodeId> children_;
  std::vector<NodeId> parents_;
  std::string texts_;
  std::vector<uint32_t> line_starts_;
  NodeId root_ = kNoNode;
};

// Appends nodes bottom-up; used by the parser and by tests that need to
// construct trees by hand.
class TreeBuilder {
 public:
  TreeBuilder(std::string file, std::string source);

  NodeId Add(NodeKind kind, Span span, std::span<const NodeId> kids,
             std::string_view text = {}, uint8_t node_flags = 0);
  NodeId Add(NodeKind kind, Span span, std::initializer_list<NodeId> kids,
             std::string_view text = {}, uint8_t node_flags = 0) {
    return Add(kind, span, std::span<const NodeId>(kids.begin(), kids.size()),
               text, node_flags);
  }
  void SetFlags(NodeId id, uint8_t node_flags) {
    tree_.nodes_[id].flags |= node_flags;
  }
  void SetSpanEnd(NodeId id, uint32_t end) { tree_.nodes_[id].span.end = end; }
  size_t size() const { return tree_.nodes_.size(); }
  const SyntaxTree& tree() const { return tree_; }

  SyntaxTree Finish(NodeId root) &&;

 private:
  SyntaxTree tree_;
};

}  // namespace vsxscan::js

#endif  // VSXSCAN_JS_AST_HPP_
