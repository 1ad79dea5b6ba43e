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

#include "vsxscan/js_ast.hpp"

#include <algorithm>

namespace vsxscan::js {

std::string_view NodeKindName(NodeKind kind) {
  switch (kind) {
    case NodeKind::kProgram: return "Program";
    case NodeKind::kVarDecl: return "VarDecl";
    case NodeKind::kDeclarator: return "Declarator";
    case NodeKind::kFunctionDecl: return "FunctionDecl";
    case NodeKind::kClassDecl: return "ClassDecl";
    case NodeKind::kExprStmt: return "ExprStmt";
    case NodeKind::kBlock: return "Block";
    case NodeKind::kEmpty: return "Empty";
    case NodeKind::kIf: return "If";
    case NodeKind::kFor: return "For";
    case NodeKind::kForIn: return "ForIn";
    case NodeKind::kForOf: return "ForOf";
    case NodeKind::kWhile: return "While";
    case NodeKind::kDoWhile: return "DoWhile";
    case NodeKind::kReturn: return "Return";
    case NodeKind::kBreak: return "Break";
    case NodeKind::kContinue: return "Continue";
    case NodeKind::kThrow: return "Throw";
    case NodeKind::kTry: return "Try";
    case NodeKind::kCatch: return "Catch";
    case NodeKind::kSwitch: return "Switch";
    case NodeKind::kCase: return "Case";
    case NodeKind::kLabeled: return "Labeled";
    case NodeKind::kDebugger: return "Debugger";
    case NodeKind::kWith: return "With";
    case NodeKind::kImportDecl: return "ImportDecl";
    case NodeKind::kExportDecl: return "ExportDecl";
    case NodeKind::kIdentifier: return "Identifier";
    case NodeKind::kPrivateName: return "PrivateName";
    case NodeKind::kStringLiteral: return "StringLiteral";
    case NodeKind::kTemplateLiteral: return "TemplateLiteral";
    case NodeKind::kTemplateElement: return "TemplateElement";
    case NodeKind::kNumberLiteral: return "NumberLiteral";
    case NodeKind::kBigIntLiteral: return "BigIntLiteral";
    case NodeKind::kRegExpLiteral: return "RegExpLiteral";
    case NodeKind::kBooleanLiteral: return "BooleanLiteral";
    case NodeKind::kNullLiteral: return "NullLiteral";
    case NodeKind::kThis: return "This";
    case NodeKind::kSuper: return "Super";
    case NodeKind::kArray: return "Array";
    case NodeKind::kObject: return "Object";
    case NodeKind::kProperty: return "Property";
    case NodeKind::kSpread: return "Spread";
    case NodeKind::kFunctionExpr: return "FunctionExpr";
    case NodeKind::kArrowFunction: return "ArrowFunction";
    case NodeKind::kClassExpr: return "ClassExpr";
    case NodeKind::kClassBody: return "ClassBody";
    case NodeKind::kMethod: return "Method";
    case NodeKind::kField: return "Field";
    case NodeKind::kStaticBlock: return "StaticBlock";
    case NodeKind::kParams: return "Params";
    case NodeKind::kCall: return "Call";
    case NodeKind::kNew: return "New";
    case NodeKind::kMember: return "Member";
    case NodeKind::kUnary: return "Unary";
    case NodeKind::kUpdate: return "Update";
    case NodeKind::kBinary: return "Binary";
    case NodeKind::kLogical: return "Logical";
    case NodeKind::kAssign: return "Assign";
    case NodeKind::kConditional: return "Conditional";
    case NodeKind::kSequence: return "Sequence";
    case NodeKind::kAwait: return "Await";
    case NodeKind::kYield: return "Yield";
    case NodeKind::kTaggedTemplate: return "TaggedTemplate";
    case NodeKind::kMetaProperty: return "MetaProperty";
    case NodeKind::kImportCall: return "ImportCall";
  }
  return "?";
}

Position SyntaxTree::position(uint32_t offset) const {
  auto it = std::upper_bound(line_starts_.begin(), line_starts_.end(), offset);
  const auto line = static_cast<uint32_t>(it - line_starts_.begin());
  const uint32_t start = line_starts_[line - 1];
  return {line, offset - start + 1};
}

TreeBuilder::TreeBuilder(std::string file, std::string source) {
  tree_.file_ = std::move(file);
  tree_.source_ = std::move(source);
  tree_.line_starts_.push_back(0);
  const std::string& s = tree_.source_;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\n') tree_.line_starts_.push_back(static_cast<uint32_t>(i + 1));
  }
}

NodeId TreeBuilder::Add(NodeKind kind, Span span, std::span<const NodeId> kids,
                        std::string_view text, uint8_t node_flags) {
  Node n;
  n.kind = kind;
  n.flags = node_flags;
  n.span = span;
  n.first_child = static_cast<uint32_t>(tree_.children_.size());
  n.child_count = static_cast<uint32_t>(kids.size());
  tree_.children_.insert(tree_.children_.end(), kids.begin(), kids.end());
  if (!text.empty()) {
    n.text_offset = static_cast<uint32_t>(tree_.texts_.size());
    n.text_length = static_cast<uint32_t>(text.size());
    tree_.texts_.append(text);
  }
  tree_.nodes_.push_back(n);
  return static_cast<NodeId>(tree_.nodes_.size() - 1);
}

SyntaxTree TreeBuilder::Finish(NodeId root) && {
  tree_.root_ = root;
  tree_.parents_.assign(tree_.nodes_.size(), kNoNode);
  for (NodeId id = 0; id < tree_.nodes_.size(); ++id) {
    for (NodeId c : tree_.children(id)) {
      if (c != kNoNode) tree_.parents_[c] = id;
    }
  }
  return std::move(tree_);
}

}  // namespace vsxscan::js
