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

#include "vsxscan/pdg.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <string>
#include <vector>

#include "support/node_find.hpp"
#include "vsxscan/error.hpp"
#include "vsxscan/js_parser.hpp"

namespace vsxscan::graph {
namespace {

using js::NodeKind;
using ::vsxscan::testing::Ident;
using ::vsxscan::testing::NodesOf;

ProgramDependencyGraph Build(std::string_view src) {
  return BuildPdg(js::ParseSource(src, "t.js"));
}

std::vector<NodeId> Defs(const ProgramDependencyGraph& g, NodeId use) {
  auto d = g.Definitions(use);
  return {d.begin(), d.end()};
}

TEST(PdgTest, ConstantReachesCallArgument) {
  auto g = Build("const a = \"k\"; use(a);");
  const auto& t = g.tree();
  const NodeId decl = t.parent(Ident(t, "a", 0));
  ASSERT_EQ(t.kind(decl), NodeKind::kDeclarator);
  const NodeId use = Ident(t, "a", 1);
  EXPECT_TRUE(g.HasEdge(decl, use, EdgeKind::kData));
  EXPECT_EQ(Defs(g, use), std::vector<NodeId>{decl});
  EXPECT_EQ(t.kind(g.DefinitionValue(decl)), NodeKind::kStringLiteral);
}

TEST(PdgTest, EmptyProgramHasNoDataEdges) {
  EXPECT_EQ(Build("").CountEdges(EdgeKind::kData), 0u);
  EXPECT_EQ(Build("// nothing\n;").CountEdges(EdgeKind::kData), 0u);
}

TEST(PdgTest, GlobalStateKeyFlow) {
  auto g = Build(
      "async function activate(e, t) {\n"
      "  const h = \"CHAT_CONVERSATIONS\";\n"
      "  const n = e.globalState.get(h, { conversations: {} });\n"
      "  n.conversations[t.id] = { id: t.id }, await e.globalState.update(h, n);\n"
      "}\n");
  const auto& t = g.tree();
  const NodeId def = t.parent(Ident(t, "h", 0));
  for (size_t i : {1u, 2u}) {
    const NodeId use = Ident(t, "h", i);
    EXPECT_TRUE(g.HasEdge(def, use, EdgeKind::kData)) << i;
    EXPECT_EQ(Defs(g, use), std::vector<NodeId>{def});
  }
  auto uses = g.Uses(def);
  EXPECT_EQ(uses.size(), 2u);
}

TEST(PdgTest, BranchesMergeDefinitions) {
  auto g = Build(
      "let k = 'a';\n"
      "if (c) { k = 'b'; } else { }\n"
      "sink(k);\n"
      "k = 'c';\n"
      "sink(k);\n");
  const auto& t = g.tree();
  const NodeId d0 = t.parent(Ident(t, "k", 0));
  const NodeId d1 = t.parent(Ident(t, "k", 1));
  const NodeId d2 = t.parent(Ident(t, "k", 3));
  ASSERT_EQ(t.kind(d1), NodeKind::kAssign);
  EXPECT_EQ(Defs(g, Ident(t, "k", 2)), (std::vector<NodeId>{d0, d1}));
  EXPECT_EQ(Defs(g, Ident(t, "k", 4)), std::vector<NodeId>{d2});
}

TEST(PdgTest, BothArmsKillTheEarlierDefinition) {
  auto g = Build(
      "var k = 'a';\n"
      "if (c) k = 'b'; else k = 'c';\n"
      "sink(k);\n");
  const auto& t = g.tree();
  EXPECT_EQ(Defs(g, Ident(t, "k", 3)),
            (std::vector<NodeId>{t.parent(Ident(t, "k", 1)),
                                 t.parent(Ident(t, "k", 2))}));
}

TEST(PdgTest, BlockScopesShadow) {
  auto g = Build(
      "let x = 'outer';\n"
      "{ let x = 'inner'; f(x); }\n"
      "f(x);\n");
  const auto& t = g.tree();
  EXPECT_EQ(Defs(g, Ident(t, "x", 2)),
            std::vector<NodeId>{t.parent(Ident(t, "x", 1))});
  EXPECT_EQ(Defs(g, Ident(t, "x", 3)),
            std::vector<NodeId>{t.parent(Ident(t, "x", 0))});
}

TEST(PdgTest, FunctionsHaveTheirOwnScope) {
  auto g = Build(
      "let x = 'a';\n"
      "function f(x) { return x; }\n"
      "function g() { let y = x; x = 'b'; return y; }\n"
      "use(x);\n");
  const auto& t = g.tree();
  // Parameter x shadows the outer binding.
  const NodeId param = Ident(t, "x", 1);
  EXPECT_EQ(Defs(g, Ident(t, "x", 2)), std::vector<NodeId>{param});
  // A captured variable with several definitions has no local definition.
  EXPECT_TRUE(Defs(g, Ident(t, "x", 3)).empty());
  // The outer x is written from g, so reads of it are ambiguous.
  EXPECT_TRUE(g.IsAmbiguousUse(Ident(t, "x", 5)));
  EXPECT_FALSE(g.IsAmbiguousUse(Ident(t, "x", 2)));
}

TEST(PdgTest, CapturedSingleConstantIsVisibleInsideClosures) {
  auto g = Build(
      "const key = 'secret.key';\n"
      "exports.activate = (ctx) => { ctx.globalState.get(key); };\n");
  const auto& t = g.tree();
  const NodeId def = t.parent(Ident(t, "key", 0));
  EXPECT_TRUE(g.HasEdge(def, Ident(t, "key", 1), EdgeKind::kData));
  EXPECT_FALSE(g.IsAmbiguousUse(Ident(t, "key", 1)));
}

TEST(PdgTest, DefinitionKinds) {
  auto g = Build(
      "let a; a = 1; a += 2; a++;\n"
      "function fn() {}\n"
      "class C {}\n"
      "const {p, q: [r]} = o;\n"
      "for (const e of list) use(e);\n"
      "try {} catch (err) { use(err); }\n"
      "use(a, fn, C, p, r);\n");
  const auto& t = g.tree();
  const NodeId last_a = Ident(t, "a", 4);
  EXPECT_EQ(t.kind(Defs(g, last_a).at(0)), NodeKind::kUpdate);
  EXPECT_EQ(g.DefinitionValue(Defs(g, last_a).at(0)), kNoNode);
  EXPECT_EQ(t.kind(Defs(g, Ident(t, "fn", 1)).at(0)), NodeKind::kFunctionDecl);
  EXPECT_EQ(t.kind(Defs(g, Ident(t, "C", 1)).at(0)), NodeKind::kClassDecl);
  // Shorthand {p} holds a key and a value node; the value is the target.
  EXPECT_EQ(Defs(g, Ident(t, "p", 2)), std::vector<NodeId>{Ident(t, "p", 1)});
  EXPECT_EQ(Defs(g, Ident(t, "r", 1)), std::vector<NodeId>{Ident(t, "r", 0)});
  EXPECT_EQ(Defs(g, Ident(t, "e", 1)), std::vector<NodeId>{Ident(t, "e", 0)});
  EXPECT_EQ(Defs(g, Ident(t, "err", 1)),
            std::vector<NodeId>{Ident(t, "err", 0)});
}

TEST(PdgTest, FunctionDeclarationsAreHoisted) {
  auto g = Build("use(f);\nfunction f() {}\n");
  const auto& t = g.tree();
  EXPECT_EQ(Defs(g, Ident(t, "f", 0)),
            std::vector<NodeId>{NodesOf(t, NodeKind::kFunctionDecl).at(0)});
}

TEST(PdgTest, LoopBodiesSeeLaterDefinitions) {
  auto g = Build(
      "let k = 'a';\n"
      "while (c) { use(k); k = 'b'; }\n");
  const auto& t = g.tree();
  EXPECT_EQ(Defs(g, Ident(t, "k", 1)).size(), 2u);
}

TEST(PdgTest, EarlyExitsDoNotLeak) {
  auto g = Build(
      "function f(c) {\n"
      "  let k = 'a';\n"
      "  if (c) { k = 'b'; return; }\n"
      "  use(k);\n"
      "}\n");
  const auto& t = g.tree();
  EXPECT_EQ(Defs(g, Ident(t, "k", 2)),
            std::vector<NodeId>{t.parent(Ident(t, "k", 0))});
}

TEST(PdgTest, ControlEdgesFollowStatementOrder) {
  auto g = Build("a(); b(); if (c) { d(); }");
  const auto& t = g.tree();
  auto stmts = t.children(t.root());
  ASSERT_EQ(stmts.size(), 3u);
  EXPECT_TRUE(g.HasEdge(stmts[0], stmts[1], EdgeKind::kControl));
  EXPECT_TRUE(g.HasEdge(stmts[1], stmts[2], EdgeKind::kControl));
  EXPECT_TRUE(g.HasEdge(t.root(), stmts[0], EdgeKind::kControl));
  const NodeId block = t.child(stmts[2], 1);
  EXPECT_TRUE(g.HasEdge(stmts[2], block, EdgeKind::kControl));
}

TEST(PdgTest, EdgesAreSortedAndUnique) {
  auto g = Build(
      "let a = 1, b = a; if (b) { a = b; } else { b = a; } f(a, b, a);");
  const auto& e = g.edges();
  for (size_t i = 1; i < e.size(); ++i) {
    auto key = [](const Edge& x) {
      return std::tuple(static_cast<int>(x.kind), x.from, x.to);
    };
    EXPECT_LT(key(e[i - 1]), key(e[i]));
  }
  EXPECT_EQ(g.CountEdges(EdgeKind::kData) + g.CountEdges(EdgeKind::kControl),
            e.size());
}

TEST(PdgTest, ExpiredDeadlineIsABudgetError) {
  auto tree = js::ParseSource("let a = 1; f(a);", "t.js");
  PdgOptions o;
  o.deadline = js::Clock::now() - std::chrono::seconds(1);
  try {
    BuildPdg(std::move(tree), o);
    FAIL() << "expected budget error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBudgetExceeded);
  }
}

}  // namespace
}  // namespace vsxscan::graph
