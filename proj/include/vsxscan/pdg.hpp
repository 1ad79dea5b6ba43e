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

// Program dependency graph over a syntax tree. Graph nodes are syntax-tree
// nodes. Data edges run from a definition (declarator, assignment, update,
// parameter or pattern identifier, function or class declaration) to each
// identifier use it may reach along some execution path of the enclosing
// function. Control edges link statements in execution order and branch
// heads to their arms.

#ifndef VSXSCAN_PDG_HPP_
#define VSXSCAN_PDG_HPP_

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vsxscan/js_ast.hpp"
#include "vsxscan/js_parser.hpp"

namespace vsxscan::graph {

using js::NodeId;
using js::kNoNode;

enum class EdgeKind : uint8_t { kControl, kData };

struct Edge {
  NodeId from = kNoNode;
  NodeId to = kNoNode;
  EdgeKind kind = EdgeKind::kData;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct PdgOptions {
  std::optional<js::Clock::time_point> deadline;
  size_t max_edges = size_t{16} * 1000 * 1000;
};

class ProgramDependencyGraph {
 public:
  const js::SyntaxTree& tree() const { return *tree_; }
  const std::string& file() const { return tree_->file(); }
  size_t node_count() const { return tree_->size(); }

  // Sorted by (kind, from, to); no duplicates.
  const std::vector<Edge>& edges() const { return edges_; }
  size_t CountEdges(EdgeKind kind) const;
  bool HasEdge(NodeId from, NodeId to, EdgeKind kind) const;

  // Definitions reaching an identifier use, ascending.
  std::span<const NodeId> Definitions(NodeId use) const;
  // Uses reached by a definition, ascending.
  std::span<const NodeId> Uses(NodeId def) const;

  // The expression whose value a definition stores: the initializer of a
  // declarator or the right side of a plain `=` assignment. kNoNode for
  // opaque definitions (parameters, patterns, compound assignments, ...).
  NodeId DefinitionValue(NodeId def) const;

  // True when the variable read here is also written from another function,
  // so its reaching definitions are not known locally.
  bool IsAmbiguousUse(NodeId use) const;

  // Definition nodes whose binding is declared at `name` (an identifier in a
  // binding position). Mostly for tests.
  std::vector<NodeId> DefinitionsOfBinding(NodeId name) const;

 private:
  friend class PdgBuilder;

  std::shared_ptr<const js::SyntaxTree> tree_;
  std::vector<Edge> edges_;
  // CSR adjacency for data edges.
  std::vector<uint32_t> in_offsets_;
  std::vector<NodeId> in_defs_;
  std::vector<uint32_t> out_offsets_;
  std::vector<NodeId> out_uses_;
  std::vector<uint8_t> ambiguous_;
  std::vector<uint32_t> binding_of_;  // per node; UINT32_MAX when none
  std::vector<std::vector<NodeId>> binding_defs_;
};

// Throws Error(kBudgetExceeded) when the deadline passes or the edge budget
// is exhausted.
ProgramDependencyGraph BuildPdg(js::SyntaxTree tree,
                                const PdgOptions& options = {});

}  // namespace vsxscan::graph

#endif  // VSXSCAN_PDG_HPP_
