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

// Three passes:
//   1. scopes: declarations are entered into function or block scopes and
//      every identifier remembers the scope it appears in;
//   2. reaching definitions: each function-like unit is walked in evaluation
//      order with a definition set per local binding. Branches fork and merge
//      through an undo trail; loop heads and exception handlers start from
//      the entry state widened by every definition syntactically inside;
//   3. control edges from statement containment and order.

#include "vsxscan/pdg.hpp"

#include <algorithm>
#include <functional>
#include <string_view>
#include <unordered_map>
#include <utility>

#include "vsxscan/error.hpp"

namespace vsxscan::graph {

using js::NodeKind;

namespace {

constexpr uint32_t kNone = UINT32_MAX;

using DefSet = std::vector<NodeId>;  // sorted, unique
using Delta = std::vector<std::pair<uint32_t, DefSet>>;  // sorted by binding

DefSet Union(const DefSet& a, const DefSet& b) {
  DefSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

const DefSet* FindIn(const Delta& d, uint32_t binding) {
  auto it = std::lower_bound(
      d.begin(), d.end(), binding,
      [](const auto& entry, uint32_t b) { return entry.first < b; });
  return it != d.end() && it->first == binding ? &it->second : nullptr;
}

struct ScopeKey {
  uint32_t scope;
  std::string_view name;
  friend bool operator==(const ScopeKey&, const ScopeKey&) = default;
};

struct ScopeKeyHash {
  size_t operator()(const ScopeKey& k) const {
    return std::hash<std::string_view>()(k.name) * 31u + k.scope;
  }
};

bool IsStatementKind(NodeKind k) {
  switch (k) {
    case NodeKind::kVarDecl:
    case NodeKind::kFunctionDecl:
    case NodeKind::kClassDecl:
    case NodeKind::kExprStmt:
    case NodeKind::kBlock:
    case NodeKind::kEmpty:
    case NodeKind::kIf:
    case NodeKind::kFor:
    case NodeKind::kForIn:
    case NodeKind::kForOf:
    case NodeKind::kWhile:
    case NodeKind::kDoWhile:
    case NodeKind::kReturn:
    case NodeKind::kBreak:
    case NodeKind::kContinue:
    case NodeKind::kThrow:
    case NodeKind::kTry:
    case NodeKind::kCatch:
    case NodeKind::kSwitch:
    case NodeKind::kCase:
    case NodeKind::kLabeled:
    case NodeKind::kDebugger:
    case NodeKind::kWith:
    case NodeKind::kImportDecl:
    case NodeKind::kExportDecl:
    case NodeKind::kStaticBlock:
      return true;
    default:
      return false;
  }
}

bool IsLoopKind(NodeKind k) {
  return k == NodeKind::kFor || k == NodeKind::kForIn ||
         k == NodeKind::kForOf || k == NodeKind::kWhile ||
         k == NodeKind::kDoWhile;
}

}  // namespace

class PdgBuilder {
 public:
  PdgBuilder(js::SyntaxTree tree, const PdgOptions& options)
      : tree_(std::make_shared<const js::SyntaxTree>(std::move(tree))),
        t_(*tree_),
        options_(options),
        ident_scope_(t_.size(), kNone),
        binding_of_(t_.size(), kNone) {}

  ProgramDependencyGraph Build() && {
    if (t_.root() == kNoNode) {
      throw Error(ErrorCode::kParseError, "empty syntax tree");
    }
    // Pass 1.
    units_.push_back({t_.root(), kNone, {}});
    const uint32_t program_scope = NewScope(kNone, true, 0);
    units_[0].scope = program_scope;
    for (NodeId s : t_.children(t_.root())) Visit(s, program_scope);

    // Pass 2.
    for (uint32_t u = 0; u < units_.size(); ++u) RunUnit(u);
    for (Binding& b : bindings_) {
      std::sort(b.defs.begin(), b.defs.end());
      b.defs.erase(std::unique(b.defs.begin(), b.defs.end()), b.defs.end());
    }
    for (const auto& [use, b] : captured_) {
      const std::vector<NodeId>& defs = bindings_[b].defs;
      if (defs.size() == 1 && t_.kind(defs[0]) == NodeKind::kDeclarator &&
          t_.child(defs[0], 1) != kNoNode) {
        AddDataEdge(defs[0], use);
      }
    }

    ProgramDependencyGraph g;
    g.ambiguous_.assign(t_.size(), 0);
    for (const auto& [use, b] : local_uses_) {
      if (bindings_[b].foreign) g.ambiguous_[use] = 1;
    }

    // Pass 3.
    std::vector<Edge> edges;
    AddControlEdges(edges);
    std::sort(data_.begin(), data_.end());
    data_.erase(std::unique(data_.begin(), data_.end()), data_.end());
    for (const auto& [from, to] : data_) {
      edges.push_back({from, to, EdgeKind::kData});
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
      return std::tie(a.kind, a.from, a.to) < std::tie(b.kind, b.from, b.to);
    });
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    const size_t n = t_.size();
    g.out_offsets_.assign(n + 1, 0);
    g.in_offsets_.assign(n + 1, 0);
    for (const auto& [from, to] : data_) {
      ++g.out_offsets_[from + 1];
      ++g.in_offsets_[to + 1];
    }
    for (size_t i = 0; i < n; ++i) {
      g.out_offsets_[i + 1] += g.out_offsets_[i];
      g.in_offsets_[i + 1] += g.in_offsets_[i];
    }
    g.out_uses_.resize(data_.size());
    g.in_defs_.resize(data_.size());
    {
      std::vector<uint32_t> out_fill(g.out_offsets_.begin(),
                                     g.out_offsets_.end() - 1);
      std::vector<uint32_t> in_fill(g.in_offsets_.begin(),
                                    g.in_offsets_.end() - 1);
      // data_ is sorted by (from, to), so both lists come out ascending.
      for (const auto& [from, to] : data_) {
        g.out_uses_[out_fill[from]++] = to;
        g.in_defs_[in_fill[to]++] = from;
      }
    }
    g.binding_of_ = std::move(binding_of_);
    g.binding_defs_.reserve(bindings_.size());
    for (Binding& b : bindings_) g.binding_defs_.push_back(std::move(b.defs));
    g.edges_ = std::move(edges);
    g.tree_ = std::move(tree_);
    return g;
  }

 private:
  struct Scope {
    uint32_t parent;
    bool is_function;
    uint32_t unit;
  };
  struct Binding {
    uint32_t unit;
    std::vector<NodeId> defs;
    bool foreign = false;  // written from a unit other than its own
  };
  struct Unit {
    NodeId node;
    uint32_t scope;
    std::vector<NodeId> hoisted;  // function declarations
  };
  struct Mark {
    size_t trail;
    bool live;
  };
  struct TrailEntry {
    uint32_t binding;
    DefSet old;
  };
  struct BreakTarget {
    std::vector<std::string_view> labels;
    bool takes_unlabeled;
    Mark mark;
    std::vector<std::optional<Delta>> exits;
  };

  // ---- budget -------------------------------------------------------------

  void Tick() {
    if ((steps_++ & 0xFFF) != 0) return;
    if (options_.deadline && js::Clock::now() > *options_.deadline) {
      throw Error(ErrorCode::kBudgetExceeded,
                  t_.file() + ": time budget exhausted while building graph");
    }
  }

  void AddDataEdge(NodeId from, NodeId to) {
    data_.emplace_back(from, to);
    if (data_.size() > options_.max_edges) {
      throw Error(ErrorCode::kBudgetExceeded,
                  t_.file() + ": edge budget exhausted");
    }
  }

  // ---- pass 1: scopes -------------------------------------------------------

  uint32_t NewScope(uint32_t parent, bool is_function, uint32_t unit) {
    scopes_.push_back({parent, is_function, unit});
    return static_cast<uint32_t>(scopes_.size() - 1);
  }

  uint32_t NewUnit(NodeId node, uint32_t parent_scope) {
    units_.push_back({node, kNone, {}});
    const auto u = static_cast<uint32_t>(units_.size() - 1);
    units_[u].scope = NewScope(parent_scope, true, u);
    return units_[u].scope;
  }

  uint32_t FunctionScopeOf(uint32_t s) const {
    while (!scopes_[s].is_function) s = scopes_[s].parent;
    return s;
  }

  uint32_t Declare(NodeId ident, uint32_t scope) {
    auto [it, inserted] = names_.try_emplace(ScopeKey{scope, t_.text(ident)},
                                             kNone);
    if (inserted) {
      bindings_.push_back({scopes_[scope].unit, {}, false});
      it->second = static_cast<uint32_t>(bindings_.size() - 1);
    }
    return it->second;
  }

  template <typename Fn>
  void ForEachPatternIdentifier(NodeId p, Fn&& fn) {
    if (p == kNoNode) return;
    switch (t_.kind(p)) {
      case NodeKind::kIdentifier:
        fn(p);
        break;
      case NodeKind::kObject:
        for (NodeId prop : t_.children(p)) {
          if (t_.kind(prop) == NodeKind::kProperty) {
            ForEachPatternIdentifier(t_.child(prop, 1), fn);
          } else if (t_.kind(prop) == NodeKind::kSpread) {
            ForEachPatternIdentifier(t_.child(prop, 0), fn);
          }
        }
        break;
      case NodeKind::kArray:
        for (NodeId e : t_.children(p)) ForEachPatternIdentifier(e, fn);
        break;
      case NodeKind::kAssign:
      case NodeKind::kSpread:
        ForEachPatternIdentifier(t_.child(p, 0), fn);
        break;
      default:
        break;
    }
  }

  void DeclarePattern(NodeId pattern, uint32_t scope) {
    ForEachPatternIdentifier(pattern,
                             [&](NodeId id) { Declare(id, scope); });
  }

  void VisitChildren(NodeId n, uint32_t s) {
    for (NodeId c : t_.children(n)) Visit(c, s);
  }

  void Visit(NodeId n, uint32_t s) {
    if (n == kNoNode) return;
    Tick();
    switch (t_.kind(n)) {
      case NodeKind::kIdentifier:
        ident_scope_[n] = s;
        return;
      case NodeKind::kFunctionDecl: {
        const NodeId name = t_.child(n, 0);
        if (name != kNoNode) {
          ident_scope_[name] = s;
          Declare(name, s);
        }
        units_[scopes_[s].unit].hoisted.push_back(n);
        VisitFunction(n, s);
        return;
      }
      case NodeKind::kFunctionExpr:
      case NodeKind::kArrowFunction:
        VisitFunction(n, s);
        return;
      case NodeKind::kClassDecl:
      case NodeKind::kClassExpr: {
        uint32_t inner = s;
        const NodeId name = t_.child(n, 0);
        if (name != kNoNode) {
          if (t_.kind(n) == NodeKind::kClassExpr) {
            inner = NewScope(s, false, scopes_[s].unit);
          }
          ident_scope_[name] = inner;
          Declare(name, inner);
        }
        Visit(t_.child(n, 1), inner);
        Visit(t_.child(n, 2), inner);
        return;
      }
      case NodeKind::kMethod:
        if (t_.node(n).has(js::flags::kComputed)) Visit(t_.child(n, 0), s);
        Visit(t_.child(n, 1), s);
        return;
      case NodeKind::kField:
        if (t_.node(n).has(js::flags::kComputed)) Visit(t_.child(n, 0), s);
        if (t_.child(n, 1) != kNoNode) Visit(t_.child(n, 1), NewUnit(n, s));
        return;
      case NodeKind::kStaticBlock:
        Visit(t_.child(n, 0), NewUnit(n, s));
        return;
      case NodeKind::kVarDecl: {
        const uint32_t ds = t_.text(n) == "var" ? FunctionScopeOf(s) : s;
        for (NodeId decl : t_.children(n)) {
          DeclarePattern(t_.child(decl, 0), ds);
          Visit(t_.child(decl, 0), s);
          Visit(t_.child(decl, 1), s);
        }
        return;
      }
      case NodeKind::kBlock:
      case NodeKind::kFor:
      case NodeKind::kForIn:
      case NodeKind::kForOf:
      case NodeKind::kSwitch:
        VisitChildren(n, NewScope(s, false, scopes_[s].unit));
        return;
      case NodeKind::kCatch: {
        const uint32_t inner = NewScope(s, false, scopes_[s].unit);
        DeclarePattern(t_.child(n, 0), inner);
        VisitChildren(n, inner);
        return;
      }
      case NodeKind::kImportDecl: {
        auto kids = t_.children(n);
        for (size_t i = 1; i < kids.size(); ++i) {
          ident_scope_[kids[i]] = s;
          Declare(kids[i], s);
        }
        return;
      }
      case NodeKind::kMember:
        Visit(t_.child(n, 0), s);
        if (t_.node(n).has(js::flags::kComputed)) Visit(t_.child(n, 1), s);
        return;
      case NodeKind::kProperty:
        if (t_.node(n).has(js::flags::kComputed)) Visit(t_.child(n, 0), s);
        Visit(t_.child(n, 1), s);
        return;
      default:
        VisitChildren(n, s);
        return;
    }
  }

  void VisitFunction(NodeId n, uint32_t s) {
    uint32_t outer = s;
    const NodeId name = t_.child(n, 0);
    if (t_.kind(n) == NodeKind::kFunctionExpr && name != kNoNode) {
      outer = NewScope(s, false, scopes_[s].unit);
      ident_scope_[name] = outer;
      Declare(name, outer);
    }
    const uint32_t fs = NewUnit(n, outer);
    for (NodeId p : t_.children(t_.child(n, 1))) {
      DeclarePattern(p, fs);
      Visit(p, fs);
    }
    const NodeId body = t_.child(n, 2);
    if (t_.kind(body) == NodeKind::kBlock) {
      VisitChildren(body, fs);
    } else {
      Visit(body, fs);
    }
  }

  uint32_t Lookup(NodeId ident) {
    if (binding_of_[ident] != kNone) return binding_of_[ident];
    uint32_t s = ident_scope_[ident];
    if (s == kNone) return kNone;
    const std::string_view name = t_.text(ident);
    uint32_t found = kNone;
    for (; s != kNone; s = scopes_[s].parent) {
      auto it = names_.find(ScopeKey{s, name});
      if (it != names_.end()) {
        found = it->second;
        break;
      }
    }
    if (found == kNone) found = Declare(ident, units_[0].scope);
    binding_of_[ident] = found;
    return found;
  }

  // ---- pass 2: reaching definitions -----------------------------------------

  bool Collecting() const { return collect_ != nullptr; }

  DefSet& Value(uint32_t b) {
    if (b >= state_.size()) {
      state_.resize(bindings_.size());
      stamp_.resize(bindings_.size(), 0);
    }
    return state_[b];
  }

  void Set(uint32_t b, DefSet value) {
    DefSet& slot = Value(b);
    trail_.push_back({b, std::move(slot)});
    slot = std::move(value);
  }

  Mark MakeMark() const { return {trail_.size(), live_}; }

  void Rewind(const Mark& m) {
    if (Collecting()) return;
    while (trail_.size() > m.trail) {
      TrailEntry& e = trail_.back();
      state_[e.binding] = std::move(e.old);
      trail_.pop_back();
    }
    live_ = m.live;
  }

  std::optional<Delta> Capture(const Mark& m) {
    if (Collecting()) return Delta{};
    if (!live_) return std::nullopt;
    Delta d;
    ++stamp_counter_;
    for (size_t i = m.trail; i < trail_.size(); ++i) {
      const uint32_t b = trail_[i].binding;
      if (stamp_[b] == stamp_counter_) continue;
      stamp_[b] = stamp_counter_;
      d.emplace_back(b, state_[b]);
    }
    std::sort(d.begin(), d.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return d;
  }

  // Joins branch outcomes captured against the current (rewound) state.
  void Merge(const std::vector<std::optional<Delta>>& outcomes) {
    if (Collecting()) return;
    std::vector<const Delta*> live;
    for (const auto& o : outcomes) {
      if (o) live.push_back(&*o);
    }
    if (live.empty()) {
      live_ = false;
      return;
    }
    std::vector<uint32_t> keys;
    for (const Delta* d : live) {
      for (const auto& entry : *d) keys.push_back(entry.first);
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    for (uint32_t b : keys) {
      DefSet joined;
      for (const Delta* d : live) {
        const DefSet* v = FindIn(*d, b);
        joined = Union(joined, v ? *v : Value(b));
      }
      Set(b, std::move(joined));
    }
    live_ = true;
  }

  void Fork(const std::function<void()>& optional_part) {
    const Mark m = MakeMark();
    optional_part();
    auto taken = Capture(m);
    Rewind(m);
    Merge({std::move(taken), Delta{}});
  }

  void Define(uint32_t b, NodeId def) {
    if (b == kNone) return;
    Binding& binding = bindings_[b];
    if (binding.unit != unit_) {
      if (!Collecting()) {
        binding.foreign = true;
        binding.defs.push_back(def);
      }
      return;
    }
    if (Collecting()) {
      collect_->emplace_back(b, def);
      return;
    }
    binding.defs.push_back(def);
    if (live_) Set(b, DefSet{def});
  }

  void DefineIdent(NodeId ident, NodeId def) { Define(Lookup(ident), def); }

  void Use(NodeId ident) {
    if (Collecting()) return;
    const uint32_t b = Lookup(ident);
    if (b == kNone) return;
    if (bindings_[b].unit != unit_) {
      captured_.emplace_back(ident, b);
      return;
    }
    local_uses_.emplace_back(ident, b);
    if (!live_) return;
    for (NodeId d : Value(b)) AddDataEdge(d, ident);
  }

  // Adds every definition syntactically inside `n` to the current state.
  void Widen(NodeId n) {
    if (n == kNoNode || Collecting()) return;
    std::vector<std::pair<uint32_t, NodeId>> found;
    const bool saved_live = live_;
    std::vector<std::string_view> saved_labels = std::move(pending_labels_);
    pending_labels_.clear();
    collect_ = &found;
    live_ = true;
    if (IsStatementKind(t_.kind(n))) {
      Stmt(n);
    } else {
      Expr(n);
    }
    collect_ = nullptr;
    live_ = saved_live;
    pending_labels_ = std::move(saved_labels);
    if (!live_) return;
    std::sort(found.begin(), found.end());
    found.erase(std::unique(found.begin(), found.end()), found.end());
    for (size_t i = 0; i < found.size();) {
      const uint32_t b = found[i].first;
      DefSet add;
      for (; i < found.size() && found[i].first == b; ++i) {
        add.push_back(found[i].second);
      }
      Set(b, Union(Value(b), add));
    }
  }

  void RunUnit(uint32_t u) {
    unit_ = u;
    live_ = true;
    trail_.clear();
    targets_.clear();
    const NodeId n = units_[u].node;
    if (u == 0) {
      for (NodeId s : t_.children(n)) {
        if (t_.kind(s) != NodeKind::kImportDecl) continue;
        auto kids = t_.children(s);
        for (size_t i = 1; i < kids.size(); ++i) DefineIdent(kids[i], kids[i]);
      }
    }
    for (NodeId f : units_[u].hoisted) {
      if (t_.child(f, 0) != kNoNode) DefineIdent(t_.child(f, 0), f);
    }
    switch (t_.kind(n)) {
      case NodeKind::kProgram:
        for (NodeId s : t_.children(n)) Stmt(s);
        break;
      case NodeKind::kFunctionDecl:
      case NodeKind::kFunctionExpr:
      case NodeKind::kArrowFunction: {
        for (NodeId p : t_.children(t_.child(n, 1))) DefinePattern(p);
        const NodeId body = t_.child(n, 2);
        if (t_.kind(body) == NodeKind::kBlock) {
          for (NodeId s : t_.children(body)) Stmt(s);
        } else {
          Expr(body);
        }
        break;
      }
      case NodeKind::kField:
        Expr(t_.child(n, 1));
        break;
      case NodeKind::kStaticBlock:
        Stmt(t_.child(n, 0));
        break;
      default:
        break;
    }
  }

  void DefinePattern(NodeId p) {
    if (p == kNoNode) return;
    switch (t_.kind(p)) {
      case NodeKind::kIdentifier:
        DefineIdent(p, p);
        break;
      case NodeKind::kObject:
        for (NodeId prop : t_.children(p)) {
          if (t_.kind(prop) == NodeKind::kProperty) {
            if (t_.node(prop).has(js::flags::kComputed)) {
              Expr(t_.child(prop, 0));
            }
            DefinePattern(t_.child(prop, 1));
          } else {
            DefinePattern(t_.child(prop, 0));
          }
        }
        break;
      case NodeKind::kArray:
        for (NodeId e : t_.children(p)) DefinePattern(e);
        break;
      case NodeKind::kAssign:
        Fork([&] { Expr(t_.child(p, 1)); });
        DefinePattern(t_.child(p, 0));
        break;
      case NodeKind::kSpread:
        DefinePattern(t_.child(p, 0));
        break;
      default:
        Expr(p);
        break;
    }
  }

  void Declarator(NodeId decl, std::string_view kind) {
    const NodeId target = t_.child(decl, 0);
    const NodeId init = t_.child(decl, 1);
    if (init != kNoNode) Expr(init);
    if (t_.kind(target) == NodeKind::kIdentifier) {
      if (init != kNoNode || kind != "var") DefineIdent(target, decl);
    } else {
      DefinePattern(target);
    }
  }

  void ClassValue(NodeId n) {
    Expr(t_.child(n, 1));
    const NodeId body = t_.child(n, 2);
    for (NodeId m : t_.children(body)) {
      const NodeKind k = t_.kind(m);
      if ((k == NodeKind::kMethod || k == NodeKind::kField) &&
          t_.node(m).has(js::flags::kComputed)) {
        Expr(t_.child(m, 0));
      }
    }
  }

  BreakTarget* FindTarget(std::string_view label) {
    for (auto it = targets_.rbegin(); it != targets_.rend(); ++it) {
      if (label.empty()) {
        if (it->takes_unlabeled) return &*it;
      } else if (std::find(it->labels.begin(), it->labels.end(), label) !=
                 it->labels.end()) {
        return &*it;
      }
    }
    return nullptr;
  }

  // Runs `body` as a break target and joins its exits into the state.
  void WithTarget(bool takes_unlabeled, const std::function<void(Mark)>& body) {
    std::vector<std::string_view> labels = std::move(pending_labels_);
    pending_labels_.clear();
    const Mark m = MakeMark();
    targets_.push_back({std::move(labels), takes_unlabeled, m, {}});
    const size_t index = targets_.size() - 1;
    body(m);
    std::vector<std::optional<Delta>> exits = std::move(targets_[index].exits);
    targets_.pop_back();
    Rewind(m);
    Merge(exits);
  }

  void Loop(NodeId n) {
    const NodeKind k = t_.kind(n);
    if (k == NodeKind::kFor) {
      const NodeId init = t_.child(n, 0);
      if (init != kNoNode) {
        if (t_.kind(init) == NodeKind::kVarDecl) {
          Stmt(init);
        } else {
          Expr(init);
        }
      }
    } else if (k == NodeKind::kForIn || k == NodeKind::kForOf) {
      Expr(t_.child(n, 1));
    }
    // Loop head: entry state plus everything the loop may define.
    Widen(n);

    WithTarget(true, [&](Mark m) {
      auto& exits = targets_.back().exits;
      switch (k) {
        case NodeKind::kWhile:
          Expr(t_.child(n, 0));
          exits.push_back(Capture(m));
          Stmt(t_.child(n, 1));
          break;
        case NodeKind::kDoWhile:
          Stmt(t_.child(n, 0));
          live_ = true;  // `continue` still reaches the test
          Expr(t_.child(n, 1));
          exits.push_back(Capture(m));
          break;
        case NodeKind::kFor:
          if (t_.child(n, 1) != kNoNode) {
            Expr(t_.child(n, 1));
            exits.push_back(Capture(m));
          }
          Stmt(t_.child(n, 3));
          if (t_.child(n, 2) != kNoNode) {
            live_ = true;
            Expr(t_.child(n, 2));
          }
          break;
        default: {  // for-in / for-of
          exits.push_back(Capture(m));
          const NodeId left = t_.child(n, 0);
          if (t_.kind(left) == NodeKind::kVarDecl) {
            for (NodeId decl : t_.children(left)) {
              DefinePattern(t_.child(decl, 0));
            }
          } else {
            DefinePattern(left);
          }
          Stmt(t_.child(n, 2));
          break;
        }
      }
    });
  }

  void Stmt(NodeId n) {
    if (n == kNoNode) return;
    Tick();
    switch (t_.kind(n)) {
      case NodeKind::kVarDecl: {
        const std::string_view kind = t_.text(n);
        for (NodeId decl : t_.children(n)) Declarator(decl, kind);
        break;
      }
      case NodeKind::kFunctionDecl:
      case NodeKind::kEmpty:
      case NodeKind::kDebugger:
      case NodeKind::kImportDecl:
        break;
      case NodeKind::kClassDecl:
        ClassValue(n);
        if (t_.child(n, 0) != kNoNode) DefineIdent(t_.child(n, 0), n);
        break;
      case NodeKind::kExprStmt:
        Expr(t_.child(n, 0));
        break;
      case NodeKind::kBlock:
        for (NodeId s : t_.children(n)) Stmt(s);
        break;
      case NodeKind::kIf: {
        Expr(t_.child(n, 0));
        const Mark m = MakeMark();
        Stmt(t_.child(n, 1));
        auto then_out = Capture(m);
        Rewind(m);
        Stmt(t_.child(n, 2));
        auto else_out = Capture(m);
        Rewind(m);
        Merge({std::move(then_out), std::move(else_out)});
        break;
      }
      case NodeKind::kFor:
      case NodeKind::kForIn:
      case NodeKind::kForOf:
      case NodeKind::kWhile:
      case NodeKind::kDoWhile:
        Loop(n);
        break;
      case NodeKind::kReturn:
      case NodeKind::kThrow:
        Expr(t_.child(n, 0));
        if (!Collecting()) live_ = false;
        break;
      case NodeKind::kBreak: {
        if (Collecting()) break;
        BreakTarget* target = FindTarget(t_.text(n));
        if (target != nullptr) target->exits.push_back(Capture(target->mark));
        live_ = false;
        break;
      }
      case NodeKind::kContinue:
        if (!Collecting()) live_ = false;
        break;
      case NodeKind::kTry:
        Try(n);
        break;
      case NodeKind::kCatch:
        DefinePattern(t_.child(n, 0));
        Stmt(t_.child(n, 1));
        break;
      case NodeKind::kSwitch:
        Switch(n);
        break;
      case NodeKind::kLabeled: {
        pending_labels_.push_back(t_.text(n));
        const NodeId body = t_.child(n, 0);
        const NodeKind bk = t_.kind(body);
        if (IsLoopKind(bk) || bk == NodeKind::kSwitch ||
            bk == NodeKind::kLabeled) {
          Stmt(body);
        } else {
          WithTarget(false, [&](Mark m) {
            Stmt(body);
            targets_.back().exits.push_back(Capture(m));
          });
        }
        break;
      }
      case NodeKind::kWith:
        Expr(t_.child(n, 0));
        Stmt(t_.child(n, 1));
        break;
      case NodeKind::kExportDecl: {
        const NodeId d = t_.child(n, 0);
        if (d == kNoNode) break;
        if (IsStatementKind(t_.kind(d))) {
          Stmt(d);
        } else {
          Expr(d);
        }
        break;
      }
      default:
        Expr(n);
        break;
    }
  }

  void Try(NodeId n) {
    const NodeId block = t_.child(n, 0);
    const NodeId handler = t_.child(n, 1);
    const NodeId finalizer = t_.child(n, 2);
    const Mark m = MakeMark();
    Stmt(block);
    auto try_out = Capture(m);
    Rewind(m);
    std::optional<Delta> catch_out;
    if (handler != kNoNode) {
      Widen(block);
      DefinePattern(t_.child(handler, 0));
      Stmt(t_.child(handler, 1));
      catch_out = Capture(m);
      Rewind(m);
    }
    if (finalizer == kNoNode) {
      Merge({std::move(try_out), std::move(catch_out)});
      return;
    }
    Widen(block);
    if (handler != kNoNode) Widen(handler);
    auto abrupt = Capture(m);
    Rewind(m);
    const bool completes = try_out.has_value() || catch_out.has_value();
    Merge({std::move(try_out), std::move(catch_out), std::move(abrupt)});
    Stmt(finalizer);
    if (!completes && !Collecting()) live_ = false;
  }

  void Switch(NodeId n) {
    auto kids = t_.children(n);
    Expr(kids[0]);
    bool has_default = false;
    for (size_t i = 1; i < kids.size(); ++i) {
      const NodeId test = t_.child(kids[i], 0);
      if (test == kNoNode) {
        has_default = true;
      } else {
        Expr(test);
      }
    }
    WithTarget(true, [&](Mark m) {
      std::optional<Delta> fall;
      for (size_t i = 1; i < kids.size(); ++i) {
        Rewind(m);
        Merge({Delta{}, std::move(fall)});
        auto stmts = t_.children(kids[i]);
        for (size_t j = 1; j < stmts.size(); ++j) Stmt(stmts[j]);
        fall = Capture(m);
      }
      auto& exits = targets_.back().exits;
      exits.push_back(std::move(fall));
      if (!has_default) exits.push_back(Delta{});
    });
  }

  void Expr(NodeId n) {
    if (n == kNoNode) return;
    Tick();
    switch (t_.kind(n)) {
      case NodeKind::kIdentifier:
        Use(n);
        break;
      case NodeKind::kTemplateLiteral: {
        auto kids = t_.children(n);
        for (size_t i = 1; i < kids.size(); i += 2) Expr(kids[i]);
        break;
      }
      case NodeKind::kArray:
      case NodeKind::kSequence:
        for (NodeId c : t_.children(n)) Expr(c);
        break;
      case NodeKind::kObject:
        for (NodeId prop : t_.children(n)) {
          if (t_.kind(prop) == NodeKind::kSpread) {
            Expr(t_.child(prop, 0));
            continue;
          }
          if (t_.node(prop).has(js::flags::kComputed)) Expr(t_.child(prop, 0));
          Expr(t_.child(prop, 1));
        }
        break;
      case NodeKind::kClassExpr:
        ClassValue(n);
        break;
      case NodeKind::kCall:
      case NodeKind::kNew: {
        auto kids = t_.children(n);
        Expr(kids[0]);
        auto args = [&] {
          for (size_t i = 1; i < kids.size(); ++i) Expr(kids[i]);
        };
        if (t_.node(n).has(js::flags::kOptional)) {
          Fork(args);
        } else {
          args();
        }
        break;
      }
      case NodeKind::kMember:
        Expr(t_.child(n, 0));
        if (t_.node(n).has(js::flags::kComputed)) Expr(t_.child(n, 1));
        break;
      case NodeKind::kUpdate: {
        const NodeId arg = t_.child(n, 0);
        if (t_.kind(arg) == NodeKind::kIdentifier) {
          Use(arg);
          DefineIdent(arg, n);
        } else {
          Expr(arg);
        }
        break;
      }
      case NodeKind::kBinary:
        Expr(t_.child(n, 0));
        Expr(t_.child(n, 1));
        break;
      case NodeKind::kLogical:
        Expr(t_.child(n, 0));
        Fork([&] { Expr(t_.child(n, 1)); });
        break;
      case NodeKind::kAssign:
        Assign(n);
        break;
      case NodeKind::kConditional: {
        Expr(t_.child(n, 0));
        const Mark m = MakeMark();
        Expr(t_.child(n, 1));
        auto a = Capture(m);
        Rewind(m);
        Expr(t_.child(n, 2));
        auto b = Capture(m);
        Rewind(m);
        Merge({std::move(a), std::move(b)});
        break;
      }
      case NodeKind::kUnary:
      case NodeKind::kAwait:
      case NodeKind::kYield:
      case NodeKind::kSpread:
      case NodeKind::kImportCall:
        Expr(t_.child(n, 0));
        break;
      case NodeKind::kTaggedTemplate:
        Expr(t_.child(n, 0));
        Expr(t_.child(n, 1));
        break;
      default:
        // Literals, this/super, meta properties, and function bodies (which
        // are separate units).
        break;
    }
  }

  void Assign(NodeId n) {
    const std::string_view op = t_.text(n);
    const NodeId lhs = t_.child(n, 0);
    const NodeId rhs = t_.child(n, 1);
    const NodeKind lk = t_.kind(lhs);
    if (lk == NodeKind::kIdentifier) {
      if (op == "=") {
        Expr(rhs);
        DefineIdent(lhs, n);
      } else if (op == "&&=" || op == "||=" || op == "??=") {
        Use(lhs);
        Fork([&] {
          Expr(rhs);
          DefineIdent(lhs, n);
        });
      } else {
        Use(lhs);
        Expr(rhs);
        DefineIdent(lhs, n);
      }
    } else if (op == "=" &&
               (lk == NodeKind::kObject || lk == NodeKind::kArray)) {
      Expr(rhs);
      DefinePattern(lhs);
    } else {
      Expr(lhs);
      Expr(rhs);
    }
  }

  // ---- pass 3: control edges ---------------------------------------------------

  void AddControlEdges(std::vector<Edge>& edges) const {
    for (NodeId n = 0; n < t_.size(); ++n) {
      const NodeKind k = t_.kind(n);
      const bool container = IsStatementKind(k) || k == NodeKind::kProgram ||
                             k == NodeKind::kFunctionDecl ||
                             k == NodeKind::kFunctionExpr ||
                             k == NodeKind::kArrowFunction;
      if (!container) continue;
      NodeId prev = kNoNode;
      const bool sequence = k == NodeKind::kProgram ||
                            k == NodeKind::kBlock || k == NodeKind::kCase;
      for (NodeId c : t_.children(n)) {
        if (c == kNoNode || !IsStatementKind(t_.kind(c))) continue;
        edges.push_back({n, c, EdgeKind::kControl});
        if (sequence && prev != kNoNode) {
          edges.push_back({prev, c, EdgeKind::kControl});
        }
        prev = c;
      }
    }
  }

  std::shared_ptr<const js::SyntaxTree> tree_;
  const js::SyntaxTree& t_;
  const PdgOptions& options_;
  size_t steps_ = 0;

  std::vector<Scope> scopes_;
  std::vector<Binding> bindings_;
  std::vector<Unit> units_;
  std::unordered_map<ScopeKey, uint32_t, ScopeKeyHash> names_;
  std::vector<uint32_t> ident_scope_;
  std::vector<uint32_t> binding_of_;

  uint32_t unit_ = 0;
  bool live_ = true;
  std::vector<DefSet> state_;
  std::vector<TrailEntry> trail_;
  std::vector<uint32_t> stamp_;
  uint32_t stamp_counter_ = 0;
  std::vector<BreakTarget> targets_;
  std::vector<std::string_view> pending_labels_;
  std::vector<std::pair<uint32_t, NodeId>>* collect_ = nullptr;

  std::vector<std::pair<NodeId, NodeId>> data_;
  std::vector<std::pair<NodeId, uint32_t>> captured_;
  std::vector<std::pair<NodeId, uint32_t>> local_uses_;
};

size_t ProgramDependencyGraph::CountEdges(EdgeKind kind) const {
  return static_cast<size_t>(
      std::count_if(edges_.begin(), edges_.end(),
                    [kind](const Edge& e) { return e.kind == kind; }));
}

bool ProgramDependencyGraph::HasEdge(NodeId from, NodeId to,
                                     EdgeKind kind) const {
  return std::binary_search(
      edges_.begin(), edges_.end(), Edge{from, to, kind},
      [](const Edge& a, const Edge& b) {
        return std::tie(a.kind, a.from, a.to) < std::tie(b.kind, b.from, b.to);
      });
}

std::span<const NodeId> ProgramDependencyGraph::Definitions(NodeId use) const {
  if (use >= node_count()) return {};
  return {in_defs_.data() + in_offsets_[use],
          in_offsets_[use + 1] - in_offsets_[use]};
}

std::span<const NodeId> ProgramDependencyGraph::Uses(NodeId def) const {
  if (def >= node_count()) return {};
  return {out_uses_.data() + out_offsets_[def],
          out_offsets_[def + 1] - out_offsets_[def]};
}

NodeId ProgramDependencyGraph::DefinitionValue(NodeId def) const {
  const js::SyntaxTree& t = *tree_;
  switch (t.kind(def)) {
    case NodeKind::kDeclarator:
      return t.kind(t.child(def, 0)) == NodeKind::kIdentifier ? t.child(def, 1)
                                                             : kNoNode;
    case NodeKind::kAssign:
      return t.text(def) == "=" ? t.child(def, 1) : kNoNode;
    default:
      return kNoNode;
  }
}

bool ProgramDependencyGraph::IsAmbiguousUse(NodeId use) const {
  return use < ambiguous_.size() && ambiguous_[use] != 0;
}

std::vector<NodeId> ProgramDependencyGraph::DefinitionsOfBinding(
    NodeId name) const {
  if (name >= binding_of_.size() || binding_of_[name] == kNone) return {};
  return binding_defs_[binding_of_[name]];
}

ProgramDependencyGraph BuildPdg(js::SyntaxTree tree,
                                const PdgOptions& options) {
  return PdgBuilder(std::move(tree), options).Build();
}

}  // namespace vsxscan::graph
