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

// Random straight-line/conditional programs over the sink APIs, plus an
// independent oracle that enumerates every execution path to find the
// definitions reaching each variable use. The oracle works on the generator's
// own program representation and never looks at the parser or the graph.

#ifndef VSXSCAN_TESTS_SUPPORT_DATAFLOW_ORACLE_HPP_
#define VSXSCAN_TESTS_SUPPORT_DATAFLOW_ORACLE_HPP_

#include <chrono>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "vsxscan/sinks.hpp"

namespace vsxscan::testing::dataflow {

struct Expr {
  enum Kind { kLit, kTemplate, kTemplateSub, kVar, kConcat, kOpaque };
  Kind kind = kLit;
  std::string raw;
  std::string cooked;
  std::string name;
  int binding = -1;
  int use = -1;
  std::vector<Expr> kids;
};

enum class Sink {
  kRegister,
  kTextEditor,
  kExecute,
  kStateGet,
  kStateUpdate,
  kConfigChained,
  kConfigBare,
  kInputBox,
  kClipboard,
};
inline constexpr int kSinkShapes = 9;

struct Stmt {
  enum Kind { kDecl, kAssign, kCompound, kSink, kIf, kBlock, kCfgDecl, kCfgUse };
  Kind kind = kDecl;
  std::string keyword;
  std::string name;
  int binding = -1;
  int def = -1;
  int cond = -1;
  bool update = false;
  Sink sink = Sink::kExecute;
  std::vector<Expr> exprs;
  std::vector<std::string> props;  // input-box keys, parallel to exprs
  std::vector<Stmt> body;
  std::vector<Stmt> alt;
  bool has_alt = false;
};

struct Program {
  std::vector<Stmt> body;
  int bindings = 0;
  int defs = 0;
  int uses = 0;
  int conditionals = 0;
  int statements = 0;
};

struct Generated {
  std::string source;
  std::vector<std::string> expected;
  int statements = 0;
  int conditionals = 0;
};

inline constexpr int kMaxStatements = 50;
inline constexpr int kMaxConditionals = 10;

class Generator {
 public:
  explicit Generator(uint64_t seed) : rng_(seed) {}

  Program Generate() {
    Program p;
    prog_ = &p;
    scopes_.assign(1, {});
    const int target = Uniform(4, kMaxStatements);
    while (p.statements < target) {
      p.body.push_back(GenStmt(0, target));
    }
    return p;
  }

 private:
  struct Binding {
    std::string name;
    bool is_const = false;
    bool cfg = false;
  };
  struct Scope {
    std::map<std::string, int> names;
    std::set<std::string> referenced;
  };

  int Uniform(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }
  bool Chance(int percent) { return Uniform(1, 100) <= percent; }

  // Visible bindings, innermost first wins.
  std::map<std::string, int> Visible() const {
    std::map<std::string, int> out;
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      for (const auto& [name, b] : it->names) out.emplace(name, b);
    }
    return out;
  }

  std::vector<int> Candidates(bool cfg, bool writable) const {
    std::vector<int> out;
    for (const auto& [name, b] : Visible()) {
      const Binding& info = bindings_[b];
      if (info.cfg != cfg || name == excluded_) continue;
      if (writable && info.is_const) continue;
      out.push_back(b);
    }
    return out;
  }

  void Reference(const std::string& name) {
    for (Scope& s : scopes_) s.referenced.insert(name);
  }

  int NewBinding(const std::string& name, bool is_const, bool cfg) {
    bindings_.push_back({name, is_const, cfg});
    scopes_.back().names[name] = prog_->bindings;
    return prog_->bindings++;
  }

  Expr Literal() {
    static const char* const kPool[][2] = {
        {"'k0'", "k0"},          {"\"api.key\"", "api.key"},
        {"'tok\\x41'", "tokA"},  {"'sec'", "sec"},
        {"\"\\u0041pi\"", "Api"}, {"'a b'", "a b"},
        {"'openai'", "openai"},  {"\"token\"", "token"},
    };
    const auto& e = kPool[Uniform(0, 7)];
    Expr x;
    x.kind = Expr::kLit;
    x.raw = e[0];
    x.cooked = e[1];
    return x;
  }

  Expr Var(int b) {
    Expr x;
    x.kind = Expr::kVar;
    x.binding = b;
    x.name = bindings_[b].name;
    x.use = prog_->uses++;
    Reference(x.name);
    return x;
  }

  Expr GenExpr(int depth) {
    auto vars = Candidates(false, false);
    const int roll = Uniform(1, 100);
    if (roll <= 30) return Literal();
    if (roll <= 62 && !vars.empty()) {
      return Var(vars[Uniform(0, static_cast<int>(vars.size()) - 1)]);
    }
    if (roll <= 80 && depth < 2) {
      Expr x;
      x.kind = Expr::kConcat;
      x.kids.push_back(GenExpr(depth + 1));
      x.kids.push_back(GenExpr(depth + 1));
      return x;
    }
    if (roll <= 86) {
      Expr x;
      x.kind = Expr::kTemplate;
      x.raw = "`tpl`";
      x.cooked = "tpl";
      return x;
    }
    if (roll <= 92 && !vars.empty()) {
      Expr x;
      x.kind = Expr::kTemplateSub;
      x.kids.push_back(
          Var(vars[Uniform(0, static_cast<int>(vars.size()) - 1)]));
      return x;
    }
    Expr x;
    x.kind = Expr::kOpaque;
    return x;
  }

  std::vector<Stmt> GenBody(int depth, int target) {
    scopes_.push_back({});
    std::vector<Stmt> body;
    const int n = Uniform(1, 4);
    for (int i = 0; i < n && prog_->statements < target; ++i) {
      body.push_back(GenStmt(depth, target));
    }
    scopes_.pop_back();
    return body;
  }

  Stmt GenStmt(int depth, int target) {
    ++prog_->statements;
    Stmt s;
    const int roll = Uniform(1, 100);
    const bool top = scopes_.size() == 1;
    if (roll <= 22) {
      // Declaration of a name neither declared nor referenced in this block.
      std::vector<std::string> names;
      for (int i = 0; i < 6; ++i) {
        std::string n = "v" + std::to_string(i);
        if (!scopes_.back().names.count(n) &&
            !scopes_.back().referenced.count(n)) {
          names.push_back(n);
        }
      }
      if (!names.empty()) {
        s.kind = Stmt::kDecl;
        s.name = names[Uniform(0, static_cast<int>(names.size()) - 1)];
        const int k = Uniform(0, top ? 2 : 1);
        s.keyword = k == 0 ? "let" : k == 1 ? "const" : "var";
        excluded_ = s.name;
        s.exprs.push_back(GenExpr(0));
        excluded_.clear();
        s.binding = NewBinding(s.name, s.keyword == "const", false);
        scopes_.back().referenced.insert(s.name);
        s.def = prog_->defs++;
        return s;
      }
    }
    if (roll <= 42) {
      auto w = Candidates(false, true);
      if (!w.empty()) {
        const int b = w[Uniform(0, static_cast<int>(w.size()) - 1)];
        s.kind = Chance(12) ? Stmt::kCompound : Stmt::kAssign;
        s.binding = b;
        s.name = bindings_[b].name;
        Reference(s.name);
        s.exprs.push_back(GenExpr(0));
        s.def = prog_->defs++;
        return s;
      }
    }
    if (roll <= 54 && prog_->conditionals < kMaxConditionals && depth < 3 &&
        prog_->statements + 1 < target) {
      s.kind = Stmt::kIf;
      s.cond = prog_->conditionals++;
      s.body = GenBody(depth + 1, target);
      s.has_alt = Chance(50) && prog_->statements < target;
      if (s.has_alt) s.alt = GenBody(depth + 1, target);
      return s;
    }
    if (roll <= 57 && depth < 3 && prog_->statements < target) {
      s.kind = Stmt::kBlock;
      s.body = GenBody(depth + 1, target);
      return s;
    }
    if (roll <= 63) {
      s.kind = Stmt::kCfgDecl;
      if (Chance(80)) s.exprs.push_back(GenExpr(0));
      s.name = "cfg" + std::to_string(cfg_counter_++);
      s.binding = NewBinding(s.name, true, true);
      s.def = prog_->defs++;
      return s;
    }
    if (roll <= 71) {
      auto cfgs = Candidates(true, false);
      if (!cfgs.empty()) {
        const int b = cfgs[Uniform(0, static_cast<int>(cfgs.size()) - 1)];
        s.kind = Stmt::kCfgUse;
        s.binding = b;
        s.name = bindings_[b].name;
        s.update = Chance(50);
        s.exprs.push_back(GenExpr(0));
        return s;
      }
    }
    s.kind = Stmt::kSink;
    s.sink = static_cast<Sink>(Uniform(0, kSinkShapes - 1));
    switch (s.sink) {
      case Sink::kClipboard:
        break;
      case Sink::kConfigChained:
        s.exprs.push_back(GenExpr(0));
        s.exprs.push_back(GenExpr(0));
        break;
      case Sink::kInputBox: {
        std::vector<std::string> keys = {"prompt", "title", "placeHolder"};
        std::shuffle(keys.begin(), keys.end(), rng_);
        const int n = Uniform(0, 3);
        for (int i = 0; i < n; ++i) {
          s.props.push_back(keys[i]);
          s.exprs.push_back(GenExpr(0));
        }
        break;
      }
      default:
        s.exprs.push_back(GenExpr(0));
        break;
    }
    return s;
  }

  std::mt19937_64 rng_;
  Program* prog_ = nullptr;
  std::vector<Scope> scopes_;
  std::vector<Binding> bindings_;
  std::string excluded_;
  int cfg_counter_ = 0;
};

// ---- rendering ----------------------------------------------------------------

inline std::string Render(const Expr& e) {
  switch (e.kind) {
    case Expr::kLit:
    case Expr::kTemplate:
      return e.raw;
    case Expr::kVar:
      return e.name;
    case Expr::kConcat:
      if (e.kids[1].kind == Expr::kConcat) {
        return Render(e.kids[0]) + " + (" + Render(e.kids[1]) + ")";
      }
      return Render(e.kids[0]) + " + " + Render(e.kids[1]);
    case Expr::kTemplateSub:
      return "`pre${" + Render(e.kids[0]) + "}`";
    case Expr::kOpaque:
      return "op()";
  }
  return {};
}

inline void Render(const std::vector<Stmt>& body, int indent, std::string& out);

inline void Render(const Stmt& s, int indent, std::string& out) {
  const std::string pad(static_cast<size_t>(indent) * 2, ' ');
  out += pad;
  switch (s.kind) {
    case Stmt::kDecl:
      out += s.keyword + " " + s.name + " = " + Render(s.exprs[0]) + ";\n";
      return;
    case Stmt::kAssign:
      out += s.name + " = " + Render(s.exprs[0]) + ";\n";
      return;
    case Stmt::kCompound:
      out += s.name + " += " + Render(s.exprs[0]) + ";\n";
      return;
    case Stmt::kCfgDecl:
      out += "const " + s.name + " = vscode.workspace.getConfiguration(" +
             (s.exprs.empty() ? "" : Render(s.exprs[0])) + ");\n";
      return;
    case Stmt::kCfgUse:
      out += s.name + (s.update ? ".update(" : ".get(") + Render(s.exprs[0]) +
             (s.update ? ", 1);\n" : ");\n");
      return;
    case Stmt::kIf:
      out += "if (cond()) {\n";
      Render(s.body, indent + 1, out);
      out += pad + "}";
      if (s.has_alt) {
        out += " else {\n";
        Render(s.alt, indent + 1, out);
        out += pad + "}";
      }
      out += "\n";
      return;
    case Stmt::kBlock:
      out += "{\n";
      Render(s.body, indent + 1, out);
      out += pad + "}\n";
      return;
    case Stmt::kSink:
      break;
  }
  switch (s.sink) {
    case Sink::kRegister:
      out += "vscode.commands.registerCommand(" + Render(s.exprs[0]) +
             ", () => {});\n";
      break;
    case Sink::kTextEditor:
      out += "vscode.commands.registerTextEditorCommand(" +
             Render(s.exprs[0]) + ", run);\n";
      break;
    case Sink::kExecute:
      out += "vscode.commands.executeCommand(" + Render(s.exprs[0]) + ");\n";
      break;
    case Sink::kStateGet:
      out += "ctx.globalState.get(" + Render(s.exprs[0]) + ", {});\n";
      break;
    case Sink::kStateUpdate:
      out += "ctx.globalState.update(" + Render(s.exprs[0]) + ", 1);\n";
      break;
    case Sink::kConfigChained:
      out += "vscode.workspace.getConfiguration(" + Render(s.exprs[0]) +
             ").update(" + Render(s.exprs[1]) + ", 1);\n";
      break;
    case Sink::kConfigBare:
      out += "vscode.workspace.getConfiguration().get(" + Render(s.exprs[0]) +
             ");\n";
      break;
    case Sink::kInputBox: {
      out += "vscode.window.showInputBox({";
      for (size_t i = 0; i < s.props.size(); ++i) {
        out += (i ? ", " : " ") + s.props[i] + ": " + Render(s.exprs[i]);
      }
      out += " });\n";
      break;
    }
    case Sink::kClipboard:
      out += "vscode.env.clipboard.readText();\n";
      break;
  }
}

inline void Render(const std::vector<Stmt>& body, int indent,
                   std::string& out) {
  for (const Stmt& s : body) Render(s, indent, out);
}

// ---- oracle -------------------------------------------------------------------

struct Value {
  std::string status = "Unresolved";
  std::string value;
  bool ok() const { return status != "Unresolved"; }
};

class Oracle {
 public:
  explicit Oracle(const Program& p)
      : p_(p), reach_(static_cast<size_t>(p.uses)),
        def_value_(static_cast<size_t>(p.defs), nullptr) {
    IndexDefs(p.body);
    // Every combination of branch outcomes is one path.
    const uint32_t paths = 1u << p.conditionals;
    for (uint32_t mask = 0; mask < paths; ++mask) {
      std::vector<int> current(static_cast<size_t>(p.bindings), -1);
      Exec(p.body, mask, current);
    }
  }

  std::vector<std::string> Expected() const {
    std::vector<std::string> out;
    Collect(p_.body, out);
    return out;
  }

 private:
  void IndexDefs(const std::vector<Stmt>& body) {
    for (const Stmt& s : body) {
      if ((s.kind == Stmt::kDecl || s.kind == Stmt::kAssign)) {
        def_value_[static_cast<size_t>(s.def)] = &s.exprs[0];
      }
      if (s.kind == Stmt::kCfgUse) cfg_uses_[s.binding].push_back(&s);
      IndexDefs(s.body);
      IndexDefs(s.alt);
    }
  }

  void Read(const Expr& e, const std::vector<int>& current) {
    if (e.kind == Expr::kVar) {
      reach_[static_cast<size_t>(e.use)].insert(
          current[static_cast<size_t>(e.binding)]);
    }
    for (const Expr& k : e.kids) Read(k, current);
  }

  void Exec(const std::vector<Stmt>& body, uint32_t mask,
            std::vector<int>& current) {
    for (const Stmt& s : body) {
      for (const Expr& e : s.exprs) Read(e, current);
      switch (s.kind) {
        case Stmt::kDecl:
        case Stmt::kAssign:
        case Stmt::kCompound:
        case Stmt::kCfgDecl:
          current[static_cast<size_t>(s.binding)] = s.def;
          break;
        case Stmt::kIf:
          Exec(((mask >> s.cond) & 1u) ? s.body : s.alt, mask, current);
          break;
        case Stmt::kBlock:
          Exec(s.body, mask, current);
          break;
        default:
          break;
      }
    }
  }

  Value Resolve(const Expr& e) const {
    switch (e.kind) {
      case Expr::kLit:
      case Expr::kTemplate:
        return {"Literal", e.cooked};
      case Expr::kConcat: {
        Value l = Resolve(e.kids[0]);
        Value r = Resolve(e.kids[1]);
        if (!l.ok() || !r.ok()) return {};
        return {"Concatenated", l.value + r.value};
      }
      case Expr::kVar: {
        const std::set<int>& defs = reach_[static_cast<size_t>(e.use)];
        if (defs.size() != 1 || *defs.begin() < 0) return {};
        const Expr* value = def_value_[static_cast<size_t>(*defs.begin())];
        if (value == nullptr) return {};
        Value v = Resolve(*value);
        if (!v.ok()) return {};
        return {"PropagatedConst", v.value};
      }
      default:
        return {};
    }
  }

  static Value JoinKey(bool has_section, const Value& section,
                       const Value& key) {
    if (!key.ok() || (has_section && !section.ok())) return {};
    if (!has_section || section.value.empty()) return key;
    return {"Concatenated", section.value + "." + key.value};
  }

  static std::string Line(std::string_view api, const Value& v) {
    return std::string(api) + "=" + v.status + ":" + v.value;
  }

  void Collect(const std::vector<Stmt>& body,
               std::vector<std::string>& out) const {
    for (const Stmt& s : body) {
      switch (s.kind) {
        case Stmt::kCfgDecl: {
          const bool has_section = !s.exprs.empty();
          const Value section = has_section ? Resolve(s.exprs[0]) : Value{};
          auto it = cfg_uses_.find(s.binding);
          if (it == cfg_uses_.end()) {
            out.push_back(Line("GetConfiguration", section));
            break;
          }
          for (const Stmt* u : it->second) {
            out.push_back(Line("GetConfiguration",
                               JoinKey(has_section, section,
                                       Resolve(u->exprs[0]))));
          }
          break;
        }
        case Stmt::kIf:
          Collect(s.body, out);
          Collect(s.alt, out);
          break;
        case Stmt::kBlock:
          Collect(s.body, out);
          break;
        case Stmt::kSink:
          CollectSink(s, out);
          break;
        default:
          break;
      }
    }
  }

  void CollectSink(const Stmt& s, std::vector<std::string>& out) const {
    switch (s.sink) {
      case Sink::kRegister:
        out.push_back(Line("RegisterCommand", Resolve(s.exprs[0])));
        return;
      case Sink::kTextEditor:
        out.push_back(Line("RegisterTextEditorCommand", Resolve(s.exprs[0])));
        return;
      case Sink::kExecute:
        out.push_back(Line("ExecuteCommand", Resolve(s.exprs[0])));
        return;
      case Sink::kStateGet:
        out.push_back(Line("GlobalStateGet", Resolve(s.exprs[0])));
        return;
      case Sink::kStateUpdate:
        out.push_back(Line("GlobalStateUpdate", Resolve(s.exprs[0])));
        return;
      case Sink::kConfigChained:
        out.push_back(Line("GetConfiguration",
                           JoinKey(true, Resolve(s.exprs[0]),
                                   Resolve(s.exprs[1]))));
        return;
      case Sink::kConfigBare:
        out.push_back(
            Line("GetConfiguration", JoinKey(false, {}, Resolve(s.exprs[0]))));
        return;
      case Sink::kInputBox: {
        std::vector<Value> parts;
        for (const char* key : {"prompt", "title", "placeHolder"}) {
          for (size_t i = 0; i < s.props.size(); ++i) {
            if (s.props[i] != key) continue;
            Value v = Resolve(s.exprs[i]);
            if (v.ok()) parts.push_back(v);
          }
        }
        Value joined;
        if (parts.size() == 1) joined = parts[0];
        if (parts.size() > 1) {
          joined.status = "Concatenated";
          for (size_t i = 0; i < parts.size(); ++i) {
            joined.value += (i ? " | " : "") + parts[i].value;
          }
        }
        out.push_back(Line("ShowInputBox", joined));
        return;
      }
      case Sink::kClipboard:
        out.push_back("ClipboardReadText");
        return;
    }
  }

  const Program& p_;
  std::vector<std::set<int>> reach_;
  std::vector<const Expr*> def_value_;
  std::map<int, std::vector<const Stmt*>> cfg_uses_;
};

inline Generated Generate(uint64_t seed) {
  Generator gen(seed);
  Program p = gen.Generate();
  Generated g;
  Render(p.body, 0, g.source);
  g.expected = Oracle(p).Expected();
  g.statements = p.statements;
  g.conditionals = p.conditionals;
  return g;
}

// What the analyzer reports, in the oracle's line format.
inline std::vector<std::string> Observe(const std::string& source) {
  graph::AnalysisOptions options;
  options.depth_budget = 1 << 20;
  options.file_budget = std::chrono::milliseconds(60000);
  graph::FileAnalysis fa = graph::AnalyzeSource(source, "gen.js", options);
  std::vector<std::string> out;
  if (fa.outcome != graph::FileOutcome::kAnalyzed) {
    out.push_back("analysis failed: " + fa.message);
    return out;
  }
  for (const graph::TracedSite& ts : fa.sites) {
    const std::string api(graph::SinkApiName(ts.site.api));
    if (ts.values.empty()) out.push_back(api);
    for (const graph::ResolvedString& v : ts.values) {
      out.push_back(api + "=" + std::string(graph::ResolutionName(v.status)) +
                    ":" + v.value);
    }
  }
  return out;
}

struct SuiteResult {
  int programs = 0;
  int agreed = 0;
  int max_statements = 0;
  int max_conditionals = 0;
  int sites = 0;
  std::map<std::string, int> by_status;
  double seconds = 0;
  std::string first_mismatch;
};

inline SuiteResult RunSuite(int programs, uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  SuiteResult r;
  for (int i = 0; i < programs; ++i) {
    Generated g = Generate(seed + static_cast<uint64_t>(i));
    std::vector<std::string> got = Observe(g.source);
    ++r.programs;
    r.max_statements = std::max(r.max_statements, g.statements);
    r.max_conditionals = std::max(r.max_conditionals, g.conditionals);
    r.sites += static_cast<int>(g.expected.size());
    for (const std::string& line : g.expected) {
      const size_t eq = line.find('=');
      const size_t colon = line.find(':', eq);
      r.by_status[eq == std::string::npos
                      ? "None"
                      : line.substr(eq + 1, colon - eq - 1)]++;
    }
    if (got == g.expected) {
      ++r.agreed;
    } else if (r.first_mismatch.empty()) {
      r.first_mismatch = "seed " + std::to_string(seed + i) + "\n" + g.source;
      for (size_t k = 0; k < std::max(got.size(), g.expected.size()); ++k) {
        const std::string a = k < got.size() ? got[k] : "-";
        const std::string b = k < g.expected.size() ? g.expected[k] : "-";
        if (a != b) r.first_mismatch += "got " + a + " want " + b + "\n";
      }
    }
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            start)
                  .count();
  return r;
}

}  // namespace vsxscan::testing::dataflow

#endif  // VSXSCAN_TESTS_SUPPORT_DATAFLOW_ORACLE_HPP_
