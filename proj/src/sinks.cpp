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

#include "vsxscan/sinks.hpp"

#include <algorithm>
#include <array>
#include <map>

#include "vsxscan/error.hpp"
#include "vsxscan/text.hpp"

namespace vsxscan::graph {

using js::NodeKind;

namespace {

constexpr std::array<std::string_view, 8> kApiNames = {
    "RegisterCommand",   "RegisterTextEditorCommand", "GetConfiguration",
    "ShowInputBox",      "GlobalStateUpdate",         "GlobalStateGet",
    "ExecuteCommand",    "ClipboardReadText"};

constexpr std::array<std::string_view, 4> kResolutionNames = {
    "Literal", "Concatenated", "PropagatedConst", "Unresolved"};

// Option properties of an input box that carry user-facing text.
constexpr std::array<std::string_view, 3> kInputBoxTextKeys = {
    "prompt", "title", "placeHolder"};

bool IsConfigAccessor(std::string_view name) {
  return name == "get" || name == "update" || name == "inspect" ||
         name == "has";
}

// Property names along a callee's member chain, outermost last. Computed
// non-literal members become an empty name that matches nothing.
std::vector<std::string_view> MemberPath(const js::SyntaxTree& t,
                                         js::NodeId callee) {
  std::vector<std::string_view> path;
  js::NodeId c = callee;
  if (t.kind(c) == NodeKind::kSequence) {
    auto kids = t.children(c);
    c = kids.back();
  }
  while (t.kind(c) == NodeKind::kMember) {
    const js::NodeId prop = t.child(c, 1);
    if (!t.node(c).has(js::flags::kComputed) ||
        t.kind(prop) == NodeKind::kStringLiteral) {
      path.push_back(t.text(prop));
    } else {
      path.push_back({});
    }
    c = t.child(c, 0);
  }
  if (t.kind(c) == NodeKind::kIdentifier) path.push_back(t.text(c));
  std::reverse(path.begin(), path.end());
  return path;
}

void AppendSpans(std::vector<js::Span>& out, const std::vector<js::Span>& in) {
  out.insert(out.end(), in.begin(), in.end());
}

ResolvedString Resolve(const ProgramDependencyGraph& pdg, js::NodeId n,
                       int depth) {
  const js::SyntaxTree& t = pdg.tree();
  if (n == js::kNoNode) return ResolvedString::Unresolved();
  switch (t.kind(n)) {
    case NodeKind::kStringLiteral:
      return {Resolution::kLiteral, std::string(t.text(n)), {t.node(n).span}};
    case NodeKind::kTemplateLiteral:
      if (t.children(n).size() == 1) {
        return {Resolution::kLiteral, std::string(t.text(t.child(n, 0))),
                {t.node(n).span}};
      }
      return ResolvedString::Unresolved();
    case NodeKind::kBinary: {
      if (t.text(n) != "+") return ResolvedString::Unresolved();
      ResolvedString l = Resolve(pdg, t.child(n, 0), depth);
      if (!l.resolved()) return ResolvedString::Unresolved();
      ResolvedString r = Resolve(pdg, t.child(n, 1), depth);
      if (!r.resolved()) return ResolvedString::Unresolved();
      ResolvedString out{Resolution::kConcatenated, l.value + r.value, {}};
      AppendSpans(out.origin_spans, l.origin_spans);
      AppendSpans(out.origin_spans, r.origin_spans);
      return out;
    }
    case NodeKind::kIdentifier: {
      if (depth <= 0 || pdg.IsAmbiguousUse(n)) {
        return ResolvedString::Unresolved();
      }
      auto defs = pdg.Definitions(n);
      if (defs.size() != 1) return ResolvedString::Unresolved();
      const js::NodeId value = pdg.DefinitionValue(defs[0]);
      if (value == js::kNoNode) return ResolvedString::Unresolved();
      ResolvedString inner = Resolve(pdg, value, depth - 1);
      if (!inner.resolved()) return ResolvedString::Unresolved();
      inner.status = Resolution::kPropagatedConst;
      return inner;
    }
    default:
      return ResolvedString::Unresolved();
  }
}

js::NodeId Argument(const js::SyntaxTree& t, js::NodeId call, size_t index) {
  const js::NodeId arg = t.child(call, index + 1);
  if (arg == js::kNoNode || t.kind(arg) == NodeKind::kSpread) {
    return js::kNoNode;
  }
  return arg;
}

// The object literal an options argument denotes, directly or through one
// constant binding.
js::NodeId ObjectLiteralOf(const ProgramDependencyGraph& pdg, js::NodeId n,
                           int depth) {
  const js::SyntaxTree& t = pdg.tree();
  while (n != js::kNoNode && depth-- > 0) {
    if (t.kind(n) == NodeKind::kObject) return n;
    if (t.kind(n) != NodeKind::kIdentifier || pdg.IsAmbiguousUse(n)) break;
    auto defs = pdg.Definitions(n);
    if (defs.size() != 1) break;
    n = pdg.DefinitionValue(defs[0]);
  }
  return js::kNoNode;
}

js::NodeId PropertyValue(const js::SyntaxTree& t, js::NodeId object,
                         std::string_view key) {
  js::NodeId found = js::kNoNode;
  for (js::NodeId prop : t.children(object)) {
    if (t.kind(prop) != NodeKind::kProperty ||
        t.node(prop).has(js::flags::kComputed) || t.text(prop) != "init") {
      continue;
    }
    const js::NodeId k = t.child(prop, 0);
    const NodeKind kk = t.kind(k);
    if ((kk == NodeKind::kIdentifier || kk == NodeKind::kStringLiteral) &&
        t.text(k) == key) {
      found = t.child(prop, 1);  // later duplicates win, as at runtime
    }
  }
  return found;
}

ResolvedString JoinResolved(const std::vector<ResolvedString>& parts,
                            std::string_view sep) {
  if (parts.empty()) return ResolvedString::Unresolved();
  if (parts.size() == 1) return parts[0];
  ResolvedString out{Resolution::kConcatenated, {}, {}};
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out.value += sep;
    out.value += parts[i].value;
    AppendSpans(out.origin_spans, parts[i].origin_spans);
  }
  return out;
}

ResolvedString TraceInputBox(const ProgramDependencyGraph& pdg,
                             js::NodeId call, int depth) {
  const js::SyntaxTree& t = pdg.tree();
  const js::NodeId object =
      ObjectLiteralOf(pdg, Argument(t, call, 0), depth + 1);
  if (object == js::kNoNode) return ResolvedString::Unresolved();
  std::vector<ResolvedString> parts;
  for (std::string_view key : kInputBoxTextKeys) {
    const js::NodeId v = PropertyValue(t, object, key);
    if (v == js::kNoNode) continue;
    ResolvedString r = Resolve(pdg, v, depth);
    if (r.resolved()) parts.push_back(std::move(r));
  }
  return JoinResolved(parts, " | ");
}

// `<handle>.get(...)` style calls made on a configuration handle `h`.
void AccessorCallsOn(const js::SyntaxTree& t, js::NodeId handle,
                     std::vector<js::NodeId>& out) {
  const js::NodeId member = t.parent(handle);
  if (member == js::kNoNode || t.kind(member) != NodeKind::kMember ||
      t.child(member, 0) != handle || t.node(member).has(js::flags::kComputed) ||
      !IsConfigAccessor(t.text(t.child(member, 1)))) {
    return;
  }
  const js::NodeId call = t.parent(member);
  if (call != js::kNoNode && t.kind(call) == NodeKind::kCall &&
      t.child(call, 0) == member) {
    out.push_back(call);
  }
}

std::vector<ResolvedString> TraceConfiguration(
    const ProgramDependencyGraph& pdg, js::NodeId call, int depth) {
  const js::SyntaxTree& t = pdg.tree();
  const js::NodeId section_arg = Argument(t, call, 0);
  const bool has_section = t.child(call, 1) != js::kNoNode;
  ResolvedString section = has_section ? Resolve(pdg, section_arg, depth)
                                       : ResolvedString::Unresolved();

  std::vector<js::NodeId> accessors;
  AccessorCallsOn(t, call, accessors);
  const js::NodeId parent = t.parent(call);
  if (parent != js::kNoNode) {
    const bool bound =
        (t.kind(parent) == NodeKind::kDeclarator &&
         t.child(parent, 1) == call &&
         t.kind(t.child(parent, 0)) == NodeKind::kIdentifier) ||
        (t.kind(parent) == NodeKind::kAssign && t.text(parent) == "=" &&
         t.child(parent, 1) == call &&
         t.kind(t.child(parent, 0)) == NodeKind::kIdentifier);
    if (bound) {
      for (js::NodeId use : pdg.Uses(parent)) AccessorCallsOn(t, use, accessors);
    }
  }
  std::sort(accessors.begin(), accessors.end(), [&](js::NodeId a, js::NodeId b) {
    return t.node(a).span.begin < t.node(b).span.begin;
  });

  std::vector<ResolvedString> out;
  if (accessors.empty()) {
    out.push_back(std::move(section));
    return out;
  }
  for (js::NodeId acc : accessors) {
    ResolvedString key = Resolve(pdg, Argument(t, acc, 0), depth);
    if (!key.resolved() || (has_section && !section.resolved())) {
      out.push_back(ResolvedString::Unresolved());
      continue;
    }
    if (!has_section || section.value.empty()) {
      out.push_back(std::move(key));
      continue;
    }
    ResolvedString joined{Resolution::kConcatenated,
                          section.value + "." + key.value, {}};
    AppendSpans(joined.origin_spans, section.origin_spans);
    AppendSpans(joined.origin_spans, key.origin_spans);
    out.push_back(std::move(joined));
  }
  return out;
}

// ---- text-scan fallback --------------------------------------------------------

bool IsIdentChar(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '_' || c == '$' ||
         static_cast<unsigned char>(c) >= 0x80;
}

size_t SkipSpace(std::string_view s, size_t i) {
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\n' ||
                          s[i] == '\r')) {
    ++i;
  }
  return i;
}

int HexDigit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

// A quoted literal starting at `i`; sets `end` past the closing quote.
std::optional<std::string> ReadQuoted(std::string_view s, size_t i,
                                      size_t& end) {
  if (i >= s.size()) return std::nullopt;
  const char q = s[i];
  if (q != '\'' && q != '"' && q != '`') return std::nullopt;
  std::string out;
  for (size_t j = i + 1; j < s.size(); ++j) {
    const char c = s[j];
    if (c == q) {
      end = j + 1;
      return out;
    }
    if (c == '\n' && q != '`') return std::nullopt;
    if (q == '`' && c == '$' && j + 1 < s.size() && s[j + 1] == '{') {
      return std::nullopt;
    }
    if (c != '\\') {
      out += c;
      continue;
    }
    if (++j >= s.size()) return std::nullopt;
    const char e = s[j];
    switch (e) {
      case 'n': out += '\n'; break;
      case 't': out += '\t'; break;
      case 'r': out += '\r'; break;
      case 'x':
      case 'u': {
        const size_t width = e == 'x' ? 2 : 4;
        if (j + width >= s.size()) return std::nullopt;
        uint32_t cp = 0;
        for (size_t k = 1; k <= width; ++k) {
          const int d = HexDigit(s[j + k]);
          if (d < 0) return std::nullopt;
          cp = cp * 16 + static_cast<uint32_t>(d);
        }
        text::AppendUtf8(out, static_cast<char32_t>(cp));
        j += width;
        break;
      }
      default:
        out += e;
        break;
    }
  }
  return std::nullopt;
}

// Single literal argument at `i` (just after '('): value and position past
// the closing ')'.
std::optional<std::string> SingleLiteralArgument(std::string_view s, size_t i,
                                                 size_t& after) {
  size_t end = 0;
  auto lit = ReadQuoted(s, SkipSpace(s, i), end);
  if (!lit) return std::nullopt;
  end = SkipSpace(s, end);
  if (end >= s.size() || (s[end] != ')' && s[end] != ',')) return std::nullopt;
  after = end;
  return lit;
}

js::Position PositionAt(std::string_view s, size_t offset) {
  js::Position p;
  for (size_t i = 0; i < offset && i < s.size(); ++i) {
    if (s[i] == '\n') {
      ++p.line;
      p.column = 1;
    } else {
      ++p.column;
    }
  }
  return p;
}

}  // namespace

std::string_view SinkApiName(SinkApi api) {
  return kApiNames[static_cast<size_t>(api)];
}

std::optional<SinkApi> SinkApiFromName(std::string_view name) {
  for (size_t i = 0; i < kApiNames.size(); ++i) {
    if (kApiNames[i] == name) return static_cast<SinkApi>(i);
  }
  return std::nullopt;
}

std::string_view ResolutionName(Resolution r) {
  return kResolutionNames[static_cast<size_t>(r)];
}

std::optional<Resolution> ResolutionFromName(std::string_view name) {
  for (size_t i = 0; i < kResolutionNames.size(); ++i) {
    if (kResolutionNames[i] == name) return static_cast<Resolution>(i);
  }
  return std::nullopt;
}

const SinkCatalog& SinkCatalog::Default() {
  static const SinkCatalog* catalog = [] {
    auto* c = new SinkCatalog();
    c->Add("registerCommand", SinkApi::kRegisterCommand);
    c->Add("registerTextEditorCommand", SinkApi::kRegisterTextEditorCommand);
    c->Add("getConfiguration", SinkApi::kGetConfiguration);
    c->Add("showInputBox", SinkApi::kShowInputBox);
    c->Add("globalState.update", SinkApi::kGlobalStateUpdate);
    c->Add("globalState.get", SinkApi::kGlobalStateGet);
    c->Add("executeCommand", SinkApi::kExecuteCommand);
    c->Add("clipboard.readText", SinkApi::kClipboardReadText);
    return c;
  }();
  return *catalog;
}

void SinkCatalog::Add(std::string_view dotted_suffix, SinkApi api) {
  Pattern p{text::Split(dotted_suffix, '.'), api};
  if (p.suffix.empty()) {
    throw Error(ErrorCode::kUsage, "empty sink pattern");
  }
  patterns_.push_back(std::move(p));
}

std::optional<SinkApi> SinkCatalog::Match(
    const std::vector<std::string_view>& path) const {
  std::optional<SinkApi> best;
  size_t best_len = 0;
  for (const Pattern& p : patterns_) {
    const size_t n = p.suffix.size();
    if (n > path.size() || n <= best_len) continue;
    if (std::equal(p.suffix.begin(), p.suffix.end(), path.end() - n)) {
      best = p.api;
      best_len = n;
    }
  }
  return best;
}

std::vector<ApiCallSite> FindApiCallSites(const ProgramDependencyGraph& pdg,
                                          const SinkCatalog& catalog) {
  const js::SyntaxTree& t = pdg.tree();
  std::vector<ApiCallSite> sites;
  for (js::NodeId n = 0; n < t.size(); ++n) {
    if (t.kind(n) != NodeKind::kCall) continue;
    auto api = catalog.Match(MemberPath(t, t.child(n, 0)));
    if (!api) continue;
    const js::Span span = t.node(n).span;
    sites.push_back({*api, n, span, t.position(span.begin), t.file()});
  }
  std::sort(sites.begin(), sites.end(),
            [](const ApiCallSite& a, const ApiCallSite& b) {
              return std::tie(a.span.begin, a.span.end, a.node_id) <
                     std::tie(b.span.begin, b.span.end, b.node_id);
            });
  return sites;
}

ResolvedString ResolveString(const ProgramDependencyGraph& pdg,
                             js::NodeId node, int depth_budget) {
  return Resolve(pdg, node, depth_budget);
}

std::vector<ResolvedString> TraceArguments(const ProgramDependencyGraph& pdg,
                                           const ApiCallSite& site,
                                           int depth_budget) {
  const js::SyntaxTree& t = pdg.tree();
  switch (site.api) {
    case SinkApi::kClipboardReadText:
      return {};
    case SinkApi::kShowInputBox:
      return {TraceInputBox(pdg, site.node_id, depth_budget)};
    case SinkApi::kGetConfiguration:
      return TraceConfiguration(pdg, site.node_id, depth_budget);
    default:
      return {Resolve(pdg, Argument(t, site.node_id, 0), depth_budget)};
  }
}

std::vector<TracedSite> ScanSinksByText(std::string_view source,
                                        const std::string& file,
                                        const SinkCatalog& catalog) {
  // Keyed by the offset of '(' so overlapping patterns yield one site.
  std::map<size_t, std::pair<size_t, TracedSite>> found;
  for (const SinkCatalog::Pattern& p : catalog.patterns()) {
    const std::string needle = text::Join(p.suffix, ".");
    for (size_t pos = source.find(needle); pos != std::string_view::npos;
         pos = source.find(needle, pos + 1)) {
      if (pos > 0 && IsIdentChar(source[pos - 1])) continue;
      const size_t paren = SkipSpace(source, pos + needle.size());
      if (paren >= source.size() || source[paren] != '(') continue;
      auto existing = found.find(paren);
      if (existing != found.end() && existing->second.first >= needle.size()) {
        continue;
      }
      TracedSite ts;
      ts.site.api = p.api;
      ts.site.span = {static_cast<uint32_t>(pos),
                      static_cast<uint32_t>(paren + 1)};
      ts.site.position = PositionAt(source, pos);
      ts.site.file = file;
      if (p.api != SinkApi::kClipboardReadText) {
        size_t after = 0;
        auto lit = SingleLiteralArgument(source, paren + 1, after);
        const js::Span lit_span{static_cast<uint32_t>(paren + 1),
                                static_cast<uint32_t>(after)};
        ResolvedString value = ResolvedString::Unresolved();
        if (lit) value = {Resolution::kLiteral, *lit, {lit_span}};
        if (p.api == SinkApi::kGetConfiguration) {
          // getConfiguration('S').get('k') or getConfiguration().get('S.k')
          size_t close = lit ? after : SkipSpace(source, paren + 1);
          if (close < source.size() && source[close] == ')') {
            size_t dot = SkipSpace(source, close + 1);
            if (dot < source.size() && source[dot] == '.') {
              const size_t name = SkipSpace(source, dot + 1);
              for (std::string_view acc : {"get", "update"}) {
                if (source.substr(name, acc.size()) != acc) continue;
                const size_t open = SkipSpace(source, name + acc.size());
                if (open >= source.size() || source[open] != '(') continue;
                size_t key_after = 0;
                auto key = SingleLiteralArgument(source, open + 1, key_after);
                if (key) {
                  std::string joined = lit && !lit->empty()
                                           ? *lit + "." + *key
                                           : *key;
                  value = {lit ? Resolution::kConcatenated
                               : Resolution::kLiteral,
                           std::move(joined),
                           {{static_cast<uint32_t>(open + 1),
                             static_cast<uint32_t>(key_after)}}};
                }
              }
            }
          }
        }
        ts.values.push_back(std::move(value));
      }
      found[paren] = {needle.size(), std::move(ts)};
    }
  }
  std::vector<TracedSite> out;
  out.reserve(found.size());
  for (auto& [offset, entry] : found) out.push_back(std::move(entry.second));
  return out;
}

FileAnalysis AnalyzeSource(std::string_view source, const std::string& file,
                           const AnalysisOptions& options) {
  const SinkCatalog& catalog =
      options.catalog != nullptr ? *options.catalog : SinkCatalog::Default();
  js::Clock::time_point deadline = js::Clock::now() + options.file_budget;
  if (options.deadline && *options.deadline < deadline) {
    deadline = *options.deadline;
  }
  FileAnalysis result;
  result.file = file;
  try {
    js::ParseOptions po;
    po.deadline = deadline;
    PdgOptions go;
    go.deadline = deadline;
    ProgramDependencyGraph pdg = BuildPdg(js::ParseSource(source, file, po), go);
    for (ApiCallSite& site : FindApiCallSites(pdg, catalog)) {
      TracedSite ts;
      ts.values = TraceArguments(pdg, site, options.depth_budget);
      ts.site = std::move(site);
      result.sites.push_back(std::move(ts));
    }
    return result;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParseError) {
      result.outcome = FileOutcome::kParseError;
    } else if (e.code() == ErrorCode::kBudgetExceeded) {
      result.outcome = FileOutcome::kBudgetExceeded;
    } else {
      throw;
    }
    result.message = e.what();
  }
  result.sites = ScanSinksByText(source, file, catalog);
  return result;
}

}  // namespace vsxscan::graph
