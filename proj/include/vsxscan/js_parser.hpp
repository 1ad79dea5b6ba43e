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

#ifndef VSXSCAN_JS_PARSER_HPP_
#define VSXSCAN_JS_PARSER_HPP_

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "vsxscan/js_ast.hpp"

namespace vsxscan::js {

using Clock = std::chrono::steady_clock;

struct ParseOptions {
  // Nesting beyond this depth is rejected as a ParseError rather than risking
  // the native stack.
  size_t max_depth = 1500;
  size_t max_nodes = size_t{8} * 1000 * 1000;
  std::optional<Clock::time_point> deadline;
};

// Parses script source (ES2022, script or module goal, automatic semicolon
// insertion). Throws Error(kParseError) for rejected syntax and
// Error(kBudgetExceeded) when the node or time budget runs out.
SyntaxTree ParseSource(std::string_view text, std::string path,
                       const ParseOptions& options = {});

}  // namespace vsxscan::js

#endif  // VSXSCAN_JS_PARSER_HPP_
