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

#ifndef VSXSCAN_MANIFEST_TREE_HPP_
#define VSXSCAN_MANIFEST_TREE_HPP_

#include "json.hpp"

namespace vsxscan::ingest {

// Key order of the manifest is kept; configuration properties are reported in
// declaration order.
struct ManifestTree {
  nlohmann::ordered_json doc;
  // package.nls.json, or an empty object.
  nlohmann::ordered_json nls;
};

}  // namespace vsxscan::ingest

#endif  // VSXSCAN_MANIFEST_TREE_HPP_
