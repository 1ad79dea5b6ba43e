// Copyright 2026 The vsxscan Authors.
// SPDX-License-Identifier: Apache-2.0
function activate( {
  return vscode.workspace.getConfiguration(
