// Copyright 2026 The vsxscan Authors.
// SPDX-License-Identifier: Apache-2.0
const vscode = require("vscode");

async function promptAndStore() {
  const host = vscode.workspace.getConfiguration("sftpLite").get("host");
  const value = await vscode.window.showInputBox({ prompt: "Remote host (" + host + ")" });
  if (value !== undefined) {
    await vscode.workspace.getConfiguration().update("sftpLite.password", value, true);
  }
}

exports.activate = (context) => {
  context.subscriptions.push(vscode.commands.registerCommand("sftpLite.connect", promptAndStore));
};
