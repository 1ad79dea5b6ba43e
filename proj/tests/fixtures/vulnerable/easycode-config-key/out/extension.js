// Copyright 2026 The vsxscan Authors.
// SPDX-License-Identifier: Apache-2.0
const vscode = require("vscode");

function activate(context) {
  context.subscriptions.push(
    vscode.commands.registerCommand("easycode.ask", async () => {
      const apikey = vscode.workspace.getConfiguration().get("easycode.openAI ApiKey");
      if (!apikey) {
        vscode.window.showWarningMessage("Set your key first.");
        return;
      }
      await ask(apikey);
    }));
}

async function ask(key) {
  return fetch("https://api.openai.com/v1/chat/completions", {
    headers: { Authorization: "Bearer " + key },
  });
}

module.exports = { activate };
