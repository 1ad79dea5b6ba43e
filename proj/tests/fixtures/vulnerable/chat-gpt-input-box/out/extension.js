// Copyright 2026 The vsxscan Authors.
// SPDX-License-Identifier: Apache-2.0
const vscode = require("vscode");
const p = require("./i18n");

async function askForKey() {
  const key = await vscode.window.showInputBox({
    prompt: "Enter your OpenAI API key",
    placeHolder: "sk-...",
    ignoreFocusOut: true,
  });
  const other = await vscode.window.showInputBox({ prompt: `${(0, p.translate)("enterYourAPIkey")}` });
  return key || other;
}

async function watch() {
  const clipboardContent = await vscode.env.clipboard.readText();
  return clipboardContent.length;
}

exports.activate = (context) => {
  context.subscriptions.push(vscode.commands.registerCommand("chatGptMini.setKey", askForKey));
  watch();
};
