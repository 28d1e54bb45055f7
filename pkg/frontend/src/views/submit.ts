/** Submit view: spec fields plus an optional bundle/payload upload. */

import { escapeHtml } from "../html.js";

export function renderSubmitView(message?: { kind: "ok" | "error"; text: string }): string {
  const note = message
    ? `<p class="${message.kind === "ok" ? "notice" : "problem"}">${escapeHtml(message.text)}</p>`
    : "";
  return `
    <h2>Submit a sample</h2>
    ${note}
    <form id="submit-form">
      <label>Ecosystem
        <select name="ecosystem">
          <option value="npm">npm</option>
          <option value="pypi">pypi</option>
          <option value="rubygems">rubygems</option>
          <option value="apk">apk</option>
          <option value="maven">maven</option>
          <option value="archive">archive</option>
          <option value="script">script</option>
        </select>
      </label>
      <label>Name <input name="name" placeholder="package name"></label>
      <label>Version <input name="version" placeholder="optional"></label>
      <label>Backend
        <select name="backend">
          <option value="">auto (replay when a bundle is attached)</option>
          <option value="replay">replay</option>
          <option value="subprocess">subprocess (host strace)</option>
          <option value="template">template</option>
        </select>
      </label>
      <label>Template <input name="template" placeholder="e.g. podman run --rm {CMD}"></label>
      <label>Timeout (s) <input name="timeout_s" placeholder="10"></label>
      <label>Replay bundle <input type="file" name="bundle"></label>
      <label>Sample payload <input type="file" name="payload"></label>
      <button type="submit">Submit</button>
    </form>
  `;
}
