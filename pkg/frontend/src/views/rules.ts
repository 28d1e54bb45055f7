/** Rules view: edit the active ruleset, see parse diagnostics, rescan. */

import { escapeHtml } from "../html.js";
import type { RuleDiagnostic } from "../types.js";

export interface RulesViewState {
  source: string;
  diagnostic?: RuleDiagnostic | null;
  savedOk?: boolean;
  rescanId?: string | null;
}

export function renderRulesView(state: RulesViewState): string {
  const diagnostic = state.diagnostic
    ? `<p class="problem" data-line="${state.diagnostic.line}" data-col="${state.diagnostic.col}">` +
      `line ${state.diagnostic.line}, column ${state.diagnostic.col}: ${escapeHtml(state.diagnostic.error)}</p>`
    : "";
  const saved = state.savedOk ? `<p class="notice">ruleset saved and active</p>` : "";
  const rescan = state.rescanId
    ? `<p class="notice">rescan submitted: <a href="#/jobs">${escapeHtml(state.rescanId)}</a></p>`
    : "";
  return `
    <h2>Detection rules</h2>
    ${diagnostic}${saved}${rescan}
    <form id="rules-form">
      <textarea name="source" rows="24" spellcheck="false">${escapeHtml(state.source)}</textarea>
      <button type="submit">Save ruleset</button>
    </form>
    <form id="rescan-form">
      <label>Rescan a job with the active rules:
        <input name="job_id" placeholder="job id">
      </label>
      <button type="submit">Rescan</button>
    </form>
  `;
}
