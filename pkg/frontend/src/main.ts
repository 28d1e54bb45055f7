/** Hash-routed single-page app. All state comes from the API; reloading
 * any screen reconstructs it from scratch. */

import { ApiClient, ApiError, DEFAULT_POLL_INTERVAL_MS } from "./api.js";
import { escapeHtml } from "./html.js";
import { hasNonTerminalJobs, renderJobsView } from "./views/jobs.js";
import { renderReportView } from "./views/report.js";
import { renderRulesView } from "./views/rules.js";
import { renderSubmitView } from "./views/submit.js";

const API_BASE_KEY = "packsift.apiBase";

function apiBase(): string {
  return localStorage.getItem(API_BASE_KEY) ?? "";
}

const api = new ApiClient(apiBase());
const root = document.getElementById("view") as HTMLElement;

let pollTimer: number | undefined;

function stopPolling(): void {
  if (pollTimer !== undefined) {
    clearTimeout(pollTimer);
    pollTimer = undefined;
  }
}

function showError(error: unknown): void {
  const text = error instanceof Error ? error.message : String(error);
  root.innerHTML = `<p class="problem">${escapeHtml(text)}</p>`;
}

// -- submit ------------------------------------------------------------------

function mountSubmit(message?: { kind: "ok" | "error"; text: string }): void {
  root.innerHTML = renderSubmitView(message);
  const form = document.getElementById("submit-form") as HTMLFormElement;
  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    const data = new FormData(form);
    const fields: Record<string, string> = {};
    for (const key of ["ecosystem", "name", "version", "backend", "template", "timeout_s"]) {
      const value = data.get(key);
      if (typeof value === "string" && value) fields[key] = value;
    }
    const bundle = data.get("bundle");
    const payload = data.get("payload");
    let file: { field: "bundle" | "payload"; name: string; data: Blob } | undefined;
    if (bundle instanceof File && bundle.size > 0) {
      file = { field: "bundle", name: bundle.name, data: bundle };
    } else if (payload instanceof File && payload.size > 0) {
      file = { field: "payload", name: payload.name, data: payload };
    }
    try {
      const id = await api.submit(fields, file);
      mountSubmit({ kind: "ok", text: `submitted: ${id} — watch it on the Jobs tab` });
    } catch (error) {
      const text = error instanceof ApiError ? error.message : String(error);
      mountSubmit({ kind: "error", text });
    }
  });
}

// -- jobs --------------------------------------------------------------------

async function mountJobs(page = 1): Promise<void> {
  const result = await api.listJobs(page);
  root.innerHTML = renderJobsView(result);
  for (const link of root.querySelectorAll<HTMLAnchorElement>(".page-link")) {
    link.addEventListener("click", (event) => {
      event.preventDefault();
      stopPolling();
      void mountJobs(Number(link.dataset.page));
    });
  }
  // poll while any visible job is still queued/running; stop on terminal
  if (hasNonTerminalJobs(result)) {
    pollTimer = window.setTimeout(() => void mountJobs(page), DEFAULT_POLL_INTERVAL_MS);
  }
}

// -- report ------------------------------------------------------------------

async function mountReport(jobId: string): Promise<void> {
  const job = await api.getJob(jobId);
  if (job.state === "queued" || job.state === "running") {
    root.innerHTML = `<h2>Report</h2><p class="notice">job is ${escapeHtml(job.state)}… polling</p>`;
    pollTimer = window.setTimeout(() => void mountReport(jobId), DEFAULT_POLL_INTERVAL_MS);
    return;
  }
  if (job.state === "failed") {
    root.innerHTML = `<h2>Report</h2><p class="problem">job failed: ${escapeHtml(job.error ?? "unknown error")}</p>`;
    return;
  }
  const report = await api.getReport(jobId);
  root.innerHTML = renderReportView(report, jobId, api.reportUrl(jobId));
  for (const button of root.querySelectorAll<HTMLButtonElement>(".tab-btn")) {
    button.addEventListener("click", () => {
      const phase = button.dataset.phase;
      const tab = button.dataset.tab;
      const section = root.querySelector(`section.phase[data-phase="${phase}"]`);
      if (!section) return;
      for (const el of section.querySelectorAll(".tab-btn")) {
        el.classList.toggle("active", el === button);
      }
      for (const panel of section.querySelectorAll<HTMLElement>(".tab-panel")) {
        panel.classList.toggle("active", panel.dataset.tab === tab);
      }
    });
  }
}

// -- rules -------------------------------------------------------------------

async function mountRules(state?: Parameters<typeof renderRulesView>[0]): Promise<void> {
  const source = state?.source ?? (await api.getRules());
  root.innerHTML = renderRulesView({ ...state, source });
  const rulesForm = document.getElementById("rules-form") as HTMLFormElement;
  rulesForm.addEventListener("submit", async (event) => {
    event.preventDefault();
    const edited = String(new FormData(rulesForm).get("source") ?? "");
    const result = await api.putRules(edited);
    if (result.ok) {
      void mountRules({ source: edited, savedOk: true });
    } else {
      // the previous ruleset stays active server-side; keep the edit visible
      void mountRules({ source: edited, diagnostic: result.diagnostic });
    }
  });
  const rescanForm = document.getElementById("rescan-form") as HTMLFormElement;
  rescanForm.addEventListener("submit", async (event) => {
    event.preventDefault();
    const jobId = String(new FormData(rescanForm).get("job_id") ?? "").trim();
    if (!jobId) return;
    try {
      const newId = await api.rescan(jobId);
      void mountRules({ source, rescanId: newId });
    } catch (error) {
      showError(error);
    }
  });
}

// -- router --------------------------------------------------------------------

function navigate(): void {
  stopPolling();
  const hash = location.hash || "#/submit";
  const reportMatch = hash.match(/^#\/jobs\/(.+)$/);
  try {
    if (reportMatch) {
      void mountReport(decodeURIComponent(reportMatch[1])).catch(showError);
    } else if (hash.startsWith("#/jobs")) {
      void mountJobs().catch(showError);
    } else if (hash.startsWith("#/rules")) {
      void mountRules().catch(showError);
    } else {
      mountSubmit();
    }
  } catch (error) {
    showError(error);
  }
  for (const link of document.querySelectorAll<HTMLAnchorElement>("nav a")) {
    link.classList.toggle("active", link.getAttribute("href") === hash.replace(/\/jobs\/.*/, "/jobs"));
  }
}

window.addEventListener("hashchange", navigate);
navigate();
