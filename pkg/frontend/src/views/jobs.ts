/** Jobs view: paginated listing with state badges; polling handled by main. */

import { escapeHtml, stateBadge } from "../html.js";
import type { JobPage } from "../types.js";

export function renderJobsView(page: JobPage): string {
  const rows = page.jobs
    .map((job) => {
      const label = job.spec.name ?? job.spec.local_path ?? "(unnamed)";
      const reportLink =
        job.state === "succeeded"
          ? `<a href="#/jobs/${encodeURIComponent(job.id)}">report</a>`
          : job.error
            ? `<span class="muted" title="${escapeHtml(job.error)}">error</span>`
            : "";
      return `<tr>
        <td><code>${escapeHtml(job.id)}</code></td>
        <td>${escapeHtml(label)} <span class="muted">${escapeHtml(job.spec.ecosystem)}</span></td>
        <td>${stateBadge(job.state)}</td>
        <td>${escapeHtml(job.submitted_at)}</td>
        <td>${reportLink}</td>
      </tr>`;
    })
    .join("");
  const pager =
    page.pages > 1
      ? Array.from({ length: page.pages }, (_, i) => i + 1)
          .map((n) =>
            n === page.page
              ? `<strong>${n}</strong>`
              : `<a href="#" class="page-link" data-page="${n}">${n}</a>`,
          )
          .join(" ")
      : "";
  return `
    <h2>Jobs <span class="muted">${page.total} total</span></h2>
    <table>
      <thead><tr><th>id</th><th>package</th><th>state</th><th>submitted</th><th></th></tr></thead>
      <tbody>${rows || '<tr><td colspan="5" class="empty">no jobs yet</td></tr>'}</tbody>
    </table>
    <p class="pager">${pager}</p>
  `;
}

export function hasNonTerminalJobs(page: JobPage): boolean {
  return page.jobs.some((j) => j.state === "queued" || j.state === "running");
}
