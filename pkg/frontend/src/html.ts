/** Small HTML-string helpers; renderers stay pure and DOM-free. */

export function escapeHtml(value: unknown): string {
  return String(value)
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}

export function severityBadge(severity: string): string {
  return `<span class="badge sev-${escapeHtml(severity)}">${escapeHtml(severity)}</span>`;
}

export function stateBadge(state: string): string {
  return `<span class="badge state-${escapeHtml(state)}">${escapeHtml(state)}</span>`;
}
