/** Typed client for the /api/v1 endpoints. All detection logic lives
 * server-side; this module only moves payloads. */

import type { Job, JobPage, ReportDoc, RuleDiagnostic } from "./types.js";

export const DEFAULT_POLL_INTERVAL_MS = 2000;

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export interface SubmitFields {
  ecosystem?: string;
  name?: string;
  version?: string;
  backend?: string;
  template?: string;
  timeout_s?: string;
}

export type PutRulesResult = { ok: true } | { ok: false; diagnostic: RuleDiagnostic };

export class ApiError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
  }
}

export class ApiClient {
  private fetchImpl: FetchLike;

  constructor(readonly baseUrl: string = "", fetchImpl?: FetchLike) {
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await this.fetchImpl(`${this.baseUrl}/api/v1${path}`, init);
    if (!response.ok && response.status !== 400) {
      const body = await response.text();
      throw new ApiError(`${init?.method ?? "GET"} ${path}: ${response.status} ${body}`, response.status);
    }
    return response;
  }

  async health(): Promise<boolean> {
    try {
      const response = await this.request("/healthz");
      return response.status === 200;
    } catch {
      return false;
    }
  }

  async submit(fields: SubmitFields, file?: { field: "bundle" | "payload"; name: string; data: Blob }): Promise<string> {
    const form = new FormData();
    for (const [key, value] of Object.entries(fields)) {
      if (value) form.append(key, value);
    }
    if (file) form.append(file.field, file.data, file.name);
    const response = await this.request("/jobs", { method: "POST", body: form });
    const body = await response.json();
    if (response.status === 400) {
      const errors = body?.detail?.errors ?? ["submission rejected"];
      throw new ApiError(errors.join("; "), 400);
    }
    return body.id as string;
  }

  async rescan(jobId: string): Promise<string> {
    const form = new FormData();
    form.append("rescan_of", jobId);
    const response = await this.request("/jobs", { method: "POST", body: form });
    const body = await response.json();
    return body.id as string;
  }

  async listJobs(page = 1, pageSize = 20, state?: string): Promise<JobPage> {
    const params = new URLSearchParams({ page: String(page), page_size: String(pageSize) });
    if (state) params.set("state", state);
    const response = await this.request(`/jobs?${params}`);
    return (await response.json()) as JobPage;
  }

  async getJob(id: string): Promise<Job> {
    const response = await this.request(`/jobs/${encodeURIComponent(id)}`);
    return (await response.json()) as Job;
  }

  async getReport(id: string): Promise<ReportDoc> {
    const response = await this.request(`/jobs/${encodeURIComponent(id)}/report`);
    return (await response.json()) as ReportDoc;
  }

  reportUrl(id: string): string {
    return `${this.baseUrl}/api/v1/jobs/${encodeURIComponent(id)}/report`;
  }

  async getRules(): Promise<string> {
    const response = await this.request("/rules");
    return await response.text();
  }

  async putRules(source: string): Promise<PutRulesResult> {
    const response = await this.request("/rules", {
      method: "PUT",
      body: source,
      headers: { "Content-Type": "text/plain; charset=utf-8" },
    });
    if (response.status === 204) return { ok: true };
    const diagnostic = (await response.json()) as RuleDiagnostic;
    return { ok: false, diagnostic };
  }

  /**
   * Poll a job until it is terminal. One request in flight at a time;
   * resolves with the final job and issues no further requests after that.
   */
  async pollJob(
    id: string,
    options: { intervalMs?: number; onUpdate?: (job: Job) => void; deadlineMs?: number } = {},
  ): Promise<Job> {
    const interval = options.intervalMs ?? DEFAULT_POLL_INTERVAL_MS;
    const deadline = Date.now() + (options.deadlineMs ?? 10 * 60 * 1000);
    for (;;) {
      const job = await this.getJob(id);
      options.onUpdate?.(job);
      if (job.state === "succeeded" || job.state === "failed") return job;
      if (Date.now() > deadline) throw new ApiError(`job ${id} still ${job.state} at deadline`, 408);
      await new Promise((resolve) => setTimeout(resolve, interval));
    }
  }
}
