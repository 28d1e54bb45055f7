/**
 * End-to-end: a real service instance seeded with the solana-style bundle.
 * Covers the submit -> poll -> report flow, alert highlighting over live
 * data, and the rules round-trip with a broken edit.
 */

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { renderReportView } from "../src/views/report.js";
import { renderRulesView } from "../src/views/rules.js";

const REPO_ROOT = resolve(__dirname, "..", "..");
const PORT = 18400 + Math.floor(Math.random() * 1000);
const BASE = `http://127.0.0.1:${PORT}`;

let service: ChildProcess;
let api: ApiClient;
let bundleBytes: Buffer;

beforeAll(async () => {
  const work = mkdtempSync(join(tmpdir(), "packsift-e2e-"));
  const archive = join(work, "solana-style.tar.gz");
  const pack = spawnSync(
    "python3",
    ["-c", `from packsift.runner import pack_bundle; pack_bundle("fixtures/solana-style", ${JSON.stringify(archive)})`],
    { cwd: REPO_ROOT, stdio: "pipe" },
  );
  if (pack.status !== 0) {
    throw new Error(`bundle packing failed: ${pack.stderr}`);
  }
  bundleBytes = readFileSync(archive);

  service = spawn(
    "python3",
    [
      "-m",
      "packsift.cli",
      "serve",
      "--listen",
      `127.0.0.1:${PORT}`,
      "--store",
      join(work, "store"),
      "--workers",
      "2",
    ],
    { cwd: REPO_ROOT, stdio: "ignore" },
  );

  api = new ApiClient(BASE);
  const deadline = Date.now() + 30_000;
  while (Date.now() < deadline) {
    if (await api.health()) return;
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  throw new Error("service never became healthy");
}, 40_000);

afterAll(() => {
  service?.kill();
});

describe("dashboard against a live service", () => {
  it("submit -> poll -> report renders the case study with highlighted alerts", async () => {
    const id = await api.submit(
      { ecosystem: "npm", backend: "replay" },
      { field: "bundle", name: "solana-style.tar.gz", data: new Blob([bundleBytes]) },
    );
    expect(id).toBeTruthy();

    const states: string[] = [];
    const job = await api.pollJob(id, {
      intervalMs: 100,
      onUpdate: (j) => states.push(j.state),
      deadlineMs: 30_000,
    });
    expect(job.state).toBe("succeeded");
    expect(states[states.length - 1]).toBe("succeeded");

    const report = await api.getReport(id);
    expect(report.schema_version).toBe("1.0");
    expect(report.alerts.length).toBeGreaterThanOrEqual(3);

    const html = renderReportView(report, id, api.reportUrl(id));
    const highlighted = html.match(/class="alert-hit"/g) ?? [];
    expect(highlighted.length).toBeGreaterThanOrEqual(3);
    expect(html).toContain("sensitive_passwd_file");
    expect(html).toContain("ssh_private_key_access");
  }, 60_000);

  it("rules view round-trips the active ruleset and surfaces diagnostics", async () => {
    const original = await api.getRules();
    expect(original).toContain("rule");

    // a clean save round-trips byte-for-byte
    const saved = await api.putRules(original);
    expect(saved).toEqual({ ok: true });
    expect(await api.getRules()).toBe(original);

    // a broken edit is rejected with line/col and leaves the old rules active
    const broken = original + "\nrule broken : file {\n  severity = wat\n}\n";
    const rejected = await api.putRules(broken);
    expect(rejected.ok).toBe(false);
    if (!rejected.ok) {
      expect(rejected.diagnostic.line).toBeGreaterThan(1);
      expect(rejected.diagnostic.col).toBeGreaterThan(0);
      const html = renderRulesView({ source: broken, diagnostic: rejected.diagnostic });
      expect(html).toContain(`line ${rejected.diagnostic.line}`);
    }
    expect(await api.getRules()).toBe(original);
  }, 30_000);

  it("rescan submits a fresh job from an existing one", async () => {
    const firstPage = await api.listJobs(1, 1);
    const sourceJob = firstPage.jobs[0];
    const newId = await api.rescan(sourceJob.id);
    expect(newId).not.toBe(sourceJob.id);
    const job = await api.pollJob(newId, { intervalMs: 100, deadlineMs: 30_000 });
    expect(job.state).toBe("succeeded");
  }, 60_000);
});
