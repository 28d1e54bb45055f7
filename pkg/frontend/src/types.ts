/** Client-side mirrors of the service's job and report payloads. */

export type JobState = "queued" | "running" | "succeeded" | "failed";

export interface Job {
  id: string;
  state: JobState;
  spec: {
    ecosystem: string;
    name: string | null;
    version: string | null;
    local_path: string | null;
  };
  backend: { type: string; [key: string]: unknown };
  submitted_at: string;
  started_at: string | null;
  finished_at: string | null;
  error: string | null;
}

export interface JobPage {
  jobs: Job[];
  page: number;
  page_size: number;
  total: number;
  pages: number;
}

export interface CommandDoc {
  program_path: string;
  argv: string[];
  pid: number;
  succeeded: boolean;
}

export interface FileDoc {
  path: string;
  operations: string[];
  pids: number[];
}

export interface IpDoc {
  address: string;
  port: number;
  protocol: string;
}

export interface DomainDoc {
  name: string;
  query_type: number;
}

export interface PhaseDoc {
  commands: CommandDoc[];
  files: FileDoc[];
  ips: IpDoc[];
  domains: DomainDoc[];
  syscalls: Record<string, number>;
  duration_ms: number;
}

export type Severity = "low" | "medium" | "high";

export interface AlertDoc {
  rule_id: string;
  category: string;
  phase: string;
  matched_value: string;
  severity: Severity;
  position: number;
}

export interface ReportDoc {
  schema_version: string;
  package: { ecosystem: string; name: string | null; version: string | null };
  phases: Record<string, PhaseDoc>;
  alerts: AlertDoc[];
  verdict: { ml_score: number | null; label: string };
  created_at: string;
  pipeline_notes: string[];
}

export interface RuleDiagnostic {
  error: string;
  line: number;
  col: number;
}

export const PHASE_ORDER = ["install", "import", "execute"] as const;
