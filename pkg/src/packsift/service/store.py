"""On-disk job and report store.

Layout under the store root:
    jobs/<id>/job.json      lifecycle record
    jobs/<id>/report.json   behavior report (succeeded jobs)
    jobs/<id>/claim         worker claim marker (O_EXCL, at-most-once)
    jobs/<id>/upload/       submitted payload or bundle
    jobs/<id>/work/         scratch workdir for live backends
    rules/active.rules      the active detection ruleset

Everything is plain files: inspectable with a shell, no database, safe for
concurrent readers with single-writer-per-job discipline.
"""

from __future__ import annotations

import json
import math
import os
import threading
import time
from dataclasses import dataclass
from pathlib import Path

from ..rules import default_ruleset_source
from ..runner.spec import (
    BackendSpec,
    CommandTemplateBackend,
    PackageSpec,
    ReplayBackend,
    TracedSubprocessBackend,
)

JOB_STATES = ("queued", "running", "succeeded", "failed")

_TERMINAL = ("succeeded", "failed")


@dataclass
class AnalysisJob:
    id: str
    state: str
    spec: PackageSpec
    backend: BackendSpec
    submitted_at: str
    started_at: str | None = None
    finished_at: str | None = None
    error: str | None = None
    timeout_s: float | None = None


def _now_iso() -> str:
    from datetime import datetime, timezone

    return datetime.now(timezone.utc).isoformat(timespec="microseconds")


def _backend_to_dict(backend: BackendSpec) -> dict:
    if isinstance(backend, ReplayBackend):
        return {"type": "replay", "bundle_path": str(backend.bundle_path)}
    if isinstance(backend, TracedSubprocessBackend):
        return {"type": "subprocess", "strace_binary": backend.strace_binary}
    if isinstance(backend, CommandTemplateBackend):
        return {"type": "template", "template": list(backend.template)}
    raise TypeError(f"unknown backend {backend!r}")


def _backend_from_dict(doc: dict) -> BackendSpec:
    kind = doc.get("type")
    if kind == "replay":
        return ReplayBackend(Path(doc["bundle_path"]))
    if kind == "subprocess":
        return TracedSubprocessBackend(doc.get("strace_binary", "strace"))
    if kind == "template":
        return CommandTemplateBackend(tuple(doc["template"]))
    raise ValueError(f"unknown backend type {kind!r}")


def job_to_dict(job: AnalysisJob) -> dict:
    return {
        "id": job.id,
        "state": job.state,
        "spec": {
            "ecosystem": job.spec.ecosystem,
            "name": job.spec.name,
            "version": job.spec.version,
            "local_path": str(job.spec.local_path) if job.spec.local_path else None,
        },
        "backend": _backend_to_dict(job.backend),
        "submitted_at": job.submitted_at,
        "started_at": job.started_at,
        "finished_at": job.finished_at,
        "error": job.error,
        "timeout_s": job.timeout_s,
    }


def job_from_dict(doc: dict) -> AnalysisJob:
    spec_doc = doc["spec"]
    spec = PackageSpec(
        ecosystem=spec_doc["ecosystem"],
        name=spec_doc.get("name"),
        version=spec_doc.get("version"),
        local_path=Path(spec_doc["local_path"]) if spec_doc.get("local_path") else None,
    )
    return AnalysisJob(
        id=doc["id"],
        state=doc["state"],
        spec=spec,
        backend=_backend_from_dict(doc["backend"]),
        submitted_at=doc["submitted_at"],
        started_at=doc.get("started_at"),
        finished_at=doc.get("finished_at"),
        error=doc.get("error"),
        timeout_s=doc.get("timeout_s"),
    )


@dataclass
class JobPage:
    jobs: list[AnalysisJob]
    page: int
    page_size: int
    total: int

    @property
    def pages(self) -> int:
        return max(1, math.ceil(self.total / self.page_size))


class JobStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.jobs_dir = self.root / "jobs"
        self.rules_dir = self.root / "rules"
        self.jobs_dir.mkdir(parents=True, exist_ok=True)
        self.rules_dir.mkdir(parents=True, exist_ok=True)
        self._id_lock = threading.Lock()
        self._id_counter = 0
        self._last_ms = 0
        if not self.rules_path.exists():
            self.put_rules_source(default_ruleset_source())

    # -- ids -----------------------------------------------------------

    def new_job_id(self) -> str:
        """Time-ordered sortable id: ms timestamp + per-ms counter + pid."""
        with self._id_lock:
            ms = int(time.time() * 1000)
            if ms <= self._last_ms:
                self._id_counter += 1
            else:
                self._id_counter = 0
                self._last_ms = ms
            return f"{ms:013d}-{self._id_counter:04d}-{os.getpid() % 0x10000:04x}"

    # -- paths ---------------------------------------------------------

    def job_dir(self, job_id: str) -> Path:
        return self.jobs_dir / job_id

    def job_path(self, job_id: str) -> Path:
        return self.job_dir(job_id) / "job.json"

    def report_path(self, job_id: str) -> Path:
        return self.job_dir(job_id) / "report.json"

    def claim_path(self, job_id: str) -> Path:
        return self.job_dir(job_id) / "claim"

    def upload_dir(self, job_id: str) -> Path:
        return self.job_dir(job_id) / "upload"

    def work_dir(self, job_id: str) -> Path:
        return self.job_dir(job_id) / "work"

    @property
    def rules_path(self) -> Path:
        return self.rules_dir / "active.rules"

    # -- jobs ----------------------------------------------------------

    def submit_job(
        self,
        spec: PackageSpec,
        backend: BackendSpec,
        timeout_s: float | None = None,
    ) -> AnalysisJob:
        job = AnalysisJob(
            id=self.new_job_id(),
            state="queued",
            spec=spec,
            backend=backend,
            submitted_at=_now_iso(),
            timeout_s=timeout_s,
        )
        self.job_dir(job.id).mkdir(parents=True, exist_ok=True)
        self._write_job(job)
        return job

    def save_upload(self, job_id: str, filename: str, data: bytes) -> Path:
        target_dir = self.upload_dir(job_id)
        target_dir.mkdir(parents=True, exist_ok=True)
        safe_name = Path(filename).name or "payload"
        target = target_dir / safe_name
        target.write_bytes(data)
        return target

    def get_job(self, job_id: str) -> AnalysisJob | None:
        path = self.job_path(job_id)
        if not path.is_file():
            return None
        return job_from_dict(json.loads(path.read_text("utf-8")))

    def list_jobs(
        self, state: str | None = None, page: int = 1, page_size: int = 20
    ) -> JobPage:
        """Newest first; ids are time-ordered so the sort is by id desc."""
        jobs = []
        for job_dir in sorted(self.jobs_dir.iterdir(), reverse=True):
            job = self.get_job(job_dir.name)
            if job is None:
                continue
            if state and job.state != state:
                continue
            jobs.append(job)
        total = len(jobs)
        page = max(1, page)
        start = (page - 1) * page_size
        return JobPage(jobs=jobs[start : start + page_size], page=page, page_size=page_size, total=total)

    def claim_next(self) -> AnalysisJob | None:
        """Claim the oldest queued job, at most once per job across workers."""
        for job_dir in sorted(self.jobs_dir.iterdir()):
            job = self.get_job(job_dir.name)
            if job is None or job.state != "queued":
                continue
            try:
                fd = os.open(self.claim_path(job.id), os.O_CREAT | os.O_EXCL | os.O_WRONLY)
            except FileExistsError:
                continue  # another worker got there first
            with os.fdopen(fd, "w") as fh:
                fh.write(str(os.getpid()))
            job.state = "running"
            job.started_at = _now_iso()
            self._write_job(job)
            return job
        return None

    def mark_finished(self, job: AnalysisJob, state: str, error: str | None = None) -> None:
        if state not in _TERMINAL:
            raise ValueError(f"not a terminal state: {state}")
        job.state = state
        job.error = error
        job.finished_at = _now_iso()
        self._write_job(job)

    def sweep_stale_running(self) -> list[str]:
        """Fail running jobs whose claiming worker is gone (crash recovery)."""
        swept = []
        for job_dir in sorted(self.jobs_dir.iterdir()):
            job = self.get_job(job_dir.name)
            if job is None or job.state != "running":
                continue
            if not self._claim_owner_alive(job.id):
                self.mark_finished(job, "failed", "interrupted: worker died before finishing")
                swept.append(job.id)
        return swept

    def _claim_owner_alive(self, job_id: str) -> bool:
        path = self.claim_path(job_id)
        try:
            pid = int(path.read_text("utf-8").strip())
        except (OSError, ValueError):
            return False
        if pid == os.getpid():
            # claims carrying this pid were written by a previous incarnation
            # of this process; the sweep runs before any worker starts
            return False
        try:
            os.kill(pid, 0)
        except ProcessLookupError:
            return False
        except PermissionError:
            return True
        return True

    def _write_job(self, job: AnalysisJob) -> None:
        path = self.job_path(job.id)
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(job_to_dict(job), indent=2) + "\n", encoding="utf-8")
        os.replace(tmp, path)

    # -- reports ---------------------------------------------------------

    def save_report(self, job_id: str, report_json: str) -> None:
        path = self.report_path(job_id)
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(report_json, encoding="utf-8")
        os.replace(tmp, path)

    def load_report_text(self, job_id: str) -> str | None:
        path = self.report_path(job_id)
        if not path.is_file():
            return None
        return path.read_text("utf-8")

    # -- rules -----------------------------------------------------------

    def get_rules_source(self) -> str:
        return self.rules_path.read_text("utf-8")

    def put_rules_source(self, source: str) -> None:
        """Atomic replace; callers must have validated the source first."""
        tmp = self.rules_path.with_suffix(".rules.tmp")
        tmp.write_text(source, encoding="utf-8")
        os.replace(tmp, self.rules_path)
