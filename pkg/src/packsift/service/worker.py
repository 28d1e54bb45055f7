"""Background workers: dequeue jobs, run the pipeline, persist the verdicts."""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass
from pathlib import Path

from ..ml.model import Model, load_model
from ..rules.model import RuleSet
from ..rules.parser import RuleSyntaxError, parse_ruleset
from ..runner.pipeline import PipelineError, analyze
from ..runner.report import report_to_json
from ..runner.spec import ConfigurationError, RunConfig
from .store import AnalysisJob, JobStore

log = logging.getLogger(__name__)

DEFAULT_MAX_UPLOAD_BYTES = 64 * 1024 * 1024


@dataclass
class ServiceConfig:
    worker_count: int = 2
    default_timeout_s: float = 10.0
    max_upload_bytes: int = DEFAULT_MAX_UPLOAD_BYTES
    poll_interval_s: float = 0.05
    model_path: Path | None = None


class WorkerPool:
    def __init__(self, store: JobStore, config: ServiceConfig = ServiceConfig()):
        self.store = store
        self.config = config
        self.model: Model | None = (
            load_model(config.model_path) if config.model_path else None
        )
        self._threads: list[threading.Thread] = []
        self._stop = threading.Event()

    def start(self) -> None:
        self.store.sweep_stale_running()
        for i in range(self.config.worker_count):
            thread = threading.Thread(target=self._loop, name=f"packsift-worker-{i}", daemon=True)
            thread.start()
            self._threads.append(thread)

    def stop(self, timeout: float = 10.0) -> None:
        self._stop.set()
        for thread in self._threads:
            thread.join(timeout)
        self._threads.clear()

    def _loop(self) -> None:
        while not self._stop.is_set():
            job = self.store.claim_next()
            if job is None:
                self._stop.wait(self.config.poll_interval_s)
                continue
            try:
                self.run_job(job)
            except Exception as exc:  # containment: a bad job must not kill the worker
                log.exception("job %s failed", job.id)
                self.store.mark_finished(job, "failed", str(exc))

    def _active_ruleset(self) -> tuple[RuleSet, str | None]:
        try:
            return parse_ruleset(self.store.get_rules_source()), None
        except (OSError, RuleSyntaxError) as exc:
            # put_rules validates before persisting, so this is defensive
            return RuleSet(), f"active ruleset unusable, matching skipped: {exc}"

    def run_job(self, job: AnalysisJob) -> None:
        ruleset, rules_note = self._active_ruleset()
        config = RunConfig(
            phase_timeout_s=job.timeout_s or self.config.default_timeout_s,
            backend=job.backend,
            work_root=self.store.work_dir(job.id),
        )
        try:
            report = analyze(job.spec, config, ruleset, self.model)
        except (PipelineError, ConfigurationError) as exc:
            self.store.mark_finished(job, "failed", str(exc))
            return
        if rules_note:
            report.pipeline_notes.append(rules_note)
        self.store.save_report(job.id, report_to_json(report))
        self.store.mark_finished(job, "succeeded")
