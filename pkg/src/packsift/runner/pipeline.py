"""The end-to-end analysis pipeline: plan, run, parse, extract, detect."""

from __future__ import annotations

import tempfile
from collections import Counter
from pathlib import Path

from ..behavior.extract import NoiseFilter, build_phase_report
from ..behavior.records import PhaseReport
from ..ml.model import Model, label_of, score
from ..rules.engine import match_report
from ..rules.model import RuleSet
from ..strace.parser import parse_stream
from .adapters import Adapter, PhasePlan, plan_phases
from .backends import PhaseRunResult, replay_phase, run_phase
from .bundle import BundleError, load_bundle
from .executables import diff_new_executables, snapshot_executables
from .report import BehaviorReport, Verdict, utc_now_iso
from .spec import PackageSpec, ReplayBackend, RunConfig


class PipelineError(RuntimeError):
    """Unrecoverable pipeline failure (bad bundle, no adapter, no workdir)."""


def analyze(
    spec: PackageSpec | None,
    config: RunConfig,
    ruleset: RuleSet,
    model: Model | None = None,
    adapters: dict[str, Adapter] | None = None,
    noise: NoiseFilter = NoiseFilter(),
) -> BehaviorReport:
    """Run all phases for a spec and assemble the full report.

    With a Replay backend the package identity comes from the bundle
    manifest and spec may be None. Phase failures are contained: a failing
    install stops the pipeline but the report (with whatever was captured)
    is still produced. Only setup errors — unreadable bundle, unknown
    ecosystem — raise PipelineError.
    """
    notes: list[str] = []
    if isinstance(config.backend, ReplayBackend):
        package, phases = _run_replay(config, noise, notes)
    else:
        if spec is None:
            raise PipelineError("a package spec is required for non-replay backends")
        package, phases = _run_live(spec, config, adapters, noise, notes)

    report = BehaviorReport(
        package=package,
        phases=phases,
        created_at=utc_now_iso(),
        pipeline_notes=notes,
    )
    report.alerts = match_report(report.phases, ruleset)
    if model is not None:
        probability = score(model, report.phases)
        report.verdict = Verdict(ml_score=probability, label=label_of(model, probability))
    return report


def _ingest(
    phase: str,
    result: PhaseRunResult,
    noise: NoiseFilter,
    notes: list[str],
) -> PhaseReport:
    parsed = parse_stream(result.trace_text)
    if parsed.diagnostics:
        for kind, count in sorted(Counter(d.kind for d in parsed.diagnostics).items()):
            notes.append(f"{phase}: {count} trace diagnostic(s) of kind {kind}")
    if result.error:
        notes.append(f"{phase}: {result.error}")
    if result.timed_out:
        notes.append(f"{phase}: timed out after {result.duration_ms} ms, partial trace kept")
    report = build_phase_report(phase, parsed.events, result.duration_ms, noise)
    notes.extend(f"{phase}: {note}" for note in report.notes)
    return report


def _run_replay(
    config: RunConfig, noise: NoiseFilter, notes: list[str]
) -> tuple[PackageSpec, dict[str, PhaseReport]]:
    backend = config.backend
    assert isinstance(backend, ReplayBackend)
    try:
        bundle = load_bundle(backend.bundle_path)
    except BundleError as exc:
        raise PipelineError(str(exc)) from exc
    phases: dict[str, PhaseReport] = {}
    for entry in bundle.phases:
        result = replay_phase(bundle, entry.phase)
        phases[entry.phase] = _ingest(entry.phase, result, noise, notes)
    return bundle.package, phases


def _run_live(
    spec: PackageSpec,
    config: RunConfig,
    adapters: dict[str, Adapter] | None,
    noise: NoiseFilter,
    notes: list[str],
) -> tuple[PackageSpec, dict[str, PhaseReport]]:
    if config.work_root is not None:
        workdir = Path(config.work_root)
        workdir.mkdir(parents=True, exist_ok=True)
    else:
        workdir = Path(tempfile.mkdtemp(prefix="packsift-work-"))

    plans: list[PhasePlan] = plan_phases(spec, workdir, adapters)  # may raise ConfigurationError
    phases: dict[str, PhaseReport] = {}

    before, snap_notes = snapshot_executables(workdir)
    notes.extend(snap_notes)

    install_plan = plans[0]
    install_result = run_phase(install_plan.argv, config.backend, config, workdir, "install")
    phases["install"] = _ingest("install", install_result, noise, notes)
    install_ok = (
        install_result.error is None
        and not install_result.timed_out
        and install_result.exit_status == 0
    )
    if not install_ok:
        notes.append("install failed; import/execute phases skipped")
        return spec, phases

    after, snap_notes = snapshot_executables(workdir)
    notes.extend(snap_notes)

    for plan in plans[1:]:
        if plan.phase == "execute" and plan.dynamic:
            new_execs = diff_new_executables(before, after)
            if not new_execs:
                notes.append("execute: no new executables found after install")
                continue
            texts: list[str] = []
            total_ms = 0
            timed_out = False
            for exe in new_execs:
                result = run_phase([exe], config.backend, config, workdir, "execute")
                texts.append(result.trace_text)
                total_ms += result.duration_ms
                timed_out = timed_out or result.timed_out
                if result.error:
                    notes.append(f"execute {exe}: {result.error}")
            merged = PhaseRunResult("\n".join(texts), 0, total_ms, timed_out)
            phases["execute"] = _ingest("execute", merged, noise, notes)
        else:
            result = run_phase(plan.argv, config.backend, config, workdir, plan.phase)
            phases[plan.phase] = _ingest(plan.phase, result, noise, notes)
    return spec, phases
