"""Phase execution over the pluggable backends, with timeout enforcement."""

from __future__ import annotations

import os
import shlex
import signal
import subprocess
import time
import uuid
from dataclasses import dataclass
from pathlib import Path

from .bundle import BundleError, ReplayBundle, load_bundle
from .spec import (
    BackendSpec,
    CommandTemplateBackend,
    ReplayBackend,
    RunConfig,
    TracedSubprocessBackend,
)


@dataclass
class PhaseRunResult:
    trace_text: str
    exit_status: int | None  # None when killed or never launched
    duration_ms: int
    timed_out: bool
    error: str | None = None


def _kill_tree(proc: subprocess.Popen) -> None:
    # the child was started in its own session, so the process group id is
    # the child pid; SIGKILL to the group takes down grandchildren too
    try:
        os.killpg(proc.pid, signal.SIGKILL)
    except (ProcessLookupError, PermissionError):
        pass
    try:
        proc.wait(timeout=5)
    except subprocess.TimeoutExpired:
        pass


def _run_with_timeout(
    argv: list[str], timeout_s: float, cwd: Path | None, capture_stdout: bool
) -> tuple[int | None, int, bool, str, str | None]:
    """Returns (exit_status, duration_ms, timed_out, stdout_text, error)."""
    start = time.monotonic()
    try:
        proc = subprocess.Popen(
            argv,
            cwd=str(cwd) if cwd else None,
            stdout=subprocess.PIPE if capture_stdout else subprocess.DEVNULL,
            stderr=subprocess.DEVNULL,
            start_new_session=True,
        )
    except OSError as exc:
        duration = int((time.monotonic() - start) * 1000)
        return None, duration, False, "", f"failed to launch {argv[0]!r}: {exc}"
    timed_out = False
    stdout_text = ""
    try:
        out, _ = proc.communicate(timeout=timeout_s)
        if capture_stdout and out is not None:
            stdout_text = out.decode("utf-8", "backslashreplace")
    except subprocess.TimeoutExpired:
        timed_out = True
        _kill_tree(proc)
        if capture_stdout and proc.stdout is not None:
            try:
                stdout_text = proc.stdout.read().decode("utf-8", "backslashreplace")
            except (OSError, ValueError):
                stdout_text = ""
    duration = int((time.monotonic() - start) * 1000)
    status = None if timed_out else proc.returncode
    return status, duration, timed_out, stdout_text, None


def substitute_template(
    template: tuple[str, ...], argv: list[str], workdir: Path, trace_out: Path
) -> list[str]:
    out: list[str] = []
    for part in template:
        if part == "{CMD}":
            out.extend(argv)
            continue
        part = part.replace("{CMD}", shlex.join(argv))
        part = part.replace("{WORKDIR}", str(workdir))
        part = part.replace("{TRACE_OUT}", str(trace_out))
        out.append(part)
    return out


def run_phase(
    argv: list[str] | None,
    backend: BackendSpec,
    config: RunConfig,
    workdir: Path,
    phase: str,
) -> PhaseRunResult:
    """Execute one phase and return its raw trace text.

    On timeout the whole process tree is killed and whatever trace was
    written is still returned.
    """
    if isinstance(backend, ReplayBackend):
        return replay_phase(load_bundle(backend.bundle_path), phase)

    if not argv:
        return PhaseRunResult("", None, 0, False, "empty command for non-replay backend")

    if isinstance(backend, TracedSubprocessBackend):
        trace_file = workdir / f".trace-{phase}-{uuid.uuid4().hex}.strace"
        full = [backend.strace_binary, *config.trace_flags, "-o", str(trace_file), "--", *argv]
        status, duration, timed_out, _, error = _run_with_timeout(
            full, config.phase_timeout_s, workdir, capture_stdout=False
        )
        trace_text = ""
        if trace_file.exists():
            trace_text = trace_file.read_text("utf-8", errors="backslashreplace")
            trace_file.unlink(missing_ok=True)
        return PhaseRunResult(trace_text, status, duration, timed_out, error)

    if isinstance(backend, CommandTemplateBackend):
        trace_out = workdir / f".trace-{phase}-{uuid.uuid4().hex}.out"
        wants_file = any("{TRACE_OUT}" in part for part in backend.template)
        full = substitute_template(backend.template, argv, workdir, trace_out)
        status, duration, timed_out, stdout_text, error = _run_with_timeout(
            full, config.phase_timeout_s, workdir, capture_stdout=not wants_file
        )
        if wants_file:
            trace_text = ""
            if trace_out.exists():
                trace_text = trace_out.read_text("utf-8", errors="backslashreplace")
                trace_out.unlink(missing_ok=True)
        else:
            trace_text = stdout_text
        return PhaseRunResult(trace_text, status, duration, timed_out, error)

    raise TypeError(f"unknown backend {backend!r}")


def replay_phase(bundle: ReplayBundle, phase: str) -> PhaseRunResult:
    entry = bundle.phase(phase)
    if entry is None:
        return PhaseRunResult("", None, 0, False, f"bundle has no {phase!r} phase")
    try:
        text = bundle.trace_text(phase)
    except BundleError as exc:
        return PhaseRunResult("", None, 0, False, str(exc))
    return PhaseRunResult(text, entry.exit_status, entry.duration_ms, False)
