"""Specs, adapters, backends, executable diffs, bundles, and the pipeline."""

from __future__ import annotations

import json
import shutil
import time
from pathlib import Path

import pytest

from packsift.rules import default_ruleset
from packsift.runner import (
    BundleError,
    CommandTemplateBackend,
    ConfigurationError,
    PackageSpec,
    PipelineError,
    ReplayBackend,
    RunConfig,
    TracedSubprocessBackend,
    analyze,
    diff_new_executables,
    load_bundle,
    pack_bundle,
    plan_phases,
    report_to_dict,
    report_to_json,
    run_phase,
    snapshot_executables,
    substitute_template,
    write_bundle,
)
from packsift.runner.report import load_report


# -- specs -------------------------------------------------------------------

def test_package_spec_requires_name_or_path():
    with pytest.raises(ConfigurationError):
        PackageSpec(ecosystem="pypi")
    PackageSpec(ecosystem="pypi", name="requests")
    PackageSpec(ecosystem="script", local_path="/tmp/x.sh")


def test_default_timeout_is_ten_seconds():
    assert RunConfig().phase_timeout_s == 10


def test_timeout_floor():
    with pytest.raises(ConfigurationError):
        RunConfig(phase_timeout_s=0.5)


def test_template_requires_cmd_placeholder():
    with pytest.raises(ConfigurationError):
        CommandTemplateBackend(("podman", "run"))
    CommandTemplateBackend(("podman", "run", "{CMD}"))


# -- adapters -------------------------------------------------------------------

def test_script_plan(tmp_path):
    spec = PackageSpec(ecosystem="script", local_path=tmp_path / "evil.sh")
    plans = plan_phases(spec, tmp_path)
    assert [p.phase for p in plans] == ["install", "execute"]
    assert plans[0].argv == ["cp", str(tmp_path / "evil.sh"), str(tmp_path)]
    assert plans[1].argv == ["sh", str(tmp_path / "evil.sh")]
    assert plans[1].dynamic is False


def test_pypi_plan_has_import_and_dynamic_execute(tmp_path):
    spec = PackageSpec(ecosystem="pypi", name="left-pad", version="1.0")
    plans = plan_phases(spec, tmp_path)
    assert [p.phase for p in plans] == ["install", "import", "execute"]
    assert plans[0].argv == ["python3", "-m", "pip", "install", "--no-input", "left-pad==1.0"]
    assert plans[1].argv == ["python3", "-c", "import left_pad"]
    assert plans[2].argv is None and plans[2].dynamic is True


def test_unknown_ecosystem_lists_known(tmp_path):
    with pytest.raises(ConfigurationError) as exc:
        plan_phases(PackageSpec(ecosystem="cargo", name="x"), tmp_path)
    message = str(exc.value)
    assert "cargo" in message and "pypi" in message and "npm" in message


# -- template substitution ----------------------------------------------------------

def test_template_substitution_exact(tmp_path):
    template = ("podman", "run", "--rm", "-v", "{WORKDIR}:/w", "{CMD}")
    argv = ["sh", "-c", "echo hi"]
    out = substitute_template(template, argv, tmp_path, tmp_path / "t.out")
    assert out == ["podman", "run", "--rm", "-v", f"{tmp_path}:/w", "sh", "-c", "echo hi"]


def test_template_inline_cmd_is_shell_quoted(tmp_path):
    template = ("sh", "-c", "run {CMD} > {TRACE_OUT}")
    out = substitute_template(template, ["echo", "a b"], tmp_path, tmp_path / "t.out")
    assert out == ["sh", "-c", f"run echo 'a b' > {tmp_path / 't.out'}"]


# -- run_phase over the template backend --------------------------------------------

def test_template_backend_writes_trace_file(tmp_path):
    backend = CommandTemplateBackend(
        ("sh", "-c", "printf '%s\\n' 'getpid() = 7' > {TRACE_OUT} # {CMD}")
    )
    config = RunConfig(phase_timeout_s=5, backend=backend)
    result = run_phase(["ignored"], backend, config, tmp_path, "install")
    assert result.exit_status == 0 and not result.timed_out
    assert result.trace_text == "getpid() = 7\n"


def test_template_backend_stdout_trace(tmp_path):
    backend = CommandTemplateBackend(("sh", "-c", "printf 'close(1) = 0\\n' # {CMD}"))
    config = RunConfig(phase_timeout_s=5, backend=backend)
    result = run_phase(["ignored"], backend, config, tmp_path, "install")
    assert result.trace_text == "close(1) = 0\n"


def test_timeout_kills_process_tree(tmp_path):
    backend = CommandTemplateBackend(("sh", "-c", "sleep 5 # {CMD}"))
    config = RunConfig(phase_timeout_s=1, backend=backend)
    start = time.monotonic()
    result = run_phase(["x"], backend, config, tmp_path, "execute")
    wall = time.monotonic() - start
    assert result.timed_out is True
    assert wall < 3.0
    assert 1000 <= result.duration_ms <= 3000


def test_launch_failure_recorded_not_raised(tmp_path):
    backend = CommandTemplateBackend(("/no/such/binary", "{CMD}"))
    config = RunConfig(phase_timeout_s=2, backend=backend)
    result = run_phase(["x"], backend, config, tmp_path, "install")
    assert result.error is not None and result.exit_status is None


@pytest.mark.skipif(shutil.which("strace") is None, reason="strace not installed")
def test_traced_subprocess_backend(tmp_path):
    backend = TracedSubprocessBackend()
    config = RunConfig(phase_timeout_s=5, backend=backend)
    result = run_phase(["true"], backend, config, tmp_path, "install")
    assert result.exit_status == 0
    assert "execve" in result.trace_text


# -- executables ----------------------------------------------------------------------

def test_snapshot_and_diff(tmp_path):
    before, notes = snapshot_executables(tmp_path)
    assert before == {} and notes == []
    exe = tmp_path / "bin" / "x"
    exe.parent.mkdir()
    exe.write_text("#!/bin/sh\n")
    exe.chmod(0o755)
    plain = tmp_path / "data.txt"
    plain.write_text("not executable")
    after, _ = snapshot_executables(tmp_path)
    assert set(after) == {str(exe)}
    assert diff_new_executables(before, after) == [str(exe)]
    assert diff_new_executables(after, after) == []
    exe.write_text("#!/bin/sh\necho changed\n")
    changed, _ = snapshot_executables(tmp_path)
    assert diff_new_executables(after, changed) == [str(exe)]


# -- bundles ----------------------------------------------------------------------------

def test_bundle_write_load_round_trip(tmp_path):
    package = PackageSpec(ecosystem="npm", name="pkg", version="1.0")
    write_bundle(tmp_path / "b", package, [("install", "getpid() = 1\n", 0, 100, [])])
    bundle = load_bundle(tmp_path / "b")
    assert bundle.package.name == "pkg"
    assert bundle.trace_text("install") == "getpid() = 1\n"
    assert bundle.phases[0].duration_ms == 100


def test_bundle_tar_gz(tmp_path, solana_bundle):
    archive = pack_bundle(solana_bundle, tmp_path / "solana.tar.gz")
    bundle = load_bundle(archive)
    assert bundle.package.ecosystem == "npm"
    assert [p.phase for p in bundle.phases] == ["install", "import", "execute"]


def test_bundle_missing_path():
    with pytest.raises(BundleError):
        load_bundle("/no/such/bundle")


def test_bundle_manifest_validation(tmp_path):
    root = tmp_path / "bad"
    root.mkdir()
    (root / "manifest.json").write_text("{not json")
    with pytest.raises(BundleError):
        load_bundle(root)
    (root / "manifest.json").write_text(json.dumps({"schema_version": "9.9"}))
    with pytest.raises(BundleError):
        load_bundle(root)
    (root / "manifest.json").write_text(
        json.dumps(
            {
                "schema_version": "1.0",
                "package": {"ecosystem": "npm", "name": "x"},
                "phases": [{"phase": "execute", "trace_file": "e.strace", "exit_status": 0, "duration_ms": 1}],
            }
        )
    )
    with pytest.raises(BundleError, match="install"):
        load_bundle(root)


def test_bundle_rejects_escaping_trace_paths(tmp_path):
    root = tmp_path / "esc"
    root.mkdir()
    (root / "manifest.json").write_text(
        json.dumps(
            {
                "schema_version": "1.0",
                "package": {"ecosystem": "npm", "name": "x"},
                "phases": [{"phase": "install", "trace_file": "../../etc/passwd", "exit_status": 0, "duration_ms": 1}],
            }
        )
    )
    with pytest.raises(BundleError, match="escapes"):
        load_bundle(root)


# -- pipeline -------------------------------------------------------------------------

def test_replay_solana_bundle(solana_bundle):
    config = RunConfig(backend=ReplayBackend(solana_bundle))
    report = analyze(None, config, default_ruleset())
    assert set(report.phases) == {"install", "import", "execute"}
    execute = report.phases["execute"]
    assert len(execute.commands) >= 1
    assert len(execute.files) >= 2
    assert len(execute.endpoints) >= 1
    assert len(execute.domains) >= 1
    assert len(report.alerts) >= 3
    assert {a.category for a in report.alerts} >= {"file", "command"}
    assert report.verdict.label == "unknown" and report.verdict.ml_score is None


def test_replay_determinism_modulo_created_at(solana_bundle):
    config = RunConfig(backend=ReplayBackend(solana_bundle))
    r1 = analyze(None, config, default_ruleset())
    r2 = analyze(None, config, default_ruleset())
    d1, d2 = report_to_dict(r1), report_to_dict(r2)
    d1["created_at"] = d2["created_at"] = "X"
    assert json.dumps(d1) == json.dumps(d2)


def test_replay_empty_bundle(tmp_path):
    package = PackageSpec(ecosystem="npm", name="empty", version="0")
    write_bundle(tmp_path / "empty", package, [("install", "", 0, 10, [])])
    config = RunConfig(backend=ReplayBackend(tmp_path / "empty"))
    report = analyze(None, config, default_ruleset())
    install = report.phases["install"]
    assert install.commands == [] and install.files == []
    assert install.syscalls.total == 0
    assert report.alerts == []


def test_replay_missing_bundle_raises_pipeline_error():
    config = RunConfig(backend=ReplayBackend("/no/such/bundle"))
    with pytest.raises(PipelineError):
        analyze(None, config, default_ruleset())


def test_live_pipeline_via_template(tmp_path):
    # wrapper fabricates a trace and drops an executable during install, so
    # the dynamic execute phase has something to run
    script = (
        "mkdir -p {WORKDIR}/bin; "
        "test -f {WORKDIR}/bin/dropped || printf '#!/bin/sh\\n' > {WORKDIR}/bin/dropped; "
        "chmod +x {WORKDIR}/bin/dropped; "
        "printf '%s\\n' 'openat(AT_FDCWD, \"/etc/passwd\", O_RDONLY) = 3' > {TRACE_OUT} # {CMD}"
    )
    backend = CommandTemplateBackend(("sh", "-c", script))
    config = RunConfig(phase_timeout_s=5, backend=backend, work_root=tmp_path / "w")
    spec = PackageSpec(ecosystem="apk", name="sample")
    report = analyze(spec, config, default_ruleset())
    assert set(report.phases) == {"install", "execute"}
    assert [f.path for f in report.phases["install"].files] == ["/etc/passwd"]
    assert [f.path for f in report.phases["execute"].files] == ["/etc/passwd"]
    assert any(a.rule_id == "sensitive_passwd_file" for a in report.alerts)


def test_live_pipeline_install_failure_stops(tmp_path):
    backend = CommandTemplateBackend(("sh", "-c", "exit 7 # {CMD}"))
    config = RunConfig(phase_timeout_s=5, backend=backend, work_root=tmp_path / "w")
    spec = PackageSpec(ecosystem="pypi", name="sample")
    report = analyze(spec, config, default_ruleset())
    assert set(report.phases) == {"install"}
    assert any("install failed" in n for n in report.pipeline_notes)


def test_live_pipeline_unknown_ecosystem_raises(tmp_path):
    backend = CommandTemplateBackend(("sh", "-c", "true # {CMD}"))
    config = RunConfig(backend=backend, work_root=tmp_path / "w")
    with pytest.raises(ConfigurationError):
        analyze(PackageSpec(ecosystem="nope", name="x"), config, default_ruleset())


# -- report schema ---------------------------------------------------------------------

def test_report_schema_keys(solana_bundle):
    config = RunConfig(backend=ReplayBackend(solana_bundle))
    report = analyze(None, config, default_ruleset())
    doc = report_to_dict(report)
    assert list(doc) == [
        "schema_version",
        "package",
        "phases",
        "alerts",
        "verdict",
        "created_at",
        "pipeline_notes",
    ]
    assert doc["schema_version"] == "1.0"
    for phase_doc in doc["phases"].values():
        assert list(phase_doc) == ["commands", "files", "ips", "domains", "syscalls", "duration_ms"]
    for cmd in doc["phases"]["execute"]["commands"]:
        assert list(cmd) == ["program_path", "argv", "pid", "succeeded"]
    for rec in doc["phases"]["execute"]["files"]:
        assert list(rec) == ["path", "operations", "pids"]
    for rec in doc["phases"]["execute"]["ips"]:
        assert list(rec) == ["address", "port", "protocol"]
    for rec in doc["phases"]["execute"]["domains"]:
        assert list(rec) == ["name", "query_type"]


def test_report_round_trip_preserves_surfaces(tmp_path, solana_bundle):
    from packsift.rules.engine import match_report

    config = RunConfig(backend=ReplayBackend(solana_bundle))
    report = analyze(None, config, default_ruleset())
    path = tmp_path / "report.json"
    path.write_text(report_to_json(report))
    loaded = load_report(path)
    # rematching the loaded report reproduces the original alerts
    fresh = match_report(loaded.phases, default_ruleset())
    assert fresh == report.alerts
