"""Command-line driver.

Exit codes are a stable contract:
    0  success, no alerts
    1  pipeline error (bad bundle, launch failure, unreadable input)
    2  bad invocation or input rejected up front (rule syntax, one-class data)
    3  analysis succeeded and alerts were found
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .ml.model import (
    ModelFormatError,
    TrainConfig,
    accuracy,
    load_model,
    mean_log_loss,
    save_model,
    train_vectors,
)
from .ml.features import DEFAULT_DIMENSION, featurize
from .rules.engine import match_report
from .rules.parser import RuleSyntaxError, parse_ruleset
from .rules import default_ruleset
from .runner.bundle import BundleError
from .runner.pipeline import PipelineError, analyze
from .runner.report import ReportFormatError, load_report, report_to_json
from .runner.spec import (
    CommandTemplateBackend,
    ConfigurationError,
    PackageSpec,
    ReplayBackend,
    RunConfig,
    TracedSubprocessBackend,
)

EXIT_OK = 0
EXIT_PIPELINE_ERROR = 1
EXIT_BAD_INPUT = 2
EXIT_ALERTS = 3


def _err(message: str) -> None:
    click.echo(message, err=True)


def _load_ruleset(rules_file: str | None):
    if rules_file is None:
        return default_ruleset()
    return parse_ruleset(Path(rules_file).read_text("utf-8"))


def _write_report(report, out: str) -> None:
    text = report_to_json(report)
    if out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _run_analysis(spec, backend, timeout, rules_file, model_file, out) -> int:
    try:
        ruleset = _load_ruleset(rules_file)
    except RuleSyntaxError as exc:
        _err(f"ruleset error: {exc}")
        return EXIT_BAD_INPUT
    except OSError as exc:
        _err(f"cannot read ruleset: {exc}")
        return EXIT_PIPELINE_ERROR
    model = None
    if model_file:
        try:
            model = load_model(model_file)
        except ModelFormatError as exc:
            _err(f"cannot load model: {exc}")
            return EXIT_PIPELINE_ERROR
    config = RunConfig(phase_timeout_s=timeout, backend=backend)
    try:
        report = analyze(spec, config, ruleset, model)
    except (PipelineError, ConfigurationError, BundleError) as exc:
        _err(f"analysis failed: {exc}")
        return EXIT_PIPELINE_ERROR
    _write_report(report, out)
    for alert in report.alerts:
        _err(f"alert [{alert.severity}] {alert.rule_id} ({alert.category}/{alert.phase}): {alert.matched_value}")
    _err(f"{len(report.alerts)} alert(s)")
    return EXIT_ALERTS if report.alerts else EXIT_OK


@click.group()
def main() -> None:
    """Dynamic analysis of open-source packages."""


@main.command()
@click.option("--ecosystem", help="package ecosystem (pypi, npm, rubygems, apk, maven, archive, script)")
@click.option("--name", help="package name")
@click.option("--version", help="package version")
@click.option("--path", "local_path", type=click.Path(), help="local sample payload")
@click.option("--backend", "backend_kind", type=click.Choice(["replay", "subprocess", "template"]), default="subprocess", show_default=True)
@click.option("--bundle", type=click.Path(), help="replay bundle (dir or tar.gz)")
@click.option("--template", help="command template for the template backend, e.g. 'podman run --rm {CMD}'")
@click.option("--rules", "rules_file", type=click.Path(), help="ruleset file (default: built-in rules)")
@click.option("--model", "model_file", type=click.Path(), help="trained model file")
@click.option("--timeout", type=float, default=10.0, show_default=True, help="per-phase timeout in seconds")
@click.option("--out", default="-", show_default=True, help="report destination ('-' for stdout)")
@click.pass_context
def analyze_cmd(ctx, ecosystem, name, version, local_path, backend_kind, bundle, template, rules_file, model_file, timeout, out):
    """Analyze a package through the install/import/execute phases."""
    import shlex

    if backend_kind == "replay":
        if not bundle:
            _err("replay backend needs --bundle")
            ctx.exit(EXIT_PIPELINE_ERROR)
        backend = ReplayBackend(Path(bundle))
        spec = None
    else:
        if not ecosystem:
            _err("--ecosystem is required for non-replay backends")
            ctx.exit(EXIT_BAD_INPUT)
        try:
            spec = PackageSpec(
                ecosystem=ecosystem,
                name=name,
                version=version,
                local_path=Path(local_path) if local_path else None,
            )
        except ConfigurationError as exc:
            _err(f"invalid spec: {exc}")
            ctx.exit(EXIT_BAD_INPUT)
        if backend_kind == "template":
            if not template:
                _err("template backend needs --template")
                ctx.exit(EXIT_BAD_INPUT)
            try:
                backend = CommandTemplateBackend(tuple(shlex.split(template)))
            except ConfigurationError as exc:
                _err(str(exc))
                ctx.exit(EXIT_BAD_INPUT)
        else:
            backend = TracedSubprocessBackend()
    ctx.exit(_run_analysis(spec, backend, timeout, rules_file, model_file, out))


main.add_command(analyze_cmd, name="analyze")


@main.command()
@click.argument("bundle", type=click.Path())
@click.option("--rules", "rules_file", type=click.Path())
@click.option("--model", "model_file", type=click.Path())
@click.option("--timeout", type=float, default=10.0, show_default=True)
@click.option("--out", default="-", show_default=True)
@click.pass_context
def replay(ctx, bundle, rules_file, model_file, timeout, out):
    """Analyze a recorded replay bundle (alias for analyze --backend replay)."""
    backend = ReplayBackend(Path(bundle))
    ctx.exit(_run_analysis(None, backend, timeout, rules_file, model_file, out))


@main.group()
def rules() -> None:
    """Lint rule files and scan existing reports."""


@rules.command()
@click.argument("file", type=click.Path())
@click.pass_context
def lint(ctx, file):
    """Check a ruleset for syntax errors."""
    try:
        ruleset = parse_ruleset(Path(file).read_text("utf-8"))
    except OSError as exc:
        _err(f"cannot read {file}: {exc}")
        ctx.exit(EXIT_PIPELINE_ERROR)
    except RuleSyntaxError as exc:
        _err(f"{file}: {exc}")
        ctx.exit(EXIT_BAD_INPUT)
    _err(f"{file}: {len(ruleset)} rule(s) ok")
    ctx.exit(EXIT_OK)


@rules.command()
@click.argument("file", type=click.Path())
@click.option("--report", "report_file", type=click.Path(), required=True, help="report JSON to scan")
@click.pass_context
def scan(ctx, file, report_file):
    """Match a ruleset against a previously produced report."""
    try:
        ruleset = parse_ruleset(Path(file).read_text("utf-8"))
    except OSError as exc:
        _err(f"cannot read {file}: {exc}")
        ctx.exit(EXIT_PIPELINE_ERROR)
    except RuleSyntaxError as exc:
        _err(f"{file}: {exc}")
        ctx.exit(EXIT_BAD_INPUT)
    try:
        report = load_report(report_file)
    except ReportFormatError as exc:
        _err(str(exc))
        ctx.exit(EXIT_PIPELINE_ERROR)
    alerts = match_report(report.phases, ruleset)
    doc = [
        {
            "rule_id": a.rule_id,
            "category": a.category,
            "phase": a.phase,
            "matched_value": a.matched_value,
            "severity": a.severity,
            "position": a.position,
        }
        for a in alerts
    ]
    sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    ctx.exit(EXIT_ALERTS if alerts else EXIT_OK)


@main.command()
@click.option("--data", "data_dir", type=click.Path(), required=True, help="directory with benign/ and malicious/ report JSON files")
@click.option("--out", "model_out", type=click.Path(), required=True)
@click.option("--epochs", type=int, default=50, show_default=True)
@click.option("--lr", type=float, default=0.1, show_default=True)
@click.option("--seed", type=int, default=42, show_default=True)
@click.option("--dimension", type=int, default=DEFAULT_DIMENSION, show_default=True)
@click.pass_context
def train(ctx, data_dir, model_out, epochs, lr, seed, dimension):
    """Train the detector on labeled report directories."""
    import numpy as np

    data_dir = Path(data_dir)
    vectors = []
    labels = []
    for label_name, label in (("benign", 0), ("malicious", 1)):
        for path in sorted((data_dir / label_name).glob("*.json")):
            try:
                report = load_report(path)
            except ReportFormatError as exc:
                _err(f"skipping {path}: {exc}")
                continue
            vectors.append(featurize(report.phases, dimension))
            labels.append(label)
    if not vectors or len(set(labels)) < 2:
        _err("training needs both benign and malicious reports")
        ctx.exit(EXIT_BAD_INPUT)
    X = np.stack(vectors)
    y = np.asarray(labels, dtype=np.float64)
    config = TrainConfig(learning_rate=lr, epochs=epochs, rng_seed=seed)
    model = train_vectors(X, y, config, dimension, hash_seed=0)
    save_model(model, model_out)
    _err(f"trained on {len(y)} reports ({model.trained_on})")
    _err(f"training accuracy: {accuracy(model, X, y):.4f}")
    _err(f"training log-loss: {mean_log_loss(model, X, y):.6f}")
    _err(f"model written to {model_out}")
    ctx.exit(EXIT_OK)


@main.command()
@click.option("--listen", default="127.0.0.1:8000", show_default=True, help="ADDR:PORT to bind")
@click.option("--store", "store_dir", type=click.Path(), required=True)
@click.option("--workers", type=int, default=2, show_default=True)
@click.option("--timeout", type=float, default=10.0, show_default=True, help="default per-phase timeout")
@click.option("--max-upload", type=int, default=64 * 1024 * 1024, show_default=True)
@click.option("--model", "model_file", type=click.Path(), help="model applied to every analysis")
@click.option("--static", "static_dir", type=click.Path(), help="directory with the built dashboard")
def serve(listen, store_dir, workers, timeout, max_upload, model_file, static_dir):
    """Run the job service (and optionally host the dashboard)."""
    import uvicorn

    from .service.app import create_app
    from .service.store import JobStore
    from .service.worker import ServiceConfig, WorkerPool

    host, _, port = listen.rpartition(":")
    host = host or "127.0.0.1"
    config = ServiceConfig(
        worker_count=workers,
        default_timeout_s=timeout,
        max_upload_bytes=max_upload,
        model_path=Path(model_file) if model_file else None,
    )
    store = JobStore(store_dir)
    pool = WorkerPool(store, config)
    pool.start()
    app = create_app(store, config, static_dir=Path(static_dir) if static_dir else None)
    try:
        uvicorn.run(app, host=host, port=int(port or 8000), log_level="warning")
    finally:
        pool.stop()


if __name__ == "__main__":
    main()
