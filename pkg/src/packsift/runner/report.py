"""BehaviorReport and its schema "1.0" JSON form.

Key names and section sort orders are a wire contract consumed by the CLI,
the job service, and the dashboard; do not rename casually.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone

from ..behavior.records import (
    PHASES,
    CommandRecord,
    DomainRecord,
    FileRecord,
    NetworkEndpoint,
    PhaseReport,
    SyscallStats,
)
from ..rules.model import Alert
from .spec import PackageSpec

REPORT_SCHEMA_VERSION = "1.0"


class ReportFormatError(ValueError):
    """Raised when loading a report document that does not match the schema."""


@dataclass
class Verdict:
    ml_score: float | None = None
    label: str = "unknown"  # benign | malicious | unknown


@dataclass
class BehaviorReport:
    package: PackageSpec
    phases: dict[str, PhaseReport] = field(default_factory=dict)
    alerts: list[Alert] = field(default_factory=list)
    verdict: Verdict = field(default_factory=Verdict)
    created_at: str = ""
    pipeline_notes: list[str] = field(default_factory=list)
    schema_version: str = REPORT_SCHEMA_VERSION


def utc_now_iso() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _phase_to_dict(report: PhaseReport) -> dict:
    return {
        "commands": [
            {
                "program_path": c.program_path,
                "argv": list(c.argv),
                "pid": c.pid,
                "succeeded": c.succeeded,
            }
            for c in report.commands
        ],
        "files": [
            {
                "path": f.path,
                "operations": sorted(f.operations),
                "pids": sorted(f.pids),
            }
            for f in report.files
        ],
        "ips": [
            {"address": e.address, "port": e.port, "protocol": e.protocol}
            for e in report.endpoints
        ],
        "domains": [
            {"name": d.name, "query_type": d.query_type} for d in report.domains
        ],
        "syscalls": dict(report.syscalls.counts),
        "duration_ms": report.duration_ms,
    }


def report_to_dict(report: BehaviorReport) -> dict:
    phases = {
        phase: _phase_to_dict(report.phases[phase])
        for phase in PHASES
        if phase in report.phases
    }
    return {
        "schema_version": report.schema_version,
        "package": {
            "ecosystem": report.package.ecosystem,
            "name": report.package.name,
            "version": report.package.version,
        },
        "phases": phases,
        "alerts": [
            {
                "rule_id": a.rule_id,
                "category": a.category,
                "phase": a.phase,
                "matched_value": a.matched_value,
                "severity": a.severity,
                "position": a.position,
            }
            for a in report.alerts
        ],
        "verdict": {"ml_score": report.verdict.ml_score, "label": report.verdict.label},
        "created_at": report.created_at,
        "pipeline_notes": list(report.pipeline_notes),
    }


def report_to_json(report: BehaviorReport) -> str:
    return json.dumps(report_to_dict(report), indent=2) + "\n"


def _phase_from_dict(name: str, doc: dict) -> PhaseReport:
    try:
        commands = [
            CommandRecord(
                program_path=c["program_path"],
                argv=list(c["argv"]),
                pid=int(c["pid"]),
                succeeded=bool(c["succeeded"]),
                seq=i,
            )
            for i, c in enumerate(doc.get("commands", []))
        ]
        files = [
            FileRecord(path=f["path"], operations=set(f["operations"]), pids=set(f["pids"]))
            for f in doc.get("files", [])
        ]
        endpoints = [
            NetworkEndpoint(
                address=e["address"], port=int(e["port"]), protocol=e["protocol"], first_seq=i
            )
            for i, e in enumerate(doc.get("ips", []))
        ]
        domains = [
            DomainRecord(name=d["name"], query_type=int(d["query_type"]), source_seq=i)
            for i, d in enumerate(doc.get("domains", []))
        ]
        counts = {str(k): int(v) for k, v in doc.get("syscalls", {}).items()}
        return PhaseReport(
            phase=name,
            commands=commands,
            files=files,
            endpoints=endpoints,
            domains=domains,
            syscalls=SyscallStats(counts=counts, total=sum(counts.values())),
            duration_ms=int(doc.get("duration_ms", 0)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ReportFormatError(f"malformed phase {name!r}: {exc}") from exc


def report_from_dict(doc: dict) -> BehaviorReport:
    if not isinstance(doc, dict):
        raise ReportFormatError("report document is not an object")
    if doc.get("schema_version") != REPORT_SCHEMA_VERSION:
        raise ReportFormatError(
            f"unsupported report schema_version {doc.get('schema_version')!r}"
        )
    pkg = doc.get("package") or {}
    try:
        package = PackageSpec(
            ecosystem=pkg.get("ecosystem") or "unknown",
            name=pkg.get("name") or "unknown",
            version=pkg.get("version"),
        )
    except ValueError as exc:
        raise ReportFormatError(f"malformed report package: {exc}") from exc
    phases = {
        name: _phase_from_dict(name, phase_doc)
        for name, phase_doc in (doc.get("phases") or {}).items()
    }
    alerts = [
        Alert(
            rule_id=a["rule_id"],
            category=a["category"],
            phase=a["phase"],
            matched_value=a["matched_value"],
            severity=a["severity"],
            position=int(a["position"]),
        )
        for a in doc.get("alerts", [])
    ]
    verdict_doc = doc.get("verdict") or {}
    verdict = Verdict(
        ml_score=verdict_doc.get("ml_score"), label=verdict_doc.get("label", "unknown")
    )
    return BehaviorReport(
        package=package,
        phases=phases,
        alerts=alerts,
        verdict=verdict,
        created_at=doc.get("created_at", ""),
        pipeline_notes=list(doc.get("pipeline_notes", [])),
    )


def load_report(path) -> BehaviorReport:
    from pathlib import Path

    try:
        doc = json.loads(Path(path).read_text("utf-8"))
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ReportFormatError(f"unreadable report {path}: {exc}") from exc
    return report_from_dict(doc)
