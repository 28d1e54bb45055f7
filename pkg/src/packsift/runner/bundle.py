"""Replay bundles: per-phase trace logs plus a manifest, as a dir or tar.gz."""

from __future__ import annotations

import json
import tarfile
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from .spec import PackageSpec

BUNDLE_SCHEMA_VERSION = "1.0"
MANIFEST_NAME = "manifest.json"

_VALID_PHASES = ("install", "import", "execute")


class BundleError(ValueError):
    """Malformed bundle: missing manifest, bad schema, absent trace files."""


@dataclass
class BundlePhase:
    phase: str
    trace_file: str
    exit_status: int
    duration_ms: int
    new_executables: list[str] = field(default_factory=list)


@dataclass
class ReplayBundle:
    package: PackageSpec
    phases: list[BundlePhase]
    root: Path
    schema_version: str = BUNDLE_SCHEMA_VERSION

    def phase(self, name: str) -> BundlePhase | None:
        for entry in self.phases:
            if entry.phase == name:
                return entry
        return None

    def trace_text(self, name: str) -> str:
        entry = self.phase(name)
        if entry is None:
            raise BundleError(f"bundle has no {name!r} phase")
        path = self.root / entry.trace_file
        if not path.is_file():
            raise BundleError(f"bundle trace file missing: {entry.trace_file}")
        return path.read_text("utf-8", errors="backslashreplace")


def load_bundle(path: str | Path) -> ReplayBundle:
    """Load a bundle directory or tar.gz archive; validates the manifest."""
    path = Path(path)
    if not path.exists():
        raise BundleError(f"bundle path does not exist: {path}")
    if path.is_file():
        root = Path(tempfile.mkdtemp(prefix="packsift-bundle-"))
        _safe_extract_tar(path, root)
        # archives may nest everything under one top-level directory
        if not (root / MANIFEST_NAME).is_file():
            subdirs = [p for p in root.iterdir() if p.is_dir()]
            if len(subdirs) == 1 and (subdirs[0] / MANIFEST_NAME).is_file():
                root = subdirs[0]
    else:
        root = path
    manifest_path = root / MANIFEST_NAME
    if not manifest_path.is_file():
        raise BundleError(f"bundle has no {MANIFEST_NAME}: {path}")
    try:
        doc = json.loads(manifest_path.read_text("utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise BundleError(f"malformed bundle manifest: {exc}") from exc
    return _bundle_from_manifest(doc, root)


def _bundle_from_manifest(doc: object, root: Path) -> ReplayBundle:
    if not isinstance(doc, dict):
        raise BundleError("bundle manifest is not an object")
    version = doc.get("schema_version")
    if version != BUNDLE_SCHEMA_VERSION:
        raise BundleError(f"unsupported bundle schema_version {version!r}")
    pkg = doc.get("package")
    if not isinstance(pkg, dict) or "ecosystem" not in pkg:
        raise BundleError("bundle manifest package must have an ecosystem")
    try:
        package = PackageSpec(
            ecosystem=pkg["ecosystem"], name=pkg.get("name"), version=pkg.get("version")
        )
    except ValueError as exc:
        raise BundleError(f"bundle manifest package invalid: {exc}") from exc
    raw_phases = doc.get("phases")
    if not isinstance(raw_phases, list) or not raw_phases:
        raise BundleError("bundle manifest needs a non-empty phases list")
    phases: list[BundlePhase] = []
    for item in raw_phases:
        if not isinstance(item, dict):
            raise BundleError("bundle manifest phase entries must be objects")
        try:
            entry = BundlePhase(
                phase=item["phase"],
                trace_file=item["trace_file"],
                exit_status=int(item.get("exit_status", 0)),
                duration_ms=int(item.get("duration_ms", 0)),
                new_executables=list(item.get("new_executables", [])),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise BundleError(f"bundle manifest phase entry invalid: {exc}") from exc
        if entry.phase not in _VALID_PHASES:
            raise BundleError(f"bundle manifest has unknown phase {entry.phase!r}")
        if any(e.phase == entry.phase for e in phases):
            raise BundleError(f"bundle manifest repeats phase {entry.phase!r}")
        if Path(entry.trace_file).is_absolute() or ".." in Path(entry.trace_file).parts:
            raise BundleError(f"bundle trace_file escapes the bundle: {entry.trace_file!r}")
        phases.append(entry)
    if phases[0].phase != "install":
        raise BundleError("bundle manifest must start with the install phase")
    return ReplayBundle(package=package, phases=phases, root=root)


def write_bundle(
    root: str | Path,
    package: PackageSpec,
    phases: list[tuple[str, str, int, int, list[str]]],
) -> Path:
    """Write a directory bundle; phases are (name, trace_text, exit, ms, new_execs)."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    manifest_phases = []
    for name, trace_text, exit_status, duration_ms, new_execs in phases:
        trace_file = f"{name}.strace"
        (root / trace_file).write_text(trace_text, encoding="utf-8")
        manifest_phases.append(
            {
                "phase": name,
                "trace_file": trace_file,
                "exit_status": exit_status,
                "duration_ms": duration_ms,
                "new_executables": new_execs,
            }
        )
    manifest = {
        "schema_version": BUNDLE_SCHEMA_VERSION,
        "package": {
            "ecosystem": package.ecosystem,
            "name": package.name,
            "version": package.version,
        },
        "phases": manifest_phases,
    }
    (root / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return root


def pack_bundle(bundle_dir: str | Path, archive_path: str | Path) -> Path:
    """Pack a directory bundle into a tar.gz archive."""
    bundle_dir = Path(bundle_dir)
    archive_path = Path(archive_path)
    with tarfile.open(archive_path, "w:gz") as tar:
        for item in sorted(bundle_dir.iterdir()):
            tar.add(item, arcname=item.name)
    return archive_path


def _safe_extract_tar(archive: Path, dest: Path) -> None:
    try:
        with tarfile.open(archive, "r:*") as tar:
            for member in tar.getmembers():
                target = Path(member.name)
                if target.is_absolute() or ".." in target.parts:
                    raise BundleError(f"bundle archive member escapes root: {member.name!r}")
                if not (member.isfile() or member.isdir()):
                    raise BundleError(f"bundle archive member has unsupported type: {member.name!r}")
            tar.extractall(dest)
    except tarfile.TarError as exc:
        raise BundleError(f"unreadable bundle archive {archive}: {exc}") from exc
