"""Per-ecosystem install/import command templates and phase planning."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from .spec import ConfigurationError, PackageSpec


@dataclass
class PhasePlan:
    phase: str  # install | import | execute
    argv: list[str] | None  # None for the dynamic execute phase
    dynamic: bool = False  # execute commands resolved after install


@dataclass
class Adapter:
    ecosystem: str
    install_argv: Callable[[PackageSpec, Path], list[str]]
    import_argv: Callable[[PackageSpec], list[str]] | None = None  # library ecosystems only
    execute_argv: Callable[[PackageSpec, Path], list[str]] | None = None  # static execute


def _requirement(spec: PackageSpec, sep: str) -> str:
    if spec.local_path is not None:
        return str(spec.local_path)
    return f"{spec.name}{sep}{spec.version}" if spec.version else str(spec.name)


def _pypi_install(spec: PackageSpec, workdir: Path) -> list[str]:
    return ["python3", "-m", "pip", "install", "--no-input", _requirement(spec, "==")]


def _pypi_import(spec: PackageSpec) -> list[str]:
    module = (spec.name or "").replace("-", "_")
    return ["python3", "-c", f"import {module}"]


def _npm_install(spec: PackageSpec, workdir: Path) -> list[str]:
    return ["npm", "install", "--no-audit", "--no-fund", _requirement(spec, "@")]


def _npm_import(spec: PackageSpec) -> list[str]:
    return ["node", "-e", f"require('{spec.name}')"]


def _gem_install(spec: PackageSpec, workdir: Path) -> list[str]:
    argv = ["gem", "install", str(spec.local_path or spec.name)]
    if spec.version:
        argv += ["-v", spec.version]
    return argv


def _gem_import(spec: PackageSpec) -> list[str]:
    return ["ruby", "-e", f"require '{spec.name}'"]


def _apk_install(spec: PackageSpec, workdir: Path) -> list[str]:
    if spec.local_path is not None:
        return ["apk", "add", "--allow-untrusted", str(spec.local_path)]
    return ["apk", "add", _requirement(spec, "=")]


def _maven_install(spec: PackageSpec, workdir: Path) -> list[str]:
    artifact = f"{spec.name}:{spec.version}" if spec.version else str(spec.name)
    return ["mvn", "-q", "dependency:get", f"-Dartifact={artifact}"]


def _archive_install(spec: PackageSpec, workdir: Path) -> list[str]:
    return ["tar", "-xf", str(spec.local_path), "-C", str(workdir)]


def _script_install(spec: PackageSpec, workdir: Path) -> list[str]:
    return ["cp", str(spec.local_path), str(workdir)]


def _script_execute(spec: PackageSpec, workdir: Path) -> list[str]:
    return ["sh", str(workdir / Path(spec.local_path or "sample").name)]


BUILTIN_ADAPTERS: dict[str, Adapter] = {
    "pypi": Adapter("pypi", _pypi_install, _pypi_import),
    "npm": Adapter("npm", _npm_install, _npm_import),
    "rubygems": Adapter("rubygems", _gem_install, _gem_import),
    "apk": Adapter("apk", _apk_install),
    "maven": Adapter("maven", _maven_install),
    "archive": Adapter("archive", _archive_install),
    "script": Adapter("script", _script_install, execute_argv=_script_execute),
}


def plan_phases(
    spec: PackageSpec,
    workdir: Path,
    adapters: dict[str, Adapter] | None = None,
) -> list[PhasePlan]:
    """Ordered phase plan for a spec: install, optional import, execute."""
    registry = BUILTIN_ADAPTERS if adapters is None else adapters
    adapter = registry.get(spec.ecosystem)
    if adapter is None:
        known = ", ".join(sorted(registry))
        raise ConfigurationError(
            f"no adapter for ecosystem {spec.ecosystem!r}; known ecosystems: {known}"
        )
    plans = [PhasePlan("install", adapter.install_argv(spec, workdir))]
    if adapter.import_argv is not None:
        plans.append(PhasePlan("import", adapter.import_argv(spec)))
    if adapter.execute_argv is not None:
        plans.append(PhasePlan("execute", adapter.execute_argv(spec, workdir)))
    else:
        plans.append(PhasePlan("execute", None, dynamic=True))
    return plans
