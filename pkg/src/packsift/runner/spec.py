"""Analysis inputs: package specs, run configuration, execution backends."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

DEFAULT_PHASE_TIMEOUT_S = 10.0
TIMEOUT_GRACE_MS = 2000

# follow forks, long strings (DNS payloads, command lines), output to file,
# no timestamps (timestamps would break fixture byte-determinism)
DEFAULT_TRACE_FLAGS = ("-f", "-s", "4096")


class ConfigurationError(ValueError):
    """Invalid spec/config: unknown ecosystem, bad backend, missing fields."""


@dataclass
class PackageSpec:
    ecosystem: str
    name: str | None = None
    version: str | None = None
    local_path: Path | None = None

    def __post_init__(self) -> None:
        if self.local_path is not None:
            self.local_path = Path(self.local_path)
        if not self.ecosystem:
            raise ConfigurationError("ecosystem is required")
        if self.name is None and self.local_path is None:
            raise ConfigurationError("either name or local_path is required")


@dataclass
class ReplayBackend:
    """Re-analyze recorded traces from a bundle; the portable test surface."""

    bundle_path: Path

    def __post_init__(self) -> None:
        self.bundle_path = Path(self.bundle_path)


@dataclass
class TracedSubprocessBackend:
    """Run commands under strace on the host. Linux-only, needs strace."""

    strace_binary: str = "strace"


@dataclass
class CommandTemplateBackend:
    """Wrap commands in an operator-supplied sandbox template.

    The template must contain {CMD}; {WORKDIR} and {TRACE_OUT} are also
    substituted. A standalone "{CMD}" element splices the command argv;
    inside a larger element the shell-quoted command string is substituted.
    Without {TRACE_OUT} the wrapper's stdout is taken as the trace text.
    """

    template: tuple[str, ...]

    def __post_init__(self) -> None:
        self.template = tuple(self.template)
        if not any("{CMD}" in part for part in self.template):
            raise ConfigurationError("command template must contain the {CMD} placeholder")


BackendSpec = Union[ReplayBackend, TracedSubprocessBackend, CommandTemplateBackend]


@dataclass
class RunConfig:
    phase_timeout_s: float = DEFAULT_PHASE_TIMEOUT_S
    trace_flags: tuple[str, ...] = DEFAULT_TRACE_FLAGS
    backend: BackendSpec = field(default_factory=TracedSubprocessBackend)
    work_root: Path | None = None

    def __post_init__(self) -> None:
        if self.phase_timeout_s < 1:
            raise ConfigurationError("phase_timeout_s must be >= 1")
        if self.work_root is not None:
            self.work_root = Path(self.work_root)
