"""Indicator record types: the five feature classes plus the per-phase report."""

from __future__ import annotations

from dataclasses import dataclass, field

PHASES = ("install", "import", "execute")

FILE_OPERATIONS = ("read", "write", "create", "delete", "rename", "stat", "execute")


@dataclass
class CommandRecord:
    program_path: str
    argv: list[str]
    pid: int
    succeeded: bool
    seq: int = 0  # event position, used only for ordering


@dataclass
class FileRecord:
    path: str
    operations: set[str]
    pids: set[int]


@dataclass
class NetworkEndpoint:
    address: str
    port: int
    protocol: str  # tcp | udp | unknown
    first_seq: int


@dataclass
class DomainRecord:
    name: str  # dot-joined labels, lowercased
    query_type: int
    source_seq: int


@dataclass
class SyscallStats:
    counts: dict[str, int] = field(default_factory=dict)
    total: int = 0


@dataclass
class PhaseReport:
    phase: str
    commands: list[CommandRecord] = field(default_factory=list)
    files: list[FileRecord] = field(default_factory=list)
    endpoints: list[NetworkEndpoint] = field(default_factory=list)
    domains: list[DomainRecord] = field(default_factory=list)
    syscalls: SyscallStats = field(default_factory=SyscallStats)
    duration_ms: int = 0
    notes: list[str] = field(default_factory=list)  # surfaced via report pipeline_notes
