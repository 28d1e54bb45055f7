"""Turn one phase's syscall events into the behavioral indicator sections."""

from __future__ import annotations

import ipaddress
from collections import Counter
from dataclasses import dataclass

from ..strace.render import render_arg
from ..strace.values import (
    Aggregate,
    ArgValue,
    Err,
    FlagSet,
    ListVal,
    Number,
    Ok,
    SyscallEvent,
    Text,
)
from .dns import decode_dns_queries
from .records import (
    CommandRecord,
    DomainRecord,
    FileRecord,
    NetworkEndpoint,
    PhaseReport,
    SyscallStats,
)
from .sockets import Endpoint, SocketTable, parse_sockaddr, track_sockets

_EXEC_NAMES = {"execve", "execveat"}
_FORK_NAMES = {"clone", "clone3", "fork", "vfork"}

# syscall name -> (path argument index, operations); openat-family paths sit
# after the dirfd argument
_SIMPLE_FILE_OPS: dict[str, tuple[int, frozenset[str]]] = {
    "creat": (0, frozenset({"create", "write"})),
    "unlink": (0, frozenset({"delete"})),
    "unlinkat": (1, frozenset({"delete"})),
    "stat": (0, frozenset({"stat"})),
    "lstat": (0, frozenset({"stat"})),
    "access": (0, frozenset({"stat"})),
    "fstatat": (1, frozenset({"stat"})),
    "newfstatat": (1, frozenset({"stat"})),
    "statx": (1, frozenset({"stat"})),
    "execve": (0, frozenset({"execute"})),
    "execveat": (1, frozenset({"execute"})),
}

_RENAME_ARGS = {"rename": (0, 1), "renameat": (1, 3), "renameat2": (1, 3)}

DEFAULT_SECTION_CAP = 10_000


@dataclass(frozen=True)
class NoiseFilter:
    """Benign-trace noise dropped from reports; override to keep everything."""

    file_prefixes: tuple[str, ...] = ("/proc/", "/sys/")
    file_exact: tuple[str, ...] = ("/proc", "/sys", "/dev/null", "/etc/ld.so.cache")
    drop_loopback: bool = True  # 127.0.0.0/8 and ::1, unless port 53

    def keep_file(self, path: str) -> bool:
        if path in self.file_exact:
            return False
        return not any(path.startswith(p) for p in self.file_prefixes)

    def keep_endpoint(self, address: str, port: int) -> bool:
        if not self.drop_loopback or port == 53:
            return True
        try:
            return not ipaddress.ip_address(address).is_loopback
        except ValueError:
            return True


KEEP_EVERYTHING = NoiseFilter(file_prefixes=(), file_exact=(), drop_loopback=False)


def _text(value: ArgValue | None) -> str | None:
    if isinstance(value, Text):
        return value.data.decode("utf-8", "backslashreplace")
    return None


def _int_of(value: ArgValue | None) -> int | None:
    return value.value if isinstance(value, Number) else None


def extract_commands(events: list[SyscallEvent]) -> tuple[list[CommandRecord], list[str]]:
    """One record per execve/execveat with a concrete return value."""
    records: list[CommandRecord] = []
    notes: list[str] = []
    for ev in events:
        if ev.name not in _EXEC_NAMES:
            continue
        path_idx, argv_idx = (0, 1) if ev.name == "execve" else (1, 2)
        if not isinstance(ev.ret, (Ok, Err)):
            notes.append(f"{ev.name} with indeterminate return skipped (seq {ev.seq})")
            continue
        program_path = _text(ev.args[path_idx]) if len(ev.args) > path_idx else None
        if program_path is None:
            notes.append(f"{ev.name} with unreadable program path skipped (seq {ev.seq})")
            continue
        argv_val = ev.args[argv_idx] if len(ev.args) > argv_idx else None
        if isinstance(argv_val, ListVal):
            argv = [
                _text(item) if _text(item) is not None else render_arg(item)
                for item in argv_val.items
            ]
            if not argv:
                argv = [program_path]
        else:
            argv = [program_path]
            notes.append(f"{ev.name} argv not a list, using program path (seq {ev.seq})")
        records.append(
            CommandRecord(
                program_path=program_path,
                argv=argv,
                pid=ev.pid,
                succeeded=isinstance(ev.ret, Ok),
                seq=ev.seq,
            )
        )
    return records, notes


def _open_operations(flags: ArgValue | None) -> frozenset[str]:
    names = set(flags.flags) if isinstance(flags, FlagSet) else set()
    ops = {"write"} if ({"O_WRONLY", "O_RDWR"} & names) else {"read"}
    if "O_CREAT" in names:
        ops.add("create")
    return frozenset(ops)


class _CwdTracker:
    """Per-pid working directory from chdir events; inherited across fork."""

    def __init__(self) -> None:
        self.cwd: dict[int, str] = {}

    def feed(self, ev: SyscallEvent) -> None:
        if ev.name == "chdir" and isinstance(ev.ret, Ok) and ev.args:
            path = _text(ev.args[0])
            if path is None:
                return
            if path.startswith("/"):
                self.cwd[ev.pid] = path
            elif ev.pid in self.cwd:
                self.cwd[ev.pid] = self.cwd[ev.pid].rstrip("/") + "/" + path
        elif ev.name in _FORK_NAMES and isinstance(ev.ret, Ok) and ev.ret.value > 0:
            if ev.pid in self.cwd:
                self.cwd[ev.ret.value] = self.cwd[ev.pid]

    def resolve_openat(self, ev: SyscallEvent, path: str) -> tuple[str, str | None]:
        """Join an AT_FDCWD-relative openat path against the tracked cwd."""
        if path.startswith("/"):
            return path, None
        dirfd = ev.args[0] if ev.args else None
        at_cwd = isinstance(dirfd, FlagSet) and "AT_FDCWD" in dirfd.flags
        if not at_cwd:
            return path, f"openat relative to dirfd {render_arg(dirfd) if dirfd else '?'} left unresolved (seq {ev.seq})"
        cwd = self.cwd.get(ev.pid)
        if cwd is None:
            return path, f"openat relative path {path!r} with untracked cwd (seq {ev.seq})"
        return cwd.rstrip("/") + "/" + path, None


def extract_files(events: list[SyscallEvent]) -> tuple[list[FileRecord], list[str]]:
    """Classify file syscalls into per-path operation sets (merged, unsorted)."""
    merged: dict[str, FileRecord] = {}
    notes: list[str] = []
    cwd = _CwdTracker()

    def touch(path: str, ops: frozenset[str], pid: int) -> None:
        rec = merged.get(path)
        if rec is None:
            merged[path] = FileRecord(path=path, operations=set(ops), pids={pid})
        else:
            rec.operations |= ops
            rec.pids.add(pid)

    for ev in events:
        cwd.feed(ev)
        name = ev.name
        if name in ("open", "openat"):
            path_idx, flags_idx = (0, 1) if name == "open" else (1, 2)
            path = _text(ev.args[path_idx]) if len(ev.args) > path_idx else None
            if path is None:
                notes.append(f"{name} with non-text path skipped (seq {ev.seq})")
                continue
            if name == "openat":
                path, note = cwd.resolve_openat(ev, path)
                if note:
                    notes.append(note)
            flags = ev.args[flags_idx] if len(ev.args) > flags_idx else None
            touch(path, _open_operations(flags), ev.pid)
        elif name in _SIMPLE_FILE_OPS:
            idx, ops = _SIMPLE_FILE_OPS[name]
            path = _text(ev.args[idx]) if len(ev.args) > idx else None
            if path is None:
                notes.append(f"{name} with non-text path skipped (seq {ev.seq})")
                continue
            touch(path, ops, ev.pid)
        elif name in _RENAME_ARGS:
            src_idx, dst_idx = _RENAME_ARGS[name]
            for idx in (src_idx, dst_idx):
                path = _text(ev.args[idx]) if len(ev.args) > idx else None
                if path is None:
                    notes.append(f"{name} with non-text path skipped (seq {ev.seq})")
                    continue
                touch(path, frozenset({"rename"}), ev.pid)
    return list(merged.values()), notes


def extract_network(
    events: list[SyscallEvent], table: SocketTable
) -> tuple[list[NetworkEndpoint], list[str]]:
    """Distinct (address, port, protocol) triples from connect/sendto sockaddrs."""
    seen: dict[tuple[str, int, str], NetworkEndpoint] = {}
    notes: list[str] = []
    for ev in events:
        if ev.name == "connect" and len(ev.args) >= 2:
            addr_val = ev.args[1]
        elif ev.name == "sendto" and len(ev.args) >= 5:
            addr_val = ev.args[4]
        else:
            continue
        if not isinstance(addr_val, Aggregate):
            continue  # NULL or similar: a connected send, not an explicit sockaddr
        parsed = parse_sockaddr(addr_val)
        if parsed is None:
            notes.append(f"unparseable sockaddr in {ev.name} (seq {ev.seq})")
            continue
        family, endpoint = parsed
        if endpoint is None:
            if family in ("AF_INET", "AF_INET6"):
                notes.append(f"incomplete {family} sockaddr in {ev.name} (seq {ev.seq})")
            continue  # AF_UNIX and friends are ignored
        fd = _int_of(ev.args[0])
        info = table.lookup(ev.pid, fd, ev.seq) if fd is not None else None
        protocol = info.protocol if info else "unknown"
        key = (endpoint.address, endpoint.port, protocol)
        if key not in seen:
            seen[key] = NetworkEndpoint(endpoint.address, endpoint.port, protocol, ev.seq)
    return list(seen.values()), notes


def _payload_of(ev: SyscallEvent) -> Text | None:
    if ev.name in ("sendto", "write", "send") and len(ev.args) >= 2:
        val = ev.args[1]
        return val if isinstance(val, Text) else None
    if ev.name == "sendmsg" and len(ev.args) >= 2 and isinstance(ev.args[1], Aggregate):
        fields = dict(ev.args[1].fields)
        iov = fields.get("msg_iov")
        if isinstance(iov, ListVal):
            chunks: list[bytes] = []
            for item in iov.items:
                if isinstance(item, Aggregate):
                    base = dict(item.fields).get("iov_base")
                    if isinstance(base, Text):
                        chunks.append(base.data)
            if chunks:
                return Text(b"".join(chunks))
    return None


def _explicit_send_endpoint(ev: SyscallEvent) -> Endpoint | None:
    addr_val = None
    if ev.name == "sendto" and len(ev.args) >= 5:
        addr_val = ev.args[4]
    elif ev.name == "sendmsg" and len(ev.args) >= 2 and isinstance(ev.args[1], Aggregate):
        addr_val = dict(ev.args[1].fields).get("msg_name")
    if not isinstance(addr_val, Aggregate):
        return None
    parsed = parse_sockaddr(addr_val)
    return parsed[1] if parsed else None


def extract_domains(
    events: list[SyscallEvent], table: SocketTable
) -> tuple[list[DomainRecord], list[str]]:
    """DNS question names from payloads sent to port-53 endpoints."""
    seen: dict[tuple[str, int], DomainRecord] = {}
    notes: list[str] = []
    for ev in events:
        if ev.name not in ("sendto", "sendmsg", "write", "send"):
            continue
        payload = _payload_of(ev)
        if payload is None:
            continue
        endpoint = _explicit_send_endpoint(ev)
        if endpoint is None:
            fd = _int_of(ev.args[0]) if ev.args else None
            if fd is None:
                continue
            info = table.lookup(ev.pid, fd, ev.seq)
            if info is None:
                # write() on an untracked fd is the regular-file common case;
                # only socket-specific sends are worth a note
                if ev.name != "write":
                    notes.append(f"{ev.name} on untracked fd {fd} (pid {ev.pid}, seq {ev.seq})")
                continue
            endpoint = info.endpoint
        if endpoint is None or endpoint.port != 53:
            continue
        questions, dns_notes = decode_dns_queries(payload.data)
        notes.extend(f"{n} (seq {ev.seq})" for n in dns_notes)
        for q in questions:
            key = (q.name, q.query_type)
            if key not in seen:
                seen[key] = DomainRecord(q.name, q.query_type, ev.seq)
    return list(seen.values()), notes


def extract_syscall_stats(events: list[SyscallEvent]) -> SyscallStats:
    counts = Counter(ev.name for ev in events)
    return SyscallStats(counts=dict(sorted(counts.items())), total=sum(counts.values()))


def build_phase_report(
    phase: str,
    events: list[SyscallEvent],
    duration_ms: int,
    noise: NoiseFilter = NoiseFilter(),
    section_cap: int = DEFAULT_SECTION_CAP,
) -> PhaseReport:
    """Compose all extractors, apply the noise filter, and fix sort orders."""
    table = track_sockets(events)
    commands, c_notes = extract_commands(events)
    files, f_notes = extract_files(events)
    endpoints, e_notes = extract_network(events, table)
    domains, d_notes = extract_domains(events, table)

    files = [f for f in files if noise.keep_file(f.path)]
    endpoints = [e for e in endpoints if noise.keep_endpoint(e.address, e.port)]

    commands.sort(key=lambda c: c.seq)
    files.sort(key=lambda f: f.path)
    endpoints.sort(key=lambda e: (e.address, e.port))
    domains.sort(key=lambda d: d.name)

    notes = table.notes + c_notes + f_notes + e_notes + d_notes
    sections: list[tuple[str, list]] = [
        ("commands", commands),
        ("files", files),
        ("endpoints", endpoints),
        ("domains", domains),
    ]
    report = PhaseReport(phase=phase, duration_ms=duration_ms)
    for name, items in sections:
        if len(items) > section_cap:
            notes.append(f"{name} truncated to {section_cap} of {len(items)} indicators")
            items = items[:section_cap]
        setattr(report, name, items)
    report.syscalls = extract_syscall_stats(events)
    report.notes = notes
    return report
