"""Socket and fd lifetime tracking so payloads can be attributed to endpoints.

Builds a per-pid fd table over one event stream: socket() opens an entry,
connect() binds it, dup*/clone alias or inherit it, close() ends it. Lookups
are by (pid, fd, seq) so a use-after-close correctly resolves to nothing.
"""

from __future__ import annotations

import ipaddress
from dataclasses import dataclass, field

from ..strace.values import (
    Aggregate,
    ArgValue,
    CallForm,
    FlagSet,
    Number,
    Ok,
    SyscallEvent,
    Text,
)

_FORK_NAMES = {"clone", "clone3", "fork", "vfork"}
_DUP_NAMES = {"dup", "dup2", "dup3"}


@dataclass(frozen=True)
class Endpoint:
    address: str
    port: int


@dataclass
class SocketInfo:
    protocol: str = "unknown"  # tcp | udp | unknown
    family: str | None = None
    endpoint: Endpoint | None = None


@dataclass
class _Binding:
    info: SocketInfo
    start_seq: int
    end_seq: int | None = None  # None while still open


@dataclass
class SocketTable:
    bindings: dict[tuple[int, int], list[_Binding]] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def _open(self, pid: int, fd: int, info: SocketInfo, seq: int) -> None:
        self._close(pid, fd, seq)
        self.bindings.setdefault((pid, fd), []).append(_Binding(info, seq))

    def _close(self, pid: int, fd: int, seq: int) -> None:
        for binding in self.bindings.get((pid, fd), []):
            if binding.end_seq is None:
                binding.end_seq = seq

    def lookup(self, pid: int, fd: int, seq: int) -> SocketInfo | None:
        """The socket bound to (pid, fd) at stream position seq, if any."""
        for binding in self.bindings.get((pid, fd), []):
            if binding.start_seq <= seq and (binding.end_seq is None or seq < binding.end_seq):
                return binding.info
        return None

    def live_fds(self, pid: int, seq: int) -> dict[int, SocketInfo]:
        out: dict[int, SocketInfo] = {}
        for (bpid, fd), blist in self.bindings.items():
            if bpid != pid:
                continue
            for binding in blist:
                if binding.start_seq <= seq and (binding.end_seq is None or seq < binding.end_seq):
                    out[fd] = binding.info
        return out


def _decode_text(value: Text) -> str:
    return value.data.decode("utf-8", "backslashreplace")


def _flag_names(value: ArgValue | None) -> tuple[str, ...]:
    return value.flags if isinstance(value, FlagSet) else ()


def _int_of(value: ArgValue | None) -> int | None:
    if isinstance(value, Number):
        return value.value
    return None


def _port_of(value: ArgValue | None) -> int | None:
    if isinstance(value, CallForm) and value.func == "htons" and value.args:
        return _int_of(value.args[0])
    return _int_of(value)


def parse_sockaddr(value: ArgValue) -> tuple[str, Endpoint | None] | None:
    """Decode a rendered sockaddr Aggregate.

    Returns (family, endpoint) where endpoint is None for non-IP families,
    or None entirely when the value is not a parseable sockaddr.
    """
    if not isinstance(value, Aggregate):
        return None
    fields = dict(value.fields)
    family_flags = _flag_names(fields.get("sa_family"))
    if not family_flags:
        return None
    family = family_flags[0]
    if family == "AF_INET":
        port = _port_of(fields.get("sin_port"))
        addr = fields.get("sin_addr")
        if isinstance(addr, CallForm) and addr.func == "inet_addr" and addr.args:
            text = addr.args[0]
            if isinstance(text, Text) and port is not None:
                try:
                    canon = str(ipaddress.IPv4Address(_decode_text(text)))
                except ValueError:
                    return family, None
                return family, Endpoint(canon, port)
        return family, None
    if family == "AF_INET6":
        port = _port_of(fields.get("sin6_port"))
        # strace renders the address as a positional inet_pton(...) entry
        addr = next(
            (
                v
                for _, v in value.fields
                if isinstance(v, CallForm) and v.func == "inet_pton" and len(v.args) >= 2
            ),
            None,
        )
        if addr is not None:
            text = addr.args[1]
            if isinstance(text, Text) and port is not None:
                try:
                    canon = str(ipaddress.IPv6Address(_decode_text(text)))
                except ValueError:
                    return family, None
                return family, Endpoint(canon, port)
        return family, None
    return family, None


def _protocol_from_type(value: ArgValue) -> str:
    names = set(_flag_names(value))
    if "SOCK_STREAM" in names:
        return "tcp"
    if "SOCK_DGRAM" in names:
        return "udp"
    return "unknown"


def track_sockets(events: list[SyscallEvent]) -> SocketTable:
    """Single pass over the stream building the fd -> endpoint timeline."""
    table = SocketTable()
    for ev in events:
        name = ev.name
        if name == "socket" and isinstance(ev.ret, Ok) and ev.ret.value >= 0:
            family = _flag_names(ev.args[0])[0] if ev.args and _flag_names(ev.args[0]) else None
            protocol = _protocol_from_type(ev.args[1]) if len(ev.args) > 1 else "unknown"
            table._open(ev.pid, ev.ret.value, SocketInfo(protocol, family), ev.seq)
        elif name == "connect" and len(ev.args) >= 2:
            fd = _int_of(ev.args[0])
            if fd is None:
                continue
            parsed = parse_sockaddr(ev.args[1])
            info = table.lookup(ev.pid, fd, ev.seq)
            if info is None:
                table.notes.append(f"connect on untracked fd {fd} (pid {ev.pid}, seq {ev.seq})")
                if parsed and parsed[1]:
                    info = SocketInfo("unknown", parsed[0], parsed[1])
                    table._open(ev.pid, fd, info, ev.seq)
            elif parsed and parsed[1]:
                info.endpoint = parsed[1]
                info.family = parsed[0]
        elif name in _DUP_NAMES and isinstance(ev.ret, Ok) and ev.ret.value >= 0:
            old = _int_of(ev.args[0]) if ev.args else None
            new = ev.ret.value
            if old is None or old == new:
                continue
            info = table.lookup(ev.pid, old, ev.seq)
            if info is not None:
                table._open(ev.pid, new, info, ev.seq)
        elif name == "close" and ev.args:
            fd = _int_of(ev.args[0])
            if fd is not None:
                table._close(ev.pid, fd, ev.seq)
        elif name in _FORK_NAMES and isinstance(ev.ret, Ok) and ev.ret.value > 0:
            child = ev.ret.value
            for fd, info in table.live_fds(ev.pid, ev.seq).items():
                table._open(child, fd, info, ev.seq)
    return table
