"""Structured values for parsed strace output: arguments, return values, records."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

MAX_TEXT_BYTES = 1 << 20  # decoded Text cap per argument


@dataclass(frozen=True)
class Text:
    """A decoded C string literal; truncated=True when strace cut it off with `...`."""

    data: bytes
    truncated: bool = False


@dataclass(frozen=True)
class Number:
    value: int
    form: str = "dec"  # dec | hex | oct, the source rendering


@dataclass(frozen=True)
class FlagSet:
    """Ordered `A|B|C` flag names; single identifiers are one-element sets."""

    flags: tuple[str, ...]


@dataclass(frozen=True)
class Aggregate:
    """`{field=value, ...}` struct rendering; abbreviated=True when strace elided fields."""

    fields: tuple[tuple[str, "ArgValue"], ...]
    abbreviated: bool = False


@dataclass(frozen=True)
class ListVal:
    items: tuple["ArgValue", ...]


@dataclass(frozen=True)
class CallForm:
    """Function-call rendering such as htons(443) or inet_addr("1.2.3.4")."""

    func: str
    args: tuple["ArgValue", ...]


@dataclass(frozen=True)
class Opaque:
    """Lossless fallback: raw argument text kept verbatim."""

    raw: str


ArgValue = Union[Text, Number, FlagSet, Aggregate, ListVal, CallForm, Opaque]


@dataclass(frozen=True)
class Ok:
    value: int
    hex_form: bool = False


@dataclass(frozen=True)
class Err:
    errno_name: str
    message: str = ""
    value: int = -1


@dataclass(frozen=True)
class Unknown:
    pass


RetValue = Union[Ok, Err, Unknown]


@dataclass
class SyscallEvent:
    pid: int
    name: str
    args: tuple[ArgValue, ...]
    ret: RetValue
    raw: str
    seq: int


@dataclass
class SignalRecord:
    pid: int
    name: str
    detail: str
    raw: str
    seq: int


@dataclass
class ExitRecord:
    pid: int
    status: int | None  # None when killed by signal
    signal: str | None
    raw: str
    seq: int


@dataclass
class TraceDiagnostic:
    line_no: int
    kind: str  # unparsed_line | orphan_resumed | orphan_unfinished | bad_escape
    detail: str


@dataclass
class UnfinishedFragment:
    """First half of a split call; args_prefix is the raw text before `<unfinished ...>`."""

    pid: int
    name: str
    args_prefix: str
    raw: str
    line_no: int


@dataclass
class ResumedFragment:
    """Second half of a split call; rest is everything after `resumed>`."""

    pid: int
    name: str
    rest: str
    raw: str
    line_no: int


ParsedLine = Union[
    SyscallEvent,
    UnfinishedFragment,
    ResumedFragment,
    SignalRecord,
    ExitRecord,
    TraceDiagnostic,
]


def same_structure(a: SyscallEvent, b: SyscallEvent) -> bool:
    """Structural equality ignoring raw text and stream position."""
    return (
        a.pid == b.pid and a.name == b.name and a.args == b.args and a.ret == b.ret
    )
