"""Line and stream parsers for strace text output.

Accepts the forms produced by `strace -f -s N -o file` plus optional
`[pid N]` / column pid prefixes and HH:MM:SS timestamps. Parsing is total:
malformed input degrades to TraceDiagnostic records, never exceptions.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, TextIO, Union

from .literal import decode_text_literal
from .values import (
    Aggregate,
    ArgValue,
    CallForm,
    Err,
    ExitRecord,
    FlagSet,
    ListVal,
    Number,
    Ok,
    Opaque,
    ParsedLine,
    ResumedFragment,
    SignalRecord,
    SyscallEvent,
    Text,
    TraceDiagnostic,
    UnfinishedFragment,
    Unknown,
)

_PID_BRACKET_RE = re.compile(r"^\[pid\s+(\d+)\]\s+(.*)$")
_PID_COLUMN_RE = re.compile(r"^(\d+)\s+(.*)$")
_TIMESTAMP_RE = re.compile(r"^\d{2}:\d{2}:\d{2}(?:\.\d{1,9})?\s+(.*)$")

_SIGNAL_RE = re.compile(r"^--- (?:stopped by )?(SIG[A-Z0-9]+)\s*(.*?)\s*---$")
_EXITED_RE = re.compile(r"^\+\+\+ exited with (-?\d+) \+\+\+$")
_KILLED_RE = re.compile(r"^\+\+\+ killed by (SIG[A-Z0-9]+)(?: \(core dumped\))? \+\+\+$")
_RESUMED_RE = re.compile(r"^<\.\.\. ([a-z_][a-z0-9_]*) resumed>(.*)$")
_UNFINISHED_RE = re.compile(r"^([a-z_][a-z0-9_]*)\((.*)<unfinished \.\.\.>\s*$")
_CALL_RE = re.compile(r"^([a-z_][a-z0-9_]*)\((.*)$", re.DOTALL)

_HEX_RE = re.compile(r"^-?0x[0-9a-fA-F]+$")
_DEC_RE = re.compile(r"^-?\d+$")
_IDENT_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_FIELD_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)=(.*)$", re.DOTALL)
_CALLFORM_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\((.*)\)$", re.DOTALL)
_ERRNO_RE = re.compile(r"^(E[A-Z0-9]+)\b\s*(.*)$")
_COMMENT_RE = re.compile(r"\s*/\*.*?\*/")

_OPENERS = {"(": ")", "[": "]", "{": "}"}
_CLOSERS = {")", "]", "}"}


def _scan_string(s: str, start: int) -> int:
    """Return the index just past the closing quote of the literal at start."""
    i = start + 1
    n = len(s)
    while i < n:
        c = s[i]
        if c == "\\":
            i += 2
            continue
        if c == '"':
            return i + 1
        i += 1
    return n  # unterminated; caller copes


def _find_close(s: str, depth: int = 1) -> int:
    """Index of the paren that drops nesting to zero, or -1. Starts inside a `(`."""
    i = 0
    n = len(s)
    while i < n:
        c = s[i]
        if c == '"':
            i = _scan_string(s, i)
            continue
        if c in _OPENERS:
            depth += 1
        elif c in _CLOSERS:
            depth -= 1
            if depth == 0:
                return i
        i += 1
    return -1


def _split_top(s: str) -> list[str]:
    """Split on commas at nesting depth zero, preserving chunk text verbatim."""
    chunks: list[str] = []
    depth = 0
    i = 0
    start = 0
    n = len(s)
    while i < n:
        c = s[i]
        if c == '"':
            i = _scan_string(s, i)
            continue
        if c in _OPENERS:
            depth += 1
        elif c in _CLOSERS:
            depth -= 1
        elif c == "," and depth == 0:
            chunks.append(s[start:i])
            start = i + 1
        i += 1
    chunks.append(s[start:])
    return chunks


def _strip_comments(s: str) -> str:
    return _COMMENT_RE.sub("", s)


class _DiagSink:
    """Collects bad_escape diagnostics raised while decoding argument literals."""

    def __init__(self, line_no: int, out: list[TraceDiagnostic] | None):
        self.line_no = line_no
        self.out = out

    def bad_escape(self, detail: str) -> None:
        if self.out is not None:
            self.out.append(TraceDiagnostic(self.line_no, "bad_escape", detail))


def _parse_arg(chunk: str, sink: _DiagSink) -> ArgValue:
    raw = chunk.strip()
    if not raw:
        return Opaque("")
    s = _strip_comments(raw).strip()
    if not s:
        return Opaque(raw)

    if s.startswith('"'):
        end = _scan_string(s, 0)
        rest = s[end:]
        if rest == "..." or rest == "":
            decoded = decode_text_literal(s)
            if decoded.problem:
                sink.bad_escape(decoded.problem)
            return Text(decoded.data, decoded.truncated)
        return Opaque(raw)

    if s.startswith("{"):
        if not s.endswith("}"):
            return Opaque(raw)
        return _parse_aggregate(s[1:-1], raw, sink)

    if s.startswith("["):
        if not s.endswith("]"):
            return Opaque(raw)
        inner = s[1:-1].strip()
        if not inner:
            return ListVal(())
        items = tuple(_parse_arg(c, sink) for c in _split_top(inner))
        return ListVal(items)

    if _HEX_RE.match(s):
        return Number(int(s, 16), "hex")
    if _DEC_RE.match(s):
        body = s.lstrip("-")
        if len(body) > 1 and body[0] == "0" and all(ch in "01234567" for ch in body):
            return Number(int(s, 8), "oct")
        return Number(int(s, 10), "dec")

    m = _CALLFORM_RE.match(s)
    if m and _find_close(s[m.start(2):]) == len(s) - m.start(2) - 1:
        inner = m.group(2).strip()
        args = tuple(_parse_arg(c, sink) for c in _split_top(inner)) if inner else ()
        return CallForm(m.group(1), args)

    parts = [p.strip() for p in s.split("|")]
    if parts and all(p and (_IDENT_RE.match(p) or _DEC_RE.match(p) or _HEX_RE.match(p)) for p in parts):
        if any(_IDENT_RE.match(p) for p in parts):
            return FlagSet(tuple(parts))

    return Opaque(raw)


def _parse_aggregate(inner: str, raw: str, sink: _DiagSink) -> ArgValue:
    fields: list[tuple[str, ArgValue]] = []
    abbreviated = False
    inner = inner.strip()
    if not inner:
        return Aggregate((), abbreviated=False)
    chunks = _split_top(inner)
    for idx, chunk in enumerate(chunks):
        c = chunk.strip()
        if c == "...":
            if idx == len(chunks) - 1:
                abbreviated = True
                continue
            return Opaque(raw)
        m = _FIELD_RE.match(c)
        if m:
            fields.append((m.group(1), _parse_arg(m.group(2), sink)))
        else:
            # positional entry, e.g. strace's inet_pton(...) inside sockaddr_in6
            fields.append(("", _parse_arg(c, sink)))
    return Aggregate(tuple(fields), abbreviated=abbreviated)


def _parse_ret(after: str) -> Union[Ok, Err, Unknown, None]:
    s = after.strip()
    if not s.startswith("="):
        return None
    s = s[1:].strip()
    if not s:
        return None
    if s.startswith("?"):
        return Unknown()
    m = re.match(r"^(-?0x[0-9a-fA-F]+|-?\d+)\s*(.*)$", s, re.DOTALL)
    if not m:
        return None
    tok, rest = m.group(1), m.group(2)
    if "x" in tok:
        value, hex_form = int(tok, 16), True
    else:
        value, hex_form = int(tok, 10), False
    em = _ERRNO_RE.match(rest)
    if em:
        msg = ""
        mm = re.match(r"^\(([^)]*)\)", em.group(2))
        if mm:
            msg = mm.group(1)
        return Err(em.group(1), msg, value)
    # trailing annotations like "(flags O_RDONLY)" or "<0.000123>" are tolerated
    return Ok(value, hex_form)


def _split_prefix(s: str) -> tuple[int | None, str]:
    pid = None
    m = _PID_BRACKET_RE.match(s)
    if m:
        pid = int(m.group(1))
        s = m.group(2)
    else:
        m = _PID_COLUMN_RE.match(s)
        if m:
            pid = int(m.group(1))
            s = m.group(2)
    m = _TIMESTAMP_RE.match(s)
    if m:
        s = m.group(1)
    return pid, s


def _parse_call_body(
    pid: int, body: str, raw: str, line_no: int, sink: _DiagSink
) -> SyscallEvent | TraceDiagnostic:
    m = _CALL_RE.match(body)
    if not m:
        return TraceDiagnostic(line_no, "unparsed_line", f"unrecognized line: {body[:80]!r}")
    name, remainder = m.group(1), m.group(2)
    close = _find_close(remainder)
    if close < 0:
        return TraceDiagnostic(line_no, "unparsed_line", f"unbalanced parentheses: {body[:80]!r}")
    args_text = remainder[:close]
    ret = _parse_ret(remainder[close + 1 :])
    if ret is None:
        return TraceDiagnostic(
            line_no, "unparsed_line", f"missing or malformed return value: {body[:80]!r}"
        )
    if args_text.strip():
        args = tuple(_parse_arg(c, sink) for c in _split_top(args_text))
    else:
        args = ()
    return SyscallEvent(pid=pid, name=name, args=args, ret=ret, raw=raw, seq=line_no)


def parse_line(
    line: str,
    line_no: int,
    diagnostics: list[TraceDiagnostic] | None = None,
    pid_hint: int = 1,
) -> ParsedLine:
    """Classify one strace line. Classification is total; never raises.

    `diagnostics`, when given, collects bad_escape diagnostics for string
    arguments that decoded with problems (the line itself still parses).
    """
    raw = line.rstrip("\r\n")
    s = raw.strip()
    if not s:
        return TraceDiagnostic(line_no, "unparsed_line", "empty line")

    pid, body = _split_prefix(s)
    if pid is None:
        pid = pid_hint
    sink = _DiagSink(line_no, diagnostics)

    if body.startswith("---"):
        m = _SIGNAL_RE.match(body)
        if m:
            return SignalRecord(pid=pid, name=m.group(1), detail=m.group(2), raw=raw, seq=line_no)
        return TraceDiagnostic(line_no, "unparsed_line", f"unrecognized signal line: {body[:80]!r}")

    if body.startswith("+++"):
        m = _EXITED_RE.match(body)
        if m:
            return ExitRecord(pid=pid, status=int(m.group(1)), signal=None, raw=raw, seq=line_no)
        m = _KILLED_RE.match(body)
        if m:
            return ExitRecord(pid=pid, status=None, signal=m.group(1), raw=raw, seq=line_no)
        return TraceDiagnostic(line_no, "unparsed_line", f"unrecognized exit line: {body[:80]!r}")

    m = _RESUMED_RE.match(body)
    if m:
        return ResumedFragment(pid=pid, name=m.group(1), rest=m.group(2), raw=raw, line_no=line_no)

    m = _UNFINISHED_RE.match(body)
    if m:
        return UnfinishedFragment(
            pid=pid, name=m.group(1), args_prefix=m.group(2), raw=raw, line_no=line_no
        )

    return _parse_call_body(pid, body, raw, line_no, sink)


@dataclass
class ParseResult:
    events: list[SyscallEvent] = field(default_factory=list)
    signals: list[SignalRecord] = field(default_factory=list)
    exits: list[ExitRecord] = field(default_factory=list)
    diagnostics: list[TraceDiagnostic] = field(default_factory=list)


def parse_stream(source: Union[str, TextIO, Iterable[str]], pid_hint: int = 1) -> ParseResult:
    """Parse a whole trace, pairing unfinished/resumed fragments per (pid, name).

    Pairing is FIFO per key; the merged event sits at the resumed line's
    position. Unpaired fragments at end of stream become orphan diagnostics.
    """
    if isinstance(source, str):
        lines: Iterable[str] = source.splitlines()
    else:
        lines = source

    result = ParseResult()
    pending: dict[tuple[int, str], deque[UnfinishedFragment]] = {}

    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        parsed = parse_line(line, line_no, result.diagnostics, pid_hint)
        if isinstance(parsed, SyscallEvent):
            result.events.append(parsed)
        elif isinstance(parsed, SignalRecord):
            result.signals.append(parsed)
        elif isinstance(parsed, ExitRecord):
            result.exits.append(parsed)
        elif isinstance(parsed, TraceDiagnostic):
            result.diagnostics.append(parsed)
        elif isinstance(parsed, UnfinishedFragment):
            pending.setdefault((parsed.pid, parsed.name), deque()).append(parsed)
        elif isinstance(parsed, ResumedFragment):
            queue = pending.get((parsed.pid, parsed.name))
            if not queue:
                result.diagnostics.append(
                    TraceDiagnostic(
                        line_no,
                        "orphan_resumed",
                        f"resumed {parsed.name} for pid {parsed.pid} with no unfinished fragment",
                    )
                )
                continue
            frag = queue.popleft()
            body = f"{parsed.name}({frag.args_prefix}{parsed.rest.lstrip()}"
            sink = _DiagSink(line_no, result.diagnostics)
            merged = _parse_call_body(
                parsed.pid, body, f"{frag.raw}\n{parsed.raw}", line_no, sink
            )
            if isinstance(merged, SyscallEvent):
                result.events.append(merged)
            else:
                result.diagnostics.append(merged)

    leftovers = sorted(
        (frag for queue in pending.values() for frag in queue), key=lambda f: f.line_no
    )
    for frag in leftovers:
        result.diagnostics.append(
            TraceDiagnostic(
                frag.line_no,
                "orphan_unfinished",
                f"unfinished {frag.name} for pid {frag.pid} never resumed",
            )
        )
    return result
