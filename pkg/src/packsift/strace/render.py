"""Canonical text rendering of parsed events, the inverse of the parser.

Used to build deterministic fixtures and to check parse/render idempotence.
"""

from __future__ import annotations

from .literal import encode_text_literal
from .values import (
    Aggregate,
    ArgValue,
    CallForm,
    Err,
    FlagSet,
    ListVal,
    Number,
    Ok,
    Opaque,
    RetValue,
    SyscallEvent,
    Text,
    Unknown,
)


def render_arg(value: ArgValue) -> str:
    if isinstance(value, Text):
        return encode_text_literal(value.data, value.truncated)
    if isinstance(value, Number):
        if value.form == "hex":
            return ("-0x%x" % -value.value) if value.value < 0 else ("0x%x" % value.value)
        if value.form == "oct":
            return ("-0%o" % -value.value) if value.value < 0 else ("0%o" % value.value)
        return str(value.value)
    if isinstance(value, FlagSet):
        return "|".join(value.flags)
    if isinstance(value, Aggregate):
        parts = [
            f"{name}={render_arg(v)}" if name else render_arg(v) for name, v in value.fields
        ]
        if value.abbreviated:
            parts.append("...")
        return "{" + ", ".join(parts) + "}"
    if isinstance(value, ListVal):
        return "[" + ", ".join(render_arg(v) for v in value.items) + "]"
    if isinstance(value, CallForm):
        return f"{value.func}(" + ", ".join(render_arg(v) for v in value.args) + ")"
    if isinstance(value, Opaque):
        return value.raw
    raise TypeError(f"not an ArgValue: {value!r}")


def render_ret(ret: RetValue) -> str:
    if isinstance(ret, Ok):
        if ret.hex_form:
            return ("-0x%x" % -ret.value) if ret.value < 0 else ("0x%x" % ret.value)
        return str(ret.value)
    if isinstance(ret, Err):
        if ret.message:
            return f"{ret.value} {ret.errno_name} ({ret.message})"
        return f"{ret.value} {ret.errno_name}"
    if isinstance(ret, Unknown):
        return "?"
    raise TypeError(f"not a RetValue: {ret!r}")


def render_event(event: SyscallEvent, pid_prefix: bool = True) -> str:
    call = f"{event.name}(" + ", ".join(render_arg(a) for a in event.args) + f") = {render_ret(event.ret)}"
    if pid_prefix:
        return f"[pid {event.pid}] {call}"
    return call
