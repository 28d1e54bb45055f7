"""Shared test helpers: structural serializers and independent oracles.

Everything here is deliberately simple and separate from the package code:
oracles re-derive expected results by brute force so product paths are
checked against an implementation they do not share.
"""

from __future__ import annotations

import re

from packsift.strace.values import (
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
    RetValue,
    SignalRecord,
    SyscallEvent,
    Text,
    Unknown,
)


# -- structural (de)serialization for golden files -----------------------

def arg_to_jsonable(value: ArgValue) -> dict:
    if isinstance(value, Text):
        return {"t": "text", "hex": value.data.hex(), "truncated": value.truncated}
    if isinstance(value, Number):
        return {"t": "num", "value": value.value, "form": value.form}
    if isinstance(value, FlagSet):
        return {"t": "flags", "flags": list(value.flags)}
    if isinstance(value, Aggregate):
        return {
            "t": "struct",
            "fields": [[k, arg_to_jsonable(v)] for k, v in value.fields],
            "abbreviated": value.abbreviated,
        }
    if isinstance(value, ListVal):
        return {"t": "list", "items": [arg_to_jsonable(v) for v in value.items]}
    if isinstance(value, CallForm):
        return {"t": "call", "func": value.func, "args": [arg_to_jsonable(v) for v in value.args]}
    if isinstance(value, Opaque):
        return {"t": "opaque", "raw": value.raw}
    raise TypeError(f"not an ArgValue: {value!r}")


def ret_to_jsonable(ret: RetValue) -> dict:
    if isinstance(ret, Ok):
        return {"t": "ok", "value": ret.value, "hex": ret.hex_form}
    if isinstance(ret, Err):
        return {"t": "err", "errno": ret.errno_name, "message": ret.message, "value": ret.value}
    if isinstance(ret, Unknown):
        return {"t": "unknown"}
    raise TypeError(f"not a RetValue: {ret!r}")


def event_to_jsonable(event: SyscallEvent) -> dict:
    return {
        "pid": event.pid,
        "name": event.name,
        "args": [arg_to_jsonable(a) for a in event.args],
        "ret": ret_to_jsonable(event.ret),
        "seq": event.seq,
    }


def signal_to_jsonable(record: SignalRecord) -> dict:
    return {"pid": record.pid, "name": record.name, "seq": record.seq}


def exit_to_jsonable(record: ExitRecord) -> dict:
    return {"pid": record.pid, "status": record.status, "signal": record.signal, "seq": record.seq}


# -- brute-force oracles --------------------------------------------------

def pairing_oracle(fragments: list[tuple[int, str, str]]) -> tuple[list[tuple[int, str]], int]:
    """FIFO pairing over (pid, name, kind) fragment descriptors.

    kind is "u" (unfinished) or "r" (resumed). Returns (merged pairs in
    resumed order, orphan count).
    """
    queues: dict[tuple[int, str], list[int]] = {}
    merged: list[tuple[int, str]] = []
    orphans = 0
    for idx, (pid, name, kind) in enumerate(fragments):
        key = (pid, name)
        if kind == "u":
            queues.setdefault(key, []).append(idx)
        else:
            if queues.get(key):
                queues[key].pop(0)
                merged.append((pid, name))
            else:
                orphans += 1
    orphans += sum(len(q) for q in queues.values())
    return merged, orphans


def naive_match(rules: list[dict], indicators: dict[str, list[tuple[str, str, int]]]) -> list[tuple]:
    """Nested-loop matcher over plain dict rules and per-category surfaces.

    rules: {id, category, severity, literals: [...], patterns: [...]}
    indicators: category -> [(phase, text, index)]
    Returns alert tuples (rule_id, category, phase, matched_value, severity,
    position) sorted by the documented order, computed with Python's `re`.
    """
    severity_rank = {"low": 0, "medium": 1, "high": 2}
    phase_rank = {"install": 0, "import": 1, "execute": 2}
    out = []
    for rule in rules:
        if rule["category"] == "any":
            surface = []
            for cat in ("command", "file", "domain", "ip", "syscall"):
                surface.extend(indicators.get(cat, []))
        else:
            surface = indicators.get(rule["category"], [])
        for phase, text, index in surface:
            hit = False
            for lit in rule["literals"]:
                needle = lit.lower() if rule["category"] == "domain" else lit
                if needle in text:
                    hit = True
                    break
            if not hit:
                for pattern in rule["patterns"]:
                    flags = re.ASCII | (re.IGNORECASE if rule["category"] == "domain" else 0)
                    if re.search(pattern, text, flags):
                        hit = True
                        break
            if hit:
                out.append((rule["id"], rule["category"], phase, text, rule["severity"], index))
    out.sort(key=lambda a: (-severity_rank[a[4]], a[0], phase_rank.get(a[2], 3), a[5]))
    return out
