"""Codec for strace's C-style quoted string literals."""

from __future__ import annotations

from dataclasses import dataclass

from .values import MAX_TEXT_BYTES

_SIMPLE_ESCAPES = {
    "n": b"\n",
    "t": b"\t",
    "r": b"\r",
    "f": b"\f",
    "v": b"\v",
    "a": b"\a",
    "b": b"\b",
    '"': b'"',
    "'": b"'",
    "\\": b"\\",
}

_REVERSE_ESCAPES = {
    0x0A: b"\\n",
    0x09: b"\\t",
    0x0D: b"\\r",
    0x0C: b"\\f",
    0x0B: b"\\v",
    0x07: b"\\a",
    0x08: b"\\b",
    0x22: b'\\"',
    0x5C: b"\\\\",
}

_OCTAL = "01234567"
_HEX = "0123456789abcdefABCDEF"


@dataclass
class DecodedText:
    data: bytes
    truncated: bool
    problem: str | None = None  # set on malformed escapes or the size cap


def decode_text_literal(literal: str) -> DecodedText:
    """Decode a quoted strace literal (`"..."`, optionally suffixed `...`).

    Never raises: malformed escapes are kept verbatim in the output and
    reported through `problem`; decoded bytes are capped at MAX_TEXT_BYTES.
    """
    s = literal.strip()
    if not s.startswith('"'):
        return DecodedText(b"", False, f"not a string literal: {literal[:40]!r}")
    truncated = False
    if s.endswith("..."):
        truncated = True
        s = s[:-3]
    if len(s) < 2 or not s.endswith('"'):
        return DecodedText(b"", truncated, f"unterminated string literal: {literal[:40]!r}")
    inner = s[1:-1]

    out = bytearray()
    problem = None
    i = 0
    n = len(inner)
    while i < n:
        ch = inner[i]
        if ch != "\\":
            cp = ord(ch)
            if cp > 255:
                out.extend(ch.encode("utf-8"))
            else:
                out.append(cp)
            i += 1
        elif i + 1 >= n:
            problem = problem or "dangling backslash at end of literal"
            out.append(0x5C)
            i += 1
        else:
            nxt = inner[i + 1]
            if nxt in _SIMPLE_ESCAPES:
                out.extend(_SIMPLE_ESCAPES[nxt])
                i += 2
            elif nxt == "x":
                j = i + 2
                digits = ""
                while j < n and len(digits) < 2 and inner[j] in _HEX:
                    digits += inner[j]
                    j += 1
                if not digits:
                    problem = problem or f"\\x escape with no hex digits at offset {i}"
                    out.extend(b"\\x")
                    i += 2
                else:
                    out.append(int(digits, 16))
                    i = j
            elif nxt in _OCTAL:
                j = i + 1
                digits = ""
                while j < n and len(digits) < 3 and inner[j] in _OCTAL:
                    digits += inner[j]
                    j += 1
                val = int(digits, 8)
                if val > 0xFF:
                    problem = problem or f"octal escape \\{digits} out of byte range"
                    out.extend(b"\\" + digits.encode())
                else:
                    out.append(val)
                i = j
            else:
                problem = problem or f"unknown escape \\{nxt} at offset {i}"
                out.append(0x5C)
                out.append(ord(nxt) & 0xFF)
                i += 2
        if len(out) > MAX_TEXT_BYTES:
            problem = problem or "decoded text exceeds 1 MiB cap"
            return DecodedText(bytes(out[:MAX_TEXT_BYTES]), True, problem)
    return DecodedText(bytes(out), truncated, problem)


def encode_text_literal(data: bytes, truncated: bool = False) -> str:
    """Render bytes the way strace would: printable ASCII kept, rest escaped.

    Octal escapes are always 3 digits, so decode(encode(b)) == b holds for
    any byte sequence.
    """
    out = bytearray(b'"')
    for b in data:
        if b in _REVERSE_ESCAPES:
            out.extend(_REVERSE_ESCAPES[b])
        elif 0x20 <= b <= 0x7E:
            out.append(b)
        else:
            out.extend(b"\\%03o" % b)
    out.append(0x22)
    s = out.decode("ascii")
    return s + "..." if truncated else s
