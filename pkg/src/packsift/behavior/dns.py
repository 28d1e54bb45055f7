"""DNS question-section codec (RFC 1035 wire format).

Only the question section is read; compression pointers are rejected there,
and any malformation yields an empty result plus a note, never an exception.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

HEADER_LEN = 12
MAX_LABEL = 63
MAX_NAME = 253


@dataclass(frozen=True)
class DnsQuestion:
    name: str
    query_type: int
    query_class: int = 1


def decode_dns_queries(payload: bytes) -> tuple[list[DnsQuestion], list[str]]:
    """Parse the question section of a DNS message; returns (questions, notes)."""
    if len(payload) < HEADER_LEN:
        return [], [f"dns payload too short ({len(payload)} bytes)"]
    qdcount = struct.unpack_from("!H", payload, 4)[0]
    if qdcount == 0:
        return [], ["dns payload has no questions"]

    questions: list[DnsQuestion] = []
    off = HEADER_LEN
    for _ in range(qdcount):
        labels: list[str] = []
        while True:
            if off >= len(payload):
                return [], ["dns qname runs past end of payload"]
            length = payload[off]
            if length & 0xC0:
                return [], ["dns compression pointer in question section"]
            off += 1
            if length == 0:
                break
            if length > MAX_LABEL:
                return [], [f"dns label length {length} exceeds {MAX_LABEL}"]
            if off + length > len(payload):
                return [], ["dns label runs past end of payload"]
            try:
                labels.append(payload[off : off + length].decode("ascii").lower())
            except UnicodeDecodeError:
                return [], ["dns label is not ascii"]
            off += length
        if not labels:
            return [], ["dns question with empty qname"]
        name = ".".join(labels)
        if len(name) > MAX_NAME:
            return [], [f"dns name length {len(name)} exceeds {MAX_NAME}"]
        if off + 4 > len(payload):
            return [], ["dns question truncated before qtype/qclass"]
        qtype, qclass = struct.unpack_from("!HH", payload, off)
        off += 4
        questions.append(DnsQuestion(name, qtype, qclass))
    return questions, []


def encode_dns_query(
    names: str | list[str] | list[tuple[str, int]],
    qtype: int = 1,
    qclass: int = 1,
    txid: int = 0x1234,
    flags: int = 0x0100,
) -> bytes:
    """Wire-encode a query for one or more names; the inverse of the decoder.

    Accepts a single name, a list of names (shared qtype), or (name, qtype)
    pairs. Used to build fixtures and as the round-trip oracle in tests.
    """
    if isinstance(names, str):
        entries = [(names, qtype)]
    else:
        entries = [(n, qtype) if isinstance(n, str) else (n[0], n[1]) for n in names]
    out = bytearray(struct.pack("!HHHHHH", txid, flags, len(entries), 0, 0, 0))
    for name, qt in entries:
        for label in name.split("."):
            encoded = label.encode("ascii")
            if not 1 <= len(encoded) <= MAX_LABEL:
                raise ValueError(f"bad label {label!r} in {name!r}")
            out.append(len(encoded))
            out.extend(encoded)
        out.append(0)
        out.extend(struct.pack("!HH", qt, qclass))
    return bytes(out)
