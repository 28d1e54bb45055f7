"""Hashed bag-of-tokens featurization of behavior reports."""

from __future__ import annotations

import hashlib
from typing import Mapping

import numpy as np

from ..behavior.records import PhaseReport

DEFAULT_DIMENSION = 4096
MIN_DIMENSION = 16


def token_bucket(token: str, dimension: int, hash_seed: int) -> int:
    """Stable seeded hash of a token into [0, dimension).

    BLAKE2b keyed by the seed: reproducible across processes and platforms,
    unlike the interpreter's salted hash().
    """
    key = (hash_seed & 0xFFFFFFFFFFFFFFFF).to_bytes(8, "little")
    digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8, key=key).digest()
    return int.from_bytes(digest, "big") % dimension


def report_tokens(phases: Mapping[str, PhaseReport]):
    """Yield (token, weight) pairs across all phases of a report."""
    for report in phases.values():
        for cmd in report.commands:
            for part in cmd.argv:
                yield f"cmd:{part}", 1
        for rec in report.files:
            for component in rec.path.split("/"):
                if component:
                    yield f"file:{component}", 1
        for rec in report.domains:
            yield f"dom:{rec.name}", 1
        for rec in report.endpoints:
            yield f"ip:{rec.address}", 1
        for name, count in report.syscalls.counts.items():
            yield f"sys:{name}", count


def featurize(
    phases: Mapping[str, PhaseReport],
    dimension: int = DEFAULT_DIMENSION,
    hash_seed: int = 0,
) -> np.ndarray:
    """Token counts hashed into a fixed-length float vector."""
    if dimension < MIN_DIMENSION:
        raise ValueError(f"dimension must be >= {MIN_DIMENSION}, got {dimension}")
    vec = np.zeros(dimension, dtype=np.float64)
    for token, weight in report_tokens(phases):
        vec[token_bucket(token, dimension, hash_seed)] += weight
    return vec
