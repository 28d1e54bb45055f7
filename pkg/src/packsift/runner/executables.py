"""Executable inventory of a work tree: what did the install phase drop?"""

from __future__ import annotations

import hashlib
import os
from pathlib import Path


def snapshot_executables(root: str | Path) -> tuple[dict[str, str], list[str]]:
    """Map of path -> content hash for regular files with any execute bit."""
    root = Path(root)
    snapshot: dict[str, str] = {}
    notes: list[str] = []
    for dirpath, _dirnames, filenames in os.walk(root):
        for filename in filenames:
            path = Path(dirpath) / filename
            try:
                st = path.lstat()
                if not os.path.isfile(path) or os.path.islink(path):
                    continue
                if not st.st_mode & 0o111:
                    continue
                digest = hashlib.sha256(path.read_bytes()).hexdigest()
            except OSError as exc:
                notes.append(f"unreadable entry skipped: {path} ({exc})")
                continue
            snapshot[str(path)] = digest
    return snapshot, notes


def diff_new_executables(before: dict[str, str], after: dict[str, str]) -> list[str]:
    """Paths new in `after`, plus paths whose content hash changed; sorted."""
    return sorted(
        path for path, digest in after.items() if before.get(path) != digest
    )
