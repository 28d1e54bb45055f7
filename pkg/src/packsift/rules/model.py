"""Rule, RuleSet, and Alert types for the detection rule language."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .redialect import Program

CATEGORIES = ("command", "file", "domain", "ip", "syscall", "any")
SEVERITIES = ("low", "medium", "high")

SEVERITY_RANK = {"low": 0, "medium": 1, "high": 2}

_ID_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def is_valid_rule_id(rule_id: str) -> bool:
    return bool(_ID_RE.match(rule_id))


@dataclass
class Rule:
    id: str
    category: str
    severity: str
    description: str
    literals: tuple[str, ...]
    patterns: tuple[str, ...]  # regex source text as written between slashes
    line: int = field(default=0, compare=False)
    compiled: list[Program] = field(default_factory=list, compare=False, repr=False)


@dataclass
class RuleSet:
    rules: list[Rule] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rules)

    def by_id(self, rule_id: str) -> Rule | None:
        for rule in self.rules:
            if rule.id == rule_id:
                return rule
        return None


@dataclass(frozen=True)
class Alert:
    rule_id: str
    category: str
    phase: str
    matched_value: str
    severity: str
    position: int  # index of the indicator within its sorted section
