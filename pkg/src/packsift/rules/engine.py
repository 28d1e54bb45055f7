"""Matching of parsed rules against report indicator surfaces."""

from __future__ import annotations

from typing import Iterable, Mapping

from ..behavior.records import PHASES, PhaseReport
from .model import CATEGORIES, SEVERITY_RANK, Alert, Rule, RuleSet

_PHASE_RANK = {phase: i for i, phase in enumerate(PHASES)}


def _phase_order(phases: Mapping[str, PhaseReport]) -> list[str]:
    return sorted(phases.keys(), key=lambda p: _PHASE_RANK.get(p, len(_PHASE_RANK)))


def command_surface(program_path: str, argv: Iterable[str]) -> str:
    return " ".join([program_path, *argv])


def indicator_strings(
    phases: Mapping[str, PhaseReport], category: str
) -> list[tuple[str, str, int]]:
    """The (phase, text, section index) match surface for one category.

    `any` is the union of all categories in their canonical order; each
    entry keeps the index it has within its own sorted section.
    """
    if category == "any":
        out: list[tuple[str, str, int]] = []
        for cat in CATEGORIES:
            if cat != "any":
                out.extend(indicator_strings(phases, cat))
        return out

    out = []
    for phase in _phase_order(phases):
        report = phases[phase]
        if category == "command":
            for i, cmd in enumerate(report.commands):
                out.append((phase, command_surface(cmd.program_path, cmd.argv), i))
        elif category == "file":
            for i, rec in enumerate(report.files):
                out.append((phase, rec.path, i))
        elif category == "domain":
            for i, rec in enumerate(report.domains):
                out.append((phase, rec.name, i))
        elif category == "ip":
            for i, rec in enumerate(report.endpoints):
                out.append((phase, f"{rec.address}:{rec.port}", i))
        elif category == "syscall":
            for i, name in enumerate(report.syscalls.counts):
                out.append((phase, name, i))
        else:
            raise ValueError(f"unknown category {category!r}")
    return out


def rule_matches(rule: Rule, text: str) -> bool:
    """Any-of semantics: each match/regex line alone can fire the rule."""
    for lit in rule.literals:
        needle = lit.lower() if rule.category == "domain" else lit
        if needle in text:
            return True
    return any(prog.search(text) for prog in rule.compiled)


def match_report(phases: Mapping[str, PhaseReport], ruleset: RuleSet) -> list[Alert]:
    """One alert per (rule, matching indicator) pair, in the documented order."""
    alerts: list[Alert] = []
    for rule in ruleset.rules:
        for phase, text, index in indicator_strings(phases, rule.category):
            if rule_matches(rule, text):
                alerts.append(
                    Alert(
                        rule_id=rule.id,
                        category=rule.category,
                        phase=phase,
                        matched_value=text,
                        severity=rule.severity,
                        position=index,
                    )
                )
    alerts.sort(key=alert_sort_key)
    return alerts


def alert_sort_key(alert: Alert) -> tuple:
    return (
        -SEVERITY_RANK[alert.severity],
        alert.rule_id,
        _PHASE_RANK.get(alert.phase, len(_PHASE_RANK)),
        alert.position,
    )
