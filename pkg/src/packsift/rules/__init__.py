"""Rule language parsing and report matching."""

from importlib import resources

from .engine import alert_sort_key, command_surface, indicator_strings, match_report, rule_matches
from .model import CATEGORIES, SEVERITIES, SEVERITY_RANK, Alert, Rule, RuleSet
from .parser import RuleSyntaxError, parse_ruleset, print_ruleset
from .redialect import MAX_PATTERN_BYTES, Program, RegexCompileError, compile_pattern


def default_ruleset_source() -> str:
    return resources.files(__package__).joinpath("default.rules").read_text("utf-8")


def default_ruleset() -> RuleSet:
    return parse_ruleset(default_ruleset_source())


__all__ = [
    "CATEGORIES",
    "MAX_PATTERN_BYTES",
    "SEVERITIES",
    "SEVERITY_RANK",
    "Alert",
    "Program",
    "RegexCompileError",
    "Rule",
    "RuleSet",
    "RuleSyntaxError",
    "alert_sort_key",
    "command_surface",
    "compile_pattern",
    "default_ruleset",
    "default_ruleset_source",
    "indicator_strings",
    "match_report",
    "parse_ruleset",
    "print_ruleset",
    "rule_matches",
]
