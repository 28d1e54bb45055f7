"""Parser and canonical printer for the rule definition language.

    rule exfil_domain : domain {
      severity = high
      description = "long hex label, likely DNS exfil"
      regex = /[0-9a-f]{24,}/
    }

`#` starts a comment; blank lines are ignored; each match/regex line is
independently sufficient to fire its rule.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import CATEGORIES, SEVERITIES, Rule, RuleSet, is_valid_rule_id
from .redialect import MAX_PATTERN_BYTES, RegexCompileError, compile_pattern


class RuleSyntaxError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass
class _Token:
    kind: str  # ident | string | regex | punct | eof
    value: str
    line: int
    col: int


def _tokenize(source: str) -> list[_Token]:
    tokens: list[_Token] = []
    for line_no, line in enumerate(source.splitlines(), start=1):
        i = 0
        n = len(line)
        while i < n:
            ch = line[i]
            if ch in " \t":
                i += 1
                continue
            if ch == "#":
                break
            col = i + 1
            if ch in "{}:=":
                tokens.append(_Token("punct", ch, line_no, col))
                i += 1
            elif ch == '"':
                value, i = _scan_string(line, i, line_no)
                tokens.append(_Token("string", value, line_no, col))
            elif ch == "/":
                value, i = _scan_regex(line, i, line_no)
                tokens.append(_Token("regex", value, line_no, col))
            elif ch.isalnum() or ch == "_":
                j = i
                while j < n and (line[j].isalnum() or line[j] == "_"):
                    j += 1
                tokens.append(_Token("ident", line[i:j], line_no, col))
                i = j
            else:
                raise RuleSyntaxError(f"unexpected character {ch!r}", line_no, col)
    last_line = source.count("\n") + 1
    tokens.append(_Token("eof", "", last_line, 1))
    return tokens


_STRING_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", '"': '"', "\\": "\\"}


def _scan_string(line: str, start: int, line_no: int) -> tuple[str, int]:
    out: list[str] = []
    i = start + 1
    n = len(line)
    while i < n:
        ch = line[i]
        if ch == "\\":
            if i + 1 >= n:
                raise RuleSyntaxError("dangling backslash in string", line_no, i + 1)
            esc = line[i + 1]
            if esc not in _STRING_ESCAPES:
                raise RuleSyntaxError(f"unknown string escape \\{esc}", line_no, i + 1)
            out.append(_STRING_ESCAPES[esc])
            i += 2
            continue
        if ch == '"':
            return "".join(out), i + 1
        out.append(ch)
        i += 1
    raise RuleSyntaxError("unterminated string", line_no, start + 1)


def _scan_regex(line: str, start: int, line_no: int) -> tuple[str, int]:
    # the pattern text is kept verbatim; \/ stays as written and the
    # dialect treats it as a literal slash
    i = start + 1
    n = len(line)
    while i < n:
        ch = line[i]
        if ch == "\\" and i + 1 < n:
            i += 2
            continue
        if ch == "/":
            return line[start + 1 : i], i + 1
        i += 1
    raise RuleSyntaxError("unterminated regex (missing closing /)", line_no, start + 1)


class _TokenStream:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, kind: str, value: str | None = None, what: str | None = None) -> _Token:
        tok = self.next()
        expected = what or (value if value is not None else kind)
        if tok.kind != kind or (value is not None and tok.value != value):
            shown = tok.value if tok.kind != "eof" else "end of input"
            raise RuleSyntaxError(f"expected {expected}, found {shown!r}", tok.line, tok.col)
        return tok


def parse_ruleset(source: str) -> RuleSet:
    """Parse rule text into a RuleSet with compiled patterns.

    Raises RuleSyntaxError with line/column on any malformation; a ruleset
    is rejected as a whole (no partial application).
    """
    stream = _TokenStream(_tokenize(source))
    rules: list[Rule] = []
    seen: dict[str, int] = {}
    while stream.peek().kind != "eof":
        rule = _parse_rule(stream)
        if rule.id in seen:
            raise RuleSyntaxError(
                f"duplicate rule id {rule.id!r} (first defined at line {seen[rule.id]})",
                rule.line,
                1,
            )
        seen[rule.id] = rule.line
        rules.append(rule)
    return RuleSet(rules=rules)


def _parse_rule(stream: _TokenStream) -> Rule:
    kw = stream.expect("ident", what="'rule'")
    if kw.value != "rule":
        raise RuleSyntaxError(f"expected 'rule', found {kw.value!r}", kw.line, kw.col)
    id_tok = stream.expect("ident", what="rule id")
    if not is_valid_rule_id(id_tok.value):
        raise RuleSyntaxError(f"invalid rule id {id_tok.value!r}", id_tok.line, id_tok.col)
    stream.expect("punct", ":")
    cat_tok = stream.expect("ident", what="category")
    if cat_tok.value not in CATEGORIES:
        raise RuleSyntaxError(
            f"unknown category {cat_tok.value!r}, expected one of {', '.join(CATEGORIES)}",
            cat_tok.line,
            cat_tok.col,
        )
    stream.expect("punct", "{")

    severity: str | None = None
    description = ""
    literals: list[str] = []
    patterns: list[tuple[str, _Token]] = []
    while True:
        tok = stream.next()
        if tok.kind == "punct" and tok.value == "}":
            break
        if tok.kind == "eof":
            raise RuleSyntaxError("unterminated rule block, expected '}'", tok.line, tok.col)
        if tok.kind != "ident":
            raise RuleSyntaxError(f"expected property name, found {tok.value!r}", tok.line, tok.col)
        prop = tok.value
        stream.expect("punct", "=")
        if prop == "severity":
            if severity is not None:
                raise RuleSyntaxError("severity given twice", tok.line, tok.col)
            sev = stream.expect("ident", what="severity level")
            if sev.value not in SEVERITIES:
                raise RuleSyntaxError(
                    f"unknown severity {sev.value!r}, expected one of {', '.join(SEVERITIES)}",
                    sev.line,
                    sev.col,
                )
            severity = sev.value
        elif prop == "description":
            description = stream.expect("string", what="quoted description").value
        elif prop == "match":
            literals.append(stream.expect("string", what="quoted literal").value)
        elif prop == "regex":
            rx = stream.expect("regex", what="/pattern/")
            patterns.append((rx.value, rx))
        else:
            raise RuleSyntaxError(
                f"unknown property {prop!r}, expected severity, description, match, or regex",
                tok.line,
                tok.col,
            )

    if severity is None:
        raise RuleSyntaxError(f"rule {id_tok.value!r} is missing severity", id_tok.line, id_tok.col)
    if not literals and not patterns:
        raise RuleSyntaxError(
            f"rule {id_tok.value!r} needs at least one match or regex line", id_tok.line, id_tok.col
        )

    fold_case = cat_tok.value == "domain"
    compiled = []
    for src, tok in patterns:
        if len(src.encode("utf-8")) > MAX_PATTERN_BYTES:
            raise RuleSyntaxError(f"regex exceeds {MAX_PATTERN_BYTES} bytes", tok.line, tok.col)
        try:
            compiled.append(compile_pattern(src, fold_case=fold_case))
        except RegexCompileError as exc:
            raise RuleSyntaxError(f"bad regex: {exc}", tok.line, tok.col) from exc

    return Rule(
        id=id_tok.value,
        category=cat_tok.value,
        severity=severity,
        description=description,
        literals=tuple(literals),
        patterns=tuple(src for src, _ in patterns),
        line=kw.line,
        compiled=compiled,
    )


def print_ruleset(ruleset: RuleSet) -> str:
    """Canonical text form; parse_ruleset(print_ruleset(rs)) == rs."""
    blocks: list[str] = []
    for rule in ruleset.rules:
        lines = [f"rule {rule.id} : {rule.category} {{"]
        lines.append(f"  severity = {rule.severity}")
        lines.append(f'  description = "{_escape_string(rule.description)}"')
        for lit in rule.literals:
            lines.append(f'  match = "{_escape_string(lit)}"')
        for pat in rule.patterns:
            lines.append(f"  regex = /{pat}/")
        lines.append("}")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + ("\n" if blocks else "")


def _escape_string(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t").replace("\r", "\\r")
