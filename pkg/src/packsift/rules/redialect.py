"""A small regular-expression dialect with worst-case linear matching.

Compiles to a Thompson NFA simulated Pike-VM style, so match time is
O(len(text) * states) regardless of the pattern — indicator text is
attacker-influenced and must not be able to trigger backtracking blowups.

Dialect: literals, `.`, escapes (\\d \\w \\s and negations, \\n \\t \\r \\f
\\v, \\xNN, escaped metacharacters), classes `[...]` / `[^...]` with ranges,
groups `(...)` / `(?:...)`, alternation `|`, quantifiers `* + ? {m} {m,}
{m,n}` (an extra trailing `?` is accepted and ignored — laziness does not
change whether a match exists), anchors `^` `$`. No backreferences. Negated
escape classes are not allowed inside `[...]`.
"""

from __future__ import annotations

from dataclasses import dataclass

MAX_PATTERN_BYTES = 1024
MAX_REPEAT = 512
MAX_STATES = 50_000

_DIGITS = frozenset(range(ord("0"), ord("9") + 1))
_WORD = frozenset(
    list(range(ord("a"), ord("z") + 1))
    + list(range(ord("A"), ord("Z") + 1))
    + list(range(ord("0"), ord("9") + 1))
    + [ord("_")]
)
_SPACE = frozenset(map(ord, " \t\n\r\f\v"))

_CLASS_ESCAPES = {"d": _DIGITS, "w": _WORD, "s": _SPACE}
_NEGATED_ESCAPES = {"D": _DIGITS, "W": _WORD, "S": _SPACE}
_CHAR_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "f": "\f", "v": "\v", "0": "\0", "a": "\a", "b": "\b"}
_METACHARS = set("\\^$.|?*+()[]{}/-")


class RegexCompileError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at pattern offset {position})")
        self.position = position


@dataclass(frozen=True)
class CharPred:
    """Set membership test, possibly negated (for [^...] and \\D-style classes)."""

    chars: frozenset[int]
    negated: bool = False

    def matches(self, ch: str, fold_case: bool) -> bool:
        if fold_case:
            hit = any(ord(c) in self.chars for c in {ch, ch.lower(), ch.upper()})
        else:
            hit = ord(ch) in self.chars
        return hit != self.negated


DOT = CharPred(frozenset({ord("\n")}), negated=True)


# AST ------------------------------------------------------------------

@dataclass(frozen=True)
class _Lit:
    pred: CharPred


@dataclass(frozen=True)
class _Concat:
    parts: tuple


@dataclass(frozen=True)
class _Alt:
    options: tuple


@dataclass(frozen=True)
class _Repeat:
    node: object
    low: int
    high: int | None  # None = unbounded


@dataclass(frozen=True)
class _Anchor:
    kind: str  # start | end


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.pos = 0

    def error(self, message: str) -> RegexCompileError:
        return RegexCompileError(message, self.pos)

    def peek(self) -> str | None:
        return self.src[self.pos] if self.pos < len(self.src) else None

    def take(self) -> str:
        ch = self.src[self.pos]
        self.pos += 1
        return ch

    def parse(self):
        node = self.alternation()
        if self.pos != len(self.src):
            raise self.error(f"unexpected {self.src[self.pos]!r}")
        return node

    def alternation(self):
        options = [self.concat()]
        while self.peek() == "|":
            self.take()
            options.append(self.concat())
        return options[0] if len(options) == 1 else _Alt(tuple(options))

    def concat(self):
        parts = []
        while True:
            ch = self.peek()
            if ch is None or ch in "|)":
                break
            parts.append(self.repeat())
        if not parts:
            return _Concat(())
        return parts[0] if len(parts) == 1 else _Concat(tuple(parts))

    def repeat(self):
        node = self.atom()
        while True:
            ch = self.peek()
            if ch == "*":
                self.take()
                node = _Repeat(node, 0, None)
            elif ch == "+":
                self.take()
                node = _Repeat(node, 1, None)
            elif ch == "?":
                self.take()
                node = _Repeat(node, 0, 1)
            elif ch == "{":
                save = self.pos
                bounds = self._try_bounds()
                if bounds is None:
                    self.pos = save
                    break
                node = _Repeat(node, bounds[0], bounds[1])
            else:
                break
            if self.peek() == "?":  # lazy marker: irrelevant for existence
                self.take()
        if isinstance(node, _Repeat) and isinstance(node.node, _Anchor):
            raise self.error("quantifier on anchor")
        return node

    def _try_bounds(self) -> tuple[int, int | None] | None:
        # called at '{'; returns None when it is a literal brace
        self.take()
        digits = ""
        while self.peek() and self.peek().isdigit():
            digits += self.take()
        if not digits:
            return None
        low = int(digits)
        high: int | None = low
        if self.peek() == ",":
            self.take()
            digits = ""
            while self.peek() and self.peek().isdigit():
                digits += self.take()
            high = int(digits) if digits else None
        if self.peek() != "}":
            return None
        self.take()
        if high is not None and high < low:
            raise self.error(f"bad repeat bounds {{{low},{high}}}")
        if low > MAX_REPEAT or (high or 0) > MAX_REPEAT:
            raise self.error(f"repeat bound exceeds {MAX_REPEAT}")
        return low, high

    def atom(self):
        ch = self.peek()
        if ch is None:
            raise self.error("unexpected end of pattern")
        if ch == "(":
            self.take()
            if self.src[self.pos : self.pos + 2] == "?:":
                self.pos += 2
            elif self.peek() == "?":
                raise self.error("only (?: ) groups are supported")
            node = self.alternation()
            if self.peek() != ")":
                raise self.error("unclosed group")
            self.take()
            return node
        if ch == "[":
            return self.char_class()
        if ch == "^":
            self.take()
            return _Anchor("start")
        if ch == "$":
            self.take()
            return _Anchor("end")
        if ch == ".":
            self.take()
            return _Lit(DOT)
        if ch in ")|":
            raise self.error(f"unexpected {ch!r}")
        if ch in "*+?":
            raise self.error(f"quantifier {ch!r} with nothing to repeat")
        if ch == "\\":
            return _Lit(self.escape(in_class=False))
        self.take()
        return _Lit(CharPred(frozenset({ord(ch)})))

    def escape(self, in_class: bool) -> CharPred:
        self.take()  # backslash
        ch = self.peek()
        if ch is None:
            raise self.error("dangling backslash")
        self.take()
        if ch in _CLASS_ESCAPES:
            return CharPred(_CLASS_ESCAPES[ch])
        if ch in _NEGATED_ESCAPES:
            if in_class:
                raise self.error(f"negated escape \\{ch} not allowed inside a class")
            return CharPred(_NEGATED_ESCAPES[ch], negated=True)
        if ch in _CHAR_ESCAPES:
            return CharPred(frozenset({ord(_CHAR_ESCAPES[ch])}))
        if ch == "x":
            digits = self.src[self.pos : self.pos + 2]
            if len(digits) < 2 or any(d not in "0123456789abcdefABCDEF" for d in digits):
                raise self.error("\\x needs two hex digits")
            self.pos += 2
            return CharPred(frozenset({int(digits, 16)}))
        if ch in _METACHARS:
            return CharPred(frozenset({ord(ch)}))
        raise self.error(f"unknown escape \\{ch}")

    def char_class(self):
        self.take()  # [
        negated = False
        if self.peek() == "^":
            self.take()
            negated = True
        members: set[int] = set()
        if self.peek() == "]":
            raise self.error("empty character class")
        while True:
            ch = self.peek()
            if ch is None:
                raise self.error("unclosed character class")
            if ch == "]":
                self.take()
                break
            if ch == "\\":
                pred = self.escape(in_class=True)
                members |= pred.chars
                continue
            self.take()
            lo = ord(ch)
            if self.peek() == "-" and self.pos + 1 < len(self.src) and self.src[self.pos + 1] != "]":
                self.take()
                hi_ch = self.peek()
                if hi_ch == "\\":
                    hi_pred = self.escape(in_class=True)
                    if len(hi_pred.chars) != 1:
                        raise self.error("class escape cannot end a range")
                    hi = next(iter(hi_pred.chars))
                else:
                    self.take()
                    hi = ord(hi_ch)
                if hi < lo:
                    raise self.error(f"reversed range {chr(lo)}-{chr(hi)}")
                members |= set(range(lo, hi + 1))
            else:
                members.add(lo)
        return _Lit(CharPred(frozenset(members), negated=negated))


# NFA ------------------------------------------------------------------

_CHAR, _SPLIT, _AT_START, _AT_END, _MATCH = range(5)


class Program:
    """Compiled NFA: states is a list of (opcode, arg, next1, next2)."""

    def __init__(self, states: list[tuple], start: int, fold_case: bool, source: str):
        self.states = states
        self.start = start
        self.fold_case = fold_case
        self.source = source

    def search(self, text: str) -> bool:
        """Unanchored search: does the pattern match anywhere in text?"""
        states = self.states
        fold = self.fold_case
        n = len(text)
        current: set[int] = set()

        def add(into: set[int], state: int, pos: int) -> bool:
            stack = [state]
            while stack:
                s = stack.pop()
                if s in into:
                    continue
                op = states[s]
                kind = op[0]
                if kind == _SPLIT:
                    into.add(s)
                    stack.append(op[2])
                    stack.append(op[3])
                elif kind == _AT_START:
                    into.add(s)
                    if pos == 0:
                        stack.append(op[2])
                elif kind == _AT_END:
                    into.add(s)
                    if pos == n:
                        stack.append(op[2])
                elif kind == _MATCH:
                    return True
                else:
                    into.add(s)
            return False

        for pos in range(n + 1):
            if add(current, self.start, pos):
                return True
            if pos == n:
                break
            ch = text[pos]
            nxt: set[int] = set()
            for s in current:
                op = states[s]
                if op[0] == _CHAR and op[1].matches(ch, fold):
                    if add(nxt, op[2], pos + 1):
                        return True
            current = nxt
        return False


class _Builder:
    def __init__(self):
        self.states: list[list] = []

    def add(self, kind: int, arg=None, n1: int = -1, n2: int = -1) -> int:
        if len(self.states) >= MAX_STATES:
            raise RegexCompileError(f"compiled pattern exceeds {MAX_STATES} states", 0)
        self.states.append([kind, arg, n1, n2])
        return len(self.states) - 1

    def compile_node(self, node, tail: int) -> int:
        """Returns the entry state of a fragment whose exits lead to `tail`."""
        if isinstance(node, _Lit):
            return self.add(_CHAR, node.pred, tail)
        if isinstance(node, _Anchor):
            kind = _AT_START if node.kind == "start" else _AT_END
            return self.add(kind, None, tail)
        if isinstance(node, _Concat):
            entry = tail
            for part in reversed(node.parts):
                entry = self.compile_node(part, entry)
            return entry
        if isinstance(node, _Alt):
            entries = [self.compile_node(opt, tail) for opt in node.options]
            entry = entries[-1]
            for other in reversed(entries[:-1]):
                entry = self.add(_SPLIT, None, other, entry)
            return entry
        if isinstance(node, _Repeat):
            return self.compile_repeat(node, tail)
        raise TypeError(f"unknown ast node {node!r}")

    def compile_repeat(self, node: _Repeat, tail: int) -> int:
        if node.high is None:
            # X{m,} = X^m followed by X*
            star_split = self.add(_SPLIT, None, -1, tail)
            body_entry = self.compile_node(node.node, star_split)
            self.states[star_split][2] = body_entry
            entry = star_split
            for _ in range(node.low):
                entry = self.compile_node(node.node, entry)
            return entry
        # X{m,n} = X^m followed by (X?)^(n-m)
        entry = tail
        for _ in range(node.high - node.low):
            body = self.compile_node(node.node, entry)
            entry = self.add(_SPLIT, None, body, entry)
        for _ in range(node.low):
            entry = self.compile_node(node.node, entry)
        return entry


def compile_pattern(source: str, fold_case: bool = False) -> Program:
    """Compile `source` into a linear-time matcher; raises RegexCompileError."""
    if len(source.encode("utf-8")) > MAX_PATTERN_BYTES:
        raise RegexCompileError(f"pattern exceeds {MAX_PATTERN_BYTES} bytes", 0)
    ast = _Parser(source).parse()
    builder = _Builder()
    match_state = builder.add(_MATCH)
    start = builder.compile_node(ast, match_state)
    states = [tuple(s) for s in builder.states]
    return Program(states, start, fold_case, source)
