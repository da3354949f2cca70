"""Finite-trace temporal formulas: syntax tree, parser, printer, evaluator.

Traces are nonempty sequences of letters, a letter being the set of
proposition names true at that instant.  Next is strong (false at the final
instant), WeakNext is its dual, and Until requires its right argument to
actually occur.  A trace satisfies a formula when the formula holds at
instant 0.
"""

from __future__ import annotations

import bisect
import re
from dataclasses import dataclass
from typing import AbstractSet, Sequence

from .errors import FormulaSyntaxError, UndeclaredAtomError

Trace = Sequence[AbstractSet[str]]


@dataclass(frozen=True)
class Formula:
    """Base node; concrete shapes are the subclasses below."""

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Const(Formula):
    value: bool


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Next(Formula):
    arg: Formula


@dataclass(frozen=True)
class WeakNext(Formula):
    arg: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Release(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Eventually(Formula):
    arg: Formula


@dataclass(frozen=True)
class Always(Formula):
    arg: Formula


TRUE = Const(True)
FALSE = Const(False)

_BINARY = (And, Or, Implies, Until, Release)
_UNARY = (Not, Next, WeakNext, Eventually, Always)


def atoms(f: Formula) -> frozenset[str]:
    """All proposition names occurring in f."""
    if isinstance(f, Atom):
        return frozenset((f.name,))
    if isinstance(f, _BINARY):
        return atoms(f.left) | atoms(f.right)
    if isinstance(f, _UNARY):
        return atoms(f.arg)
    return frozenset()


def subformulas(f: Formula) -> list[Formula]:
    """Every subformula of f, duplicates removed, children before parents."""
    seen: dict[Formula, None] = {}

    def walk(g: Formula) -> None:
        if g in seen:
            return
        if isinstance(g, _BINARY):
            walk(g.left)
            walk(g.right)
        elif isinstance(g, _UNARY):
            walk(g.arg)
        seen[g] = None

    walk(f)
    return list(seen)


def evaluate(f: Formula, trace: Trace, i: int = 0) -> bool:
    """Truth of f at instant i of a nonempty finite trace."""
    n = len(trace)
    if n == 0:
        raise ValueError("traces are nonempty by definition")
    if not 0 <= i < n:
        raise ValueError(f"instant {i} outside trace of length {n}")
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Atom):
        return f.name in trace[i]
    if isinstance(f, Not):
        return not evaluate(f.arg, trace, i)
    if isinstance(f, And):
        return evaluate(f.left, trace, i) and evaluate(f.right, trace, i)
    if isinstance(f, Or):
        return evaluate(f.left, trace, i) or evaluate(f.right, trace, i)
    if isinstance(f, Implies):
        return not evaluate(f.left, trace, i) or evaluate(f.right, trace, i)
    if isinstance(f, Next):
        return i + 1 < n and evaluate(f.arg, trace, i + 1)
    if isinstance(f, WeakNext):
        return i + 1 >= n or evaluate(f.arg, trace, i + 1)
    if isinstance(f, Until):
        return any(
            evaluate(f.right, trace, j)
            and all(evaluate(f.left, trace, k) for k in range(i, j))
            for j in range(i, n)
        )
    if isinstance(f, Release):
        # Dual of Until: the right argument holds up to and including the
        # instant the left one fires, or forever if it never does.
        return all(
            evaluate(f.right, trace, j)
            or any(evaluate(f.left, trace, k) for k in range(i, j))
            for j in range(i, n)
        )
    if isinstance(f, Eventually):
        return any(evaluate(f.arg, trace, j) for j in range(i, n))
    if isinstance(f, Always):
        return all(evaluate(f.arg, trace, j) for j in range(i, n))
    raise TypeError(f"not a formula node: {f!r}")


def evaluate_all_prefixes(f: Formula, trace: Trace) -> bool:
    """Whether every nonempty prefix of the trace satisfies f at instant 0."""
    return all(evaluate(f, trace[: k + 1], 0) for k in range(len(trace)))


def expand_abbreviations(f: Formula) -> Formula:
    """Rewrite f into the core Const/Atom/Not/And/Next/Until fragment."""
    if isinstance(f, (Const, Atom)):
        return f
    if isinstance(f, Not):
        return Not(expand_abbreviations(f.arg))
    if isinstance(f, And):
        return And(expand_abbreviations(f.left), expand_abbreviations(f.right))
    if isinstance(f, Or):
        left, right = expand_abbreviations(f.left), expand_abbreviations(f.right)
        return Not(And(Not(left), Not(right)))
    if isinstance(f, Implies):
        return expand_abbreviations(Or(Not(f.left), f.right))
    if isinstance(f, Next):
        return Next(expand_abbreviations(f.arg))
    if isinstance(f, WeakNext):
        return Not(Next(Not(expand_abbreviations(f.arg))))
    if isinstance(f, Until):
        return Until(expand_abbreviations(f.left), expand_abbreviations(f.right))
    if isinstance(f, Release):
        left, right = expand_abbreviations(f.left), expand_abbreviations(f.right)
        return Not(Until(Not(left), Not(right)))
    if isinstance(f, Eventually):
        return Until(TRUE, expand_abbreviations(f.arg))
    if isinstance(f, Always):
        return Not(Until(TRUE, Not(expand_abbreviations(f.arg))))
    raise TypeError(f"not a formula node: {f!r}")


# --- parsing ---------------------------------------------------------------

_KEYWORDS = {"true", "false", "X", "N", "U", "R", "F", "G"}
_TOKEN_RE = re.compile(r"[ \t\r\n]+|[A-Za-z_][A-Za-z0-9_]*|<->|->|[!&|()]")


@dataclass(frozen=True)
class _Token:
    kind: str  # keyword/symbol text, or "atom" / "end"
    text: str
    line: int
    column: int


def _scan(text: str) -> list[_Token]:
    line_starts = [0] + [m.end() for m in re.finditer(r"\n", text)]

    def position(offset: int) -> tuple[int, int]:
        ln = bisect.bisect_right(line_starts, offset) - 1
        return ln + 1, offset - line_starts[ln] + 1

    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            ln, col = position(pos)
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", ln, col)
        piece = m.group()
        if not piece.isspace():
            ln, col = position(pos)
            if piece in _KEYWORDS or not piece[0].isidentifier():
                kind = piece
            else:
                kind = "atom"
            tokens.append(_Token(kind, piece, ln, col))
        pos = m.end()
    tail = position(len(text))
    tokens.append(_Token("end", "", tail[0], tail[1]))
    return tokens


class _Parser:
    """Recursive descent over the fixed precedence ladder.

    Loosest to tightest: <->, ->, |, &, U and R (right-associative), then
    the unary operators ! X N F G.  <-> has no node of its own and desugars
    to a conjunction of two implications.
    """

    def __init__(self, text: str, declared):
        self.tokens = _scan(text)
        self.pos = 0
        self.declared = None if declared is None else frozenset(declared)

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            shown = tok.text if tok.kind != "end" else "end of input"
            raise FormulaSyntaxError(f"expected {kind!r}, found {shown!r}", tok.line, tok.column)
        return self.take()

    def parse(self) -> Formula:
        f = self.iff()
        tok = self.peek()
        if tok.kind != "end":
            raise FormulaSyntaxError(f"unexpected {tok.text!r}", tok.line, tok.column)
        return f

    def iff(self) -> Formula:
        left = self.implies()
        if self.peek().kind == "<->":
            self.take()
            right = self.iff()
            return And(Implies(left, right), Implies(right, left))
        return left

    def implies(self) -> Formula:
        left = self.disjunct()
        if self.peek().kind == "->":
            self.take()
            return Implies(left, self.implies())
        return left

    def disjunct(self) -> Formula:
        left = self.conjunct()
        while self.peek().kind == "|":
            self.take()
            left = Or(left, self.conjunct())
        return left

    def conjunct(self) -> Formula:
        left = self.temporal()
        while self.peek().kind == "&":
            self.take()
            left = And(left, self.temporal())
        return left

    def temporal(self) -> Formula:
        left = self.unary()
        kind = self.peek().kind
        if kind == "U":
            self.take()
            return Until(left, self.temporal())
        if kind == "R":
            self.take()
            return Release(left, self.temporal())
        return left

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "!":
            self.take()
            return Not(self.unary())
        if tok.kind in ("X", "N", "F", "G"):
            self.take()
            arg = self.unary()
            op = {"X": Next, "N": WeakNext, "F": Eventually, "G": Always}[tok.kind]
            return op(arg)
        return self.primary()

    def primary(self) -> Formula:
        tok = self.take()
        if tok.kind == "true":
            return TRUE
        if tok.kind == "false":
            return FALSE
        if tok.kind == "atom":
            if self.declared is not None and tok.text not in self.declared:
                raise UndeclaredAtomError(tok.text, tok.line, tok.column)
            return Atom(tok.text)
        if tok.kind == "(":
            f = self.iff()
            self.expect(")")
            return f
        shown = tok.text if tok.kind != "end" else "end of input"
        raise FormulaSyntaxError(f"expected a formula, found {shown!r}", tok.line, tok.column)


def parse(text: str, declared=None) -> Formula:
    """Parse formula text; with `declared`, reject atoms outside that set."""
    return _Parser(text, declared).parse()


# --- printing --------------------------------------------------------------

_LEVEL_IMPLIES = 1
_LEVEL_OR = 2
_LEVEL_AND = 3
_LEVEL_UNTIL = 4
_LEVEL_UNARY = 5
_LEVEL_ATOM = 6


def _level(f: Formula) -> int:
    if isinstance(f, Implies):
        return _LEVEL_IMPLIES
    if isinstance(f, Or):
        return _LEVEL_OR
    if isinstance(f, And):
        return _LEVEL_AND
    if isinstance(f, (Until, Release)):
        return _LEVEL_UNTIL
    if isinstance(f, _UNARY):
        return _LEVEL_UNARY
    return _LEVEL_ATOM


def _wrap(f: Formula, minimum: int) -> str:
    text = to_text(f)
    return f"({text})" if _level(f) < minimum else text


def to_text(f: Formula) -> str:
    """Render f in the concrete grammar with only the parentheses it needs."""
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not):
        return "!" + _wrap(f.arg, _LEVEL_UNARY)
    if isinstance(f, (Next, WeakNext, Eventually, Always)):
        op = {Next: "X", WeakNext: "N", Eventually: "F", Always: "G"}[type(f)]
        arg = f.arg
        if _level(arg) < _LEVEL_UNARY:
            return f"{op} ({to_text(arg)})"
        return f"{op} {to_text(arg)}"
    if isinstance(f, (Until, Release)):
        op = "U" if isinstance(f, Until) else "R"
        # Right-associative: a bare right child at the same level is fine.
        left = _wrap(f.left, _LEVEL_UNARY)
        right = _wrap(f.right, _LEVEL_UNTIL)
        return f"{left} {op} {right}"
    if isinstance(f, And):
        return f"{_wrap(f.left, _LEVEL_AND)} & {_wrap(f.right, _LEVEL_UNTIL)}"
    if isinstance(f, Or):
        return f"{_wrap(f.left, _LEVEL_OR)} | {_wrap(f.right, _LEVEL_AND)}"
    if isinstance(f, Implies):
        return f"{_wrap(f.left, _LEVEL_OR)} -> {_wrap(f.right, _LEVEL_IMPLIES)}"
    raise TypeError(f"not a formula node: {f!r}")
