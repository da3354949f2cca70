"""Slow, obviously-correct reference implementations for the test suite.

Everything here trades speed for transparency: truth values come from
writing the quantifiers out as loops, game regions from set-based backward
induction, and generators produce small instances by construction.  The
main suite compares the package's vectorized machinery against these.
"""

from __future__ import annotations

import itertools
import random

import numpy as np

from dutiful import Dfa, PropSet, Reach, parse
from dutiful.automata import _Compiler
from dutiful import ltlf


# -- trace enumeration -------------------------------------------------------


def all_traces(n_letters: int, max_len: int):
    """Every nonempty letter sequence up to max_len, as int tuples."""
    for length in range(1, max_len + 1):
        yield from itertools.product(range(n_letters), repeat=length)


def as_name_trace(props: PropSet, letters) -> tuple[frozenset, ...]:
    return tuple(frozenset(props.letter_names(l)) for l in letters)


# -- semantics written as quantifier loops -----------------------------------


def naive_holds(f: ltlf.Formula, trace, i: int = 0) -> bool:
    """Truth at instant i, each temporal operator spelled as its quantifier."""
    n = len(trace)
    if isinstance(f, ltlf.Const):
        return f.value
    if isinstance(f, ltlf.Atom):
        return f.name in trace[i]
    if isinstance(f, ltlf.Not):
        return not naive_holds(f.arg, trace, i)
    if isinstance(f, ltlf.And):
        return naive_holds(f.left, trace, i) and naive_holds(f.right, trace, i)
    if isinstance(f, ltlf.Or):
        return naive_holds(f.left, trace, i) or naive_holds(f.right, trace, i)
    if isinstance(f, ltlf.Implies):
        return (not naive_holds(f.left, trace, i)) or naive_holds(f.right, trace, i)
    if isinstance(f, ltlf.Next):
        return i + 1 < n and naive_holds(f.arg, trace, i + 1)
    if isinstance(f, ltlf.WeakNext):
        return i + 1 >= n or naive_holds(f.arg, trace, i + 1)
    if isinstance(f, ltlf.Until):
        return any(
            naive_holds(f.right, trace, k)
            and all(naive_holds(f.left, trace, j) for j in range(i, k))
            for k in range(i, n)
        )
    if isinstance(f, ltlf.Release):
        return any(
            naive_holds(f.left, trace, k)
            and all(naive_holds(f.right, trace, j) for j in range(i, k + 1))
            for k in range(i, n)
        ) or all(naive_holds(f.right, trace, j) for j in range(i, n))
    if isinstance(f, ltlf.Eventually):
        return any(naive_holds(f.arg, trace, k) for k in range(i, n))
    if isinstance(f, ltlf.Always):
        return all(naive_holds(f.arg, trace, k) for k in range(i, n))
    raise TypeError(f"unknown node {type(f).__name__}")


def some_prefix_holds(f: ltlf.Formula, trace) -> bool:
    return any(naive_holds(f, trace[: k + 1], 0) for k in range(len(trace)))


def every_prefix_holds(f: ltlf.Formula, trace) -> bool:
    return all(naive_holds(f, trace[: k + 1], 0) for k in range(len(trace)))


# -- automaton walks ---------------------------------------------------------


def walk(d: Dfa, letters) -> int:
    q = d.initial
    for l in letters:
        q = int(d.delta[q, l])
        if q < 0:
            raise AssertionError("compiled automata are total")
    return q


def reach_accepts(d: Dfa, letters) -> bool:
    return walk(d, letters) in d.acceptance.states


def safety_accepts(d: Dfa, letters) -> bool:
    return walk(d, letters) in d.acceptance.states


# -- extension-closed (achievement) check ------------------------------------


def is_achievement(f: ltlf.Formula, props: PropSet) -> bool:
    """Once satisfied, satisfied on every extension.

    Decided on the raw derivative automaton, before acceptance is made
    absorbing: every transition out of an accepting state must stay
    accepting.
    """
    delta, bits = _Compiler(f, props).build(100_000)
    acc = np.nonzero(bits)[0]
    if len(acc) == 0:
        return False
    return bool(bits[delta[acc, :]].all())


# -- random instances --------------------------------------------------------

_BOOL_OPS = ("&", "|")


def random_bool(rng: random.Random, names, depth: int) -> str:
    if depth <= 0 or rng.random() < 0.35:
        atom = rng.choice(names)
        return atom if rng.random() < 0.6 else f"!{atom}"
    if rng.random() < 0.1:
        return rng.choice(("true", "false"))
    op = rng.choice(_BOOL_OPS)
    return f"({random_bool(rng, names, depth - 1)} {op} {random_bool(rng, names, depth - 1)})"


def random_formula(rng: random.Random, names, depth: int) -> str:
    """Arbitrary formula text, any connective, bounded operator depth."""
    if depth <= 0 or rng.random() < 0.25:
        r = rng.random()
        if r < 0.08:
            return rng.choice(("true", "false"))
        atom = rng.choice(names)
        return atom if r < 0.6 else f"!{atom}"
    kind = rng.randrange(10)
    a = random_formula(rng, names, depth - 1)
    b = random_formula(rng, names, depth - 1)
    if kind == 0:
        return f"!({a})"
    if kind == 1:
        return f"X ({a})"
    if kind == 2:
        return f"N ({a})"
    if kind == 3:
        return f"F ({a})"
    if kind == 4:
        return f"G ({a})"
    if kind == 5:
        return f"({a}) & ({b})"
    if kind == 6:
        return f"({a}) | ({b})"
    if kind == 7:
        return f"({a}) -> ({b})"
    if kind == 8:
        return f"({a}) U ({b})"
    return f"({a}) R ({b})"


def random_achievement(rng: random.Random, names, depth: int) -> str:
    """A formula whose truth survives extending the trace.

    Grammar: booleans (instant 0 facts), F of a boolean, boolean U
    boolean, X of an achievement, and conjunction/disjunction of
    achievements all qualify.
    """
    if depth <= 0:
        return f"F ({random_bool(rng, names, 1)})"
    kind = rng.randrange(6)
    if kind == 0:
        return random_bool(rng, names, depth)
    if kind == 1:
        return f"F ({random_bool(rng, names, depth)})"
    if kind == 2:
        return f"({random_bool(rng, names, depth - 1)}) U ({random_bool(rng, names, depth - 1)})"
    if kind == 3:
        return f"X ({random_achievement(rng, names, depth - 1)})"
    if kind == 4:
        return (
            f"({random_achievement(rng, names, depth - 1)})"
            f" & ({random_achievement(rng, names, depth - 1)})"
        )
    return (
        f"({random_achievement(rng, names, depth - 1)})"
        f" | ({random_achievement(rng, names, depth - 1)})"
    )


def draw_achievement(rng: random.Random, names, props: PropSet, depth: int = 2):
    """A satisfiable achievement formula (unsatisfiable draws are discarded)."""
    while True:
        f = parse(random_achievement(rng, names, depth))
        if is_achievement(f, props):
            return f


def random_env_safety(rng: random.Random, env_names, all_names) -> str:
    """Environment constraints: mostly implication-shaped invariants."""
    r = rng.random()
    if r < 0.25:
        return "true"
    if r < 0.5:
        return f"G (({random_bool(rng, all_names, 1)}) -> N ({random_bool(rng, env_names, 1)}))"
    if r < 0.75:
        return f"G ({random_bool(rng, env_names, 2)})"
    return (
        f"({random_bool(rng, env_names, 1)})"
        f" & G (({random_bool(rng, all_names, 1)}) -> N ({random_bool(rng, env_names, 1)}))"
    )


def random_arena(rng: random.Random, props: PropSet, n_states: int) -> Dfa:
    """A well-formed arena: Y-columns are defined all-or-nothing and every
    state keeps at least one available X-part."""
    n_x, n_y = props.n_x, props.n_y
    delta = np.full((n_states, n_y * n_x), -1, dtype=np.int32)
    d3 = delta.reshape(n_states, n_y, n_x)
    for q in range(n_states):
        xs = [x for x in range(n_x) if rng.random() < 0.7]
        if not xs:
            xs = [rng.randrange(n_x)]
        for x in xs:
            for y in range(n_y):
                d3[q, y, x] = rng.randrange(n_states)
    return Dfa(props, n_states, 0, delta, Reach(frozenset()))


# -- set-based backward induction --------------------------------------------


def _columns(d3: np.ndarray, q: int):
    """Available X-parts at q (fully defined Y-columns)."""
    n_y, n_x = d3.shape[1], d3.shape[2]
    return [x for x in range(n_x) if all(d3[q, y, x] >= 0 for y in range(n_y))]


def oracle_reach(d: Dfa, goal) -> dict[int, int]:
    """Agent's winning states for visiting goal, mapped to their rank."""
    d3 = d.delta.reshape(d.n_states, d.props.n_y, d.props.n_x)
    rank = {q: 0 for q in goal}
    k = 0
    while True:
        k += 1
        fresh = []
        for q in range(d.n_states):
            if q in rank:
                continue
            xs = _columns(d3, q)
            if not xs:
                continue
            if all(
                any(int(d3[q, y, x]) in rank for y in range(d.props.n_y)) for x in xs
            ):
                fresh.append(q)
        if not fresh:
            return rank
        for q in fresh:
            rank[q] = k


def oracle_env_avoid(d: Dfa, goal) -> frozenset[int]:
    """Environment's winning states for keeping the play out of goal."""
    d3 = d.delta.reshape(d.n_states, d.props.n_y, d.props.n_x)
    alive = set(range(d.n_states)) - set(goal)
    while True:
        keep = set()
        for q in alive:
            xs = _columns(d3, q)
            if not xs:
                keep.add(q)
                continue
            if any(
                all(int(d3[q, y, x]) in alive for y in range(d.props.n_y)) for x in xs
            ):
                keep.add(q)
        if keep == alive:
            return frozenset(alive)
        alive = keep


def oracle_env_safe(d: Dfa, member) -> frozenset[int]:
    """Environment's region for keeping the play inside member forever."""
    d3 = d.delta.reshape(d.n_states, d.props.n_y, d.props.n_x)
    alive = set(member)
    while True:
        keep = set()
        for q in alive:
            for x in _columns(d3, q):
                if all(int(d3[q, y, x]) in alive for y in range(d.props.n_y)):
                    keep.add(q)
                    break
        if keep == alive:
            return frozenset(alive)
        alive = keep


def oracle_reach_safe(d: Dfa, reach, safe) -> frozenset[int]:
    """Agent's region for visiting reach without ever leaving safe."""
    d3 = d.delta.reshape(d.n_states, d.props.n_y, d.props.n_x)
    safe = set(safe)
    win = set(reach) & safe
    while True:
        fresh = []
        for q in range(d.n_states):
            if q in win or q not in safe:
                continue
            xs = _columns(d3, q)
            if not xs:
                continue
            if all(
                any(int(d3[q, y, x]) in win for y in range(d.props.n_y)) for x in xs
            ):
                fresh.append(q)
        if not fresh:
            return frozenset(win)
        win.update(fresh)


# -- random synthesis problems -----------------------------------------------


def random_props(rng: random.Random) -> PropSet:
    env = ("wind", "rain")[: rng.randrange(1, 3)]
    agent = ("lamp", "door")[: rng.randrange(1, 3)]
    return PropSet(tuple(env), tuple(agent))


def random_problem_text(rng: random.Random):
    """(props, env, duty, right) with duty/right in the achievement class."""
    props = random_props(rng)
    names = list(props.all_vars)
    env = random_env_safety(rng, list(props.env_vars), names)
    duty = random_achievement(rng, names, 2)
    right = random_achievement(rng, names, 2)
    return props, env, duty, right


class PrefixedExhaustivePolicy:
    """Replays a fixed X-part prefix, then explores exhaustively."""

    def __init__(self, prefix):
        self._prefix = list(prefix)
        self._at = 0
        self._inner = None
        self.exhausted = False

    def reset(self):
        self._at = 0
        if self._inner is not None:
            self._inner.reset()

    def pick(self, legal):
        if self._at < len(self._prefix):
            move = self._prefix[self._at]
            self._at += 1
            if move not in legal:
                raise AssertionError("prefix move became illegal")
            return move
        if self._inner is None:
            from dutiful.runtime import ExhaustivePolicy

            self._inner = ExhaustivePolicy()
        return self._inner.pick(legal)

    def advance(self) -> bool:
        if self._inner is None:
            self.exhausted = True
            return False
        more = self._inner.advance()
        self.exhausted = self._inner.exhausted
        return more
