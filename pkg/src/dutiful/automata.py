"""Deterministic automata over assignment alphabets, plus the formula compiler.

A letter assigns every declared proposition, encoded as an int: bit i is the
truth of all_vars[i], environment variables in the low bits.  Transition
tables are dense numpy int32 arrays indexed [state, letter]; -1 marks
transitions removed by arena restriction.  Compiled automata number their
states in breadth-first order from the initial state with letters ascending,
so equal inputs give byte-identical artifacts.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from . import bdd as robdd
from . import ltlf
from .errors import ResourceLimitError, UndeclaredAtomError, UndefinedTransitionError

DEFAULT_STATE_CAP = 200_000
DEFAULT_PROP_CAP = 16

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_RESERVED = {"true", "false", "X", "N", "U", "R", "F", "G"}


@dataclass(frozen=True)
class PropSet:
    """Declared propositions, environment-controlled before agent-controlled."""

    env_vars: tuple[str, ...]
    agent_vars: tuple[str, ...]
    cap: int = DEFAULT_PROP_CAP

    def __post_init__(self):
        names = self.all_vars
        for name in names:
            if not _NAME_RE.match(name) or name in _RESERVED:
                raise ValueError(f"bad proposition name {name!r}")
        if len(set(names)) != len(names):
            raise ValueError("proposition names must be distinct")
        if len(names) > self.cap:
            raise ValueError(f"{len(names)} propositions exceed the cap of {self.cap}")

    @property
    def all_vars(self) -> tuple[str, ...]:
        return self.env_vars + self.agent_vars

    @property
    def n_env(self) -> int:
        return len(self.env_vars)

    @property
    def n_agent(self) -> int:
        return len(self.agent_vars)

    @property
    def n_all(self) -> int:
        return len(self.env_vars) + len(self.agent_vars)

    @property
    def n_letters(self) -> int:
        return 1 << self.n_all

    @property
    def n_x(self) -> int:
        return 1 << self.n_env

    @property
    def n_y(self) -> int:
        return 1 << self.n_agent

    def index(self, name: str) -> int:
        try:
            return self.all_vars.index(name)
        except ValueError:
            raise UndeclaredAtomError(name) from None

    def letter_index(self, names: Iterable[str]) -> int:
        out = 0
        for name in names:
            out |= 1 << self.index(name)
        return out

    def letter_names(self, letter: int) -> frozenset[str]:
        return frozenset(v for i, v in enumerate(self.all_vars) if letter >> i & 1)

    def as_letter(self, letter) -> int:
        if isinstance(letter, (int, np.integer)):
            if not 0 <= letter < self.n_letters:
                raise ValueError(f"letter {letter} out of range")
            return int(letter)
        return self.letter_index(letter)

    def x_of(self, letter: int) -> int:
        return letter & (self.n_x - 1)

    def y_of(self, letter: int) -> int:
        return letter >> self.n_env

    def combine(self, x: int, y: int) -> int:
        return x | (y << self.n_env)

    def x_index(self, names: Iterable[str]) -> int:
        out = 0
        for name in names:
            i = self.index(name)
            if i >= self.n_env:
                raise ValueError(f"{name!r} is agent-controlled, not an environment move")
            out |= 1 << i
        return out

    def x_names(self, x: int) -> frozenset[str]:
        return frozenset(v for i, v in enumerate(self.env_vars) if x >> i & 1)

    def y_index(self, names: Iterable[str]) -> int:
        out = 0
        for name in names:
            i = self.index(name) - self.n_env
            if i < 0:
                raise ValueError(f"{name!r} is environment-controlled, not an agent move")
            out |= 1 << i
        return out

    def y_names(self, y: int) -> frozenset[str]:
        return frozenset(v for i, v in enumerate(self.agent_vars) if y >> i & 1)


@dataclass(frozen=True)
class Reach:
    """Accept runs that visit the set at least once (the set is absorbing)."""

    states: frozenset[int]


@dataclass(frozen=True)
class Safe:
    """Accept runs that never leave the set."""

    states: frozenset[int]


@dataclass(frozen=True)
class ReachSafe:
    """Reach the first set while never leaving the second."""

    reach: frozenset[int]
    safe: frozenset[int]


Acceptance = Reach | Safe | ReachSafe


@dataclass(eq=False)
class Dfa:
    """Deterministic automaton; products carry per-component projections."""

    props: PropSet
    n_states: int
    initial: int
    delta: np.ndarray
    acceptance: Acceptance | None
    projections: tuple[np.ndarray, ...] | None = None
    component_acceptance: tuple[Acceptance | None, ...] | None = None

    def successor(self, state: int, letter: int) -> int | None:
        t = int(self.delta[state, letter])
        return None if t < 0 else t

    def is_total(self) -> bool:
        return bool((self.delta >= 0).all())

    def lift_component_states(self, index: int, states: frozenset[int]) -> frozenset[int]:
        """Product states whose index-th projection lies in the given set."""
        proj = self.projections[index]
        mask = np.isin(proj, np.fromiter(states, dtype=np.int64, count=len(states)))
        return frozenset(int(q) for q in np.nonzero(mask)[0])

    def reroot(self, initial: int) -> "Dfa":
        assert 0 <= initial < self.n_states
        return replace(self, initial=initial)


@dataclass(frozen=True)
class RunResult:
    """States visited by a run; |history| + 1 of them, initial first."""

    states: tuple[int, ...]

    @property
    def landed(self) -> int:
        return self.states[-1]


def run_on(d: Dfa, history: Sequence) -> RunResult:
    """Run d on a history of letters (ints or name sets); may be empty."""
    q = d.initial
    states = [q]
    for step, letter in enumerate(history):
        t = d.delta[q, d.props.as_letter(letter)]
        if t < 0:
            raise UndefinedTransitionError(step)
        q = int(t)
        states.append(q)
    return RunResult(tuple(states))


# --- formula compilation -----------------------------------------------------

_K_CONST, _K_ATOM, _K_NOT, _K_AND, _K_OR, _K_IMPLIES = range(6)
_K_NEXT, _K_WNEXT, _K_UNTIL, _K_RELEASE, _K_EVENTUALLY, _K_ALWAYS = range(6, 12)

_TEMPORAL_KINDS = frozenset(
    (_K_NEXT, _K_WNEXT, _K_UNTIL, _K_RELEASE, _K_EVENTUALLY, _K_ALWAYS)
)


class _Prog:
    """A formula flattened to integer-indexed nodes for fast recursion."""

    def __init__(self, f: ltlf.Formula, props: PropSet):
        self.kinds: list[int] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.payload: list[int] = []
        self._dedupe: dict[tuple, int] = {}
        self.props = props
        self.root = self._add(f)
        # Temporal nodes get BDD variables above the proposition block.
        self.temporal: list[int] = [
            i for i, k in enumerate(self.kinds) if k in _TEMPORAL_KINDS
        ]
        self.bdd_var: dict[int, int] = {
            node: props.n_all + j for j, node in enumerate(self.temporal)
        }

    def _add(self, f: ltlf.Formula) -> int:
        if isinstance(f, ltlf.Const):
            key = (_K_CONST, int(f.value))
            kind, a, b, payload = _K_CONST, -1, -1, int(f.value)
        elif isinstance(f, ltlf.Atom):
            payload = self.props.index(f.name)
            key = (_K_ATOM, payload)
            kind, a, b = _K_ATOM, -1, -1
        else:
            unary = {
                ltlf.Not: _K_NOT,
                ltlf.Next: _K_NEXT,
                ltlf.WeakNext: _K_WNEXT,
                ltlf.Eventually: _K_EVENTUALLY,
                ltlf.Always: _K_ALWAYS,
            }
            binary = {
                ltlf.And: _K_AND,
                ltlf.Or: _K_OR,
                ltlf.Implies: _K_IMPLIES,
                ltlf.Until: _K_UNTIL,
                ltlf.Release: _K_RELEASE,
            }
            if type(f) in unary:
                kind = unary[type(f)]
                a, b, payload = self._add(f.arg), -1, 0
            elif type(f) in binary:
                kind = binary[type(f)]
                a, b, payload = self._add(f.left), self._add(f.right), 0
            else:
                raise TypeError(f"not a formula node: {f!r}")
            key = (kind, a, b)
        found = self._dedupe.get(key)
        if found is not None:
            return found
        self.kinds.append(kind)
        self.left.append(a)
        self.right.append(b)
        self.payload.append(payload)
        node = len(self.kinds) - 1
        self._dedupe[key] = node
        return node


class _Compiler:
    """Derivative construction: states are canonical Boolean functions over
    the formula's propositions and temporal subformulas, paired with a bit
    recording whether the letter just read completed a satisfying prefix."""

    def __init__(self, f: ltlf.Formula, props: PropSet):
        for name in ltlf.atoms(f):
            props.index(name)  # raises UndeclaredAtomError
        self.props = props
        self.prog = _Prog(f, props)
        self.bdd = robdd.Bdd()
        self._bf_memo: dict[int, int] = {}
        self._deriv_memo: dict[tuple[int, int], int] = {}
        self._final_memo: dict[tuple[int, int], bool] = {}

    def _bf(self, node: int) -> int:
        """The node as a Boolean function, temporal subformulas opaque."""
        found = self._bf_memo.get(node)
        if found is not None:
            return found
        p, b = self.prog, self.bdd
        kind = p.kinds[node]
        if kind == _K_CONST:
            out = b.const(bool(p.payload[node]))
        elif kind == _K_ATOM:
            out = b.var(p.payload[node])
        elif kind == _K_NOT:
            out = b.not_(self._bf(p.left[node]))
        elif kind == _K_AND:
            out = b.and_(self._bf(p.left[node]), self._bf(p.right[node]))
        elif kind == _K_OR:
            out = b.or_(self._bf(p.left[node]), self._bf(p.right[node]))
        elif kind == _K_IMPLIES:
            out = b.implies(self._bf(p.left[node]), self._bf(p.right[node]))
        else:
            out = b.var(p.bdd_var[node])
        self._bf_memo[node] = out
        return out

    def _deriv(self, node: int, letter: int) -> int:
        """Obligation left for the rest of the trace after reading letter."""
        key = (node, letter)
        found = self._deriv_memo.get(key)
        if found is not None:
            return found
        p, b = self.prog, self.bdd
        kind = p.kinds[node]
        if kind == _K_CONST:
            out = b.const(bool(p.payload[node]))
        elif kind == _K_ATOM:
            out = b.const(bool(letter >> p.payload[node] & 1))
        elif kind == _K_NOT:
            out = b.not_(self._deriv(p.left[node], letter))
        elif kind == _K_AND:
            out = b.and_(self._deriv(p.left[node], letter), self._deriv(p.right[node], letter))
        elif kind == _K_OR:
            out = b.or_(self._deriv(p.left[node], letter), self._deriv(p.right[node], letter))
        elif kind == _K_IMPLIES:
            out = b.implies(self._deriv(p.left[node], letter), self._deriv(p.right[node], letter))
        elif kind in (_K_NEXT, _K_WNEXT):
            out = self._bf(p.left[node])
        elif kind == _K_UNTIL:
            out = b.or_(
                self._deriv(p.right[node], letter),
                b.and_(self._deriv(p.left[node], letter), b.var(p.bdd_var[node])),
            )
        elif kind == _K_RELEASE:
            out = b.and_(
                self._deriv(p.right[node], letter),
                b.or_(self._deriv(p.left[node], letter), b.var(p.bdd_var[node])),
            )
        elif kind == _K_EVENTUALLY:
            out = b.or_(self._deriv(p.left[node], letter), b.var(p.bdd_var[node]))
        else:  # always
            out = b.and_(self._deriv(p.left[node], letter), b.var(p.bdd_var[node]))
        self._deriv_memo[key] = out
        return out

    def _final(self, node: int, letter: int) -> bool:
        """Truth of the node when letter turns out to be the last instant."""
        key = (node, letter)
        found = self._final_memo.get(key)
        if found is not None:
            return found
        p = self.prog
        kind = p.kinds[node]
        if kind == _K_CONST:
            out = bool(p.payload[node])
        elif kind == _K_ATOM:
            out = bool(letter >> p.payload[node] & 1)
        elif kind == _K_NOT:
            out = not self._final(p.left[node], letter)
        elif kind == _K_AND:
            out = self._final(p.left[node], letter) and self._final(p.right[node], letter)
        elif kind == _K_OR:
            out = self._final(p.left[node], letter) or self._final(p.right[node], letter)
        elif kind == _K_IMPLIES:
            out = not self._final(p.left[node], letter) or self._final(p.right[node], letter)
        elif kind == _K_NEXT:
            out = False
        elif kind == _K_WNEXT:
            out = True
        elif kind in (_K_UNTIL, _K_RELEASE):
            out = self._final(p.right[node], letter)
        else:  # eventually / always
            out = self._final(p.left[node], letter)
        self._final_memo[key] = out
        return out

    def build(self, max_states: int) -> tuple[np.ndarray, np.ndarray]:
        """BFS the derivative automaton; returns (delta, accept bits)."""
        props, b = self.props, self.bdd
        n_all, n_letters = props.n_all, props.n_letters
        temporal_of_var = {v: node for node, v in self.prog.bdd_var.items()}
        subst_memos: dict[int, dict[int, int]] = {}

        def step(g: int, letter: int) -> int:
            def mapping(var: int) -> int:
                if var < n_all:
                    return b.const(bool(letter >> var & 1))
                return self._deriv(temporal_of_var[var], letter)

            return b.subst(g, mapping, subst_memos.setdefault(letter, {}))

        def final_bit(g: int, letter: int) -> bool:
            def assignment(var: int) -> bool:
                if var < n_all:
                    return bool(letter >> var & 1)
                return self._final(temporal_of_var[var], letter)

            return b.eval(g, assignment)

        initial = (self._bf(self.prog.root), False)
        index: dict[tuple[int, bool], int] = {initial: 0}
        queue = [initial]
        rows: list[list[int]] = []
        head = 0
        while head < len(queue):
            g, _ = queue[head]
            head += 1
            row = []
            for letter in range(n_letters):
                target = (step(g, letter), final_bit(g, letter))
                t = index.get(target)
                if t is None:
                    t = len(queue)
                    if t >= max_states:
                        raise ResourceLimitError(
                            f"automaton construction exceeded {max_states} states"
                        )
                    index[target] = t
                    queue.append(target)
                row.append(t)
            rows.append(row)
        delta = np.array(rows, dtype=np.int32)
        bits = np.array([bit for _, bit in queue], dtype=bool)
        return delta, bits


def _prune_reachable(delta: np.ndarray, initial: int) -> tuple[np.ndarray, np.ndarray]:
    """Keep states reachable from initial, renumbered in BFS letter order.

    Returns (new delta, old index per new state).  Undefined entries survive.
    """
    order = [initial]
    seen = {initial}
    head = 0
    while head < len(order):
        row = delta[order[head]]
        head += 1
        uniq, first = np.unique(row, return_index=True)
        for t in uniq[np.argsort(first)]:
            t = int(t)
            if t >= 0 and t not in seen:
                seen.add(t)
                order.append(t)
    old_of_new = np.array(order, dtype=np.int64)
    new_of_old = np.full(delta.shape[0], -1, dtype=np.int64)
    new_of_old[old_of_new] = np.arange(len(order))
    out = delta[old_of_new]
    out = np.where(out >= 0, new_of_old[np.clip(out, 0, None)], -1).astype(np.int32)
    return out, old_of_new


def _moore_classes(delta: np.ndarray, seed: np.ndarray) -> np.ndarray:
    """Coarsest refinement of the seed labels closed under the transitions."""
    assert (delta >= 0).all(), "minimization needs a total automaton"
    _, labels = np.unique(seed, return_inverse=True)
    while True:
        signature = np.concatenate([labels[:, None], labels[delta]], axis=1)
        _, new = np.unique(signature, axis=0, return_inverse=True)
        if len(np.unique(new)) == len(np.unique(labels)):
            return new
        labels = new


def _quotient(
    delta: np.ndarray, initial: int, labels: np.ndarray
) -> tuple[np.ndarray, int, np.ndarray]:
    """Collapse label classes; returns (delta, initial, class of each old state)."""
    n_classes = int(labels.max()) + 1
    rep = np.zeros(n_classes, dtype=np.int64)
    rep[labels[::-1]] = np.arange(len(labels) - 1, -1, -1)  # first state of each class
    qdelta = labels[delta[rep]].astype(np.int32)
    return qdelta, int(labels[initial]), labels


def _minimize_table(
    delta: np.ndarray, initial: int, seed: np.ndarray
) -> tuple[np.ndarray, int, np.ndarray]:
    """Minimize + canonical BFS renumber; returns (delta, initial, old->new map)."""
    labels = _moore_classes(delta, seed)
    qdelta, qinit, labels = _quotient(delta, initial, labels)
    pruned, old_of_new = _prune_reachable(qdelta, qinit)
    class_to_new = np.full(qdelta.shape[0], -1, dtype=np.int64)
    class_to_new[old_of_new] = np.arange(len(old_of_new))
    return pruned, 0, class_to_new[labels]


def compile_reach_dfa(
    f: ltlf.Formula, props: PropSet, max_states: int = DEFAULT_STATE_CAP
) -> Dfa:
    """Automaton whose runs visit the accepting set exactly when some
    nonempty prefix of the input trace satisfies f; the set is absorbing."""
    delta, bits = _Compiler(f, props).build(max_states)
    # Make accepting states absorbing before minimizing: reach semantics.
    accepting = np.nonzero(bits)[0]
    delta[accepting, :] = accepting[:, None].astype(np.int32)
    delta, old_of_new = _prune_reachable(delta, 0)
    bits = bits[old_of_new]
    delta, initial, state_map = _minimize_table(delta, 0, bits.astype(np.int64))
    n = delta.shape[0]
    reach_mask = np.zeros(n, dtype=bool)
    kept = state_map >= 0
    reach_mask[state_map[kept & bits]] = True

    # Fold a non-accepting initial state into the absorbing accepting class
    # when no edge enters it and every letter leaves it for that class: over
    # nonempty traces the language is unchanged, and it realizes the
    # one-state automaton for formulas satisfied by every first letter.
    if n > 1 and not reach_mask[initial]:
        targets = np.unique(delta[initial])
        incoming = (delta[np.arange(n) != initial] == initial).any() or (
            delta[initial] == initial
        ).any()
        if len(targets) == 1 and reach_mask[int(targets[0])] and not incoming:
            keep = np.nonzero(np.arange(n) != initial)[0]
            renumber = np.full(n, -1, dtype=np.int64)
            renumber[keep] = np.arange(n - 1)
            delta = renumber[delta[keep]].astype(np.int32)
            initial = int(renumber[int(targets[0])])
            reach_mask = reach_mask[keep]
            delta, old_of_new = _prune_reachable(delta, initial)
            reach_mask = reach_mask[old_of_new]
            initial = 0

    reach = frozenset(int(q) for q in np.nonzero(reach_mask)[0])
    return Dfa(props, delta.shape[0], initial, delta, Reach(reach))


def compile_prefix_safety_dfa(
    f: ltlf.Formula, props: PropSet, max_states: int = DEFAULT_STATE_CAP
) -> Dfa:
    """Automaton whose safe set is left exactly when some nonempty prefix of
    the input violates f.  The initial state is safe (no prefix read yet);
    a single absorbing sink collects every violation."""
    delta, bits = _Compiler(f, props).build(max_states)
    n = delta.shape[0]
    sink = n
    # Redirect every edge into a non-accepting state: that edge would end a
    # nonempty prefix falsifying f.  Edges into the initial state count too.
    delta = np.where(bits[delta], delta, np.int32(sink))
    delta = np.concatenate([delta, np.full((1, delta.shape[1]), sink, dtype=np.int32)])
    is_sink = np.zeros(n + 1, dtype=bool)
    is_sink[sink] = True
    delta, old_of_new = _prune_reachable(delta, 0)
    is_sink = is_sink[old_of_new]
    delta, initial, state_map = _minimize_table(delta, 0, is_sink.astype(np.int64))
    m = delta.shape[0]
    sink_mask = np.zeros(m, dtype=bool)
    kept = state_map >= 0
    sink_mask[state_map[kept & is_sink]] = True
    safe = frozenset(int(q) for q in np.nonzero(~sink_mask)[0])
    return Dfa(props, m, initial, delta, Safe(safe))


def product(dfas: Sequence[Dfa]) -> Dfa:
    """Synchronous product, pruned to the reachable part.

    Component acceptances are carried verbatim; use lift_component_states to
    build product-level goal or safe sets.  A transition is defined only when
    it is defined in every component.
    """
    assert dfas, "product of nothing"
    props = dfas[0].props
    assert all(d.props == props for d in dfas), "components disagree on propositions"
    sizes = [d.n_states for d in dfas]
    strides = np.ones(len(dfas), dtype=np.int64)
    for i in range(len(dfas) - 2, -1, -1):
        strides[i] = strides[i + 1] * sizes[i + 1]
    assert strides[0] * sizes[0] < 1 << 62

    def encode(states: np.ndarray) -> np.ndarray:
        return (states * strides).sum(axis=1)

    initial_tuple = np.array([[d.initial for d in dfas]], dtype=np.int64)
    codes = [encode(initial_tuple)[0]]
    code_index = {int(codes[0]): 0}
    frontier = initial_tuple
    while len(frontier):
        targets = []
        undef = None
        for i, d in enumerate(dfas):
            t = d.delta[frontier[:, i]].astype(np.int64)
            bad = t < 0
            undef = bad if undef is None else (undef | bad)
            targets.append(t)
        code_matrix = sum(t * s for t, s in zip(targets, strides))
        fresh = np.unique(code_matrix[~undef])
        fresh = fresh[~np.isin(fresh, np.fromiter(code_index, dtype=np.int64, count=len(code_index)))]
        if not len(fresh):
            break
        for c in fresh:
            code_index[int(c)] = len(codes)
            codes.append(int(c))
        decoded = np.empty((len(fresh), len(dfas)), dtype=np.int64)
        rest = fresh.copy()
        for i in range(len(dfas)):
            decoded[:, i] = rest // strides[i]
            rest = rest % strides[i]
        frontier = decoded

    all_codes = np.array(codes, dtype=np.int64)
    comp_states = np.empty((len(codes), len(dfas)), dtype=np.int64)
    rest = all_codes.copy()
    for i in range(len(dfas)):
        comp_states[:, i] = rest // strides[i]
        rest = rest % strides[i]

    sorted_codes = np.sort(all_codes)
    ids_for_sorted = np.argsort(all_codes, kind="stable")

    targets = []
    undef = None
    for i, d in enumerate(dfas):
        t = d.delta[comp_states[:, i]].astype(np.int64)
        bad = t < 0
        undef = bad if undef is None else (undef | bad)
        targets.append(t)
    code_matrix = sum(t * s for t, s in zip(targets, strides))
    code_matrix[undef] = sorted_codes[0]  # placeholder, overwritten below
    slots = np.searchsorted(sorted_codes, code_matrix)
    delta = ids_for_sorted[slots].astype(np.int32)
    delta[undef] = -1

    projections = tuple(comp_states[:, i].copy() for i in range(len(dfas)))
    return Dfa(
        props,
        len(codes),
        0,
        delta,
        None,
        projections=projections,
        component_acceptance=tuple(d.acceptance for d in dfas),
    )


def minimize(d: Dfa) -> Dfa:
    """Language-preserving minimization; needs a total automaton."""
    assert d.acceptance is not None, "minimization needs an acceptance condition"
    seed = np.zeros(d.n_states, dtype=np.int64)
    if isinstance(d.acceptance, Reach):
        members = d.acceptance.states
    elif isinstance(d.acceptance, Safe):
        members = d.acceptance.states
    else:
        raise TypeError("minimize a Reach or Safe automaton")
    seed[list(members)] = 1
    delta, initial, state_map = _minimize_table(d.delta, d.initial, seed)
    mapped = frozenset(
        int(state_map[q]) for q in members if state_map[q] >= 0
    )
    acceptance: Acceptance = (
        Reach(mapped) if isinstance(d.acceptance, Reach) else Safe(mapped)
    )
    return Dfa(d.props, delta.shape[0], initial, delta, acceptance)
