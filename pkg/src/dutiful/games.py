"""Turn-based games on automata.

Every automaton doubles as an arena: in each round the environment picks the
X-part of the next letter, the agent answers with the Y-part.  An X-part is
available at a state when the transition is defined for every Y-completion;
arena restriction keeps that invariant, and the solvers reject arenas that
break it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .automata import Dfa, Reach, ReachSafe, Safe, _prune_reachable
from .errors import EnvUnrealizableError, MalformedArenaError


def _delta3(d: Dfa) -> np.ndarray:
    """Transitions as [state, y, x]."""
    return d.delta.reshape(d.n_states, d.props.n_y, d.props.n_x)


def _mask(n: int, states) -> np.ndarray:
    out = np.zeros(n, dtype=bool)
    if states:
        out[np.fromiter(states, dtype=np.int64, count=len(states))] = True
    return out


def _padded(delta3: np.ndarray, member: np.ndarray) -> np.ndarray:
    """member[delta3] with -1 entries reading as False."""
    n = member.shape[0]
    padded = np.append(member, False)
    return padded[np.where(delta3 < 0, n, delta3)]


def _defined_x(delta3: np.ndarray) -> np.ndarray:
    """Boolean [state, x]: the X-part is available (all Y-completions defined)."""
    defined = delta3 >= 0
    all_y = defined.all(axis=1)
    if (all_y != defined.any(axis=1)).any():
        raise MalformedArenaError(
            "an X-part is defined for some Y-completions but not all"
        )
    return all_y


def solve_env_safety(d: Dfa) -> frozenset[int]:
    """States from which the environment can keep the run inside the safe set
    forever, whatever the agent answers.  Needs a total automaton."""
    assert isinstance(d.acceptance, Safe)
    assert d.is_total(), "environment safety is solved on the unrestricted automaton"
    delta3 = _delta3(d)
    member = _mask(d.n_states, d.acceptance.states)
    while True:
        ok = member[delta3]          # [q, y, x]
        new = member & ok.all(axis=1).any(axis=1)
        if (new == member).all():
            return frozenset(int(q) for q in np.nonzero(member)[0])
        member = new


def restrict_arena(d: Dfa, env_region: frozenset[int]) -> Dfa:
    """Cut the automaton down to the environment's winning region.

    X-parts that could leave the region are removed outright (all their
    Y-completions turn undefined); the result is pruned to the reachable
    part and renumbered breadth-first.  Raises when the initial state is
    not in the region: the environment cannot honour its own constraint.
    """
    if d.initial not in env_region:
        raise EnvUnrealizableError(
            "the environment cannot satisfy its constraint from the start"
        )
    delta3 = _delta3(d).copy()
    member = _mask(d.n_states, env_region)
    keep_x = _padded(delta3, member).all(axis=1)   # [q, x]
    keep_x &= member[:, None]
    delta3[~np.broadcast_to(keep_x[:, None, :], delta3.shape)] = -1

    delta, old_of_new = _prune_reachable(delta3.reshape(d.n_states, -1), d.initial)
    safe = None
    if isinstance(d.acceptance, Safe):
        old_safe = _mask(d.n_states, d.acceptance.states)[old_of_new]
        safe = Safe(frozenset(int(q) for q in np.nonzero(old_safe)[0]))
    return Dfa(d.props, delta.shape[0], 0, delta, safe)


@dataclass(frozen=True)
class WinningRegion:
    """Reachability attractor, stratified by how soon the goal is forced.

    layers[0] is the goal; a state sits in layers[k] when the agent can
    force the goal within k rounds but not fewer.  member_layer maps each
    state to its layer, -1 outside the region.
    """

    layers: tuple[frozenset[int], ...]
    member_layer: np.ndarray

    @property
    def states(self) -> frozenset[int]:
        return frozenset().union(*self.layers) if self.layers else frozenset()

    def __contains__(self, state: int) -> bool:
        return self.member_layer[state] >= 0


def solve_reach(d: Dfa, goal: frozenset[int]) -> WinningRegion:
    """States from which the agent can force a visit to the goal.

    The agent wins at q when every available X-part has some Y-answer that
    moves closer to the goal.  Non-goal states with no available X-part are
    rejected: the environment must always be able to move.
    """
    delta3 = _delta3(d)
    defined_x = _defined_x(delta3)
    goal_mask = _mask(d.n_states, goal)
    if (~goal_mask & ~defined_x.any(axis=1)).any():
        raise MalformedArenaError("a non-goal state offers the environment no move")

    member_layer = np.where(goal_mask, 0, -1).astype(np.int64)
    member = goal_mask.copy()
    layers = [frozenset(int(q) for q in np.nonzero(goal_mask)[0])]
    k = 0
    while True:
        ok = _padded(delta3, member)               # [q, y, x]
        exists_y = ok.any(axis=1)                  # [q, x]
        forced = (exists_y | ~defined_x).all(axis=1) & defined_x.any(axis=1)
        fresh = forced & ~member
        if not fresh.any():
            break
        k += 1
        member_layer[fresh] = k
        member |= fresh
        layers.append(frozenset(int(q) for q in np.nonzero(fresh)[0]))
    return WinningRegion(tuple(layers), member_layer)


def reduce_reach_safe(d: Dfa, rs: ReachSafe) -> Dfa:
    """Rewrite reach-while-staying-safe as plain reachability.

    States outside the safe set become absorbing non-goals, so any play
    that strays is lost for good; state numbering is preserved.  The goal
    of the result is the reach set clipped to the safe set.
    """
    delta = d.delta.copy()
    unsafe = np.nonzero(~_mask(d.n_states, rs.safe))[0]
    delta[unsafe, :] = unsafe[:, None].astype(np.int32)
    goal = frozenset(rs.reach & rs.safe)
    return Dfa(d.props, d.n_states, d.initial, delta, Reach(goal))


def solve_env_dual(d: Dfa, goal: frozenset[int]) -> frozenset[int]:
    """States from which the environment can avoid the goal forever.

    The determinacy counterpart of solve_reach, used as a cross-check:
    on a well-formed arena the two regions partition the states.
    """
    delta3 = _delta3(d)
    defined_x = _defined_x(delta3)
    goal_mask = _mask(d.n_states, goal)
    member = ~goal_mask
    while True:
        ok = _padded(delta3, member).all(axis=1)   # [q, x]: every Y stays
        new = member & ~goal_mask & (ok & defined_x).any(axis=1)
        if (new == member).all():
            return frozenset(int(q) for q in np.nonzero(member)[0])
        member = new
