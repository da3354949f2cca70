"""Synthesis of duty-fulfilling strategies that keep rights exercisable.

The pipeline compiles the environment constraint to a prefix-safety
automaton, restricts it to the environment's winning region, takes the
product with the reach automata of the duty and the right, and solves a
reachability game for the joint goal.  The duty transducer then heads for
the duty alone while never leaving the joint winning region, so the right
stays available until the agent decides; a second transducer finishes the
right off on demand.  After some history, further duties and rights can be
layered on by re-rooting the product and repeating the construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import ltlf
from .automata import DEFAULT_STATE_CAP, Dfa, PropSet, ReachSafe, compile_prefix_safety_dfa, compile_reach_dfa, product, run_on
from .errors import (
    BaseUnrealizableError,
    HistoryOutsideRegionError,
    IncompatibleHistoryError,
    UndefinedTransitionError,
)
from .games import WinningRegion, reduce_reach_safe, restrict_arena, solve_env_safety, solve_reach


class _Stop:
    """The out-of-band stop token an agent plays to end the round loop."""

    def __repr__(self):
        return "STOP"


STOP = _Stop()


@dataclass(frozen=True)
class ProblemSpec:
    props: PropSet
    env: ltlf.Formula
    duty: ltlf.Formula
    right: ltlf.Formula


@dataclass(frozen=True)
class FurtherSpec:
    """A duty/right pair arriving after some rounds have been played."""

    base: ProblemSpec
    further_duty: ltlf.Formula
    further_right: ltlf.Formula
    at_history: tuple[int, ...]


@dataclass(eq=False)
class Transducer:
    """Strategy generator: at each ranked state it offers every agent move
    that makes progress toward the goal; at goal or unranked states it
    offers every defined move.  The stop rule watches the goal set."""

    arena: Dfa
    region: WinningRegion
    goal: frozenset[int]

    def moves(self, state: int, x: int) -> tuple[int, ...]:
        props = self.arena.props
        col = self.arena.delta.reshape(self.arena.n_states, props.n_y, props.n_x)[
            state, :, x
        ]
        defined = col >= 0
        rank = int(self.region.member_layer[state])
        if rank >= 1:
            target_rank = np.full(col.shape, -1, dtype=np.int64)
            target_rank[defined] = self.region.member_layer[col[defined]]
            ok = (target_rank >= 0) & (target_rank <= rank - 1)
        else:
            ok = defined
        return tuple(int(y) for y in np.nonzero(ok)[0])

    def choose(self, state: int, x: int) -> int:
        """Deterministic tie-break: the numerically smallest move bitset.

        At goal states every defined move is on offer, but a play may have
        to continue for one more round; prefer moves that keep the run
        inside the region so nothing the agent is owed gets forfeited."""
        options = self.moves(state, x)
        if not options:
            raise UndefinedTransitionError(-1)
        if int(self.region.member_layer[state]) < 1:
            col = self.arena.delta.reshape(
                self.arena.n_states, self.arena.props.n_y, self.arena.props.n_x
            )[state, :, x]
            staying = [y for y in options if self.region.member_layer[col[y]] >= 0]
            if staying:
                return staying[0]
        return options[0]


@dataclass(eq=False)
class SynthesisResult:
    realizable: bool
    spec: ProblemSpec
    env_arena: Dfa
    product: Dfa
    duty_goal: frozenset[int]
    right_goal: frozenset[int]
    agn_r: WinningRegion
    agn: WinningRegion | None = None
    duty_transducer: Transducer | None = None
    rights_transducer: Transducer | None = None

    @property
    def joint_goal(self) -> frozenset[int]:
        return self.duty_goal & self.right_goal

    @property
    def sizes(self) -> dict[str, int]:
        return {
            "env": self.env_arena.n_states,
            "product": self.product.n_states,
            "region": len(self.agn_r.states),
        }


def _env_pipeline(p: ProblemSpec, max_states: int) -> Dfa:
    a_e = compile_prefix_safety_dfa(p.env, p.props, max_states)
    return restrict_arena(a_e, solve_env_safety(a_e))


def synthesize(p: ProblemSpec, max_states: int = DEFAULT_STATE_CAP) -> SynthesisResult:
    """Solve the duty/right problem; realizable iff the initial product
    state can force a visit to both goals at once while the environment
    honours its constraint."""
    env_arena = _env_pipeline(p, max_states)
    a_d = compile_reach_dfa(p.duty, p.props, max_states)
    a_r = compile_reach_dfa(p.right, p.props, max_states)
    a = product([env_arena, a_d, a_r])
    duty_goal = a.lift_component_states(1, a_d.acceptance.states)
    right_goal = a.lift_component_states(2, a_r.acceptance.states)
    agn_r = solve_reach(a, duty_goal & right_goal)
    if a.initial not in agn_r:
        return SynthesisResult(False, p, env_arena, a, duty_goal, right_goal, agn_r)

    reduced = reduce_reach_safe(a, ReachSafe(duty_goal, agn_r.states))
    agn = solve_reach(reduced, reduced.acceptance.states)
    t = Transducer(reduced, agn, duty_goal)
    t_r = Transducer(a, agn_r, duty_goal & right_goal)
    return SynthesisResult(True, p, env_arena, a, duty_goal, right_goal, agn_r, agn, t, t_r)


@dataclass(eq=False)
class Strategy:
    """A deterministic strategy: replay the seed, then follow the
    transducer's tie-break choice, then stop once the goal was visited
    and the play extends the strategy's starting point by a round.

    prior_rounds counts letters already absorbed into the arena's root by
    re-rooting (they are not replayed); plays must grow strictly past
    them, which keeps the instant the further duty is judged at inside
    the play."""

    transducer: Transducer
    seed: tuple[int, ...]
    prior_rounds: int = 0

    def start(self) -> "StrategyRun":
        return StrategyRun(self)


class StrategyRun:
    def __init__(self, strategy: Strategy):
        self.strategy = strategy
        self.state = strategy.transducer.arena.initial
        self.rounds = strategy.prior_rounds
        self.stopped = False
        self._pending = list(strategy.seed)
        self._min_rounds = strategy.prior_rounds + 1

    def will_stop(self) -> bool:
        """True when the next response is stop, whatever the environment plays."""
        return self.stopped or (
            not self._pending
            and self.state in self.strategy.transducer.goal
            and self.rounds >= self._min_rounds
        )

    def respond(self, x: int) -> int | _Stop:
        """The agent's answer to the environment's X-part."""
        t = self.strategy.transducer
        props = t.arena.props
        if self.stopped:
            return STOP
        if self._pending:
            expected = self._pending.pop(0)
            if props.x_of(expected) != x:
                raise IncompatibleHistoryError(self.rounds)
            y = props.y_of(expected)
        elif self.will_stop():
            self.stopped = True
            return STOP
        else:
            y = t.choose(self.state, x)
        target = t.arena.delta[self.state, props.combine(x, y)]
        if target < 0:
            raise UndefinedTransitionError(self.rounds)
        self.state = int(target)
        self.rounds += 1
        return y


def instantiate(t: Transducer, seed_history: Sequence = ()) -> Strategy:
    """A deterministic strategy that replays seed_history first.

    The seed must keep the arena run inside the transducer's region."""
    letters = tuple(t.arena.props.as_letter(l) for l in seed_history)
    run = run_on(t.arena, letters)
    for step, q in enumerate(run.states):
        if t.region.member_layer[q] < 0:
            raise HistoryOutsideRegionError(step)
    return Strategy(t, letters)


def enforce_wrt_history(
    p: ProblemSpec, target: ltlf.Formula, h: Sequence, max_states: int = DEFAULT_STATE_CAP
) -> Strategy | None:
    """A strategy enforcing the target formula on every play extending h,
    or None when h already wandered outside the target's winning region."""
    env_arena = _env_pipeline(p, max_states)
    a_t = compile_reach_dfa(target, p.props, max_states)
    g = product([env_arena, a_t])
    goal = g.lift_component_states(1, a_t.acceptance.states)
    region = solve_reach(g, goal)
    letters = tuple(p.props.as_letter(l) for l in h)
    try:
        run = run_on(g, letters)
    except UndefinedTransitionError as e:
        raise IncompatibleHistoryError(e.step) from None
    if any(region.member_layer[q] < 0 for q in run.states):
        return None
    return Strategy(Transducer(g, region, goal), letters)


def rights_strategy_at(res: SynthesisResult, h: Sequence) -> Strategy:
    """Commit to the right after history h: replay h, then drive the play
    to the joint goal.  The underlying transducer does not depend on h."""
    assert res.realizable and res.rights_transducer is not None
    return instantiate(res.rights_transducer, h)


def env_after_history(p: ProblemSpec, h: Sequence, max_states: int = DEFAULT_STATE_CAP) -> Dfa:
    """The restricted environment arena re-rooted at the state h lands on."""
    env_arena = _env_pipeline(p, max_states)
    letters = tuple(p.props.as_letter(l) for l in h)
    try:
        run = run_on(env_arena, letters)
    except UndefinedTransitionError as e:
        raise IncompatibleHistoryError(e.step) from None
    return env_arena.reroot(run.landed)


def _lift_through_base(hat: Dfa, base_states: frozenset[int]) -> frozenset[int]:
    """Hat-product states whose base-product component lies in the set."""
    base_proj = hat.projections[0]
    members = np.isin(
        base_proj, np.fromiter(base_states, dtype=np.int64, count=len(base_states))
    )
    return frozenset(int(q) for q in np.nonzero(members)[0])


@dataclass(eq=False)
class FurtherResult:
    realizable: bool
    reason: str | None
    spec: FurtherSpec
    hat: Dfa | None = None
    duty_goal: frozenset[int] = frozenset()
    right_goal: frozenset[int] = frozenset()
    further_duty_goal: frozenset[int] = frozenset()
    further_right_goal: frozenset[int] = frozenset()
    agn_rfr: WinningRegion | None = None
    duty_transducer: Transducer | None = None
    _options: dict = field(default_factory=dict)

    def option(self, which: str) -> Transducer:
        """On-demand transducer finishing the named rights.

        which: "r" for the original right, "fr" for the further right,
        "both" for the two at once.  Each keeps the other rights alive
        until reached, by staying inside the joint winning region."""
        assert self.realizable
        found = self._options.get(which)
        if found is not None:
            return found
        core = self.duty_goal & self.further_duty_goal
        if which == "r":
            goal = core & self.right_goal
        elif which == "fr":
            goal = core & self.further_right_goal
        elif which == "both":
            goal = core & self.right_goal & self.further_right_goal
        else:
            raise ValueError(f"unknown rights option {which!r}")
        if which == "both":
            t = Transducer(self.hat, self.agn_rfr, goal)
        else:
            reduced = reduce_reach_safe(self.hat, ReachSafe(goal, self.agn_rfr.states))
            t = Transducer(reduced, solve_reach(reduced, reduced.acceptance.states), goal)
        self._options[which] = t
        return t


def synthesize_further(
    fs: FurtherSpec,
    base_result: SynthesisResult | None = None,
    committed_right: bool = False,
    lazy_rights: bool = False,
    max_states: int = DEFAULT_STATE_CAP,
) -> FurtherResult:
    """Layer a further duty/right pair on top of a run already under way.

    The history must have stayed inside the base joint winning region;
    the re-rooted product is then crossed with the new reach automata and
    solved for the four-way goal.  The returned duty transducer heads for
    both duties (plus the original right when already committed) while
    keeping every uncommitted right available."""
    res = base_result if base_result is not None else synthesize(fs.base, max_states)
    if not res.realizable:
        raise BaseUnrealizableError("the base duty/right problem is unrealizable")
    props = fs.base.props
    letters = tuple(props.as_letter(l) for l in fs.at_history)
    try:
        run = run_on(res.product, letters)
    except UndefinedTransitionError as e:
        raise IncompatibleHistoryError(e.step) from None
    for q in run.states:
        if res.agn_r.member_layer[q] < 0:
            return FurtherResult(
                False, "the history has already left the joint winning region", fs
            )

    a_fd = compile_reach_dfa(fs.further_duty, props, max_states)
    a_fr = compile_reach_dfa(fs.further_right, props, max_states)
    hat = product([res.product.reroot(run.landed), a_fd, a_fr])
    duty_goal = _lift_through_base(hat, res.duty_goal)
    right_goal = _lift_through_base(hat, res.right_goal)
    fd_goal = hat.lift_component_states(1, a_fd.acceptance.states)
    fr_goal = hat.lift_component_states(2, a_fr.acceptance.states)
    four_way = duty_goal & right_goal & fd_goal & fr_goal
    agn_rfr = solve_reach(hat, four_way)
    if hat.initial not in agn_rfr:
        return FurtherResult(
            False,
            "the further duty and right cannot be enforced together with the "
            "original pair from here",
            fs,
            hat,
            duty_goal,
            right_goal,
            fd_goal,
            fr_goal,
            agn_rfr,
        )

    goal = duty_goal & fd_goal
    if committed_right:
        goal &= right_goal
    reduced = reduce_reach_safe(hat, ReachSafe(goal, agn_rfr.states))
    t_hat = Transducer(reduced, solve_reach(reduced, reduced.acceptance.states), goal)
    out = FurtherResult(
        True, None, fs, hat, duty_goal, right_goal, fd_goal, fr_goal, agn_rfr, t_hat
    )
    if not lazy_rights:
        for which in ("r", "fr", "both"):
            out.option(which)
    return out
