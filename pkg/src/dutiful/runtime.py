"""Round-by-round execution of synthesized strategies.

A Session holds a realizable synthesis result and plays it against
environment moves fed in one X-part at a time.  Between rounds the agent
may exercise rights or accept further duties; the session keeps the play,
the product run, and the verdicts, and freezes everything into a
PlayRecord when the strategy stops.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

from . import ltlf
from .errors import (
    HorizonExceededError,
    IllegalEnvMoveError,
    ResourceLimitError,
    SessionError,
)
from .synthesis import (
    STOP,
    FurtherResult,
    FurtherSpec,
    Strategy,
    SynthesisResult,
    instantiate,
    synthesize_further,
)


@dataclass(frozen=True)
class PlayRecord:
    """A finished play and the evaluator's verdicts on it.

    Further verdicts are judged at the instant the pair was injected and
    are None when no injection was accepted."""

    play: tuple[int, ...]
    stop_round: int
    duty_satisfied: bool
    right_satisfied: bool
    further_duty_satisfied: bool | None = None
    further_right_satisfied: bool | None = None
    inject_round: int | None = None


@dataclass(frozen=True)
class Event:
    """A scripted between-rounds action: exercise a right or inject a
    further duty/right pair at a given round boundary."""

    round: int
    kind: str                      # "exercise" | "inject"
    which: str | None = None       # exercise: "base" | "further" | "both"
    further_duty: ltlf.Formula | None = None
    further_right: ltlf.Formula | None = None


class Session:
    """One play of a realizable problem, driven one environment move at a
    time.  Mode moves from duty-only to rights-committed on exercise and
    to further once an injected pair is accepted; a single injection per
    session keeps the goal bookkeeping to the cases the theory covers."""

    def __init__(self, result: SynthesisResult, horizon_slack: int = 1):
        if not result.realizable:
            raise SessionError("cannot run an unrealizable problem")
        self.result = result
        self.props = result.spec.props
        self.mode = "duty"
        self.status = "running"
        self.history: list[int] = []
        self.committed = False
        self.committed_further = False
        self.further: FurtherResult | None = None
        self.inject_round: int | None = None
        self.rejections: list[dict] = []
        self.play_record: PlayRecord | None = None
        self._horizon_slack = horizon_slack
        self._activate(instantiate(result.duty_transducer), 0)

    # -- bookkeeping ---------------------------------------------------

    def _activate(self, strategy: Strategy, rounds_so_far: int):
        self._strategy = strategy
        self._run = strategy.start()
        self._activation_rounds = rounds_so_far
        self._horizon = strategy.transducer.arena.n_states + self._horizon_slack

    def _fast_forward(self, strategy: Strategy):
        """Switch strategies mid-play by replaying the seed we already played."""
        run = strategy.start()
        for letter in strategy.seed:
            run.respond(self.props.x_of(letter))
        self._strategy = strategy
        self._run = run
        self._activation_rounds = len(self.history)
        self._horizon = strategy.transducer.arena.n_states + self._horizon_slack

    @property
    def arena_state(self) -> int:
        """Current state of the active arena (hat product after injection)."""
        return self._run.state

    @property
    def base_state(self) -> int:
        """Current state of the base product."""
        if self.further is None:
            return self._run.state
        return int(self.further.hat.projections[0][self._run.state])

    @property
    def layer(self) -> int:
        return int(self._strategy.transducer.region.member_layer[self._run.state])

    @property
    def round(self) -> int:
        return len(self.history)

    def legal_env_moves(self) -> tuple[int, ...]:
        """X-parts the environment may play now, ascending."""
        arena = self._strategy.transducer.arena
        props = self.props
        col = arena.delta.reshape(arena.n_states, props.n_y, props.n_x)[self._run.state]
        return tuple(int(x) for x in range(props.n_x) if (col[:, x] >= 0).all())

    @property
    def stopping_now(self) -> bool:
        return self.status == "running" and self._run.will_stop()

    # -- the round loop ------------------------------------------------

    def step(self, env_move) -> int | object:
        """Feed one environment X-part; returns the agent's Y-part or STOP."""
        if self.status != "running":
            raise SessionError(f"session is {self.status}")
        x = env_move if isinstance(env_move, int) else self.props.x_index(env_move)
        if x not in self.legal_env_moves():
            raise IllegalEnvMoveError(
                f"X-part {sorted(self.props.x_names(x))} is not available here"
            )
        y = self._run.respond(x)
        if y is STOP:
            self._close()
            return STOP
        self.history.append(self.props.combine(x, y))
        if len(self.history) - self._activation_rounds > self._horizon:
            raise HorizonExceededError(
                f"no stop within {self._horizon} rounds of activating the strategy"
            )
        if self.layer < 0:
            self.status = "rejected"
            self.rejections.append(
                {"round": self.round, "reason": "run left the strategy's region"}
            )
        return y

    def finish_if_stopping(self) -> bool:
        """Close the session now when the next response is stop regardless
        of the environment's move; lets drivers skip the dummy round."""
        if self.stopping_now:
            self._close()
            return True
        return False

    def _close(self):
        self.status = "stopped"
        play = tuple(self.history)
        trace = [self.props.letter_names(l) for l in play]
        spec = self.result.spec
        fd_ok = fr_ok = None
        if self.further is not None:
            fs = self.further.spec
            fd_ok = ltlf.evaluate(fs.further_duty, trace, self.inject_round)
            fr_ok = ltlf.evaluate(fs.further_right, trace, self.inject_round)
        self.play_record = PlayRecord(
            play,
            len(play),
            ltlf.evaluate(spec.duty, trace),
            ltlf.evaluate(spec.right, trace),
            fd_ok,
            fr_ok,
            self.inject_round,
        )

    # -- between-rounds actions -----------------------------------------

    def exercise_right(self, which: str | None = None):
        """Commit to finishing a right; the stop rule gains its goal.

        In duty-only mode the base right is the only choice.  After an
        injection, which picks "base", "further", or "both"; the default
        commits whichever is still open, preferring the base right."""
        if self.status != "running":
            raise SessionError(f"session is {self.status}")
        if self.further is None:
            if which not in (None, "base"):
                raise SessionError("no further rights to exercise before an injection")
            if self.committed:
                raise SessionError("the right was already exercised")
            self.committed = True
            self.mode = "rights"
            strat = instantiate(self.result.rights_transducer, tuple(self.history))
            self._fast_forward(strat)
            return
        if which is None:
            which = "base" if not self.committed else "further"
        if which not in ("base", "further", "both"):
            raise SessionError(f"unknown right {which!r}")
        if which in ("base", "both") and self.committed:
            raise SessionError("the right was already exercised")
        if which in ("further", "both") and self.committed_further:
            raise SessionError("the further right was already exercised")
        self.committed = self.committed or which in ("base", "both")
        self.committed_further = self.committed_further or which in ("further", "both")
        option = "both" if (self.committed and self.committed_further) else (
            "r" if self.committed else "fr"
        )
        t = self.further.option(option)
        seed = tuple(self.history[self.inject_round :])
        self._fast_forward(Strategy(t, seed, self.inject_round))

    def inject_further(
        self, further_duty: ltlf.Formula, further_right: ltlf.Formula
    ) -> dict:
        """Offer a further duty/right pair at the current round.

        Returns {"accepted": bool, "reason": ...}; a rejection leaves the
        session exactly as it was.  One accepted injection per session."""
        if self.status != "running":
            raise SessionError(f"session is {self.status}")
        if self.further is not None:
            raise SessionError("a further pair was already accepted in this session")
        fs = FurtherSpec(
            self.result.spec, further_duty, further_right, tuple(self.history)
        )
        outcome = synthesize_further(
            fs, base_result=self.result, committed_right=self.committed
        )
        if not outcome.realizable:
            entry = {
                "round": self.round,
                "further_duty": str(further_duty),
                "further_right": str(further_right),
                "reason": outcome.reason,
            }
            self.rejections.append(entry)
            return {"accepted": False, "reason": outcome.reason}
        self.further = outcome
        self.inject_round = self.round
        self.mode = "further"
        self._activate(
            Strategy(outcome.duty_transducer, (), self.round), self.round
        )
        return {"accepted": True, "reason": None}

    # -- snapshot for drivers and the wire ------------------------------

    def snapshot(self) -> dict:
        sizes = dict(self.result.sizes)
        if self.further is not None:
            sizes["further_product"] = self.further.hat.n_states
        return {
            "status": self.status,
            "mode": self.mode,
            "round": self.round,
            "history": [sorted(self.props.letter_names(l)) for l in self.history],
            "arena_state": self.arena_state if self.status == "running" else None,
            "layer": self.layer if self.status == "running" else None,
            "available_env_moves": [
                sorted(self.props.x_names(x)) for x in self.legal_env_moves()
            ]
            if self.status == "running"
            else [],
            "committed": {"base": self.committed, "further": self.committed_further},
            "rejections": list(self.rejections),
            "sizes": sizes,
            "play_record": _record_dict(self.play_record),
        }


def _record_dict(rec: PlayRecord | None) -> dict | None:
    if rec is None:
        return None
    return {
        "play": rec.play,
        "stop_round": rec.stop_round,
        "duty_satisfied": rec.duty_satisfied,
        "right_satisfied": rec.right_satisfied,
        "further_duty_satisfied": rec.further_duty_satisfied,
        "further_right_satisfied": rec.further_right_satisfied,
        "inject_round": rec.inject_round,
    }


# -- environment policies ---------------------------------------------------


class ScriptedPolicy:
    """Plays a fixed move list; running dry before the stop is an error."""

    def __init__(self, moves: Sequence):
        self._moves = list(moves)
        self._at = 0

    def reset(self):
        self._at = 0

    def pick(self, legal: tuple[int, ...]) -> int:
        if self._at >= len(self._moves):
            raise SessionError("environment script exhausted before the play stopped")
        move = self._moves[self._at]
        self._at += 1
        return move


class RandomPolicy:
    """Seeded linear-congruential choice among the legal moves."""

    MUL = 6364136223846793005
    INC = 1442695040888963407

    def __init__(self, seed: int):
        self._seed = seed & 0xFFFFFFFFFFFFFFFF
        self._state = self._seed

    def reset(self):
        self._state = self._seed

    def pick(self, legal: tuple[int, ...]) -> int:
        self._state = (self.MUL * self._state + self.INC) & 0xFFFFFFFFFFFFFFFF
        return legal[(self._state >> 33) % len(legal)]


class ExhaustivePolicy:
    """Depth-first cursor over every environment choice sequence.

    Run a session to completion, call advance(), and repeat while it
    returns True; together the runs cover every play the environment can
    force out of the strategy."""

    def __init__(self):
        self._plan: list[int] = []
        self._widths: list[int] = []
        self._depth = 0
        self.exhausted = False

    def reset(self):
        self._depth = 0

    def pick(self, legal: tuple[int, ...]) -> int:
        d = self._depth
        if d == len(self._plan):
            self._plan.append(0)
            self._widths.append(len(legal))
        else:
            self._widths[d] = len(legal)
        self._depth += 1
        return legal[self._plan[d]]

    def advance(self) -> bool:
        del self._plan[self._depth :]
        del self._widths[self._depth :]
        while self._plan and self._plan[-1] + 1 >= self._widths[-1]:
            self._plan.pop()
            self._widths.pop()
        if not self._plan:
            self.exhausted = True
            return False
        self._plan[-1] += 1
        return True


def run_to_completion(
    session: Session,
    policy,
    events: Iterable[Event] = (),
    max_rounds: int | None = None,
) -> PlayRecord:
    """Drive a session with an environment policy until the strategy stops.

    Events fire at their round boundary before the environment moves,
    injections before exercises.  The dummy env move a stop would consume
    is skipped, so scripted and exhaustive policies only spend moves that
    reach the play."""
    pending = sorted(events, key=lambda e: (e.round, 0 if e.kind == "inject" else 1))
    budget = max_rounds if max_rounds is not None else 10 * session.props.n_letters * (
        session.result.product.n_states + 2
    )
    while session.status == "running":
        while pending and pending[0].round <= session.round:
            e = pending.pop(0)
            if e.kind == "inject":
                session.inject_further(e.further_duty, e.further_right)
            elif e.kind == "exercise":
                session.exercise_right(e.which)
            else:
                raise SessionError(f"unknown event kind {e.kind!r}")
        if session.finish_if_stopping():
            break
        if budget <= 0:
            raise HorizonExceededError("run_to_completion exceeded its round budget")
        budget -= 1
        x = policy.pick(session.legal_env_moves())
        session.step(x)
    if session.status != "stopped":
        raise SessionError(f"session ended {session.status} without a play")
    return session.play_record


def enumerate_plays(
    make_session: Callable[[], Session],
    events: Iterable[Event] = (),
    limit: int | None = None,
) -> Iterator[PlayRecord]:
    """Every play an adversarial environment can produce, one per path."""
    policy = ExhaustivePolicy()
    produced = 0
    while not policy.exhausted:
        session = make_session()
        policy.reset()
        yield run_to_completion(session, policy, events)
        produced += 1
        if not policy.advance():
            break
        if limit is not None and produced >= limit:
            raise ResourceLimitError(f"more than {limit} distinct plays")
