"""Canonical serialization of automata, regions, and transducers.

JSON output is byte-stable: keys sorted, two-space indent, one trailing
newline, edge guards emitted as canonical cube covers.  The JSON automaton
round-trips: export, import, export again gives identical bytes.
"""

from __future__ import annotations

import json
from typing import Iterable

import numpy as np

from . import ltlf
from .automata import Dfa, PropSet, Reach, ReachSafe, Safe
from .bdd import Bdd
from .games import WinningRegion
from .synthesis import Transducer


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _letters_to_bdd(b: Bdd, mask: np.ndarray) -> int:
    """The Boolean function over letter bits whose models are the mask.

    Letter bit i is variable i; the recursion splits on the lowest bit
    first, matching the manager's variable order."""

    def build(sub: np.ndarray, var: int) -> int:
        if len(sub) == 1:
            return b.const(bool(sub[0]))
        return b.mk(var, build(sub[0::2], var + 1), build(sub[1::2], var + 1))

    return build(mask, 0)


def guard_text(props: PropSet, letters: Iterable[int]) -> str:
    """Canonical formula text for a set of letters."""
    mask = np.zeros(props.n_letters, dtype=bool)
    for l in letters:
        mask[l] = True
    b = Bdd()
    f = _letters_to_bdd(b, mask)
    if f == b.const(False):
        return "false"
    if f == b.const(True):
        return "true"
    parts = []
    for cube in b.cubes(f):
        lits = [
            props.all_vars[var] if value else "!" + props.all_vars[var]
            for var, value in cube
        ]
        parts.append(" & ".join(lits) if lits else "true")
    return " | ".join(parts)


def _acceptance_dict(acc) -> dict | None:
    if acc is None:
        return None
    if isinstance(acc, Reach):
        return {"kind": "reach", "states": sorted(acc.states)}
    if isinstance(acc, Safe):
        return {"kind": "safe", "states": sorted(acc.states)}
    if isinstance(acc, ReachSafe):
        return {"kind": "reach_safe", "reach": sorted(acc.reach), "safe": sorted(acc.safe)}
    raise TypeError(f"unknown acceptance {acc!r}")


def dfa_to_json_dict(d: Dfa) -> dict:
    edges = []
    for q in range(d.n_states):
        row = d.delta[q]
        for target in sorted(set(int(t) for t in row if t >= 0)):
            letters = [int(l) for l in np.nonzero(row == target)[0]]
            edges.append({"from": q, "to": target, "guard": guard_text(d.props, letters)})
    return {
        "props": {"env": list(d.props.env_vars), "agent": list(d.props.agent_vars)},
        "n_states": d.n_states,
        "initial": d.initial,
        "acceptance": _acceptance_dict(d.acceptance),
        "edges": edges,
    }


def dfa_to_json(d: Dfa) -> str:
    return canonical_json(dfa_to_json_dict(d))


def dfa_from_json(source: str | dict) -> Dfa:
    data = json.loads(source) if isinstance(source, str) else source
    props = PropSet(tuple(data["props"]["env"]), tuple(data["props"]["agent"]))
    n = data["n_states"]
    delta = np.full((n, props.n_letters), -1, dtype=np.int32)
    declared = frozenset(props.all_vars)
    for edge in data["edges"]:
        guard = ltlf.parse(edge["guard"], declared)
        q, target = edge["from"], edge["to"]
        for letter in range(props.n_letters):
            if ltlf.evaluate(guard, [props.letter_names(letter)]):
                if delta[q, letter] >= 0:
                    raise ValueError(f"overlapping guards at state {q}")
                delta[q, letter] = target
    acc = data["acceptance"]
    acceptance = None
    if acc is not None:
        if acc["kind"] == "reach":
            acceptance = Reach(frozenset(acc["states"]))
        elif acc["kind"] == "safe":
            acceptance = Safe(frozenset(acc["states"]))
        elif acc["kind"] == "reach_safe":
            acceptance = ReachSafe(frozenset(acc["reach"]), frozenset(acc["safe"]))
        else:
            raise ValueError(f"unknown acceptance kind {acc['kind']!r}")
    return Dfa(props, n, data["initial"], delta, acceptance)


def region_to_json_dict(w: WinningRegion) -> dict:
    return {
        "layers": [sorted(layer) for layer in w.layers],
        "member_layer": [int(v) for v in w.member_layer],
    }


def transducer_to_json_dict(t: Transducer) -> dict:
    props = t.arena.props
    tau: dict[str, dict[str, list[str]]] = {}
    for q in range(t.arena.n_states):
        if int(t.region.member_layer[q]) < 0:
            continue
        row: dict[str, list[str]] = {}
        for x in range(props.n_x):
            ys = t.moves(q, x)
            if not ys:
                continue
            key = ",".join(sorted(props.x_names(x)))
            row[key] = [",".join(sorted(props.y_names(y))) for y in ys]
        if row:
            tau[str(q)] = row
    return {
        "states": t.arena.n_states,
        "initial": t.arena.initial,
        "goal": sorted(t.goal),
        "member_layer": [int(v) for v in t.region.member_layer],
        "tau": tau,
    }


def _accent_states(d: Dfa) -> frozenset[int]:
    if isinstance(d.acceptance, Reach):
        return d.acceptance.states
    if isinstance(d.acceptance, Safe):
        return d.acceptance.states
    if isinstance(d.acceptance, ReachSafe):
        return d.acceptance.reach
    return frozenset()


def dfa_to_dot(d: Dfa, name: str = "dfa", accent: frozenset[int] | None = None) -> str:
    accent = _accent_states(d) if accent is None else accent
    lines = [f"digraph {name} {{", "  rankdir=LR;", "  __start [shape=point];",
             f"  __start -> q{d.initial};"]
    for q in range(d.n_states):
        extra = ", peripheries=2" if q in accent else ""
        lines.append(f'  q{q} [label="{q}"{extra}];')
    for q in range(d.n_states):
        row = d.delta[q]
        for target in sorted(set(int(t) for t in row if t >= 0)):
            letters = [int(l) for l in np.nonzero(row == target)[0]]
            guard = guard_text(d.props, letters)
            lines.append(f'  q{q} -> q{target} [label="{guard}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def transducer_to_dot(t: Transducer, name: str = "strategy") -> str:
    """The graph the deterministic tie-break strategy actually walks."""
    props = t.arena.props
    lines = [f"digraph {name} {{", "  rankdir=LR;", "  __start [shape=point];",
             f"  __start -> q{t.arena.initial};"]
    ml = t.region.member_layer
    for q in range(t.arena.n_states):
        if ml[q] < 0:
            continue
        extra = ", peripheries=2" if q in t.goal else ""
        lines.append(f'  q{q} [label="{q} (layer {int(ml[q])})"{extra}];')
    for q in range(t.arena.n_states):
        if ml[q] < 0:
            continue
        for x in range(props.n_x):
            ys = t.moves(q, x)
            if not ys:
                continue
            y = t.choose(q, x)
            letter = props.combine(x, y)
            target = int(t.arena.delta[q, letter])
            xs = ",".join(sorted(props.x_names(x))) or "-"
            yn = ",".join(sorted(props.y_names(y))) or "-"
            lines.append(f'  q{q} -> q{target} [label="{xs} / {yn}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
