"""Serialization: canonical JSON, guard rendering, DOT."""

import json
import random

from dutiful import PropSet, compile_prefix_safety_dfa, compile_reach_dfa, parse
from dutiful.exports import (
    canonical_json,
    dfa_from_json,
    dfa_to_dot,
    dfa_to_json_dict,
    guard_text,
    region_to_json_dict,
    transducer_to_dot,
    transducer_to_json_dict,
)
from dutiful.games import solve_reach
from dutiful.synthesis import ProblemSpec, synthesize

from oracles import random_formula

P = PropSet(("a",), ("b",))


def test_canonical_json_is_stable():
    one = canonical_json({"b": 1, "a": [2, 3]})
    two = canonical_json({"a": [2, 3], "b": 1})
    assert one == two
    assert one.endswith("\n")
    assert json.loads(one) == {"a": [2, 3], "b": 1}


def test_guard_text_basics():
    d = compile_reach_dfa(parse("F a"), P)
    # initial state loops on !a and advances on a
    data = dfa_to_json_dict(d)
    by_target = {e["to"]: e["guard"] for e in data["edges"] if e["from"] == 0}
    assert by_target[0] == "!a"
    assert by_target[1] == "a"


def test_guard_text_condenses_full_letters():
    assert guard_text(P, list(range(P.n_letters))) == "true"
    assert guard_text(P, []) == "false"
    assert guard_text(P, [3]) == "a & b"


def test_round_trip_identity_on_random_formulas():
    props = PropSet(("a", "c"), ("b",))
    rng = random.Random(31)
    names = list(props.all_vars)
    for _ in range(40):
        f = parse(random_formula(rng, names, 3))
        for compiled in (
            compile_reach_dfa(f, props),
            compile_prefix_safety_dfa(f, props),
        ):
            one = canonical_json(dfa_to_json_dict(compiled))
            back = dfa_from_json(json.loads(one))
            assert canonical_json(dfa_to_json_dict(back)) == one
            assert (back.delta == compiled.delta).all()
            assert back.acceptance == compiled.acceptance


def test_dot_marks_accepting_states():
    d = compile_reach_dfa(parse("F a"), P)
    dot = dfa_to_dot(d, "reach")
    assert "digraph" in dot and "peripheries=2" in dot
    assert dot.count("->") >= 2


def synth():
    return synthesize(
        ProblemSpec(P, parse("true"), parse("F b"), parse("F !b"))
    )


def test_region_json_shape():
    res = synth()
    data = region_to_json_dict(res.agn_r)
    assert data["layers"][0] == sorted(res.agn_r.layers[0])
    assert len(data["member_layer"]) == res.product.n_states


def test_transducer_json_covers_exactly_the_region():
    res = synth()
    data = transducer_to_json_dict(res.duty_transducer)
    region = res.agn.states
    assert {int(q) for q in data["tau"]} == region
    assert data["initial"] == res.product.initial
    for q, row in data["tau"].items():
        for x_names, ys in row.items():
            assert isinstance(ys, list) and ys


def test_transducer_dot_renders_moves():
    res = synth()
    dot = transducer_to_dot(res.duty_transducer, "T")
    assert "digraph" in dot
    assert "/" in dot  # x / y edge labels
