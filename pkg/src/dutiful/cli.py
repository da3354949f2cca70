"""Command line interface: check, synth, play, report."""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import ltlf
from .automata import DEFAULT_STATE_CAP, PropSet
from .errors import EngineError, EnvUnrealizableError
from .exports import (
    canonical_json,
    dfa_to_dot,
    region_to_json_dict,
    transducer_to_json_dict,
)
from .runtime import Event, RandomPolicy, ScriptedPolicy, Session, run_to_completion
from .specfile import SpecDocument, load_spec
from .synthesis import SynthesisResult, synthesize

EXIT_REALIZABLE = 0
EXIT_UNREALIZABLE = 1
EXIT_ENV_UNREALIZABLE = 2
EXIT_INPUT_ERROR = 3


def _with_reserved_stop(doc: SpecDocument) -> SpecDocument:
    """Append a fresh agent proposition so the all-false agent assignment
    stays expressible as an ordinary move; the engine treats the stop as
    out-of-band either way, the extra variable only reserves the name."""
    base = "halt"
    name = base
    k = 1
    while name in doc.props.all_vars:
        k += 1
        name = f"{base}_{k}"
    props = PropSet(doc.props.env_vars, doc.props.agent_vars + (name,), doc.props.cap)
    return SpecDocument(
        props, doc.env, doc.duty, doc.right, doc.further_duty, doc.further_right
    )


def _load(args) -> SpecDocument:
    doc = load_spec(args.spec)
    if getattr(args, "reserved_stop", False):
        doc = _with_reserved_stop(doc)
    return doc


def _outcome_exit(res: SynthesisResult) -> int:
    return EXIT_REALIZABLE if res.realizable else EXIT_UNREALIZABLE


def cmd_check(args) -> int:
    doc = _load(args)
    res = synthesize(doc.problem(), args.max_states)
    for key, value in res.sizes.items():
        print(f"{key} states: {value}")
    print("REALIZABLE" if res.realizable else "UNREALIZABLE")
    if doc.has_further and res.realizable:
        from .synthesis import FurtherSpec, synthesize_further

        fs = FurtherSpec(doc.problem(), doc.further_duty, doc.further_right, ())
        fres = synthesize_further(fs, base_result=res, max_states=args.max_states)
        if fres.realizable:
            print("further pair at empty history: ACCEPTED")
        else:
            print(f"further pair at empty history: REJECTED ({fres.reason})")
    return _outcome_exit(res)


def cmd_synth(args) -> int:
    doc = _load(args)
    res = synthesize(doc.problem(), args.max_states)
    os.makedirs(args.out, exist_ok=True)

    def emit(name: str, text: str):
        path = os.path.join(args.out, name)
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
        print(f"wrote {path}")

    accent = res.joint_goal
    emit("product.dot", dfa_to_dot(res.product, name="product", accent=accent))
    regions = {
        "agn": region_to_json_dict(res.agn) if res.agn is not None else None,
        "agn_r": region_to_json_dict(res.agn_r),
    }
    emit("regions.json", canonical_json(regions))
    if res.realizable:
        emit("T.json", canonical_json(transducer_to_json_dict(res.duty_transducer)))
        emit("T_r.json", canonical_json(transducer_to_json_dict(res.rights_transducer)))
        print("REALIZABLE")
    else:
        print("UNREALIZABLE")
    return _outcome_exit(res)


def _policy_from_json(doc: SpecDocument, data: dict):
    kind = data.get("kind", "scripted")
    if kind == "scripted":
        moves = [doc.props.x_index(names) for names in data["moves"]]
        return ScriptedPolicy(moves)
    if kind == "random":
        return RandomPolicy(int(data.get("seed", 0)))
    raise ValueError(f"unknown env policy kind {kind!r}")


def _events_from_json(doc: SpecDocument, items: list) -> list[Event]:
    declared = frozenset(doc.props.all_vars)
    out = []
    for item in items:
        action = item["action"]
        if action == "exercise":
            out.append(Event(int(item["round"]), "exercise", item.get("which")))
        elif action == "inject":
            fd_text = item.get("further_duty")
            fr_text = item.get("further_right")
            fd = ltlf.parse(fd_text, declared) if fd_text else doc.further_duty
            fr = ltlf.parse(fr_text, declared) if fr_text else doc.further_right
            if fd is None or fr is None:
                raise ValueError(
                    "inject event needs formulas in the script or a further pair in the spec file"
                )
            out.append(Event(int(item["round"]), "inject", None, fd, fr))
        else:
            raise ValueError(f"unknown event action {action!r}")
    return out


def cmd_play(args) -> int:
    doc = _load(args)
    if args.serve:
        from .service import serve

        host, _, port = args.serve.rpartition(":")
        serve(host or "127.0.0.1", int(port), args.max_states)
        return EXIT_REALIZABLE
    with open(args.script, "r", encoding="utf-8") as f:
        script = json.load(f)
    res = synthesize(doc.problem(), args.max_states)
    if not res.realizable:
        print("UNREALIZABLE")
        return EXIT_UNREALIZABLE
    session = Session(res)
    policy = _policy_from_json(doc, script.get("env", {"kind": "random", "seed": 0}))
    events = _events_from_json(doc, script.get("events", []))
    rec = run_to_completion(
        session, policy, events, max_rounds=script.get("max_rounds")
    )
    props = doc.props
    for i, letter in enumerate(rec.play):
        xs = ",".join(sorted(props.x_names(props.x_of(letter)))) or "-"
        ys = ",".join(sorted(props.y_names(props.y_of(letter)))) or "-"
        marks = []
        if rec.inject_round == i:
            marks.append("inject accepted")
        print(f"round {i + 1}: env {{{xs}}} / agent {{{ys}}}" + (
            "   <- " + "; ".join(marks) if marks else ""
        ))
    for rejection in session.rejections:
        print(f"rejected at round {rejection['round']}: {rejection['reason']}")
    print(f"stop after round {rec.stop_round}")
    print(json.dumps(_verdicts(rec), sort_keys=True))
    return EXIT_REALIZABLE


def _verdicts(rec) -> dict:
    return {
        "duty_satisfied": rec.duty_satisfied,
        "right_satisfied": rec.right_satisfied,
        "further_duty_satisfied": rec.further_duty_satisfied,
        "further_right_satisfied": rec.further_right_satisfied,
        "stop_round": rec.stop_round,
        "inject_round": rec.inject_round,
    }


def cmd_report(args) -> int:
    doc = _load(args)
    from .report import render_report

    summary = render_report(doc, args.out, args.max_states, args.samples, args.seed)
    for key, value in summary.items():
        print(f"{key}: {value}")
    return EXIT_REALIZABLE if summary["realizable"] else EXIT_UNREALIZABLE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dutiful",
        description="Finite-trace reactive synthesis with duties and exercisable rights",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("spec", help="problem file (vars, env, duty, right)")
        p.add_argument("--max-states", type=int, default=DEFAULT_STATE_CAP)
        p.add_argument(
            "--reserved-stop",
            action="store_true",
            help="reserve a fresh agent proposition so the all-false move stays ordinary",
        )

    p = sub.add_parser("check", help="report realizability and sizes")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("synth", help="write transducers, product, and regions")
    common(p)
    p.add_argument("-o", "--out", required=True, help="output directory")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("play", help="run a scripted play or serve the wire protocol")
    common(p)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--script", help="JSON file with env policy and events")
    group.add_argument("--serve", metavar="HOST:PORT", help="serve the session protocol")
    p.set_defaults(func=cmd_play)

    p = sub.add_parser("report", help="write summary.csv and figures")
    common(p)
    p.add_argument("-o", "--out", required=True, help="output directory")
    p.add_argument("--samples", type=int, default=100, help="random plays to sample")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EnvUnrealizableError as e:
        print(f"ENV-UNREALIZABLE: {e}", file=sys.stderr)
        return EXIT_ENV_UNREALIZABLE
    except (EngineError, OSError, ValueError, KeyError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
