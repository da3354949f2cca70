"""Reporting: a delimited summary plus rendered figures for a problem file."""

from __future__ import annotations

import csv
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .automata import DEFAULT_STATE_CAP, compile_reach_dfa
from .runtime import RandomPolicy, Session, run_to_completion
from .specfile import SpecDocument
from .synthesis import synthesize


def _figure_sizes(path: str, labels: list[str], values: list[int]):
    fig, ax = plt.subplots(figsize=(6, 3.2))
    ax.bar(labels, values, color="#4878a8")
    ax.set_ylabel("states")
    ax.set_title("automaton sizes")
    for i, v in enumerate(values):
        ax.text(i, v, str(v), ha="center", va="bottom", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _figure_layers(path: str, member_layer: np.ndarray):
    ranked = member_layer[member_layer >= 0]
    fig, ax = plt.subplots(figsize=(6, 3.2))
    if len(ranked):
        top = int(ranked.max())
        counts = np.bincount(ranked, minlength=top + 1)
        ax.bar(range(top + 1), counts, color="#6aa84f")
    ax.set_xlabel("layer (rounds to goal)")
    ax.set_ylabel("states")
    ax.set_title("winning region stratification")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _figure_plays(path: str, lengths: list[int]):
    fig, ax = plt.subplots(figsize=(6, 3.2))
    if lengths:
        bins = range(1, max(lengths) + 2)
        ax.hist(lengths, bins=bins, align="left", rwidth=0.8, color="#a05050")
        ax.axvline(sum(lengths) / len(lengths), linestyle="--", color="black")
    ax.set_xlabel("play length (rounds)")
    ax.set_ylabel("plays")
    ax.set_title("random-adversary play lengths")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_report(
    doc: SpecDocument,
    out_dir: str,
    max_states: int = DEFAULT_STATE_CAP,
    samples: int = 100,
    seed: int = 0,
) -> dict:
    os.makedirs(out_dir, exist_ok=True)
    problem = doc.problem()
    res = synthesize(problem, max_states)
    duty_dfa = compile_reach_dfa(problem.duty, problem.props, max_states)
    right_dfa = compile_reach_dfa(problem.right, problem.props, max_states)

    summary: dict = {
        "realizable": res.realizable,
        "env_states": res.env_arena.n_states,
        "duty_states": duty_dfa.n_states,
        "right_states": right_dfa.n_states,
        "product_states": res.product.n_states,
        "region_states": len(res.agn_r.states),
        "layers": len(res.agn_r.layers),
    }

    _figure_sizes(
        os.path.join(out_dir, "sizes.png"),
        ["env", "duty", "right", "product", "region"],
        [
            summary["env_states"],
            summary["duty_states"],
            summary["right_states"],
            summary["product_states"],
            summary["region_states"],
        ],
    )
    _figure_layers(os.path.join(out_dir, "layers.png"), res.agn_r.member_layer)

    lengths: list[int] = []
    duty_ok = right_ok = 0
    if res.realizable:
        for i in range(samples):
            rec = run_to_completion(Session(res), RandomPolicy(seed + i))
            lengths.append(rec.stop_round)
            duty_ok += rec.duty_satisfied
            right_ok += rec.right_satisfied
        _figure_plays(os.path.join(out_dir, "plays.png"), lengths)
        summary["plays_sampled"] = samples
        summary["mean_play_length"] = round(sum(lengths) / len(lengths), 3)
        summary["duty_satisfied_rate"] = duty_ok / samples
        summary["right_satisfied_rate"] = right_ok / samples

    with open(os.path.join(out_dir, "summary.csv"), "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["key", "value"])
        for key, value in summary.items():
            writer.writerow([key, value])
    return summary
