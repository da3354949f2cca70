"""Line-oriented problem files.

A file declares the propositions and the three formulas, optionally a
further duty/right pair used by scripted injections:

    # hash comments run to end of line
    vars env: rain wind
    vars agent: umbrella

    env: G !wind
    duty: F umbrella
    right: F (umbrella & !rain)

A formula may continue over following lines as long as they are indented.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import ltlf
from .automata import DEFAULT_PROP_CAP, PropSet
from .errors import EngineError, SpecFileError
from .synthesis import ProblemSpec

_HEADER_RE = re.compile(r"(vars env|vars agent|env|duty|right|further duty|further right)\s*:\s*(.*)\Z")
_FORMULA_SECTIONS = ("env", "duty", "right", "further duty", "further right")


@dataclass(frozen=True)
class SpecDocument:
    props: PropSet
    env: ltlf.Formula
    duty: ltlf.Formula
    right: ltlf.Formula
    further_duty: ltlf.Formula | None = None
    further_right: ltlf.Formula | None = None

    def problem(self) -> ProblemSpec:
        return ProblemSpec(self.props, self.env, self.duty, self.right)

    @property
    def has_further(self) -> bool:
        return self.further_duty is not None


def parse_spec_text(text: str, prop_cap: int = DEFAULT_PROP_CAP) -> SpecDocument:
    sections: dict[str, list[tuple[int, str]]] = {}
    current: list[tuple[int, str]] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if line[0] in " \t":
            if current is None:
                raise SpecFileError("continuation line before any section", lineno)
            current.append((lineno, line.strip()))
            continue
        m = _HEADER_RE.match(line)
        if m is None:
            raise SpecFileError(f"expected a section header, got {line.strip()!r}", lineno)
        name, rest = m.group(1), m.group(2)
        if name in sections:
            raise SpecFileError(f"duplicate section {name!r}", lineno)
        current = sections[name] = []
        if rest.strip():
            current.append((lineno, rest.strip()))

    for required in ("vars env", "vars agent", "env", "duty", "right"):
        if required not in sections:
            raise SpecFileError(f"missing section {required!r}", 0)
    have_fd = "further duty" in sections
    have_fr = "further right" in sections
    if have_fd != have_fr:
        raise SpecFileError("further duty and further right must appear together", 0)
    unknown = set(sections) - set(_FORMULA_SECTIONS) - {"vars env", "vars agent"}
    assert not unknown  # the header regex admits nothing else

    def var_list(name: str) -> tuple[str, ...]:
        out: list[str] = []
        for lineno, chunk in sections[name]:
            out.extend(chunk.split())
        return tuple(out)

    try:
        props = PropSet(var_list("vars env"), var_list("vars agent"), prop_cap)
    except ValueError as e:
        raise SpecFileError(str(e), sections["vars env"][0][0] if sections["vars env"] else 0) from None

    declared = frozenset(props.all_vars)

    def formula(name: str) -> ltlf.Formula:
        lines = sections[name]
        if not lines:
            raise SpecFileError(f"section {name!r} has no formula", 0)
        joined = "\n".join(chunk for _, chunk in lines)
        try:
            return ltlf.parse(joined, declared)
        except EngineError as e:
            local = getattr(e, "line", None)
            file_line = lines[local - 1][0] if local and local <= len(lines) else lines[0][0]
            raise SpecFileError(f"in section {name!r}: {e}", file_line) from None

    fd = formula("further duty") if have_fd else None
    fr = formula("further right") if have_fr else None
    return SpecDocument(props, formula("env"), formula("duty"), formula("right"), fd, fr)


def load_spec(path: str, prop_cap: int = DEFAULT_PROP_CAP) -> SpecDocument:
    with open(path, "r", encoding="utf-8") as f:
        return parse_spec_text(f.read(), prop_cap)
