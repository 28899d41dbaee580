"""Whole-poset analysis of a model list and its JSON / DOT renderings."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from . import cover
from .errors import BudgetError, NotSeparableError
from .poset import (
    Pair,
    SeparableSet,
    all_pairs,
    bounds,
    equivalence_classes,
    fundamental_pairs,
    hasse_diagram,
    maximal_classes,
)


@dataclass
class PosetReport:
    n: int
    labels: list  # per model: defining pair or None
    separable: list  # per model: list of pairs
    equivalence_classes: list
    hasse_edges: list
    maximal: list
    fundamental_pairs: Optional[list]
    fundamental_number: Union[int, str]
    method: str
    lower_bound: int
    upper_bound: int
    theorem1: Optional[dict] = None
    note: Optional[str] = None
    class_names: Optional[list] = None
    provenance: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "kind": "poset_report",
            "n": self.n,
            "class_names": self.class_names,
            "models": [
                {"index": i, "label": list(lab) if lab else None,
                 "pairs": [list(p) for p in pairs]}
                for i, (lab, pairs) in enumerate(zip(self.labels, self.separable))
            ],
            "equivalence_classes": self.equivalence_classes,
            "hasse_edges": [list(e) for e in self.hasse_edges],
            "maximal": self.maximal,
            "fundamental_pairs": (
                None if self.fundamental_pairs is None
                else [list(p) for p in self.fundamental_pairs]
            ),
            "fundamental_number": self.fundamental_number,
            "fundamental_method": self.method,
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "theorem1": self.theorem1,
            "note": self.note,
            "provenance": self.provenance,
        }


def analyze(
    sets: Sequence[SeparableSet],
    labels: Optional[Sequence[Optional[Pair]]] = None,
    exact: bool = True,
    class_names: Optional[Sequence[str]] = None,
    **search,
) -> PosetReport:
    """Equivalence classes, Hasse diagram and fundamental number of ``sets``.

    Fundamental pairs (and the theorem-1 diagnostic) are only computed when
    ``labels`` assigns exactly one model to every pair.  An uncoverable pair
    or an exhausted search budget yields ``"unknown"`` with a note.
    """
    sets = list(sets)
    n = sets[0].n
    labels = list(labels) if labels is not None else [None] * len(sets)
    lo, hi = bounds(n)

    fps = None
    t1 = None
    labelled = [lab for lab in labels if lab is not None]
    if len(labelled) == len(sets) and sorted(labelled) == all_pairs(n):
        bank = dict(zip(labels, sets))
        fps = sorted(fundamental_pairs(bank))

    note = None
    try:
        if exact:
            fnum: Union[int, str] = cover.fundamental_number_exact(sets, n, **search)
        else:
            fnum = cover.fundamental_number_greedy(sets, n)
    except (NotSeparableError, BudgetError) as exc:
        fnum, note = "unknown", str(exc)

    if fps is not None and exact and isinstance(fnum, int):
        dedup = len({bank[p].bits for p in fps})
        t1 = {"dedup_fundamental_count": dedup, "exact_cover": fnum,
              "agrees": dedup == fnum}

    return PosetReport(
        n=n,
        labels=labels,
        separable=[s.pairs() for s in sets],
        equivalence_classes=equivalence_classes(sets),
        hasse_edges=hasse_diagram(sets),
        maximal=maximal_classes(sets),
        fundamental_pairs=fps,
        fundamental_number=fnum,
        method="exact" if exact else "greedy",
        lower_bound=lo,
        upper_bound=hi,
        theorem1=t1,
        note=note,
        class_names=list(class_names) if class_names is not None else None,
    )


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _quote(text: str) -> str:
    return '"' + _escape(text) + '"'


def _model_name(report: PosetReport, idx: int) -> str:
    lab = report.labels[idx]
    if lab is None:
        return f"M{idx}"
    if report.class_names:
        return "/".join(report.class_names[c] for c in lab)
    return f"{lab[0]}/{lab[1]}"


def to_dot(report: PosetReport, name: str = "hasse") -> str:
    """Hasse diagram as DOT: one node per equivalence class.

    Maximal classes are filled; an edge points from the more expressive class
    to the one it covers.
    """
    lines = [f"digraph {_quote(name)} {{", "  rankdir=TB;",
             "  node [shape=ellipse];"]
    maximal = set(report.maximal)
    for u, members in enumerate(report.equivalence_classes):
        label = "\\n".join(_escape(_model_name(report, m)) for m in members)
        style = ' style=filled fillcolor="lightsalmon"' if u in maximal else ""
        lines.append(f'  c{u} [label="{label}"{style}];')
    for u, v in report.hasse_edges:
        lines.append(f"  c{u} -> c{v};")
    lines.append("}")
    return "\n".join(lines) + "\n"
