"""Class and pair separability aggregated over runs, and stage correlations.

A run trains heads on a subset of classes and evaluates them on a fixed
evaluation set.  Each run is recorded once per stage: ``pre`` for the frozen
pretrained extractor, ``post`` after fine-tuning or training from scratch.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DataError, DegenerateVarianceError, DomainError
from .heads import check_eps
from .separability import SeparabilityReport

STAGES = ("pre", "post")


@dataclass
class RunRecord:
    run_id: str
    subset: list  # training class names, in head order
    report: SeparabilityReport
    stage: str = "pre"

    def __post_init__(self):
        if not self.subset:
            raise DataError(f"run {self.run_id!r} has an empty class subset")
        if self.stage not in STAGES:
            raise DataError(f"run {self.run_id!r}: unknown stage {self.stage!r}")
        if list(self.subset) != list(self.report.head_classes):
            raise DataError(f"run {self.run_id!r}: subset does not match the report's heads")

    def to_json(self) -> dict:
        return {"kind": "run_record", "run_id": self.run_id, "stage": self.stage,
                "subset": list(self.subset), "report": self.report.to_json()}

    @classmethod
    def from_json(cls, doc: dict) -> "RunRecord":
        try:
            return cls(str(doc["run_id"]), list(doc["subset"]),
                       SeparabilityReport.from_json(doc["report"]), doc.get("stage", "pre"))
        except KeyError as exc:
            raise DataError(f"malformed run record: missing {exc}") from exc


def _check_same_eval(runs: Sequence[RunRecord]) -> None:
    if runs and any(r.report.classes != runs[0].report.classes for r in runs):
        raise DataError("runs evaluate different class sets and cannot share a table")


def class_separability_run(run: RunRecord, name: str, eps: float) -> int:
    """Evaluation pairs whose best head among those trained on ``name`` has error <= eps."""
    cols = [k for k, (a, b) in enumerate(run.report.heads)
            if name in (run.subset[a], run.subset[b])]
    best = run.report.errors[:, cols].min(axis=1)
    return int(np.count_nonzero(~(best > eps)))


def class_separability(runs: Sequence[RunRecord], name: str, eps: float) -> float:
    """Mean over the runs containing class ``name`` of its per-run separability."""
    check_eps(eps)
    _check_same_eval(runs)
    picked = [r for r in runs if name in r.subset]
    if not picked:
        raise DomainError(f"no run trains on class {name!r}")
    return sum(class_separability_run(r, name, eps) for r in picked) / len(picked)


def pair_separability_run(run: RunRecord, pair: tuple, eps: float) -> int:
    """Evaluation pairs the head trained on ``pair`` separates (error < eps)."""
    a, b = sorted(run.subset.index(c) for c in pair)
    col = run.report.heads.index((a, b))
    return int(np.count_nonzero(run.report.errors[:, col] < eps))


def pair_separability(runs: Sequence[RunRecord], pair: tuple, eps: float) -> float:
    """Mean over the runs containing both classes of ``pair``."""
    check_eps(eps)
    _check_same_eval(runs)
    if len(set(pair)) != 2:
        raise DomainError(f"{pair!r} is not a pair of distinct classes")
    picked = [r for r in runs if pair[0] in r.subset and pair[1] in r.subset]
    if not picked:
        raise DomainError(f"no run trains on both classes of {pair!r}")
    return sum(pair_separability_run(r, pair, eps) for r in picked) / len(picked)


def pearson(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float, float]:
    """Sample correlation and least-squares line ``y = slope * x + intercept``."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise DomainError("pearson needs two sequences of equal length")
    if x.size < 2:
        raise DomainError("pearson needs at least two points")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx, syy, sxy = dx @ dx, dy @ dy, dx @ dy
    if sxx == 0 or syy == 0:
        raise DegenerateVarianceError("a series has zero variance; correlation undefined")
    r = float(np.clip(sxy / math.sqrt(sxx * syy), -1.0, 1.0))
    slope = float(sxy / sxx)
    return r, slope, float(y.mean() - slope * x.mean())


def _correlate(pairs: list) -> dict:
    pairs = [(a, b) for a, b in pairs if a is not None and b is not None]
    try:
        r, slope, intercept = pearson([a for a, _ in pairs], [b for _, b in pairs])
    except DomainError as exc:
        return {"n": len(pairs), "pearson": None, "slope": None, "intercept": None,
                "error": str(exc)}
    return {"n": len(pairs), "pearson": r, "slope": slope, "intercept": intercept}


@dataclass
class MetricTable:
    eps: float
    separability: dict  # run_id -> [pre, post]
    classes: dict  # class name -> [pre, post]
    pairs: dict  # "a/b" -> [pre, post]
    correlations: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"kind": "metric_table", "eps": self.eps,
                "separability": self.separability, "class_separability": self.classes,
                "pair_separability": self.pairs, "correlations": self.correlations,
                "provenance": self.provenance}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["metric", "entity", "pre", "post"])
        for metric, rows in (("separability", self.separability),
                             ("class_separability", self.classes),
                             ("pair_separability", self.pairs)):
            for entity, (pre, post) in rows.items():
                w.writerow([metric, entity, "" if pre is None else repr(pre),
                            "" if post is None else repr(post)])
        return buf.getvalue()

    def summary(self) -> str:
        lines = [f"{'Metric':<20}{'Pearson':>10}{'Slope':>10}{'Intercept':>12}{'N':>6}"]
        for key, title in (("separability", "Separability"),
                           ("class_separability", "Class separability"),
                           ("pair_separability", "Pair separability")):
            c = self.correlations[key]
            if c["pearson"] is None:
                lines.append(f"{title:<20}{'n/a':>10}{'n/a':>10}{'n/a':>12}{c['n']:>6}")
            else:
                lines.append(f"{title:<20}{c['pearson']:>10.2f}{c['slope']:>10.2f}"
                             f"{c['intercept']:>12.2f}{c['n']:>6}")
        return "\n".join(lines)


def build_table(runs: Sequence[RunRecord], eps: float) -> MetricTable:
    """Per-run, per-class and per-pair separability for both stages.

    Each correlation compares a metric before training (x) with the same
    metric after training (y); entities missing a stage are skipped.
    """
    check_eps(eps)
    runs = list(runs)
    if not runs:
        raise DomainError("no run records")
    _check_same_eval(runs)
    by_stage = {s: [r for r in runs if r.stage == s] for s in STAGES}
    seen = set()
    for r in runs:
        if (r.run_id, r.stage) in seen:
            raise DataError(f"duplicate run record {r.run_id!r} ({r.stage})")
        seen.add((r.run_id, r.stage))

    run_ids = sorted({r.run_id for r in runs})
    sep: dict = {rid: [None, None] for rid in run_ids}
    for k, s in enumerate(STAGES):
        for r in by_stage[s]:
            sep[r.run_id][k] = r.report.with_eps(eps).score

    names = sorted({c for r in runs for c in r.subset})
    classes: dict = {}
    for c in names:
        row: list[Optional[float]] = []
        for s in STAGES:
            picked = [r for r in by_stage[s] if c in r.subset]
            row.append(class_separability(picked, c, eps) if picked else None)
        classes[c] = row

    pair_keys = sorted({tuple(sorted((r.subset[a], r.subset[b])))
                        for r in runs for a, b in r.report.heads})
    pairs: dict = {}
    for p in pair_keys:
        row = []
        for s in STAGES:
            picked = [r for r in by_stage[s] if p[0] in r.subset and p[1] in r.subset]
            row.append(pair_separability(picked, p, eps) if picked else None)
        pairs[f"{p[0]}/{p[1]}"] = row

    correlations = {
        "separability": _correlate(list(sep.values())),
        "class_separability": _correlate(list(classes.values())),
        "pair_separability": _correlate(list(pairs.values())),
    }
    return MetricTable(float(eps), sep, classes, pairs, correlations)
