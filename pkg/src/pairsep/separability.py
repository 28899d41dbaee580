"""Separability of a head bank on a (possibly novel) set of classes.

Row ``r`` of the matrix is the ``r``-th pair ``(i, j)``, ``i < j``, of the
evaluated classes in lexicographic order; column ``h`` is the bank's ``h``-th
head in the same order over the training classes.  For every cell the head is
oriented by the sign of its mean decision on class ``i`` (zero counts as
positive); class ``j`` is expected on the opposite side.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, DomainError
from .features import FeatureSet
from .heads import HeadBank, check_eps
from .poset import Pair, SeparableSet, all_pairs


@dataclass
class SeparabilityReport:
    classes: list  # evaluated class names
    head_classes: list  # bank class names
    eps: float
    errors: np.ndarray  # (rows, P) oriented balanced error
    provenance: dict = field(default_factory=dict)

    @property
    def rows(self) -> list[Pair]:
        return all_pairs(len(self.classes))

    @property
    def heads(self) -> list[Pair]:
        return all_pairs(len(self.head_classes))

    @property
    def matrix(self) -> np.ndarray:
        return self.errors < self.eps

    @property
    def score(self) -> int:
        return separability_score(self.matrix)

    def best(self) -> dict:
        """Novel pair -> (head pair, error) with the smallest error."""
        heads = self.heads
        out = {}
        for r, pair in enumerate(self.rows):
            k = int(np.argmin(self.errors[r]))
            out[pair] = (heads[k], float(self.errors[r, k]))
        return out

    def with_eps(self, eps: float) -> "SeparabilityReport":
        return SeparabilityReport(self.classes, self.head_classes, check_eps(eps),
                                  self.errors, dict(self.provenance))

    def to_json(self) -> dict:
        best = self.best()
        S = self.matrix
        return {
            "kind": "separability_report",
            "eps": self.eps,
            "score": self.score,
            "max_score": len(self.rows),
            "classes": list(self.classes),
            "head_classes": list(self.head_classes),
            "rows": [list(p) for p in self.rows],
            "heads": [list(p) for p in self.heads],
            "matrix": S.astype(int).tolist(),
            "errors": self.errors.tolist(),
            "best": [
                {"pair": list(p), "head": list(best[p][0]), "error": best[p][1],
                 "separated": bool(S[r].any())}
                for r, p in enumerate(self.rows)
            ],
            "provenance": self.provenance,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "SeparabilityReport":
        try:
            classes = list(doc["classes"])
            head_classes = list(doc["head_classes"])
            errors = np.asarray(doc["errors"], dtype=float).reshape(
                len(all_pairs(len(classes))), len(all_pairs(len(head_classes))))
            return cls(classes, head_classes, check_eps(float(doc["eps"])), errors,
                       doc.get("provenance", {}))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, DomainError):
                raise
            raise DataError(f"malformed separability report: {exc}") from exc

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["i", "j", "best_head_i", "best_head_j", "best_error", "separated"])
        S = self.matrix
        for r, (pair, (head, err)) in enumerate(self.best().items()):
            w.writerow([self.classes[pair[0]], self.classes[pair[1]],
                        self.head_classes[head[0]], self.head_classes[head[1]],
                        repr(err), int(S[r].any())])
        return buf.getvalue()


def _check_inputs(features: FeatureSet, bank: HeadBank) -> None:
    if features.d != bank.d:
        raise DomainError(f"features have dimension {features.d}, bank expects {bank.d}")
    if features.n_classes < 2:
        raise DomainError("separability needs at least two evaluated classes")


def error_matrix(features: FeatureSet, bank: HeadBank) -> np.ndarray:
    """Oriented balanced error of every head on every evaluated pair."""
    _check_inputs(features, bank)
    W, B = bank.weights()
    npos, sign_pos, counts = [], [], []
    for X in features.data:
        D = X @ W + B
        npos.append(np.count_nonzero(D >= 0, axis=0))
        sign_pos.append(D.mean(axis=0) >= 0)
        counts.append(X.shape[0])
    rows = all_pairs(features.n_classes)
    E = np.empty((len(rows), W.shape[1]))
    for r, (i, j) in enumerate(rows):
        up = sign_pos[i]
        wrong_i = np.where(up, counts[i] - npos[i], npos[i])
        wrong_j = np.where(up, npos[j], counts[j] - npos[j])
        if counts[i] == counts[j]:
            E[r] = (wrong_i + wrong_j) / (2 * counts[i])
        else:
            E[r] = 0.5 * (wrong_i / counts[i] + wrong_j / counts[j])
    return E


def separability_report(features: FeatureSet, bank: HeadBank, eps: float) -> SeparabilityReport:
    check_eps(eps)
    return SeparabilityReport(list(features.names), list(bank.classes), float(eps),
                              error_matrix(features, bank))


def separability_matrix(features: FeatureSet, bank: HeadBank, eps: float) -> np.ndarray:
    """Boolean ``(pairs of features, heads)`` matrix: error below ``eps``."""
    return separability_report(features, bank, eps).matrix


def separability_score(S) -> int:
    """Number of rows with at least one set bit."""
    S = np.asarray(S, dtype=bool)
    if S.size == 0:
        return 0
    return int(np.count_nonzero(S.any(axis=1)))


def best_head_per_pair(features: FeatureSet, bank: HeadBank) -> dict:
    E = error_matrix(features, bank)
    heads = bank.pairs
    out = {}
    for r, pair in enumerate(all_pairs(features.n_classes)):
        k = int(np.argmin(E[r]))
        out[pair] = (heads[k], float(E[r, k]))
    return out


def head_separable_sets(report: SeparabilityReport) -> tuple[list, list]:
    """Each head's column as a separable set over the evaluated classes.

    Returns ``(sets, labels)``; a head's label is its training pair mapped onto
    the evaluated classes, or ``None`` when a class is not evaluated.
    """
    n = len(report.classes)
    S = report.matrix
    sets = []
    for h in range(S.shape[1]):
        bits = 0
        for r in np.flatnonzero(S[:, h]):
            bits |= 1 << int(r)
        sets.append(SeparableSet(bits, n))
    where = {name: k for k, name in enumerate(report.classes)}
    labels = []
    for a, b in report.heads:
        na, nb = report.head_classes[a], report.head_classes[b]
        if na in where and nb in where:
            labels.append(tuple(sorted((where[na], where[nb]))))
        else:
            labels.append(None)
    return sets, labels
