"""Nearest-class-mean few-shot episodes and separability-driven pair sets."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DataError, DomainError
from .features import FeatureSet
from .heads import HeadBank, check_eps
from .poset import Pair, all_pairs
from .rng import keyed_rng
from .separability import error_matrix


@dataclass(frozen=True)
class EpisodeConfig:
    ways: int = 2
    shots: int = 1
    queries: int = 15
    normalize: bool = False

    def __post_init__(self):
        if self.ways < 2 or self.shots < 1 or self.queries < 1:
            raise DomainError("episodes need ways >= 2, shots >= 1, queries >= 1")


@dataclass
class EpisodeStats:
    mean: float
    ci95: float
    runs: int
    accuracies: np.ndarray = field(repr=False, default=None)

    def to_json(self) -> dict:
        return {"kind": "episode_stats", "mean": self.mean, "ci95": self.ci95,
                "runs": self.runs}


def ncm_classify(means, query) -> int:
    """Index of the Euclidean-nearest mean; ties go to the lowest index."""
    M = np.atleast_2d(np.asarray(means, dtype=np.float64))
    q = np.asarray(query, dtype=np.float64)
    if M.shape[0] == 0:
        raise DomainError("no class means")
    if q.shape != (M.shape[1],):
        raise DomainError(f"query dimension {q.shape} does not match means {M.shape[1]}")
    return int(np.argmin(((M - q) ** 2).sum(axis=1)))


def _l2_normalize(X: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(X, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return X / norms


def episode_accuracy(features: FeatureSet, classes: Sequence[int], cfg: EpisodeConfig,
                     rng: np.random.Generator) -> float:
    supports, queries = [], []
    for c in classes:
        X = features[c]
        idx = rng.permutation(X.shape[0])[: cfg.shots + cfg.queries]
        S, Q = X[idx[: cfg.shots]], X[idx[cfg.shots:]]
        if cfg.normalize:
            S, Q = _l2_normalize(S), _l2_normalize(Q)
        supports.append(S.mean(axis=0))
        queries.append(Q)
    M = np.stack(supports)
    correct = 0
    for label, Q in enumerate(queries):
        d2 = ((Q[:, None, :] - M[None, :, :]) ** 2).sum(axis=2)
        correct += int(np.count_nonzero(d2.argmin(axis=1) == label))
    return correct / (len(classes) * cfg.queries)


def run_episodes(features: FeatureSet, cfg: EpisodeConfig = EpisodeConfig(), n_runs: int = 10000,
                 seed: int = 0, class_pool: Optional[Sequence[Pair]] = None) -> EpisodeStats:
    """Mean NCM accuracy over ``n_runs`` episodes with a 95% normal interval.

    Episode ``e`` draws from its own stream keyed on ``(seed, e)``.  With a
    ``class_pool`` each episode's classes are one pool pair picked uniformly.
    """
    if n_runs < 1:
        raise DomainError("n_runs must be >= 1")
    need = cfg.shots + cfg.queries
    if class_pool is not None:
        pool = [tuple(p) for p in class_pool]
        if not pool:
            raise DomainError("empty class pool")
        if cfg.ways != 2:
            raise DomainError("a pair pool requires 2-way episodes")
        used = {c for p in pool for c in p}
    else:
        pool = None
        if cfg.ways > features.n_classes:
            raise DomainError(f"{cfg.ways}-way episodes need at least {cfg.ways} classes")
        used = set(range(features.n_classes))
    for c in sorted(used):
        if not 0 <= c < features.n_classes:
            raise DomainError(f"class id {c} out of range")
        if features.counts[c] < need:
            raise DataError(f"class {features.names[c]!r} has {features.counts[c]} samples, "
                            f"episodes need {need}")

    acc = np.empty(n_runs)
    for e in range(n_runs):
        rng = keyed_rng(seed, e)
        if pool is not None:
            classes = pool[int(rng.integers(len(pool)))]
        else:
            classes = rng.choice(features.n_classes, size=cfg.ways, replace=False)
        acc[e] = episode_accuracy(features, classes, cfg, rng)
    sd = float(acc.std(ddof=1)) if n_runs > 1 else 0.0
    return EpisodeStats(float(acc.mean()), 1.96 * sd / math.sqrt(n_runs), n_runs, acc)


@dataclass
class PairSets:
    best: list
    worst: list
    errors: dict  # novel pair -> best-head error
    degenerate: bool

    def to_json(self, names: Optional[Sequence[str]] = None) -> dict:
        def show(p):
            return [names[p[0]], names[p[1]]] if names else list(p)
        return {"kind": "pair_sets", "best": [show(p) for p in self.best],
                "worst": [show(p) for p in self.worst],
                "errors": [{"pair": show(p), "error": e} for p, e in self.errors.items()],
                "degenerate": self.degenerate}


def best_worst_pair_sets(bank: HeadBank, novel: FeatureSet, eps: float, k: int) -> PairSets:
    """The ``k`` novel pairs easiest and hardest for the bank's best head.

    Pairs are ranked by their smallest oriented head error; ties go to the
    lexicographically smaller pair in both lists.  ``degenerate`` flags the
    case where every pair has the same error.
    """
    check_eps(eps)
    pairs = all_pairs(novel.n_classes)
    if not 1 <= k <= len(pairs):
        raise DomainError(f"k = {k} but there are {len(pairs)} novel pairs")
    E = error_matrix(novel, bank)
    errors = {p: float(E[r].min()) for r, p in enumerate(pairs)}
    best = sorted(pairs, key=lambda p: (errors[p], p))[:k]
    worst = sorted(pairs, key=lambda p: (-errors[p], p))[:k]
    return PairSets(best, worst, errors, len(set(errors.values())) == 1)
