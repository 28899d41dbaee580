"""Per-pair linear heads trained with binary cross-entropy on frozen features."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .errors import DataError, DomainError
from .features import FeatureSet
from .poset import Pair, all_pairs

DEFAULT_EPS = 0.025


@dataclass(frozen=True)
class Hyperplane:
    """The affine function ``<w, x> + b``; ``>= 0`` is the first side.

    A zero normal is tolerated: it is the constant classifier a trainer
    returns for indistinguishable classes.
    """

    w: np.ndarray
    b: float

    def __post_init__(self):
        w = np.asarray(self.w, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(w)) or not math.isfinite(self.b):
            raise DataError("hyperplane has non-finite parameters")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "b", float(self.b))

    @property
    def d(self) -> int:
        return self.w.shape[0]

    @property
    def degenerate(self) -> bool:
        return not np.any(self.w)

    def __neg__(self) -> "Hyperplane":
        return Hyperplane(-self.w, -self.b)

    def __eq__(self, other):
        return (isinstance(other, Hyperplane) and self.b == other.b
                and np.array_equal(self.w, other.w))

    __hash__ = None


def decision(h: Hyperplane, x) -> np.ndarray | float:
    """``<w, x> + b`` for one vector or each row of a matrix."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != h.d:
        raise DomainError(f"feature dimension {x.shape[-1]} != head dimension {h.d}")
    out = x @ h.w + h.b
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    iterations: int = 500
    l2: float = 1e-4
    seed: int = 0
    standardize: bool = False

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise DomainError("learning_rate must be positive")
        if self.iterations < 1:
            raise DomainError("iterations must be a positive integer")
        if self.l2 < 0:
            raise DomainError("l2 must be non-negative")


def bce_loss(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, l2: float) -> float:
    """Mean binary cross-entropy of ``sigmoid(Xw + b)`` plus ``l2/2 * |w|^2``."""
    z = X @ w + b
    return float(np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * l2 * (w @ w))


def bce_grad(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, l2: float):
    z = X @ w + b
    r = 0.5 * (1.0 + np.tanh(0.5 * z)) - y  # sigmoid without overflow
    return X.T @ r / X.shape[0] + l2 * w, float(np.mean(r))


def _check_pair(Xi, Xj):
    Xi = np.atleast_2d(np.asarray(Xi, dtype=np.float64))
    Xj = np.atleast_2d(np.asarray(Xj, dtype=np.float64))
    if Xi.shape[0] == 0 or Xj.shape[0] == 0:
        raise DomainError("both classes need at least one sample")
    if Xi.shape[1] != Xj.shape[1]:
        raise DomainError(f"dimension mismatch: {Xi.shape[1]} vs {Xj.shape[1]}")
    if Xi.shape[1] == 0:
        raise DomainError("features are zero-dimensional")
    if not (np.all(np.isfinite(Xi)) and np.all(np.isfinite(Xj))):
        raise DataError("features contain non-finite values")
    return Xi, Xj


def train_head(Xi, Xj, cfg: TrainConfig = TrainConfig(), trace: Optional[list] = None) -> Hyperplane:
    """Logistic-regression head with ``Xi`` labelled 1 and ``Xj`` labelled 0.

    Full-batch gradient descent from zero.  With ``cfg.standardize`` the
    pair's pooled samples are standardised per dimension during training and
    the result is mapped back to raw feature coordinates.  When ``trace`` is
    given, the loss before every step and after the last is appended to it.
    """
    Xi, Xj = _check_pair(Xi, Xj)
    X = np.vstack([Xi, Xj])
    y = np.concatenate([np.ones(len(Xi)), np.zeros(len(Xj))])
    if cfg.standardize:
        mu = X.mean(axis=0)
        sd = X.std(axis=0)
        sd[sd == 0] = 1.0
        X = (X - mu) / sd
    w = np.zeros(X.shape[1])
    b = 0.0
    for _ in range(cfg.iterations):
        if trace is not None:
            trace.append(bce_loss(w, b, X, y, cfg.l2))
        gw, gb = bce_grad(w, b, X, y, cfg.l2)
        w = w - cfg.learning_rate * gw
        b = b - cfg.learning_rate * gb
    if trace is not None:
        trace.append(bce_loss(w, b, X, y, cfg.l2))
    if cfg.standardize:
        w = w / sd
        b = b - float(w @ mu)
    return Hyperplane(w, b)


def balanced_error(wrong_i: int, n_i: int, wrong_j: int, n_j: int) -> float:
    """Misclassification rate with each class weighing one half.

    Equal class sizes use the pooled count so the value is exactly
    ``wrong / (2n)``.
    """
    if n_i == n_j:
        return (wrong_i + wrong_j) / (2 * n_i)
    return 0.5 * (wrong_i / n_i + wrong_j / n_j)


def empirical_error(h: Hyperplane, Xi, Xj) -> float:
    """Rate of ``Xi`` samples below zero and ``Xj`` samples at or above zero."""
    Xi, Xj = _check_pair(Xi, Xj)
    wi = int(np.count_nonzero(decision(h, Xi) < 0))
    wj = int(np.count_nonzero(decision(h, Xj) >= 0))
    return balanced_error(wi, len(Xi), wj, len(Xj))


def check_eps(eps: float) -> float:
    if not 0 < eps < 0.5:
        raise DomainError(f"eps must lie strictly between 0 and 0.5, got {eps}")
    return float(eps)


def epsilon_separates(h: Hyperplane, Xi, Xj, eps: float = DEFAULT_EPS) -> bool:
    """Whether ``h``, flipped so most of ``Xi`` is on its first side, has error < eps."""
    check_eps(eps)
    Xi, Xj = _check_pair(Xi, Xj)
    if np.count_nonzero(decision(h, Xi) >= 0) * 2 < len(Xi):
        h = -h
    return empirical_error(h, Xi, Xj) < eps


def orient_for_pair(h: Hyperplane, Xi, Xj) -> Hyperplane:
    """``h`` or ``-h``, whichever scores ``Xi`` no lower than ``Xj`` on average."""
    if np.mean(decision(h, Xi)) >= np.mean(decision(h, Xj)):
        return h
    return -h


def gaussian_error(mu1: float, mu2: float, threshold: float) -> float:
    """Error of the 1-D rule ``x >= threshold -> class 2`` for N(mu1,1) vs N(mu2,1).

    Closed form ``(2 + erf((t - mu2)/sqrt 2) - erf((t - mu1)/sqrt 2)) / 4``,
    written for ``mu2 >= mu1``; it is minimal at the midpoint.
    """
    r2 = math.sqrt(2.0)
    return 0.25 * (2.0 + math.erf((threshold - mu2) / r2) - math.erf((threshold - mu1) / r2))


@dataclass
class HeadBank:
    """One trained head per pair of a class universe."""

    classes: list
    d: int
    heads: dict
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        expected = all_pairs(len(self.classes))
        if sorted(self.heads) != expected:
            raise DataError("head bank must hold exactly one head per class pair")
        for p, h in self.heads.items():
            if h.d != self.d:
                raise DataError(f"head {p} has dimension {h.d}, bank has {self.d}")

    @property
    def pairs(self) -> list[Pair]:
        return all_pairs(len(self.classes))

    def pair_names(self, p: Pair) -> tuple[str, str]:
        return self.classes[p[0]], self.classes[p[1]]

    def weights(self) -> tuple[np.ndarray, np.ndarray]:
        """Stacked ``(d, P)`` normals and ``(P,)`` biases in pair order."""
        pairs = self.pairs
        W = np.stack([self.heads[p].w for p in pairs], axis=1) if pairs else np.zeros((self.d, 0))
        B = np.array([self.heads[p].b for p in pairs])
        return W, B

    def to_json(self) -> dict:
        return {
            "kind": "head_bank",
            "d": self.d,
            "classes": list(self.classes),
            "config": self.config,
            "heads": [
                {"pair": list(p), "w": self.heads[p].w.tolist(), "b": self.heads[p].b}
                for p in self.pairs
            ],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "HeadBank":
        try:
            heads = {}
            for entry in doc["heads"]:
                i, j = entry["pair"]
                if (i, j) in heads:
                    raise DataError(f"duplicate head for pair {(i, j)}")
                heads[(int(i), int(j))] = Hyperplane(np.array(entry["w"], dtype=float), entry["b"])
            return cls(list(doc["classes"]), int(doc["d"]), heads, doc.get("config", {}))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, DataError):
                raise
            raise DataError(f"malformed head bank: {exc}") from exc


def build_bank(features: FeatureSet, cfg: TrainConfig = TrainConfig()) -> HeadBank:
    """Train one head per pair of ``features`` classes, in pair order."""
    if features.n_classes < 2:
        raise DomainError("a head bank needs at least two classes")
    heads = {
        (i, j): train_head(features[i], features[j], cfg)
        for i, j in all_pairs(features.n_classes)
    }
    return HeadBank(list(features.names), features.d, heads, asdict(cfg))
