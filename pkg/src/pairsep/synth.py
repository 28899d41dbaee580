"""Isotropic Gaussian class generator with analytic error oracles."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DataError, DomainError
from .features import FeatureSet
from .rng import keyed_rng


@dataclass(frozen=True)
class GaussianSpec:
    means: np.ndarray  # (classes, d)
    sigma: float = 1.0
    samples: int = 100
    seed: int = 0
    names: Optional[tuple] = None

    def __post_init__(self):
        means = np.atleast_2d(np.asarray(self.means, dtype=np.float64))
        if means.shape[0] < 2:
            raise DomainError("a Gaussian spec needs at least two classes")
        if not np.all(np.isfinite(means)):
            raise DomainError("class means must be finite")
        if not self.sigma > 0:
            raise DomainError("sigma must be positive")
        if self.samples < 1:
            raise DomainError("samples per class must be positive")
        object.__setattr__(self, "means", means)
        names = self.names
        if names is None:
            names = tuple(f"c{i}" for i in range(means.shape[0]))
        elif len(names) != means.shape[0]:
            raise DomainError("one name per class mean is required")
        object.__setattr__(self, "names", tuple(str(n) for n in names))

    @classmethod
    def from_json(cls, doc: dict) -> "GaussianSpec":
        try:
            return cls(
                means=np.asarray(doc["means"], dtype=float),
                sigma=float(doc.get("sigma", 1.0)),
                samples=int(doc.get("samples", 100)),
                seed=int(doc.get("seed", 0)),
                names=tuple(doc["names"]) if doc.get("names") is not None else None,
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, DomainError):
                raise
            raise DataError(f"malformed Gaussian spec: {exc}") from exc

    def to_json(self) -> dict:
        return {"means": self.means.tolist(), "sigma": self.sigma,
                "samples": self.samples, "seed": self.seed, "names": list(self.names)}


def generate(spec: GaussianSpec) -> FeatureSet:
    data = []
    for c, mu in enumerate(spec.means):
        z = keyed_rng(spec.seed, c).standard_normal((spec.samples, mu.shape[0]))
        data.append(mu + spec.sigma * z)
    return FeatureSet(list(spec.names), data)


def normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def pairwise_bayes_error(spec: GaussianSpec, i: int, j: int) -> float:
    """Balanced error of the best hyperplane between classes ``i`` and ``j``."""
    gap = float(np.linalg.norm(spec.means[i] - spec.means[j]))
    return normal_cdf(-gap / (2.0 * spec.sigma))
