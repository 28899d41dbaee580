"""In-memory per-class embedding matrices."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DataError, DomainError


@dataclass
class FeatureSet:
    """Samples of each class as a ``(count, d)`` float matrix.

    Class ids are positions in ``names``.
    """

    names: list
    data: list

    def __post_init__(self):
        self.names = [str(n) for n in self.names]
        if len(self.names) != len(self.data):
            raise DataError("one matrix per class name is required")
        if len(set(self.names)) != len(self.names):
            raise DataError("class names must be unique")
        mats = []
        for name, m in zip(self.names, self.data):
            m = np.asarray(m, dtype=np.float64)
            if m.ndim == 1:
                m = m[:, None]
            if m.ndim != 2 or m.shape[0] == 0:
                raise DataError(f"class {name!r} has no samples")
            if not np.all(np.isfinite(m)):
                raise DataError(f"class {name!r} contains non-finite values")
            mats.append(m)
        dims = {m.shape[1] for m in mats}
        if len(dims) > 1:
            raise DataError(f"classes disagree on the feature dimension: {sorted(dims)}")
        if dims == {0}:
            raise DomainError("features are zero-dimensional")
        self.data = mats

    @property
    def d(self) -> int:
        return self.data[0].shape[1] if self.data else 0

    @property
    def n_classes(self) -> int:
        return len(self.names)

    @property
    def counts(self) -> list[int]:
        return [m.shape[0] for m in self.data]

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise DataError(f"unknown class {name!r}") from None

    def __getitem__(self, c: int) -> np.ndarray:
        return self.data[c]

    def subset(self, names: Sequence[str]) -> "FeatureSet":
        return FeatureSet(list(names), [self.data[self.index(n)] for n in names])
