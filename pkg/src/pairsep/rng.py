"""Keyed counter-based random streams."""

import numpy as np


def keyed_rng(seed: int, *stream: int) -> np.random.Generator:
    """Philox generator keyed on ``(seed, *stream)``.

    Draws depend only on the key and the position within the stream, so
    independent streams can be consumed in any order or in parallel.
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, *stream])))
