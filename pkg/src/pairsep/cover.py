"""Fundamental number: minimum number of candidate models covering all pairs.

The exact solver is a depth-first branch and bound over distinct,
non-dominated candidate sets.  It branches on the uncovered pair with the
fewest candidates, seeds the incumbent with the greedy cover and prunes with
``chosen + ceil(uncovered / best_gain)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import BudgetError, DomainError, NotSeparableError
from .poset import (
    Pair,
    SeparableSet,
    check_width,
    fundamental_pairs,
    n_pairs,
    pair_from_index,
)

DEFAULT_MAX_CANDIDATES = 25
DEFAULT_NODE_BUDGET = 1 << 25


def _masks(sets: Sequence[SeparableSet], n: int) -> tuple[list[int], int]:
    for s in sets:
        if s.n != n:
            raise DomainError(f"separable set over {s.n} classes, expected {n}")
    width = check_width(n)
    universe = (1 << width) - 1
    union = 0
    for s in sets:
        union |= s.bits
    missing = universe & ~union
    if missing:
        low = (missing & -missing).bit_length() - 1
        raise NotSeparableError(pair_from_index(low, n))
    return [s.bits for s in sets], universe


def greedy_cover(sets: Sequence[SeparableSet], n: int) -> list[int]:
    """Indices picked by max-new-coverage greedy, ties to the lowest index."""
    masks, uncovered = _masks(sets, n)
    return _greedy(masks, uncovered)


def _greedy(masks: list[int], uncovered: int) -> list[int]:
    chosen = []
    while uncovered:
        best, gain = -1, 0
        for idx, m in enumerate(masks):
            g = (m & uncovered).bit_count()
            if g > gain:
                best, gain = idx, g
        chosen.append(best)
        uncovered &= ~masks[best]
    return chosen


def fundamental_number_greedy(sets: Sequence[SeparableSet], n: int) -> int:
    return len(greedy_cover(sets, n))


def minimum_cover(
    sets: Sequence[SeparableSet],
    n: int,
    max_candidates: int = DEFAULT_MAX_CANDIDATES,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> list[int]:
    """Indices (into ``sets``) of one minimum cover of all pairs.

    Among equal-size optima the first one found is returned; the search order
    is fixed, so the answer is deterministic.
    """
    masks, universe = _masks(sets, n)
    if n_pairs(n) == 0:
        return []

    # Equivalent candidates collapse to their lowest index.
    first: dict[int, int] = {}
    for idx, m in enumerate(masks):
        first.setdefault(m, idx)
    reps = list(first.items())
    if len(reps) > max_candidates:
        raise BudgetError(
            f"{len(reps)} distinct candidate models exceed the exact-search limit "
            f"of {max_candidates}; use the greedy bound instead"
        )
    # A candidate strictly inside another is never needed.
    cands = [
        (m, idx)
        for m, idx in reps
        if not any(o != m and m & ~o == 0 for o, _ in reps)
    ]
    cmasks = [m for m, _ in cands]

    best = _greedy(cmasks, universe)
    nodes = 0

    def search(uncovered: int, chosen: list[int]) -> None:
        nonlocal best, nodes
        nodes += 1
        if nodes > node_budget:
            raise BudgetError(
                f"exact search exceeded {node_budget} nodes; use the greedy bound instead"
            )
        if not uncovered:
            if len(chosen) < len(best):
                best = list(chosen)
            return
        gains = [(m & uncovered).bit_count() for m in cmasks]
        top = max(gains)
        if len(chosen) + -(-uncovered.bit_count() // top) >= len(best):
            return
        # Branch on the uncovered pair with the fewest candidates.
        pivot_opts = None
        bits = uncovered
        while bits:
            low = bits & -bits
            opts = [k for k, m in enumerate(cmasks) if m & low]
            if pivot_opts is None or len(opts) < len(pivot_opts):
                pivot_opts = opts
                if len(opts) == 1:
                    break
            bits ^= low
        pivot_opts.sort(key=lambda k: (-gains[k], k))
        for k in pivot_opts:
            chosen.append(k)
            search(uncovered & ~cmasks[k], chosen)
            chosen.pop()

    search(universe, [])
    return sorted(cands[k][1] for k in best)


def fundamental_number_exact(
    sets: Sequence[SeparableSet],
    n: int,
    max_candidates: int = DEFAULT_MAX_CANDIDATES,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> int:
    return len(minimum_cover(sets, n, max_candidates, node_budget))


@dataclass(frozen=True)
class Theorem1Check:
    dedup_fundamental_count: int
    exact_cover: int
    agrees: bool


def theorem1_check(bank: Mapping[Pair, SeparableSet], **search) -> Theorem1Check:
    """Compare the deduplicated fundamental-pair count with the exact cover.

    This is a diagnostic: on banks where a fundamental pair is split by more
    than one non-equivalent head the two numbers may legitimately differ.
    """
    fps = fundamental_pairs(bank)
    n = next(iter(bank.values())).n
    dedup = len({bank[p].bits for p in fps})
    exact = fundamental_number_exact(list(bank.values()), n, **search)
    return Theorem1Check(dedup, exact, dedup == exact)
