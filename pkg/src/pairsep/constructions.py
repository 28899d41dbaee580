"""Model families attaining the two bounds on the fundamental number."""

from __future__ import annotations

from .errors import DomainError
from .poset import AbstractModel, Pair, all_pairs, check_width


def construct_hypercube(k: int) -> list[AbstractModel]:
    """``k`` bit-split models over ``2**k`` classes.

    Class ``c`` is read as a ``k``-bit string; model ``i`` puts classes whose
    bit ``i`` is 0 on side A and the rest on side B.
    """
    if k < 1:
        raise DomainError(f"hypercube dimension must be >= 1, got {k}")
    n = 1 << k
    check_width(n)
    models = []
    for bit in range(k):
        a = frozenset(c for c in range(n) if not c >> bit & 1)
        b = frozenset(c for c in range(n) if c >> bit & 1)
        models.append(AbstractModel(a, b))
    return models


def hypercube_bank(k: int) -> dict[Pair, AbstractModel]:
    """One head per pair: the bit-split model of the lowest differing bit."""
    models = construct_hypercube(k)
    bank = {}
    for i, j in all_pairs(1 << k):
        bit = ((i ^ j) & -(i ^ j)).bit_length() - 1
        m = models[bit]
        bank[(i, j)] = AbstractModel(m.side_a, m.side_b, label=(i, j))
    return bank


def parity_point_sides(n: int, pair: Pair) -> tuple[frozenset, frozenset]:
    """Point-level bipartition behind the parity model of ``pair``.

    The space holds ``2n`` points and class ``c`` owns points ``2c`` and
    ``2c + 1``.  Points of the first class go to side A, points of the second
    to side B, and every other point goes to A if even, B if odd.
    """
    i, j = pair
    side_a, side_b = set(), set()
    for x in range(2 * n):
        owner = x // 2
        if owner == i or (owner != j and x % 2 == 0):
            side_a.add(x)
        else:
            side_b.add(x)
    return frozenset(side_a), frozenset(side_b)


def construct_parity(n: int) -> dict[Pair, AbstractModel]:
    """``n(n-1)/2`` pairwise non-equivalent models, one per pair.

    A class lies on a side only if both of its points do; every class other
    than the defining pair has one even and one odd point, so it straddles the
    boundary and the model splits exactly its own pair.
    """
    if n < 4 or n % 2:
        raise DomainError(f"parity construction needs an even n >= 4, got {n}")
    check_width(n)
    models = {}
    for pair in all_pairs(n):
        pa, pb = parity_point_sides(n, pair)
        a = frozenset(c for c in range(n) if {2 * c, 2 * c + 1} <= pa)
        b = frozenset(c for c in range(n) if {2 * c, 2 * c + 1} <= pb)
        models[pair] = AbstractModel(a, b, label=pair)
    return models
