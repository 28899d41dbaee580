"""Bipartition models over a finite class set and their expressiveness order.

Classes are the integers ``0..n-1``.  A pair ``(i, j)`` always has ``i < j``
and is mapped to a bit position in lexicographic order, so a model's set of
separable pairs is an integer bitmask of width ``n*(n-1)/2``.  Subset tests
then reduce to a single AND.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from .errors import ContractError, DomainError, SizeError

Pair = tuple[int, int]

# n = 2**12 classes is the largest universe we agree to materialise.
MAX_WIDTH = 1 << 24


def n_pairs(n: int) -> int:
    return n * (n - 1) // 2


def check_width(n: int) -> int:
    width = n_pairs(n)
    if width > MAX_WIDTH:
        raise SizeError(f"{n} classes need {width} pair bits (limit {MAX_WIDTH})")
    return width


def make_pair(i: int, j: int) -> Pair:
    if i == j:
        raise DomainError(f"a pair needs two distinct classes, got ({i}, {j})")
    return (i, j) if i < j else (j, i)


def all_pairs(n: int) -> list[Pair]:
    """Every pair over ``n`` classes, in bit order."""
    return list(combinations(range(n), 2))


def pair_index(pair: Pair, n: int) -> int:
    i, j = pair
    if not (0 <= i < j < n):
        raise DomainError(f"pair {pair} is not a valid pair over {n} classes")
    return i * (2 * n - i - 1) // 2 + (j - i - 1)


def pair_from_index(index: int, n: int) -> Pair:
    if not 0 <= index < n_pairs(n):
        raise DomainError(f"pair index {index} out of range for {n} classes")
    i = 0
    row = n - 1
    while index >= row:
        index -= row
        i += 1
        row -= 1
    return (i, i + 1 + index)


@dataclass(frozen=True)
class SeparableSet:
    """The pairs separated by one model, as a bitmask over ``n`` classes."""

    bits: int
    n: int

    def __post_init__(self):
        width = check_width(self.n)
        if self.bits < 0 or self.bits >> width:
            raise DomainError(f"bitmask does not fit in {width} pair bits")

    @classmethod
    def from_pairs(cls, pairs: Iterable[Pair], n: int) -> "SeparableSet":
        bits = 0
        for p in pairs:
            bits |= 1 << pair_index(make_pair(*p), n)
        return cls(bits, n)

    @property
    def width(self) -> int:
        return n_pairs(self.n)

    def __contains__(self, pair: Pair) -> bool:
        return bool(self.bits >> pair_index(pair, self.n) & 1)

    def __iter__(self) -> Iterator[Pair]:
        bits, idx = self.bits, 0
        while bits:
            if bits & 1:
                yield pair_from_index(idx, self.n)
            bits >>= 1
            idx += 1

    def __len__(self) -> int:
        return bin(self.bits).count("1")

    def pairs(self) -> list[Pair]:
        return list(self)


@dataclass(frozen=True)
class AbstractModel:
    """A bipartition of class indices.

    Classes on neither side straddle the boundary and separate nothing.
    ``label`` is the pair the model was built for, when there is one.
    """

    side_a: frozenset
    side_b: frozenset
    label: Optional[Pair] = None

    def __post_init__(self):
        object.__setattr__(self, "side_a", frozenset(self.side_a))
        object.__setattr__(self, "side_b", frozenset(self.side_b))
        for c in self.side_a | self.side_b:
            if not isinstance(c, int) or c < 0:
                raise DomainError(f"class ids are non-negative integers, got {c!r}")
        if self.side_a & self.side_b:
            raise DomainError(f"sides overlap on {sorted(self.side_a & self.side_b)}")
        if self.label is not None:
            lo, hi = self.label
            object.__setattr__(self, "label", make_pair(lo, hi))
            if not self.separates_unchecked(self.label):
                raise DomainError(f"label {self.label} is not split by the model")

    def separates_unchecked(self, pair: Pair) -> bool:
        i, j = pair
        return (i in self.side_a and j in self.side_b) or (
            i in self.side_b and j in self.side_a
        )


def separates(model: AbstractModel, pair: Pair, n: int) -> bool:
    """True iff the two classes of ``pair`` lie on opposite sides of ``model``."""
    i, j = pair
    if not (0 <= i < n and 0 <= j < n) or i == j:
        raise DomainError(f"pair {pair} is out of range for {n} classes")
    return model.separates_unchecked((i, j))


def separable_set(model: AbstractModel, n: int) -> SeparableSet:
    assigned = model.side_a | model.side_b
    if assigned and max(assigned) >= n:
        raise DomainError(f"model assigns class {max(assigned)} but n = {n}")
    check_width(n)
    bits = 0
    for a in model.side_a:
        for b in model.side_b:
            bits |= 1 << pair_index(make_pair(a, b), n)
    return SeparableSet(bits, n)


def _same_width(m1: SeparableSet, m2: SeparableSet) -> None:
    if m1.n != m2.n:
        raise DomainError(f"separable sets over {m1.n} and {m2.n} classes")


def leq(m1: SeparableSet, m2: SeparableSet) -> bool:
    """``m1`` is no more expressive than ``m2``."""
    _same_width(m1, m2)
    return m1.bits & ~m2.bits == 0


def equivalent(m1: SeparableSet, m2: SeparableSet) -> bool:
    _same_width(m1, m2)
    return m1.bits == m2.bits


def _uniform(sets: Sequence[SeparableSet]) -> None:
    if sets and any(s.n != sets[0].n for s in sets):
        raise DomainError("separable sets have mixed widths")


def equivalence_classes(sets: Sequence[SeparableSet]) -> list[list[int]]:
    """Group indices by identical separable sets.

    Groups are ordered by their smallest member; members are ascending.
    """
    _uniform(sets)
    groups: dict[int, list[int]] = {}
    for idx, s in enumerate(sets):
        groups.setdefault(s.bits, []).append(idx)
    return list(groups.values())


def hasse_diagram(sets: Sequence[SeparableSet]) -> list[tuple[int, int]]:
    """Covering relations between equivalence classes.

    Node ``u`` is the ``u``-th group of :func:`equivalence_classes`.  An edge
    ``(u, v)`` means group ``v`` is strictly less expressive than ``u`` and
    nothing lies strictly between them.
    """
    classes = equivalence_classes(sets)
    reps = [sets[g[0]].bits for g in classes]
    k = len(reps)
    # below[u] is a bitmask over nodes strictly below u.
    below = [0] * k
    for u in range(k):
        for v in range(k):
            if u != v and reps[v] & ~reps[u] == 0:
                below[u] |= 1 << v
    edges = []
    for u in range(k):
        implied = 0
        mask, v = below[u], 0
        while mask:
            if mask & 1:
                implied |= below[v]
            mask >>= 1
            v += 1
        covers = below[u] & ~implied
        edges.extend((u, v) for v in range(k) if covers >> v & 1)
    return edges


def maximal_classes(sets: Sequence[SeparableSet]) -> list[int]:
    """Equivalence-class indices with nothing strictly above them."""
    classes = equivalence_classes(sets)
    has_parent = {v for _, v in hasse_diagram(sets)}
    return [u for u in range(len(classes)) if u not in has_parent]


def _check_bank(bank: Mapping[Pair, SeparableSet]) -> int:
    if not bank:
        raise ContractError("empty head bank")
    n = next(iter(bank.values())).n
    _uniform(list(bank.values()))
    missing = [p for p in all_pairs(n) if p not in bank]
    if missing:
        raise ContractError(f"bank has no head for pairs {missing[:5]}")
    for p, s in bank.items():
        if p not in s:
            raise ContractError(f"head for pair {p} does not separate its own pair")
    return n


def fundamental_pairs(bank: Mapping[Pair, SeparableSet]) -> set[Pair]:
    """Pairs separated only by heads equivalent to their own head."""
    n = _check_bank(bank)
    result = set()
    for p in all_pairs(n):
        bit = 1 << pair_index(p, n)
        own = bank[p].bits
        if all(s.bits == own for s in bank.values() if s.bits & bit):
            result.add(p)
    return result


def bounds(n: int) -> tuple[int, int]:
    """Lower and upper bound on the fundamental number for ``n`` classes."""
    if n < 2:
        raise DomainError(f"bounds need at least 2 classes, got {n}")
    return (n - 1).bit_length(), n_pairs(n)
