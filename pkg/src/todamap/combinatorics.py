"""Exact integer combinatorics used by the coefficient recurrences.

Values are plain ``int`` or :class:`fractions.Fraction`; nothing here ever
rounds.  Enumerators are generators so callers can fold over very large
index sets without materializing them.
"""

from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction
from itertools import combinations, product
from typing import Iterator, Sequence

__all__ = [
    "Rational",
    "binomial",
    "factorial",
    "falling",
    "compositions",
    "distributions",
    "distribution_blocks",
    "multiset_key",
    "ordered_set_partitions",
    "partitions",
]

Rational = Fraction


def binomial(n: int, k: int) -> int:
    """C(n, k), with the convention C(n, k) = 0 outside 0 <= k <= n."""
    if k < 0 or n < 0 or k > n:
        return 0
    return math.comb(n, k)


def factorial(n: int) -> int:
    if n < 0:
        raise ValueError(f"factorial of negative argument {n}")
    return math.factorial(n)


def falling(a: int, b: int) -> int:
    """Falling factorial a (a-1) ... (a-b+1); empty product for b = 0."""
    if b < 0:
        raise ValueError(f"falling factorial length must be >= 0, got {b}")
    out = 1
    for r in range(b):
        out *= a - r
    return out


def compositions(total: int, m: int) -> Iterator[tuple[int, ...]]:
    """Yield every ordered m-tuple of positive integers summing to ``total``.

    Tuples come out in lexicographic order.  Nothing is yielded when
    ``total < m`` or ``m < 1``.
    """
    if m < 1 or total < m:
        return
    for cuts in combinations(range(1, total), m - 1):
        prev = 0
        parts = []
        for c in cuts:
            parts.append(c - prev)
            prev = c
        parts.append(total - prev)
        yield tuple(parts)


def distributions(ibar: Sequence[int], m: int) -> Iterator[tuple[int, ...]]:
    """Yield every surjective assignment of the positions of ``ibar`` onto
    ``m`` ordered blocks.

    An assignment is a tuple ``a`` with ``a[p]`` the block (0-based) that
    position ``p`` goes to.  Positions are labeled, so two assignments that
    only swap equal values between blocks are counted separately.
    """
    kbar = len(ibar)
    if m < 1 or kbar < m:
        return
    for a in product(range(m), repeat=kbar):
        if len(set(a)) == m:
            yield a


def distribution_blocks(ibar: Sequence[int], assignment: Sequence[int], m: int) -> list[list[int]]:
    """Materialize the blocks of a labeled assignment as value lists."""
    blocks: list[list[int]] = [[] for _ in range(m)]
    for value, block in zip(ibar, assignment):
        blocks[block].append(value)
    return blocks


def multiset_key(values: Sequence[int]) -> tuple[tuple[int, int], ...]:
    """Canonical multiset form: sorted ``(value, multiplicity)`` pairs."""
    return tuple(sorted(Counter(values).items()))


def ordered_set_partitions(size: int) -> int:
    """Number of ordered set partitions (Fubini number) of a ``size``-set.

    Computed by the recursion a(n) = sum_{j>=1} C(n, j) a(n - j).
    """
    a = [1]
    for n in range(1, size + 1):
        a.append(sum(math.comb(n, j) * a[n - j] for j in range(1, n + 1)))
    return a[size]


def partitions(n: int, max_part: int | None = None) -> Iterator[tuple[int, ...]]:
    """Yield the partitions of ``n`` as nonincreasing tuples.

    ``max_part`` caps the largest part.  ``partitions(0)`` yields ``()``.
    """
    if max_part is None or max_part > n:
        max_part = n
    if n == 0:
        yield ()
        return
    for first in range(max_part, 0, -1):
        for rest in partitions(n - first, first):
            yield (first,) + rest
