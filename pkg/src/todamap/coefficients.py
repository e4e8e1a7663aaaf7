"""Exact Taylor coefficients of the string solution of dispersionless 2D Toda.

The recurrences go bottom-up::

    p_count -> t1 -> t2 ┐
                 s_weight ┴-> n1 -> n2

``t1``, ``t2``, ``s_weight`` and ``n1`` memoize into a
:class:`CoefficientCache`.  Inserts use ``dict.setdefault`` so a value is
published once and never overwritten; concurrent recomputation of the same key
yields the same exact value, so racing threads are harmless.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from pathlib import Path
from typing import Iterator, Sequence

from .combinatorics import compositions, factorial, multiset_key, partitions

__all__ = [
    "CoefficientCache",
    "MomentSignature",
    "default_cache",
    "p_count",
    "t1",
    "t2",
    "s_weight",
    "n1",
    "n2",
    "signatures",
]

log = logging.getLogger(__name__)


@dataclass
class CoefficientCache:
    """Memo tables for the recurrences, keyed by canonical arguments."""

    t1: dict = field(default_factory=dict)
    t2: dict = field(default_factory=dict)
    s: dict = field(default_factory=dict)
    n1: dict = field(default_factory=dict)

    def clear(self) -> None:
        for table in (self.t1, self.t2, self.s, self.n1):
            table.clear()

    def sizes(self) -> dict[str, int]:
        return {"t1": len(self.t1), "t2": len(self.t2), "s": len(self.s), "n1": len(self.n1)}

    # Only the N1 table is persisted: it is the one the CLI asks for and the
    # others are cheap to rebuild from it being hit.
    def save_n1(self, path: str | os.PathLike) -> None:
        rows = [
            {"i": i, "hol": list(hol), "antihol": [list(p) for p in anti], "value": _frac_str(v)}
            for (i, hol, anti), v in sorted(self.n1.items())
        ]
        Path(path).write_text(json.dumps(rows, separators=(",", ":")))

    def load_n1(self, path: str | os.PathLike) -> int:
        p = Path(path)
        if not p.exists():
            return 0
        rows = json.loads(p.read_text())
        for row in rows:
            key = (row["i"], tuple(row["hol"]), tuple(tuple(x) for x in row["antihol"]))
            self.n1.setdefault(key, Fraction(row["value"]))
        return len(rows)


_DEFAULT = CoefficientCache()


def default_cache() -> CoefficientCache:
    return _DEFAULT


def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@lru_cache(maxsize=None)
def _p_count(i: int, s: tuple[int, ...]) -> int:
    if not s:
        return 1 if i == 0 else 0
    head, rest = s[0], s[1:]
    # each remaining slot needs at least 1
    hi = min(head - 1, i - len(rest))
    return sum(_p_count(i - x, rest) for x in range(1, hi + 1))


def p_count(i: int, s: Sequence[int]) -> int:
    """Number of tuples (i_1..i_m) with sum ``i`` and 1 <= i_r <= s_r - 1."""
    if i < 0:
        return 0
    return _p_count(i, tuple(s))


def _grouped(s: tuple[int, ...], sizes: tuple[int, ...]) -> tuple[int, ...]:
    out = []
    pos = 0
    for n in sizes:
        out.append(sum(s[pos : pos + n]))
        pos += n
    return tuple(out)


def t1(i: int, j: int, s: Sequence[int], cache: CoefficientCache | None = None) -> Fraction:
    """T^1_{i,j}(s): sum over groupings of consecutive parts of ``s`` into
    k blocks of sizes n_1..n_k of p_count(i, grouped) / (k n_1! ... n_k!).

    Only the first index enters the count; ``j`` matters through the
    constraint i + j = sum(s), under which the value is symmetric in (i, j).
    """
    cache = cache or _DEFAULT
    s = tuple(s)
    if i + j == sum(s):
        key = (min(i, j), max(i, j), s)
        i = key[0]
    else:
        key = (i, j, s)
    hit = cache.t1.get(key)
    if hit is not None:
        return hit
    m = len(s)
    total = Fraction(0)
    for k in range(1, m + 1):
        for sizes in compositions(m, k):
            count = p_count(i, _grouped(s, sizes))
            if count:
                den = k
                for n in sizes:
                    den *= factorial(n)
                total += Fraction(count, den)
    return cache.t1.setdefault(key, total)


def t2(
    ilist: Sequence[int],
    s: Sequence[int],
    l: Sequence[int],
    cache: CoefficientCache | None = None,
) -> Fraction:
    """T^2_{i_1..i_k}(s; l) by recursion on k, peeling off the last index."""
    cache = cache or _DEFAULT
    ilist, s, l = tuple(ilist), tuple(s), tuple(l)
    if len(s) != len(l):
        raise ValueError(f"weighted row length mismatch: {len(s)} != {len(l)}")
    key = (ilist, s, l)
    hit = cache.t2.get(key)
    if hit is not None:
        return hit
    k, m = len(ilist), len(s)
    if k < 2 or sum(s) != sum(ilist) or sum(l) != m + k - 2:
        return Fraction(0)
    if k == 2:
        # sum(l) == m forces every l_r == 1
        return cache.t2.setdefault(key, t1(ilist[0], ilist[1], s, cache))

    last, head = ilist[-1], ilist[:-1]
    total = Fraction(0)
    for a in range(m):
        seg_s = 0
        seg_l = 0
        for b in range(a, m):
            seg_s += s[b]
            seg_l += l[b] - 1
            merged_s = seg_s - last
            if merged_s < 1 or seg_l < 1:
                continue
            inner = t1(merged_s, last, s[a : b + 1], cache)
            if not inner:
                continue
            rest = t2(head, s[:a] + (merged_s,) + s[b + 1 :], l[:a] + (seg_l,) + l[b + 1 :], cache)
            total += seg_l * inner * rest
    return cache.t2.setdefault(key, total)


def _block_weight(sr: int, nr: int, lr: int) -> Fraction:
    return Fraction(factorial(sr - 1), factorial(sr - nr - lr + 1) * factorial(lr - 1))


def s_weight(
    ibar: Sequence[int],
    s: Sequence[int],
    l: Sequence[int],
    cache: CoefficientCache | None = None,
) -> int:
    """S_{ibar}(s; l) summed over labeled distributions of ``ibar``.

    Works on the multiset of ``ibar``: a split putting c_{r,v} copies of value
    v into block r stands for prod_v (count_v! / prod_r c_{r,v}!) labeled
    assignments.
    """
    cache = cache or _DEFAULT
    s, l = tuple(s), tuple(l)
    if len(s) != len(l):
        raise ValueError(f"weighted row length mismatch: {len(s)} != {len(l)}")
    ms = multiset_key(ibar)
    key = (ms, s, l)
    hit = cache.s.get(key)
    if hit is not None:
        return hit
    m = len(s)
    if len(ibar) < m or sum(ibar) != sum(s):
        return cache.s.setdefault(key, 0)

    values = [v for v, _ in ms]
    counts = tuple(c for _, c in ms)
    memo: dict[tuple[int, tuple[int, ...]], Fraction] = {}

    def fill(r: int, remaining: tuple[int, ...]) -> Fraction:
        if r == m:
            return Fraction(1) if not any(remaining) else Fraction(0)
        got = memo.get((r, remaining))
        if got is not None:
            return got
        acc = Fraction(0)
        for take in product(*(range(c + 1) for c in remaining)):
            nr = sum(take)
            if nr == 0 or sum(t * v for t, v in zip(take, values)) != s[r]:
                continue
            if s[r] - nr - l[r] + 1 < 0:
                continue
            w = _block_weight(s[r], nr, l[r])
            for t in take:
                w /= factorial(t)
            acc += w * fill(r + 1, tuple(c - t for c, t in zip(remaining, take)))
        memo[(r, remaining)] = acc
        return acc

    total = fill(0, counts)
    for c in counts:
        total *= factorial(c)
    assert total.denominator == 1
    return cache.s.setdefault(key, int(total))


def n1(
    i: int,
    ilist: Sequence[int],
    ibarlist: Sequence[int],
    cache: CoefficientCache | None = None,
) -> Fraction:
    """N^1_i(i_1..i_k | ibar_1..ibar_kbar)."""
    cache = cache or _DEFAULT
    ilist = tuple(ilist)
    k, kbar = len(ilist), len(ibarlist)
    if k < 1 or kbar < 1:
        raise ValueError("n1 needs nonempty holomorphic and antiholomorphic index lists")
    if i != sum(ilist) or i != sum(ibarlist):
        return Fraction(0)
    key = (i, ilist, multiset_key(ibarlist))
    hit = cache.n1.get(key)
    if hit is not None:
        return hit

    if k == 1 or kbar == 1:
        other = kbar if k == 1 else k
        if i - other + 1 < 0:
            log.debug("n1 factorial ratio outside support: i=%d, length=%d", i, other)
            return cache.n1.setdefault(key, Fraction(0))
        return cache.n1.setdefault(key, Fraction(factorial(i - 1), factorial(i - other + 1)))

    total = Fraction(0)
    for m in range(1, min(kbar, i) + 1):
        sign = 1 if m % 2 else -1
        for s in compositions(i, m):
            for l in compositions(m + k - 2, m):
                # S vanishes unless s_r - n_r - l_r + 1 >= 0 with n_r >= 1
                if any(lr > sr for lr, sr in zip(l, s)):
                    continue
                weight = s_weight(ibarlist, s, l, cache)
                if weight:
                    total += sign * weight * t2(ilist, s, l, cache)
    return cache.n1.setdefault(key, total)


@dataclass(frozen=True, order=True)
class MomentSignature:
    """Label of one N^2 coefficient.

    ``hol`` and ``antihol`` are tuples of ``(index, multiplicity)`` pairs with
    strictly increasing indices.  The signature text form is
    ``"i:(i1^n1,i2^n2|j1^m1,...)"``.
    """

    weight: int
    hol: tuple[tuple[int, int], ...]
    antihol: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        for side in (self.hol, self.antihol):
            idx = [p[0] for p in side]
            if any(a >= b for a, b in zip(idx, idx[1:])):
                raise ValueError(f"indices must be strictly increasing: {idx}")
            if any(p[0] < 1 or p[1] < 1 for p in side):
                raise ValueError(f"indices and multiplicities must be >= 1: {side}")
        if self.weight < 0:
            raise ValueError("weight must be nonnegative")

    @classmethod
    def from_lists(cls, hol: Sequence[int], antihol: Sequence[int], weight: int | None = None):
        if weight is None:
            weight = sum(hol)
        return cls(weight, multiset_key(hol), multiset_key(antihol))

    @classmethod
    def parse(cls, text: str) -> "MomentSignature":
        try:
            head, body = text.strip().split(":", 1)
            body = body.strip()
            if not (body.startswith("(") and body.endswith(")")):
                raise ValueError
            left, right = body[1:-1].split("|")
            return cls(int(head), _parse_side(left), _parse_side(right))
        except (ValueError, TypeError) as exc:
            raise ValueError(f"malformed signature {text!r}") from exc

    def __str__(self) -> str:
        def side(pairs):
            return ",".join(f"{a}^{n}" for a, n in pairs)

        return f"{self.weight}:({side(self.hol)}|{side(self.antihol)})"

    def expanded(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        hol = tuple(a for a, n in self.hol for _ in range(n))
        anti = tuple(a for a, n in self.antihol for _ in range(n))
        return hol, anti

    @property
    def degree(self) -> int:
        return sum(n for _, n in self.hol) + sum(n for _, n in self.antihol)

    def swapped(self) -> "MomentSignature":
        return MomentSignature(self.weight, self.antihol, self.hol)

    def is_balanced(self) -> bool:
        return (
            sum(a * n for a, n in self.hol) == self.weight
            and sum(a * n for a, n in self.antihol) == self.weight
        )


def _parse_side(text: str) -> tuple[tuple[int, int], ...]:
    # entries may come in any order; repeated indices add up
    mult: dict[int, int] = {}
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            raise ValueError("empty signature entry")
        a, _, n = tok.partition("^")
        idx, cnt = int(a), int(n) if n else 1
        if idx < 1 or cnt < 1:
            raise ValueError(f"bad signature entry {tok!r}")
        mult[idx] = mult.get(idx, 0) + cnt
    return tuple(sorted(mult.items()))


def n2(sig: MomentSignature, cache: CoefficientCache | None = None) -> Fraction:
    """N^2 for a signature: n1 on the multiplicity-expanded index lists."""
    hol, anti = sig.expanded()
    if not hol or not anti:
        return Fraction(0)
    return n1(sig.weight, hol, anti, cache)


def signatures(max_weight: int, min_weight: int = 1) -> Iterator[MomentSignature]:
    """All balanced signatures with weight in [min_weight, max_weight]."""
    for i in range(max(min_weight, 1), max_weight + 1):
        parts = list(partitions(i))
        for hol in parts:
            for anti in parts:
                yield MomentSignature.from_lists(hol, anti, i)
