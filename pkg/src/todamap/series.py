"""Truncated Taylor series of the string solution F and formal calculus on it.

A series is a finite map from :class:`Monomial` to exact :class:`Fraction`
coefficients.  Monomials carry an integer power of ``log t0`` so the
``t0**2 log t0`` head of F stays closed under differentiation; t0 exponents
may go negative after enough t0-derivatives of that head.

Variables are named ``"t0"``, ``("t", k)`` and ``("tbar", k)``.  At the formal
level ``t_k`` and ``tbar_k`` are independent; numeric evaluation always sets
``tbar_k = conj(t_k)``.
"""

from __future__ import annotations

import cmath
import json
import math
from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from itertools import combinations_with_replacement
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Union

from .coefficients import CoefficientCache, MomentSignature, n2
from .combinatorics import factorial

__all__ = [
    "CapacityError",
    "Monomial",
    "FormalSeries",
    "TruncatedF",
    "MomentVector",
    "build_f",
    "differentiate",
    "coefficient",
    "evaluate",
    "HEAD",
]

Var = Union[str, tuple]
Pairs = tuple[tuple[int, int], ...]


class CapacityError(RuntimeError):
    """Raised when a requested truncation exceeds the configured resource ceiling."""


def _as_pairs(side) -> Pairs:
    if isinstance(side, Mapping):
        return tuple(sorted((int(k), int(n)) for k, n in side.items() if n))
    return tuple(side)


def _bump(pairs: Pairs, index: int, delta: int) -> Pairs:
    d = dict(pairs)
    d[index] = d.get(index, 0) + delta
    return tuple(sorted((k, n) for k, n in d.items() if n))


@dataclass(frozen=True, order=True)
class Monomial:
    """t0**t0_exp * (log t0)**log_power * prod t_k**n_k * prod tbar_k**nbar_k."""

    t0_exp: int = 0
    hol: Pairs = ()
    antihol: Pairs = ()
    log_power: int = 0

    @classmethod
    def make(cls, t0: int = 0, t=(), tbar=(), log_power: int = 0) -> "Monomial":
        return cls(t0, _as_pairs(t), _as_pairs(tbar), log_power)

    @property
    def degree(self) -> int:
        """Total degree in the t_k, tbar_k (t0 not counted)."""
        return sum(n for _, n in self.hol) + sum(n for _, n in self.antihol)

    @property
    def hol_weight(self) -> int:
        return sum(k * n for k, n in self.hol)

    @property
    def antihol_weight(self) -> int:
        return sum(k * n for k, n in self.antihol)

    @property
    def max_index(self) -> int:
        return max([k for k, _ in self.hol + self.antihol], default=0)

    def swapped(self) -> "Monomial":
        return Monomial(self.t0_exp, self.antihol, self.hol, self.log_power)

    def sort_key(self):
        # graded lexicographic: degree, t0 exponent, hol, antihol
        return (self.degree, self.t0_exp, self.hol, self.antihol, self.log_power)

    def to_json(self) -> dict:
        out = {
            "t0": self.t0_exp,
            "t": {str(k): n for k, n in self.hol},
            "tbar": {str(k): n for k, n in self.antihol},
        }
        if self.log_power:
            out["log"] = self.log_power
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Monomial":
        return cls.make(obj["t0"], obj.get("t", {}), obj.get("tbar", {}), obj.get("log", 0))

    def __str__(self) -> str:
        parts = []
        if self.t0_exp:
            parts.append("t0" if self.t0_exp == 1 else f"t0^{self.t0_exp}")
        if self.log_power:
            parts.append("log(t0)" if self.log_power == 1 else f"log(t0)^{self.log_power}")
        for name, side in (("t", self.hol), ("tb", self.antihol)):
            for k, n in side:
                parts.append(f"{name}{k}" if n == 1 else f"{name}{k}^{n}")
        return "*".join(parts) or "1"


@dataclass(frozen=True)
class MomentVector:
    """Numeric point (t0, t_1..t_n); tbar_k is always conj(t_k)."""

    t0: float
    t: tuple[complex, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "t", tuple(complex(x) for x in self.t))

    @property
    def n(self) -> int:
        """Largest index carrying a nonzero moment."""
        for k in range(len(self.t), 0, -1):
            if self.t[k - 1] != 0:
                return k
        return 0

    def get(self, k: int) -> complex:
        return self.t[k - 1] if 1 <= k <= len(self.t) else 0j

    def rotated(self, alpha: float) -> "MomentVector":
        """Moments of the domain rotated by ``alpha`` about the origin."""
        return MomentVector(
            self.t0, tuple(cmath.exp(-1j * k * alpha) * x for k, x in enumerate(self.t, 1))
        )

    def to_json(self) -> dict:
        return {"t0": self.t0, "t": [[x.real, x.imag] for x in self.t]}

    @classmethod
    def from_json(cls, obj: dict) -> "MomentVector":
        return cls(float(obj["t0"]), tuple(complex(re, im) for re, im in obj.get("t", [])))


class FormalSeries:
    """Finite exact series in t0, log t0, t_k, tbar_k."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Monomial, Fraction] | Iterable = ()):
        acc: dict[Monomial, Fraction] = defaultdict(Fraction)
        items = terms.items() if isinstance(terms, Mapping) else terms
        for mono, c in items:
            acc[mono] += Fraction(c)
        self._terms = {m: c for m, c in acc.items() if c}

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[Monomial]:
        return iter(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, mono: Monomial) -> Fraction:
        return self._terms.get(mono, Fraction(0))

    def __eq__(self, other) -> bool:
        return isinstance(other, FormalSeries) and self._terms == other._terms

    def __add__(self, other: "FormalSeries") -> "FormalSeries":
        return FormalSeries(list(self.items()) + list(other.items()))

    def __sub__(self, other: "FormalSeries") -> "FormalSeries":
        return FormalSeries(list(self.items()) + [(m, -c) for m, c in other.items()])

    def __rmul__(self, scalar) -> "FormalSeries":
        scalar = Fraction(scalar)
        return FormalSeries({m: scalar * c for m, c in self.items()})

    def __mul__(self, other):
        if not isinstance(other, FormalSeries):
            return self.__rmul__(other)
        out: dict[Monomial, Fraction] = defaultdict(Fraction)
        for a, ca in self.items():
            for b, cb in other.items():
                mono = Monomial(
                    a.t0_exp + b.t0_exp,
                    _merge(a.hol, b.hol),
                    _merge(a.antihol, b.antihol),
                    a.log_power + b.log_power,
                )
                out[mono] += ca * cb
        return FormalSeries(out)

    def diff(self, var: Var) -> "FormalSeries":
        out: dict[Monomial, Fraction] = defaultdict(Fraction)
        if var == "t0":
            for m, c in self.items():
                if m.t0_exp:
                    out[Monomial(m.t0_exp - 1, m.hol, m.antihol, m.log_power)] += c * m.t0_exp
                if m.log_power:
                    out[Monomial(m.t0_exp - 1, m.hol, m.antihol, m.log_power - 1)] += c * m.log_power
            return FormalSeries(out)
        kind, k = var
        if kind not in ("t", "tbar"):
            raise ValueError(f"unknown variable {var!r}")
        for m, c in self.items():
            side = m.hol if kind == "t" else m.antihol
            n = dict(side).get(k, 0)
            if not n:
                continue
            new = _bump(side, k, -1)
            mono = Monomial(m.t0_exp, new, m.antihol, m.log_power) if kind == "t" else Monomial(
                m.t0_exp, m.hol, new, m.log_power
            )
            out[mono] += c * n
        return FormalSeries(out)

    def d(self, *variables: Var) -> "FormalSeries":
        out = self
        for v in variables:
            out = out.diff(v)
        return out

    def on_t0_line(self) -> "FormalSeries":
        """Restriction to t_k = tbar_k = 0 for all k >= 1."""
        return FormalSeries({m: c for m, c in self.items() if not m.hol and not m.antihol})

    def hol_zero(self) -> "FormalSeries":
        """Restriction to t_k = 0 (tbar_k kept)."""
        return FormalSeries({m: c for m, c in self.items() if not m.hol})

    def filter(self, pred) -> "FormalSeries":
        return FormalSeries({m: c for m, c in self.items() if pred(m)})

    def evaluate(self, point: MomentVector) -> complex:
        return sum(self.terms_evaluated(point), 0j)

    def terms_evaluated(self, point: MomentVector) -> Iterator[complex]:
        if point.t0 <= 0:
            raise ValueError(f"evaluation needs t0 > 0, got {point.t0}")
        lg = math.log(point.t0)
        for m, c in self.items():
            v = complex(c) * point.t0**m.t0_exp * lg**m.log_power
            for k, n in m.hol:
                v *= point.get(k) ** n
            for k, n in m.antihol:
                v *= point.get(k).conjugate() ** n
            yield v

    def __repr__(self) -> str:
        body = " + ".join(f"({c})*{m}" for m, c in sorted(self.items(), key=lambda x: x[0].sort_key()))
        return f"FormalSeries({body or '0'})"


def _merge(a: Pairs, b: Pairs) -> Pairs:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for k, n in b:
        d[k] = d.get(k, 0) + n
    return tuple(sorted(d.items()))


HEAD = FormalSeries(
    {
        Monomial(2, (), (), 1): Fraction(1, 2),
        Monomial(2): Fraction(-3, 4),
    }
)


@dataclass(frozen=True)
class TruncatedF:
    """F truncated to indices <= n and degree <= K, plus its closed head.

    The optional halo admits up to ``halo_degree`` extra factors (hol and
    antihol together) with indices in (n, halo_index].  Derivatives of order
    <= halo_degree in those variables are then exact at points supported on
    indices <= n, which is what the map and the Hirota checks need.
    """

    n: int
    K: int
    terms: Mapping[Monomial, Fraction]
    halo_index: int = 0
    halo_degree: int = 0

    @cached_property
    def _full(self) -> FormalSeries:
        return HEAD + FormalSeries(self.terms)

    def series(self) -> FormalSeries:
        """F as a :class:`FormalSeries`, head included."""
        return self._full

    def admits(self, mono: Monomial) -> bool:
        """True when ``mono`` lies inside the computed truncation window."""
        if mono.degree > self.K:
            return False
        outside = sum(n for k, n in mono.hol + mono.antihol if k > self.n)
        if not outside:
            return True
        return outside <= self.halo_degree and mono.max_index <= self.halo_index

    def coefficient(self, mono: Monomial) -> Fraction:
        if mono.log_power or not (mono.hol or mono.antihol):
            return HEAD.coefficient(mono)
        if not self.admits(mono):
            raise ValueError(f"monomial {mono} lies outside truncation (n={self.n}, K={self.K})")
        return self.terms.get(mono, Fraction(0))

    def terms_of_degree(self, K: int) -> dict[Monomial, Fraction]:
        return {m: c for m, c in self.terms.items() if m.degree == K}

    def to_json(self) -> dict:
        rows = []
        for m in sorted(self.terms, key=Monomial.sort_key):
            c = self.terms[m]
            row = m.to_json()
            row["coeff"] = _frac_str(c)
            rows.append(row)
        out = {
            "n": self.n,
            "K": self.K,
            "head": "1/2*t0^2*log(t0) - 3/4*t0^2",
            "terms": rows,
        }
        if self.halo_degree:
            out["halo"] = {"index": self.halo_index, "degree": self.halo_degree}
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)

    @classmethod
    def from_json(cls, obj: dict) -> "TruncatedF":
        terms = {Monomial.from_json(r): Fraction(r["coeff"]) for r in obj["terms"]}
        halo = obj.get("halo", {})
        return cls(
            obj["n"], obj["K"], MappingProxyType(terms), halo.get("index", 0), halo.get("degree", 0)
        )


def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _index_multisets(n: int, max_size: int, halo_index: int, halo_degree: int):
    core = list(range(1, n + 1))
    extra = list(range(n + 1, halo_index + 1)) if halo_degree else []
    for size in range(1, max_size + 1):
        for h in range(0, min(halo_degree, size) + 1):
            if h and not extra:
                break
            for a in combinations_with_replacement(core, size - h):
                for b in combinations_with_replacement(extra, h):
                    yield h, a + b


def build_f(
    n: int,
    K: int,
    *,
    halo_index: int | None = None,
    halo_degree: int = 0,
    cache: CoefficientCache | None = None,
    max_signatures: int = 250_000,
) -> TruncatedF:
    """Build the truncated series of F.

    Every monomial t0^(i - deg + 2) prod t_k^n_k prod tbar_k^nbar_k with
    indices <= n (plus halo), 2 <= deg <= K and nonnegative t0 exponent gets
    coefficient prod(k^n_k / n_k!) prod(k^nbar_k / nbar_k!) N^2.
    """
    if n < 1:
        raise ValueError(f"index bound n must be >= 1, got {n}")
    if K < 2:
        raise ValueError(f"degree bound K must be >= 2, got {K}")
    if halo_index is None:
        halo_index = n
    if halo_degree < 0 or (halo_degree and halo_index <= n):
        raise ValueError("halo needs halo_degree >= 0 and halo_index > n")

    by_weight: dict[int, list] = defaultdict(list)
    for h, ms in _index_multisets(n, K - 1, halo_index, halo_degree):
        by_weight[sum(ms)].append((h, ms))

    work = []
    for w, group in by_weight.items():
        for h1, hol in group:
            for h2, anti in group:
                deg = len(hol) + len(anti)
                if deg > K or h1 + h2 > halo_degree or w - deg + 2 < 0:
                    continue
                work.append((w, hol, anti))
                if len(work) > max_signatures:
                    raise CapacityError(
                        f"build_f(n={n}, K={K}) needs more than {max_signatures} signatures"
                    )

    terms: dict[Monomial, Fraction] = {}
    for w, hol, anti in sorted(work):
        sig = MomentSignature.from_lists(hol, anti, w)
        value = n2(sig, cache)
        if not value:
            continue
        pref = Fraction(1)
        for k, mult in sig.hol + sig.antihol:
            pref *= Fraction(k**mult, factorial(mult))
        mono = Monomial(w - sig.degree + 2, sig.hol, sig.antihol)
        terms[mono] = pref * value
    return TruncatedF(n, K, MappingProxyType(terms), halo_index if halo_degree else 0, halo_degree)


def differentiate(f: FormalSeries | TruncatedF, var: Var) -> FormalSeries:
    if isinstance(f, TruncatedF):
        f = f.series()
    return f.diff(var)


def coefficient(f: TruncatedF | FormalSeries, mono: Monomial) -> Fraction:
    return f.coefficient(mono)


def evaluate(f: FormalSeries | TruncatedF, point: MomentVector) -> complex:
    if isinstance(f, TruncatedF):
        f = f.series()
    return f.evaluate(point)
