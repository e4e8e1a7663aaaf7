"""Machine checks for the identities, bounds and equations F must satisfy.

Every check returns a :class:`CheckReport`.  Exact checks compare
:class:`~fractions.Fraction` values with zero tolerance.  Numeric checks carry
their tolerance in the report.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .coefficients import (
    CoefficientCache,
    MomentSignature,
    n1,
    n2,
    p_count,
    s_weight,
    signatures,
    t1,
    t2,
)
from .combinatorics import binomial, compositions, factorial, partitions
from .series import FormalSeries, Monomial, MomentVector, TruncatedF, build_f

__all__ = [
    "CheckReport",
    "Region",
    "check_theorem2",
    "check_bounds",
    "in_convergence_region",
    "check_tail",
    "check_hirota_residuals",
    "hirota_terms",
    "check_equation4",
    "check_boundary_conditions",
    "check_quartic",
    "quartic_closed_form",
    "check_nonnegativity",
    "exp_lower_bound",
    "f_term",
    "f_slice",
    "run_suite",
    "SUITES",
]


@dataclass
class CheckReport:
    name: str
    cases_run: int = 0
    failures: list = field(default_factory=list)
    worst_residual: float | None = None
    tolerance: float | None = None
    conjecture: bool = False
    notes: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, inp, expected, got) -> None:
        self.failures.append((inp, expected, got))

    def residual(self, r: float) -> None:
        if self.worst_residual is None or r > self.worst_residual:
            self.worst_residual = r

    def to_json(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        d["failures"] = [[str(x) for x in f] for f in self.failures]
        return d

    def __str__(self) -> str:
        status = "PASS" if self.passed else ("REPORT" if self.conjecture else "FAIL")
        extra = "" if self.worst_residual is None else f" worst={self.worst_residual:.3e}"
        return f"[{status}] {self.name}: {self.cases_run} cases, {len(self.failures)} failures{extra}"


# ---------------------------------------------------------------- series slices


def f_term(hol: Sequence[int], antihol: Sequence[int], cache: CoefficientCache | None = None):
    """The single series term of F with the given index multisets.

    Returns ``(monomial, coefficient)``; the coefficient may be 0.
    """
    w = sum(hol)
    sig = MomentSignature.from_lists(hol, antihol, w)
    value = n2(sig, cache) if sum(antihol) == w else Fraction(0)
    pref = Fraction(1)
    for k, mult in sig.hol + sig.antihol:
        pref *= Fraction(k**mult, factorial(mult))
    return Monomial(w - sig.degree + 2, sig.hol, sig.antihol), pref * value


def f_slice(hol: Sequence[int], cache: CoefficientCache | None = None) -> FormalSeries:
    """All terms of F whose holomorphic part is exactly the multiset ``hol``."""
    w = sum(hol)
    terms = {}
    for anti in partitions(w):
        mono, c = f_term(hol, anti, cache)
        if c and mono.t0_exp >= 0:
            terms[mono] = c
    return FormalSeries(terms)


# ---------------------------------------------------------------- single antiholomorphic index


def check_theorem2(max_i: int, cache: CoefficientCache | None = None) -> CheckReport:
    """N^2 with antiholomorphic part (1 | nbar) is (i-1)! iff the holomorphic
    part is the single index i with multiplicity 1, and 0 otherwise."""
    rep = CheckReport("theorem2")
    for i in range(1, max_i + 1):
        for hol in partitions(i):
            sig = MomentSignature.from_lists(hol, (1,) * i, i)
            expected = Fraction(factorial(i - 1)) if hol == (i,) else Fraction(0)
            got = n2(sig, cache)
            rep.cases_run += 1
            if got != expected:
                rep.fail(str(sig), expected, got)
    return rep


# ---------------------------------------------------------------- estimates


def exp_lower_bound(x: int, terms: int = 40) -> Fraction:
    """Rational lower bound sum_{j<terms} x^j / j! <= e^x for x >= 0."""
    return sum((Fraction(x**j, factorial(j)) for j in range(terms)), Fraction(0))


def check_bounds(max_weight: int, cache: CoefficientCache | None = None) -> CheckReport:
    """Upper bounds on P, T1, T2, S-tilde and |N1| for every enumerable argument
    with weight <= max_weight.  e^x enters only through a rational lower bound,
    which makes the N1 check stricter, never looser."""
    if max_weight > 8:
        raise ValueError("check_bounds is capped at max_weight 8")
    rep = CheckReport("bounds")
    counts = dict.fromkeys(("p_count", "t1", "t2", "s_tilde", "n1"), 0)

    for total in range(2, max_weight + 1):
        for m in range(1, total + 1):
            for s in compositions(total, m):
                for i in range(1, total):
                    j = total - i
                    got = p_count(i, s)
                    bound = min(binomial(i - 1, m - 1), binomial(j - 1, m - 1))
                    counts["p_count"] += 1
                    if got > bound:
                        rep.fail(("est1", i, j, s), bound, got)
                    v = t1(i, j, s, cache)
                    bound = Fraction(min(i, j) ** (m - 1), factorial(m))
                    counts["t1"] += 1
                    if v > bound:
                        rep.fail(("est2", i, j, s), bound, v)

    # T^2 for every ordered index tuple, k >= 2
    for total in range(2, max_weight + 1):
        for k in range(2, total + 1):
            for ilist in compositions(total, k):
                big = max(ilist)
                for m in range(1, total + 1):
                    for s in compositions(total, m):
                        for l in compositions(m + k - 2, m):
                            v = t2(ilist, s, l, cache)
                            bound = Fraction(
                                big ** (m - 1) * (k - 1) ** m * factorial(k - 2), factorial(m)
                            )
                            counts["t2"] += 1
                            if v > bound:
                                rep.fail(("est3", ilist, s, l), bound, v)

    # S-tilde(m, k): S summed over block sums and over l with sum(l_r - 1) = k - 2
    for total in range(1, max_weight + 1):
        for ibar in partitions(total):
            kbar, big = len(ibar), max(ibar)
            for m in range(1, kbar + 1):
                for k in range(2, total - kbar + 4):
                    acc = 0
                    for s in compositions(total, m):
                        for l in compositions(m + k - 2, m):
                            acc += s_weight(ibar, s, l, cache)
                    bound = m * factorial(kbar - 1) * binomial(big * kbar - kbar, k - 2) * binomial(
                        big * kbar, kbar - m
                    )
                    counts["s_tilde"] += 1
                    if acc > bound:
                        rep.fail(("est4", ibar, m, k), bound, acc)

    for sig in signatures(max_weight):
        hol, anti = sig.expanded()
        k, kbar = len(hol), len(anti)
        big, bigbar = max(hol), max(anti)
        v = n1(sig.weight, hol, anti, cache)
        bound = (
            factorial(k - 1)
            * factorial(kbar - 1)
            * exp_lower_bound(big * (k - 1))
            * 2 ** (bigbar * kbar - kbar)
            * 2 ** (bigbar * kbar)
        )
        counts["n1"] += 1
        if abs(v) > bound:
            rep.fail(("est5", str(sig)), bound, v)

    rep.cases_run = sum(counts.values())
    rep.notes["cases_by_estimate"] = counts
    return rep


# ---------------------------------------------------------------- convergence region


@dataclass(frozen=True)
class Region:
    inside: bool
    radius: float

    @staticmethod
    def tail_bound(K: int) -> float:
        """Bound on the absolute sum of degree-K terms inside the region."""
        return 2.0**-K


def convergence_radius(n: int) -> float:
    return 1.0 / (4 * n**3 * 2**n * math.exp(n))


def in_convergence_region(t: MomentVector, n: int) -> Region:
    """Sufficient convergence test: 0 < t0 < 1 and |t_k| <= (4 n^3 2^n e^n)^-1."""
    if t.n > n:
        return Region(False, convergence_radius(n))
    r = convergence_radius(n)
    ok = 0 < t.t0 < 1 and all(abs(t.get(k)) <= r for k in range(1, n + 1))
    return Region(ok, r)


def degree_sums(f: TruncatedF, t: MomentVector) -> dict[int, float]:
    """Sum over degree-K series terms of |coefficient * monomial|, per K."""
    sums: dict[int, float] = {K: 0.0 for K in range(2, f.K + 1)}
    series = FormalSeries(f.terms)
    for mono, val in zip(series, series.terms_evaluated(t)):
        sums[mono.degree] += abs(val)
    return sums


def check_tail(t: MomentVector, K_max: int, n: int | None = None, f: TruncatedF | None = None) -> CheckReport:
    n = n or max(t.n, 1)
    region = in_convergence_region(t, n)
    if not region.inside:
        raise ValueError(f"point is outside the sufficient convergence region (radius {region.radius:.6g})")
    f = f or build_f(n, K_max)
    rep = CheckReport("tail")
    sums = degree_sums(f, t)
    for K in range(2, K_max + 1):
        rep.cases_run += 1
        bound = region.tail_bound(K)
        rep.residual(sums[K] / bound)
        if sums[K] > bound:
            rep.fail(("degree", K), bound, sums[K])
    rep.notes["degree_sums"] = {str(K): v for K, v in sums.items()}
    rep.notes["radius"] = region.radius
    return rep


# ---------------------------------------------------------------- Hirota equations


def _D(z: complex, first: dict[int, complex]) -> complex:
    return sum(z**-k / k * v for k, v in first.items())


def hirota_terms(f: TruncatedF, t: MomentVector, z: complex, xi: complex) -> dict:
    """Both sides of the three dispersionless Hirota equations at ``t``.

    Returned keys map to ``(lhs, rhs)``.  ``eq3`` uses the sign convention
    1 - exp(-D(z) Dbar(xi) F) = exp(d0 (d0 + D(z) + Dbar(xi)) F) / (z conj(xi)),
    which is the one consistent with d_i dbar_j F = i t0^i delta_ij on the
    t0-line.  ``eq3_printed`` keeps the opposite signs for comparison.
    """
    F = f.series()
    N = f.halo_index if f.halo_degree >= 2 else f.n
    ks = range(1, N + 1)
    dF = {k: F.diff(("t", k)) for k in ks}
    dbF = {k: F.diff(("tbar", k)) for k in ks}
    F0 = F.diff("t0")
    d00 = F0.diff("t0").evaluate(t)
    d0 = {k: F0.diff(("t", k)).evaluate(t) for k in ks}
    d0b = {k: F0.diff(("tbar", k)).evaluate(t) for k in ks}

    zb, xib = z.conjugate(), xi.conjugate()
    DD = DbDb = DDb = 0j
    for i in ks:
        for j in ks:
            DD += z**-i * xi**-j / (i * j) * dF[i].diff(("t", j)).evaluate(t)
            DbDb += zb**-i * xib**-j / (i * j) * dbF[i].diff(("tbar", j)).evaluate(t)
            DDb += z**-i * xib**-j / (i * j) * dF[i].diff(("tbar", j)).evaluate(t)

    eq1 = ((z - xi) * cmath.exp(DD), z * cmath.exp(-_D(z, d0)) - xi * cmath.exp(-_D(xi, d0)))
    eq2 = (
        (zb - xib) * cmath.exp(DbDb),
        zb * cmath.exp(-_D(zb, d0b)) - xib * cmath.exp(-_D(xib, d0b)),
    )
    expo = d00 + _D(z, d0) + _D(xib, d0b)
    eq3 = (1 - cmath.exp(-DDb), cmath.exp(expo) / (z * xib))
    eq3_printed = (1 - cmath.exp(DDb), cmath.exp(-expo) / (z * xib))
    return {"eq1": eq1, "eq2": eq2, "eq3": eq3, "eq3_printed": eq3_printed}


def check_hirota_residuals(
    f: TruncatedF, t: MomentVector, z: complex, xi: complex, tol: float = 1e-6
) -> CheckReport:
    rep = CheckReport("hirota", tolerance=tol)
    sides = hirota_terms(f, t, complex(z), complex(xi))
    for name in ("eq1", "eq2", "eq3"):
        lhs, rhs = sides[name]
        r = abs(lhs - rhs)
        rep.cases_run += 1
        rep.notes[name] = r
        rep.residual(r)
        if not r <= tol:
            rep.fail(name, rhs, lhs)
    lhs, rhs = sides["eq3_printed"]
    rep.notes["eq3_printed"] = abs(lhs - rhs)
    rep.notes["truncation_scale"] = 2.0**-f.K
    return rep


# ---------------------------------------------------------------- derivative expansion identity


def eq4_coefficient(ilist: Sequence[int], s: Sequence[int], l: Sequence[int], cache=None) -> Fraction:
    """Coefficient multiplying prod_r d0^l_r d_{s_r} F in the expansion of
    d_{i_1} ... d_{i_k} F, i.e. (prod i / prod s) (-1)^(m+1) T^2 / prod (l_r - 1)!."""
    m = len(s)
    c = Fraction((-1) ** (m + 1)) * t2(ilist, s, l, cache)
    if not c:
        return c
    num = math.prod(ilist)
    den = math.prod(s)
    for lr in l:
        den *= factorial(lr - 1)
    return c * Fraction(num, den)


def equation4_sides(ilist: Sequence[int], cache: CoefficientCache | None = None):
    """Both sides of the multi-derivative expansion with all t_k set to 0.

    The left side is d_{i_1}..d_{i_k} F; the right side is built by
    multiplying out the single-derivative factors.  Setting t_k = 0 while
    keeping every tbar_k is equivalent to applying all antiholomorphic
    derivatives and restricting to the t0-line.
    """
    ilist = tuple(ilist)
    k, w = len(ilist), sum(ilist)
    lhs = f_slice(sorted(ilist), cache).d(*[("t", i) for i in ilist]).hol_zero()

    factors: dict[tuple[int, int], FormalSeries] = {}

    def factor(sr: int, lr: int) -> FormalSeries:
        key = (sr, lr)
        if key not in factors:
            factors[key] = f_slice((sr,), cache).d(("t", sr), *["t0"] * lr).hol_zero()
        return factors[key]

    rhs = FormalSeries()
    for m in range(1, w + 1):
        for s in compositions(w, m):
            for l in compositions(m + k - 2, m):
                c = eq4_coefficient(ilist, s, l, cache)
                if not c:
                    continue
                prod = FormalSeries({Monomial(): Fraction(1)})
                for sr, lr in zip(s, l):
                    prod = prod * factor(sr, lr)
                rhs = rhs + c * prod
    return lhs, rhs


def check_equation4(max_sum: int = 6, cache: CoefficientCache | None = None) -> CheckReport:
    """Exact coefficient identity for every ordered index tuple with k >= 2."""
    rep = CheckReport("equation4")
    for w in range(2, max_sum + 1):
        for k in range(2, w + 1):
            for ilist in compositions(w, k):
                lhs, rhs = equation4_sides(ilist, cache)
                rep.cases_run += 1
                if lhs != rhs:
                    rep.fail(ilist, lhs, rhs)
    return rep


# ---------------------------------------------------------------- boundary conditions


def check_boundary_conditions(max_i: int = 8, cache: CoefficientCache | None = None) -> CheckReport:
    """t0-line values of mixed derivatives of F.

    dbar_i d_{i_1}..d_{i_k} F = d_i dbar_{i_1}..dbar_{i_k} F
        = i_1...i_k i!/(i-k+1)! t0^(i-k+1)  when i_1 + ... + i_k = i,
    and d_i dbar_j F = i t0^i delta_ij.
    """
    rep = CheckReport("boundary_conditions")
    for i in range(1, max_i + 1):
        for k in range(1, i + 1):
            for ilist in compositions(i, k):
                expected = FormalSeries(
                    {Monomial(i - k + 1): Fraction(math.prod(ilist) * factorial(i), factorial(i - k + 1))}
                )
                hol_side = f_slice(sorted(ilist), cache)
                got = hol_side.d(("tbar", i), *[("t", r) for r in ilist]).on_t0_line()
                rep.cases_run += 1
                if got != expected:
                    rep.fail(("dbar", i, ilist), expected, got)
                mirror = FormalSeries({m.swapped(): c for m, c in hol_side.items()})
                got = mirror.d(("t", i), *[("tbar", r) for r in ilist]).on_t0_line()
                rep.cases_run += 1
                if got != expected:
                    rep.fail(("d", i, ilist), expected, got)
    for i in range(1, max_i + 1):
        for j in range(1, max_i + 1):
            mono, c = f_term((i,), (j,), cache)
            got = FormalSeries({mono: c}).d(("t", i), ("tbar", j)).on_t0_line()
            expected = FormalSeries({Monomial(i): Fraction(i)} if i == j else {})
            rep.cases_run += 1
            if got != expected:
                rep.fail(("mixed", i, j), expected, got)
    return rep


# ---------------------------------------------------------------- quartic closed form


def _truncate(f: FormalSeries, K: int) -> FormalSeries:
    return f.filter(lambda m: m.degree <= K)


def quartic_closed_form(K: int) -> FormalSeries:
    """Series part (head excluded) of the closed form valid when t_k = 0 for k > 2.

        F = -3/4 t0^2 + 1/2 t0^2 log(t0 / (1 - 4|t2|^2))
            + t0 (|t1|^2 + t1^2 tbar2 + tbar1^2 t2) / (1 - 4|t2|^2)

    expanded in x = 4 t2 tbar2 with log(1 - x) = -sum x^j / j and
    1 / (1 - x) = sum x^j, truncated at total degree K.
    """
    one = Monomial()
    x = FormalSeries({Monomial.make(0, {2: 1}, {2: 1}): 4})
    powers = [FormalSeries({one: 1})]
    while len(powers) <= K // 2 + 1:
        powers.append(_truncate(powers[-1] * x, K))
    neg_log = FormalSeries()
    geom = FormalSeries()
    for j, p in enumerate(powers):
        if j:
            neg_log = neg_log + Fraction(1, j) * p
        geom = geom + p
    t0sq = FormalSeries({Monomial(2): Fraction(1, 2)})
    quad = FormalSeries(
        {
            Monomial.make(1, {1: 1}, {1: 1}): 1,
            Monomial.make(1, {1: 2}, {2: 1}): 1,
            Monomial.make(1, {2: 1}, {1: 2}): 1,
        }
    )
    return _truncate(t0sq * neg_log + quad * geom, K)


def check_quartic(K: int, f: TruncatedF | None = None) -> CheckReport:
    if K > 10:
        raise ValueError("check_quartic is capped at K = 10")
    f = f or build_f(2, K)
    oracle = quartic_closed_form(K)
    rep = CheckReport("quartic")
    monos = set(oracle) | set(f.terms)
    for mono in sorted(monos, key=Monomial.sort_key):
        rep.cases_run += 1
        a, b = oracle.coefficient(mono), f.coefficient(mono)
        if a != b:
            rep.fail(str(mono), a, b)
    return rep


# ---------------------------------------------------------------- nonnegativity


def check_nonnegativity(max_weight: int, cache: CoefficientCache | None = None) -> CheckReport:
    """Report (never fail) negative N^2 values; the sign pattern is conjectural."""
    rep = CheckReport("nonnegativity", conjecture=True)
    negatives = []
    for sig in signatures(max_weight):
        rep.cases_run += 1
        v = n2(sig, cache)
        if v < 0:
            negatives.append((str(sig), str(v)))
    rep.notes["negatives"] = negatives
    return rep


# ---------------------------------------------------------------- suites


HIROTA_Z = 10 * cmath.exp(0.3j)
HIROTA_XI = 10 * cmath.exp(2.1j)


def _hirota_default(p: dict) -> CheckReport:
    t = MomentVector(0.25, (0.001, 0.001))
    K = p.get("K", 6 if p.get("quick") else 8)
    f = build_f(2, K, halo_index=8, halo_degree=2)
    return check_hirota_residuals(f, t, HIROTA_Z, HIROTA_XI)


SUITES = {
    "theorem2": lambda p: check_theorem2(p.get("max_i", 8)),
    "bounds": lambda p: check_bounds(p.get("max_weight", 5 if p.get("quick") else 7)),
    "tail": lambda p: check_tail(MomentVector(0.25, (0.001, 0.001)), p.get("K", 8 if p.get("quick") else 10)),
    "hirota": _hirota_default,
    "equation4": lambda p: check_equation4(p.get("max_sum", 5 if p.get("quick") else 6)),
    "boundary": lambda p: check_boundary_conditions(p.get("max_i", 6 if p.get("quick") else 8)),
    "quartic": lambda p: check_quartic(p.get("K", 6 if p.get("quick") else 8)),
    "nonnegativity": lambda p: check_nonnegativity(p.get("max_weight", 5 if p.get("quick") else 6)),
}


def run_suite(name: str, params: dict | None = None) -> list[CheckReport]:
    params = params or {}
    if name == "all":
        return [fn(params) for fn in SUITES.values()]
    if name not in SUITES:
        raise KeyError(name)
    return [SUITES[name](params)]


def reports_json(reports: Iterable[CheckReport]) -> str:
    reports = list(reports)
    ok = all(r.passed or r.conjecture for r in reports)
    return json.dumps({"passed": ok, "reports": [r.to_json() for r in reports]}, indent=1, default=str)
