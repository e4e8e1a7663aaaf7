import cmath
import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from todamap.series import (
    CapacityError,
    FormalSeries,
    Monomial,
    MomentVector,
    TruncatedF,
    build_f,
    coefficient,
    differentiate,
    evaluate,
)

from oracles import sympy_quartic_coefficients


@pytest.fixture(scope="module")
def f24():
    return build_f(2, 4)


@pytest.fixture(scope="module")
def f36():
    return build_f(3, 6)


def test_smallest_series_has_one_term():
    f = build_f(1, 2)
    assert dict(f.terms) == {Monomial.make(1, {1: 1}, {1: 1}): 1}


def test_quartic_examples():
    assert build_f(2, 2).coefficient(Monomial.make(2, {2: 1}, {2: 1})) == 2
    f = build_f(2, 3)
    assert f.coefficient(Monomial.make(1, {1: 2}, {2: 1})) == 1
    assert f.coefficient(Monomial.make(1, {2: 1}, {1: 2})) == 1


def test_quartic_against_sympy_expansion():
    K = 6
    f = build_f(2, K)
    oracle = sympy_quartic_coefficients(K)
    got = {}
    for m, c in f.terms.items():
        h, a = dict(m.hol), dict(m.antihol)
        got[(m.t0_exp, h.get(1, 0), h.get(2, 0), a.get(1, 0), a.get(2, 0))] = c
    assert got == oracle


def test_coefficient_lookup(f24):
    assert f24.coefficient(Monomial.make(1, {1: 1}, {1: 1})) == 1
    assert coefficient(f24, Monomial.make(2, {2: 1}, {2: 1})) == 2
    assert f24.coefficient(Monomial.make(1, {1: 1}, {2: 1})) == 0
    assert f24.coefficient(Monomial(2, (), (), 1)) == Fraction(1, 2)
    assert f24.coefficient(Monomial(2)) == Fraction(-3, 4)


def test_coefficient_outside_truncation(f24):
    with pytest.raises(ValueError):
        f24.coefficient(Monomial.make(0, {3: 1}, {3: 1}))
    with pytest.raises(ValueError):
        f24.coefficient(Monomial.make(1, {1: 3}, {1: 3}))


def test_build_rejects_bad_bounds():
    with pytest.raises(ValueError):
        build_f(0, 4)
    with pytest.raises(ValueError):
        build_f(2, 1)
    with pytest.raises(ValueError):
        build_f(2, 4, halo_index=2, halo_degree=1)


def test_capacity_limit():
    with pytest.raises(CapacityError):
        build_f(4, 8, max_signatures=100)


def test_t0_line_derivatives(f24):
    F = f24.series()
    d0 = F.diff("t0").on_t0_line()
    assert d0 == FormalSeries({Monomial(1, (), (), 1): 1, Monomial(1): -1})
    assert d0.diff("t0") == FormalSeries({Monomial(0, (), (), 1): 1})
    for k in (1, 2):
        assert differentiate(f24, ("t", k)).on_t0_line() == FormalSeries()
        assert differentiate(f24, ("tbar", k)).on_t0_line() == FormalSeries()


def test_unknown_variable(f24):
    with pytest.raises(ValueError):
        f24.series().diff(("s", 1))


def test_head_value():
    assert evaluate(build_f(2, 4), MomentVector(1.0)) == pytest.approx(-0.75)


def test_value_with_real_t1_only():
    t, a = 0.3, 0.01
    f = build_f(1, 4)
    expected = -0.75 * t * t + 0.5 * t * t * math.log(t) + t * a * a
    assert evaluate(f, MomentVector(t, (a,))).real == pytest.approx(expected, abs=1e-14)


def test_evaluate_needs_positive_t0(f24):
    with pytest.raises(ValueError):
        evaluate(f24, MomentVector(0.0))


small = st.complex_numbers(max_magnitude=0.05, allow_nan=False, allow_infinity=False)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.05, 0.95), small, small, small)
def test_value_is_real(f36, t0, a, b, c):
    val = evaluate(f36, MomentVector(t0, (a, b, c)))
    assert abs(val.imag) <= 1e-12


def test_weight_grading(f36):
    for m in f36.terms:
        assert m.hol_weight == m.antihol_weight
        assert m.t0_exp == m.hol_weight - m.degree + 2
        assert m.t0_exp >= 0
        assert m.degree <= 6 and m.max_index <= 3


def test_negative_t0_power_coefficients_vanish():
    from todamap.coefficients import n2, signatures

    for sig in signatures(6):
        if sig.weight - sig.degree + 2 < 0:
            assert n2(sig) == 0


def test_hermitian_symmetry(f36):
    for m, c in f36.terms.items():
        assert f36.terms.get(m.swapped()) == c


def test_rotation_covariance(f36):
    t = MomentVector(0.4, (0.03 + 0.01j, -0.02j, 0.015))
    rot = t.rotated(0.7)
    assert evaluate(f36, rot) == pytest.approx(evaluate(f36, t), abs=1e-15)


def test_json_round_trip(f36):
    blob = f36.dumps()
    again = TruncatedF.from_json(json.loads(blob))
    assert dict(again.terms) == dict(f36.terms)
    assert again.dumps() == blob


def test_halo_round_trip():
    f = build_f(2, 4, halo_index=4, halo_degree=1)
    again = TruncatedF.from_json(f.to_json())
    assert (again.halo_index, again.halo_degree) == (4, 1)
    assert dict(again.terms) == dict(f.terms)


def test_halo_extends_without_changing_core():
    plain = build_f(2, 5)
    halo = build_f(2, 5, halo_index=5, halo_degree=2)
    for m, c in plain.terms.items():
        assert halo.terms[m] == c
    extra = [m for m in halo.terms if m.max_index > 2]
    assert extra
    assert all(sum(n for k, n in m.hol + m.antihol if k > 2) <= 2 for m in extra)


def test_formal_series_algebra():
    x = FormalSeries({Monomial.make(0, {1: 1}): 1})
    y = FormalSeries({Monomial.make(0, (), {1: 1}): 2})
    p = (x + y) * (x - y)
    assert p.coefficient(Monomial.make(0, {1: 2})) == 1
    assert p.coefficient(Monomial.make(0, (), {1: 2})) == -4
    assert p.coefficient(Monomial.make(0, {1: 1}, {1: 1})) == 0
    assert (3 * x).coefficient(Monomial.make(0, {1: 1})) == 3
    assert len(x - x) == 0


def test_mixed_partials_commute(f36):
    F = f36.series()
    a = F.d(("t", 1), ("tbar", 2), "t0")
    b = F.d("t0", ("tbar", 2), ("t", 1))
    assert a == b


def test_monomial_json_and_str():
    m = Monomial.make(2, {1: 2, 3: 1}, {2: 1}, log_power=1)
    assert Monomial.from_json(m.to_json()) == m
    assert str(m) == "t0^2*log(t0)*t1^2*t3*tb2"
    assert str(Monomial()) == "1"


def test_moment_vector_basics():
    t = MomentVector(0.5, (0.1, 0, 0))
    assert t.n == 1
    assert t.get(5) == 0
    assert MomentVector.from_json(t.to_json()) == t
    r = MomentVector(0.5, (0.1, 0.2)).rotated(math.pi / 2)
    assert r.get(1) == pytest.approx(0.1 * cmath.exp(-0.5j * math.pi))
