import math
import random
from fractions import Fraction
from itertools import permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from todamap.coefficients import (
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
from todamap.combinatorics import binomial, compositions, partitions

from oracles import brute_p_count, brute_s_weight, brute_t1

composition = st.lists(st.integers(1, 4), min_size=1, max_size=4).map(tuple)


# ---------------------------------------------------------------- p_count


def test_p_count_examples():
    assert p_count(1, (2,)) == 1
    assert p_count(2, (2, 2)) == 1
    for i in range(1, 6):
        assert p_count(i, (1, 1, 1)) == 0


@given(st.integers(1, 12), composition)
def test_p_count_matches_enumeration(i, s):
    assert p_count(i, s) == brute_p_count(i, s)


@given(composition, st.data())
def test_p_count_reflection_symmetry(s, data):
    i = data.draw(st.integers(1, max(1, sum(s) - 1)))
    assert p_count(i, s) == p_count(sum(s) - i, s)


@pytest.mark.parametrize("total", range(2, 13))
def test_p_count_below_binomial(total):
    for m in range(1, total + 1):
        for s in compositions(total, m):
            for i in range(1, total):
                bound = min(binomial(i - 1, m - 1), binomial(total - i - 1, m - 1))
                assert p_count(i, s) <= bound


# ---------------------------------------------------------------- t1


def test_t1_examples():
    assert t1(1, 1, (2,)) == 1
    assert t1(1, 0, (1,)) == 0


@given(st.lists(st.integers(1, 4), min_size=1, max_size=4).map(tuple), st.data())
def test_t1_matches_enumeration_and_is_symmetric(s, data):
    total = sum(s)
    if total < 2:
        return
    i = data.draw(st.integers(1, total - 1))
    j = total - i
    cache = CoefficientCache()
    assert t1(i, j, s, cache) == brute_t1(i, j, s)
    assert t1(i, j, s, cache) == t1(j, i, s, cache)


@pytest.mark.parametrize("total", range(2, 10))
def test_t1_estimate(total):
    for m in range(1, total + 1):
        for s in compositions(total, m):
            for i in range(1, total):
                ell = min(i, total - i)
                assert t1(i, total - i, s) <= Fraction(ell ** (m - 1), math.factorial(m))


def test_grouping_weights_alternating_identity():
    # sum over compositions of s into n parts of (-1)^n / (n! prod parts) is -[s == 1]
    for s in range(1, 10):
        acc = Fraction(0)
        for n in range(1, s + 1):
            for c in compositions(s, n):
                acc += Fraction((-1) ** n, math.factorial(n) * math.prod(c))
        assert acc == (-1 if s == 1 else 0)


# ---------------------------------------------------------------- t2


def test_t2_base_case():
    assert t2((1, 1), (2,), (1,)) == 1


def test_t2_rejects_ragged_rows():
    with pytest.raises(ValueError):
        t2((1, 1), (2,), (1, 1))


def test_t2_zero_off_support():
    assert t2((1, 1), (3,), (1,)) == 0
    assert t2((2,), (2,), (1,)) == 0
    assert t2((1, 1, 1), (3,), (1,)) == 0


@pytest.mark.parametrize("total", range(3, 8))
def test_t2_estimate(total):
    for k in range(3, total + 1):
        for ilist in compositions(total, k):
            big = max(ilist)
            for m in range(1, total + 1):
                bound = Fraction(big ** (m - 1) * (k - 1) ** m * math.factorial(k - 2), math.factorial(m))
                for s in compositions(total, m):
                    for l in compositions(m + k - 2, m):
                        assert t2(ilist, s, l) <= bound


# ---------------------------------------------------------------- s_weight


def test_s_weight_examples():
    assert s_weight((2,), (2,), (1,)) == 1
    assert s_weight((2, 2), (3, 1), (1, 1)) == 0


@pytest.mark.parametrize("kbar", range(1, 7))
def test_s_weight_on_all_ones(kbar):
    ones = (1,) * kbar
    for m in range(1, kbar + 1):
        for s in compositions(kbar, m):
            for l in compositions(m + 2, m) if m > 1 else [(1,), (2,)]:
                expected = 0
                if all(x == 1 for x in l):
                    expected = Fraction(math.factorial(kbar), math.prod(s))
                assert s_weight(ones, s, l) == expected


ibar_lists = st.lists(st.integers(1, 3), min_size=1, max_size=5).map(tuple)


@settings(max_examples=60)
@given(ibar_lists, st.data())
def test_s_weight_matches_labeled_enumeration(ibar, data):
    total = sum(ibar)
    m = data.draw(st.integers(1, len(ibar)))
    s = data.draw(st.sampled_from(list(compositions(total, m))))
    l = tuple(data.draw(st.integers(1, 3)) for _ in range(m))
    assert s_weight(ibar, s, l, CoefficientCache()) == brute_s_weight(ibar, s, l)


def test_s_weight_ignores_order_of_ibar():
    for perm in permutations((1, 2, 2, 3)):
        assert s_weight(perm, (4, 4), (1, 2)) == s_weight((1, 2, 2, 3), (4, 4), (1, 2))


# ---------------------------------------------------------------- n1 / n2


def test_n1_special_cases():
    assert n1(2, (2,), (1, 1)) == 1
    assert n1(3, (1, 2), (3,)) == 1
    assert n1(1, (1,), (1,)) == 1
    assert n1(2, (1,), (1, 1)) == 0


def test_n1_vanishes_against_all_ones():
    for i in range(3, 8):
        for k in range(3, i + 1):
            for ilist in compositions(i, k):
                assert n1(i, ilist, (1,) * i) == 0


def test_n1_requires_nonempty_lists():
    with pytest.raises(ValueError):
        n1(1, (), (1,))


def _general_n1(i, ilist, ibar):
    total = Fraction(0)
    for m in range(1, min(len(ibar), i) + 1):
        for s in compositions(i, m):
            for l in compositions(m + len(ilist) - 2, m):
                total += (-1) ** (m + 1) * brute_s_weight(ibar, s, l) * t2(ilist, s, l)
    return total


@pytest.mark.parametrize("i", range(2, 7))
def test_general_sum_agrees_with_single_antiholomorphic_case(i):
    for k in range(2, i + 1):
        for ilist in compositions(i, k):
            assert _general_n1(i, ilist, (i,)) == n1(i, ilist, (i,))


def test_n2_examples():
    assert n2(MomentSignature(1, ((1, 1),), ((1, 1),))) == 1
    assert n2(MomentSignature(2, ((1, 2),), ((2, 1),))) == 1
    assert n2(MomentSignature.parse("3:(3^1|1^3)")) == 2
    assert n2(MomentSignature.parse("3:(1,2|1^3)")) == 0
    assert n2(MomentSignature.parse("2:(1^1|2^1)")) == 0


@pytest.mark.parametrize("i", range(1, 7))
def test_single_antiholomorphic_index_pattern(i):
    for hol in partitions(i):
        sig = MomentSignature.from_lists(hol, (1,) * i, i)
        expected = math.factorial(i - 1) if hol == (i,) else 0
        assert n2(sig) == expected


@pytest.mark.parametrize("i", range(1, 7))
def test_n2_hermitian_symmetry(i):
    for sig in signatures(i, i):
        assert n2(sig) == n2(sig.swapped())


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.data())
def test_n1_invariant_under_permuting_holomorphic_indices(i, data):
    k = data.draw(st.integers(2, i))
    ilist = data.draw(st.sampled_from(list(compositions(i, k))))
    kb = data.draw(st.integers(1, i))
    ibar = data.draw(st.sampled_from(list(compositions(i, kb))))
    ref = n1(i, ilist, ibar)
    for perm in set(permutations(ilist)):
        assert n1(i, perm, ibar) == ref


def test_cache_is_transparent():
    rng = random.Random(20240601)
    sigs = list(signatures(6))
    picks = [rng.choice(sigs) for _ in range(100)]
    warm = CoefficientCache()
    first = [n2(s, warm) for s in picks]
    second = [n2(s, warm) for s in picks]
    cold = [n2(s, CoefficientCache()) for s in picks]
    assert first == second == cold
    assert warm.sizes()["n1"] > 0


def test_cache_round_trip(tmp_path):
    cache = CoefficientCache()
    for sig in signatures(4):
        n2(sig, cache)
    path = tmp_path / "n1.json"
    cache.save_n1(path)
    fresh = CoefficientCache()
    assert fresh.load_n1(path) == len(cache.n1)
    assert fresh.n1 == cache.n1


# ---------------------------------------------------------------- signatures


def test_signature_parse_and_format():
    sig = MomentSignature.parse(" 4:(1^2,2|3,1^1) ")
    assert sig == MomentSignature(4, ((1, 2), (2, 1)), ((1, 1), (3, 1)))
    assert MomentSignature.parse(str(sig)) == sig
    assert sig.expanded() == ((1, 1, 2), (1, 3))
    assert sig.degree == 5
    assert sig.is_balanced()
    assert MomentSignature.parse("2:(2,1|2)") == MomentSignature.parse("2:(1,2|2)")
    assert MomentSignature.parse("2:(1,1|2)").hol == ((1, 2),)


@pytest.mark.parametrize("text", ["", "3", "3:(1|)", "x:(1|1)", "2:1|1", "2:(0|2)"])
def test_signature_rejects_garbage(text):
    with pytest.raises(ValueError):
        MomentSignature.parse(text)


def test_signature_count():
    p = [1, 1, 2, 3, 5, 7]
    assert sum(1 for _ in signatures(5)) == sum(x * x for x in p[1:])
