from fractions import Fraction
from math import inf

import pytest
from hypothesis import given, settings, strategies as st

from chabsurf.rings import (
    FiniteField,
    LocalFieldParams,
    PadicNum,
    PrecisionError,
    ResourceError,
    is_prime,
    padic_sqrt,
    valuation,
)

PRIMES = [2, 3, 5, 7, 11, 13]


def test_small_field_examples():
    F5, F7 = FiniteField(5), FiniteField(7)
    assert F5(3) + F5(4) == 2
    assert F7(2).inverse() == 4
    F4 = FiniteField(2, 2)
    w = F4.gen()
    assert w * w == w + 1
    assert F4.modulus == (1, 1, 1)


@pytest.mark.parametrize("p, s, expected", [(3, 1, [0, 1, 2]), (2, 2, [[0, 0], [1, 0], [0, 1], [1, 1]])])
def test_enumeration_order(p, s, expected):
    F = FiniteField(p, s)
    got = [e.value if s == 1 else e.coeffs() for e in F.enumerate()]
    assert got == expected


def test_enumeration_f25_has_no_repeats():
    els = FiniteField(5, 2).enumerate()
    assert len(els) == 25 == len({e.value for e in els})


def test_enumeration_cap(monkeypatch):
    monkeypatch.setenv("CC_ENUM_CAP", "10")
    with pytest.raises(ResourceError):
        FiniteField(11).enumerate()


def test_zero_inverse_and_mismatch():
    F = FiniteField(7)
    with pytest.raises(ZeroDivisionError):
        F(0).inverse()
    G = FiniteField(5)
    with pytest.raises(ValueError):
        F(3) + G(1)


@pytest.mark.parametrize("p, s", [(2, 2), (2, 3), (3, 2), (5, 2), (7, 2), (2, 4)])
def test_frobenius_is_a_ring_map(p, s):
    F = FiniteField(p, s)
    els = F.enumerate()
    for a in els[:: max(1, len(els) // 12)]:
        for b in els:
            assert (a + b) ** p == a**p + b**p
            assert (a * b) ** p == a**p * b**p


@pytest.mark.parametrize("p, s", [(2, 2), (3, 2), (5, 2), (2, 3), (3, 3)])
def test_multiplicative_group_order(p, s):
    F = FiniteField(p, s)
    for a in F.enumerate()[1:]:
        assert a ** (F.q - 1) == 1
        assert a * a.inverse() == 1


def test_padic_examples():
    a = PadicNum.from_rational(5**3 * 2, 5) + PadicNum.from_rational(5**3 * 3, 5)
    assert a.v == 4
    q = PadicNum.from_rational(7**2 * 3, 7) / PadicNum.from_rational(7, 7)
    assert (q.v, q.unit % 7) == (1, 3)
    assert PadicNum.from_rational(5, 5).norm() == Fraction(1, 5)


def test_division_by_indistinguishable_zero():
    z = PadicNum(5, inf, 0, 10)
    with pytest.raises(PrecisionError):
        PadicNum.from_rational(1, 5) / z


def test_cancellation_loses_absolute_precision_only_as_far_as_known():
    a = PadicNum.from_rational(1, 5, prec=6)
    b = PadicNum.from_rational(1 + 5**6, 5, prec=8)
    assert (a - b).is_zero()


def test_serialization_round_trip():
    x = PadicNum.from_rational(Fraction(-7, 25), 5, prec=12)
    assert PadicNum.parse(str(x)) == x
    assert PadicNum.from_json(x.to_json()) == x
    assert str(PadicNum.parse(str(x))) == str(x)


rationals = st.fractions(min_value=-10**6, max_value=10**6, max_denominator=10**4).filter(lambda f: f != 0)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([3, 5, 7, 11]), rationals, rationals)
def test_ultrametric(p, x, y):
    a, b = PadicNum.from_rational(x, p, 40), PadicNum.from_rational(y, p, 40)
    s = a + b
    if a.v != b.v:
        assert s.v == min(a.v, b.v)
        assert s.norm() == max(a.norm(), b.norm())
    else:
        assert s.v >= a.v
    assert (a * b).v == a.v + b.v


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([3, 5, 7, 11]), rationals, rationals)
def test_padic_matches_rational_arithmetic(p, x, y):
    a, b = PadicNum.from_rational(x, p, 30), PadicNum.from_rational(y, p, 30)
    assert a * b == PadicNum.from_rational(x * y, p, 30)
    assert a - b == PadicNum.from_rational(x - y, p, 30)
    assert valuation(x * y, p) == valuation(x, p) + valuation(y, p)


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
def test_hensel_square_root(p):
    for k in range(1, 6):
        c = 1 + k * p
        r = padic_sqrt(c, p, 12)
        assert r is not None and (r * r - c) % p**12 == 0


def test_local_field_params():
    L = LocalFieldParams(7, 1, 1)
    assert (L.q, L.lam) == (7, Fraction(1, 6))
    L2 = LocalFieldParams(5, 2, 3)
    assert L2.q == 125
    assert L2.lam_from_m_and_r() == L2.lam == Fraction(2, 4)
    with pytest.raises(ValueError):
        LocalFieldParams(8)


@pytest.mark.parametrize("n, expected", [(1, False), (2, True), (9, False), (521, True), (2744, False), (10007, True)])
def test_is_prime(n, expected):
    assert is_prime(n) is expected
