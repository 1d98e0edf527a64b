import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from chabsurf import bounds
from chabsurf.bounds import MissingInput, SurfaceBoundInputs
from chabsurf.rings import is_prime
from chabsurf.surd import QuadSurd


# -- exact surds -----------------------------------------------------------------


def test_surd_normalization_and_ordering():
    assert QuadSurd(0, 1, 8) == QuadSurd(0, 2, 2)
    assert QuadSurd(0, 3, 9) == 9
    assert QuadSurd(1, 1, 2) > QuadSurd(2, 0, 1)  # 1 + sqrt 2 > 2
    assert QuadSurd(3, -2, 2) > 0 > QuadSurd(2, -2, 2)
    assert QuadSurd(6, 2, 5).floor() == 10 and QuadSurd(6, 2, 5).ceil() == 11
    with pytest.raises(ValueError):
        QuadSurd(0, 1, 2) + QuadSurd(0, 1, 3)


@settings(max_examples=200, deadline=None)
@given(
    st.fractions(min_value=-50, max_value=50, max_denominator=30),
    st.fractions(min_value=-50, max_value=50, max_denominator=30),
    st.sampled_from([2, 3, 5, 7, 521]),
)
def test_surd_sign_agrees_with_high_precision_floats(a, b, d):
    x = QuadSurd(a, b, d)
    approx = float(a) + float(b) * math.sqrt(d)
    if abs(approx) > 1e-9:
        assert (x > 0) == (approx > 0)
    assert x.floor() <= approx + 1e-9 and x.ceil() >= approx - 1e-9


# -- exp brackets and the ramification guard -----------------------------------


@pytest.mark.parametrize("x", [Fraction(0), Fraction(1), Fraction(1, 3), Fraction(-2), Fraction(7, 2)])
def test_exp_bracket_contains_exp(x):
    lo, hi = bounds.exp_bracket(x)
    assert lo <= Fraction(math.exp(x)) * (1 + Fraction(1, 10**12)) and hi >= Fraction(math.exp(x)) * (1 - Fraction(1, 10**12))
    assert hi - lo < Fraction(1, 10**15)


@pytest.mark.parametrize(
    "p, e, expected",
    [(2, 1, False), (3, 1, True), (5, 1, True), (3, 2, False), (5, 3, True), (7, 6, False), (11, 6, True)],
)
def test_ramification_guard(p, e, expected):
    assert bounds.guards(SurfaceBoundInputs(p=p, c1sq=1, e=e)).ramification is expected


@pytest.mark.parametrize("e", range(1, 12))
def test_exp_threshold_matches_float(e):
    t = math.exp(e / math.e)
    for p in range(2, 40):
        if abs(p - t) > 1e-9:
            assert bounds.exceeds_exp_e_over_euler(p, e) is (p > t)


# -- the main surface bound ----------------------------------------------------


def test_main_bound_example():
    inp = SurfaceBoundInputs(p=7, c1sq=1, NXk=50)
    res = bounds.main_bound(inp)
    assert res.bound_real == QuadSurd(62, Fraction(24, 5), 7)
    assert res.bound_int == 74
    assert res.extra["simplified_bound"] == 78
    g = bounds.guards(inp)
    assert g.ramification and g.hyp_i is False and g.hyp_ii is None


def test_main_bound_guards_and_inputs():
    with pytest.raises(ValueError, match="c1"):
        SurfaceBoundInputs(p=7, c1sq=0)
    with pytest.raises(MissingInput):
        bounds.main_bound(SurfaceBoundInputs(p=7, c1sq=1))
    with pytest.raises(ValueError, match="ramification"):
        bounds.main_bound(SurfaceBoundInputs(p=2, c1sq=1, NXk=3))
    with pytest.raises(MissingInput):
        bounds.guards(SurfaceBoundInputs(p=7, c1sq=1), need_hyp_ii=True)
    with pytest.raises(ValueError):
        bounds.disk_term(3, 2, 1, 1)


def test_hypothesis_thresholds():
    g = bounds.guards(SurfaceBoundInputs(p=521, c1sq=6))
    assert g.hyp_i is True
    assert bounds.guards(SurfaceBoundInputs(p=509, c1sq=6)).hyp_i is False
    inv = bounds.sym2_invariants(3)
    full = SurfaceBoundInputs(p=1000003, c1sq=inv.c1sq, n=3, degH2X=inv.degH2X, degHKX=inv.degHKX, degHn=inv.degHg)
    assert bounds.guards(full).hyp_ii is True
    assert bounds.hyp_ii_threshold(3, inv.degH2X, inv.degHKX, inv.degHg, inv.c1sq) == 14**3


@pytest.mark.parametrize("p", [7, 11, 13, 101, 521])
def test_simplified_bound_dominates(p):
    res = bounds.main_bound(SurfaceBoundInputs(p=p, c1sq=2, NXk=10))
    assert res.bound_real < res.extra["simplified_bound"]


def test_rh_upper_bound():
    val, ceil = bounds.rh_point_upper(7, 1, 4, 6, 4)
    assert val == QuadSurd(92, 32, 7) and ceil == 177
    # even f: everything is rational
    val, ceil = bounds.rh_point_upper(3, 2, 1, 1, 1)
    assert val == 81 + 27 + 9 + 3 + 1 and ceil == 121
    with pytest.raises(ValueError):
        bounds.rh_point_upper(7, 1, -1, 0, 0)


# -- symmetric squares of curves ----------------------------------------------


def test_sym2_genus3_constants():
    inv = bounds.sym2_invariants(3)
    assert (inv.c1sq, inv.thetaK, inv.degHg, inv.degH2X, inv.degHKX) == (6, 6, 48, 24, 12)
    assert Fraction(128, 9) * inv.c1sq**2 == 512
    assert bounds.GENUS3_THRESHOLD == 521


def test_sym2_genus4_constants():
    inv = bounds.sym2_invariants(4)
    assert (inv.c1sq, inv.thetaK, inv.degHg, inv.degH2X, inv.degHKX, inv.threshold) == (21, 16, 384, 48, 32, 22**4)


@pytest.mark.parametrize("g", range(2, 13))
def test_threshold_simplifies(g):
    inv = bounds.sym2_invariants(g)
    n = g
    raw = Fraction(math.factorial(n) * (3 * inv.degH2X + inv.degHKX) ** n, n**n * inv.degHg)
    assert raw == (8 * g - 10) ** g == inv.threshold


def test_genus_guards():
    with pytest.raises(ValueError):
        bounds.sym2_invariants(1)
    with pytest.raises(ValueError):
        bounds.sym2_bound(2, 10**9 + 7, 0)
    with pytest.raises(ValueError):
        bounds.coleman_bound(1, 7, 0)


def test_genus3_comparison_with_7_1_p():
    term = bounds.disk_term(521, 1, 1, 6)
    assert term == QuadSurd(Fraction(6 * 520 * 524, 519), Fraction(6 * 520 * 4, 519), 521)
    assert term < Fraction(71, 10) * 521
    rep = bounds.genus3_bound(521, 1000)
    assert rep.hypotheses_met and rep.bound_int == 4698
    assert not bounds.genus3_bound(509, 1000).hypotheses_met


def test_four_p_dominates_up_to_ten_thousand():
    primes = [p for p in range(7, 10**4 + 1) if is_prime(p)]
    assert all(bounds.four_p_dominates(p) for p in primes)
    assert not bounds.four_p_dominates(5)


def test_coleman_and_sym2_bounds():
    c = bounds.coleman_bound(3, 7, 5)
    assert c.bound_int == 9 and c.hypotheses_met
    assert not bounds.coleman_bound(4, 7, 5).hypotheses_met
    assert bounds.least_prime_above(Fraction(14**3)) == 2749
    assert bounds.sym2_bound(3, 2749, 100).hypotheses_met
    assert not bounds.sym2_bound(3, 2741, 100).hypotheses_met
