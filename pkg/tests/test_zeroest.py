import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from chabsurf import zeroest
from chabsurf.rings import valuation
from chabsurf.series import TruncSeries, parse_series
from chabsurf.zeroest import HypothesisViolation, TailGuard, ZeroPrecisionError

POLY = TailGuard.polynomial()


def poly(cs, T=None):
    return TruncSeries.from_univariate(cs, T)


def expand(roots, lead=1):
    cs = [lead]
    for r in roots:
        out = [0] * (len(cs) + 1)
        for i, c in enumerate(cs):
            out[i + 1] += c
            out[i] -= r * c
        cs = out
    return cs


@pytest.mark.parametrize("p", [3, 5, 7])
def test_worked_examples(p):
    assert zeroest.zero_bound_1var(poly([-p, 0, 1]), p, 1, POLY) == 0
    assert zeroest.zero_bound_1var(poly([0, -p, 1]), p, 1, POLY) == 2
    assert zeroest.roots_in_pZp_with_multiplicity([0, -p, 1], p) == 2
    assert zeroest.zero_bound_1var(poly([4]), p, 1, POLY) == 0


def test_errors():
    with pytest.raises(ZeroPrecisionError):
        zeroest.radius_norm(TruncSeries.zero(1, 4), 5, 1, POLY)
    with pytest.raises(ValueError):
        zeroest.radius_norm(poly([1, 1]), 5, 1, None)
    with pytest.raises(HypothesisViolation):
        zeroest.radius_norm(poly([1, 1]), 5, 1, TailGuard.factorial(2))


def test_factorial_tail_guard():
    # exp(z) - 1 with M = p^(1/(p-1)): the tail beyond T stays below |h|_r for r = 1/p
    from math import factorial

    p, T = 5, 20
    h = poly([0] + [Fraction(1, factorial(m)) for m in range(1, T + 1)])
    rn = zeroest.radius_norm(h, p, 1, TailGuard.factorial(Fraction(1, p - 1)))
    assert rn.nu == 1
    # p z + z^2/2 known only to order 2: at r = p^(-1/3) with M = p^(1/4) the tail
    # estimate p^(-1/2) is not below |h|_r = p^(-2/3)
    short = poly([0, p, Fraction(1, 2)])
    with pytest.raises(HypothesisViolation, match="truncation order"):
        zeroest.radius_norm(short, p, Fraction(1, 3), TailGuard.factorial(Fraction(1, 4)))


def test_random_oracle_200_polynomials():
    rng = random.Random(1729)
    checked = 0
    while checked < 240:
        p = rng.choice((5, 7, 11))
        deg = rng.randint(1, 6)
        # bias towards p-divisible low coefficients so roots in pZ_p actually occur
        cs = [rng.randint(-40, 40) * (p ** rng.randint(0, 2)) for _ in range(deg + 1)]
        if cs[-1] == 0:
            cs[-1] = 1
        roots = zeroest.roots_in_pZp_with_multiplicity(cs, p)
        assert roots <= zeroest.zero_bound_1var(poly(cs), p, 1, POLY), (cs, p)
        checked += 1


@settings(max_examples=150, deadline=None)
@given(
    st.sampled_from([5, 7, 11]),
    st.lists(st.integers(-30, 30), min_size=1, max_size=6),
    st.integers(1, 4),
)
def test_known_roots(p, roots, lead):
    cs = expand(roots, lead)
    inside = sum(1 for r in roots if r % p == 0)
    assert zeroest.roots_in_pZp_with_multiplicity(cs, p) == inside
    if len(set(roots)) == len(roots):
        assert zeroest.count_roots_in_disk(cs, p) == inside
    assert inside <= zeroest.zero_bound_1var(poly(cs), p, 1, POLY)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([3, 5, 7]), st.lists(st.integers(-50, 50), min_size=2, max_size=7).filter(any))
def test_nu_monotone_in_radius(p, cs):
    h = poly(cs)
    nus = [zeroest.zero_bound_1var(h, p, k, POLY) for k in (4, 3, 2, 1)]
    assert nus == sorted(nus)


@pytest.mark.parametrize("N", [1, 2, 3, 5, 8])
@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_disk_formula_identity(N, p):
    lam = Fraction(1, p - 1)
    assert zeroest.disk_formula(N, lam) == 1 + (N - 1) / (1 - lam)


def test_disk_formula_examples():
    assert zeroest.disk_formula(3, Fraction(1, 6)) == Fraction(17, 5)
    assert zeroest.disk_formula(1, Fraction(1, 6)) == 1
    assert 1 + 2 * (1 / (1 - Fraction(1, 6))) == Fraction(17, 5)


def test_mv_zero_bound():
    H = parse_series("x1 + x2^2", nvars=2, T=6)
    rep = zeroest.mv_zero_bound(H, [1, 0], 7, 1, Fraction(1, 6), 1)
    assert rep.bound_real == 1 and rep.lam == Fraction(1, 6)
    rep3 = zeroest.mv_zero_bound(parse_series("7*x1 + x2^3", nvars=2, T=6), [0, 1], 7, 3, Fraction(1, 6), 1)
    assert (rep3.bound_real, rep3.bound_floor) == (Fraction(17, 5), 3)


def test_mv_hypothesis_violations():
    with pytest.raises(HypothesisViolation, match="alpha=\\[2, 0\\]"):
        zeroest.mv_zero_bound(parse_series("x1 + 1/7*x1^2", nvars=2, T=6), [1, 0], 7, 1, 0, 1)
    with pytest.raises(HypothesisViolation, match="j <= 1"):
        zeroest.mv_zero_bound(parse_series("7*x1 + x2^2", nvars=2, T=6), [1, 0], 7, 1, 0, 1)
    with pytest.raises(HypothesisViolation):
        zeroest.mv_zero_bound(parse_series("x1", nvars=2, T=6), [7, 0], 7, 1, 0, 1)


def test_real_radius_fallback_is_safe():
    lo, hi = zeroest.lambda_interval(7 ** (1 / 6), 1 / 7)
    assert lo <= 1 / 6 <= hi and hi - lo < 1e-12
    b, fl = zeroest.mv_zero_bound_real(3, 7 ** (1 / 6), 1 / 7)
    assert b >= 17 / 5 and fl >= 3


def test_valuation_helper_consistency():
    assert valuation(Fraction(25, 3), 5) == 2
