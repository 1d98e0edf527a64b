import itertools
import random
from math import inf

import pytest
from hypothesis import given, settings, strategies as st

from chabsurf import fgroup, jetint
from chabsurf.jetint import BranchRecord, JetMap, OrderAtLeast, OverBoundViolation
from chabsurf.presets import product_elliptic, random_form_pair, random_poly2, sharp_forms
from chabsurf.rings import FiniteField, LocalFieldParams
from chabsurf.series import PolyOneForm, TruncSeries

W1 = PolyOneForm.parse("ds1 + s1^2*ds2")
W2 = PolyOneForm.parse("ds1 + s2^2*ds2")


def jet(p, phi1, phi2):
    F = FiniteField(p)
    return JetMap(len(phi1) - 1, (tuple(F(c) for c in phi1), tuple(F(c) for c in phi2)), F)


def test_pullback_examples():
    assert not jetint.is_integral(jet(5, [0, 1, 0], [0, 0, 0]), W1)
    assert jetint.pullback_form(jet(5, [0, 1, 0], [0, 0, 0]), W1).coeffs == (1,)
    assert jetint.is_integral(jet(5, [0, 1, 0], [0, 0, 0]), PolyOneForm.parse("s2*ds1 + s1^3*ds2"))


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_sharp_example(p):
    res = jetint.max_jet_order(W1, W2, p)
    assert (res.m, res.status) == (2, "exact")
    # the witness is the integral jet (s1, s2) = (0, z)
    assert res.witness.as_text() == ["0", "z"]
    assert jetint.overdetermined_bound(sharp_forms().branch_records(p)) == 2


@pytest.mark.parametrize("p", [5, 7])
def test_sharp_example_over_quadratic_extension(p):
    assert jetint.max_jet_order(W1, W2, p, ext=2).m == 2


def test_sharp_example_jet_is_integral_for_both_forms():
    phi = jet(7, [0, 0, 0], [0, 1, 0])
    assert jetint.is_integral(phi, W1) and jetint.is_integral(phi, W2)
    # (z, 0) pulls omega1 back to dz, which survives in the jet ring
    assert not jetint.is_integral(jet(7, [0, 1, 0], [0, 0, 0]), W1)


def test_trivial_wedge_gives_zero():
    d1, d2 = PolyOneForm.parse("ds1"), PolyOneForm.parse("ds2")
    for p in (5, 7):
        assert jetint.max_jet_order(d1, d2, p).m == 0
        assert jetint.max_jet_order(d1, d2, p, x=(1, 3)).m == 0


@pytest.mark.parametrize("p", [5, 7])
def test_off_divisor_point_of_sharp_example(p):
    # (1, 2) is off s2^2 = s1^2 in every characteristic > 3
    assert jetint.max_jet_order(W1, W2, p, x=(1, 2)).m == 0


def test_unit_wedge_pairs_have_no_jets():
    rng = random.Random(2024)
    for _ in range(50):
        p = rng.choice((5, 7, 11, 13))
        w1, w2 = random_form_pair(rng, p)
        assert jetint.max_jet_order(w1, w2, p, m_cap=6).m == 0


def _line_instance(rng, p):
    """omega1 = ds1 + A ds2, omega2 = ds1 + (A + prod (s2 - l s1)^a) ds2: the wedge is the product."""
    T = 16
    s1, s2 = TruncSeries.gens(2, T)
    k = rng.randint(1, 3)
    lams = rng.sample(range(p), k)
    mults = [rng.choice((1, 1, 2)) for _ in lams]
    prod = TruncSeries.const(1, 2, T)
    for lam, a in zip(lams, mults):
        prod = prod * (s2 - s1.scale(lam)) ** a
    A = random_poly2(rng, 2, T, -3, 3)
    one = TruncSeries.const(1, 2, T)
    w1, w2 = PolyOneForm(one, A), PolyOneForm(one, A + prod)
    t = TruncSeries.var(0, 1, T)
    recs = []
    for lam, a in zip(lams, mults):
        br = (t, t.scale(lam))
        o = jetint.ord_on_branch(br, w1, p=p)
        recs.append(BranchRecord(a=a, param=br, ord_w0=o if isinstance(o, int) else inf))
    return w1, w2, recs


def test_overdetermined_bound_randomized():
    rng = random.Random(11)
    tested = 0
    while tested < 60:
        p = rng.choice((5, 7))
        w1, w2, recs = _line_instance(rng, p)
        if any(r.ord_w0 == inf for r in recs):
            continue
        b = jetint.overdetermined_bound(recs)
        res = jetint.max_jet_order(w1, w2, p, m_cap=min(2 * (p - 2), b + 2), node_budget=50_000)
        assert res.status != "inconclusive"
        assert res.m <= b
        jetint.overdetermined_bound(recs, m_found=res.m)
        tested += 1


def test_overdetermined_bound_arithmetic():
    assert jetint.overdetermined_bound([]) == 0
    assert jetint.overdetermined_bound([BranchRecord(3, 0, None, 1)]) == 6
    assert jetint.overdetermined_bound([[BranchRecord(1, 0, None, 0)], [BranchRecord(1, 0, None, 0)]]) == 2
    with pytest.raises(ValueError, match="integral for the reference form"):
        jetint.overdetermined_bound([BranchRecord(1, 0, None, inf)])
    with pytest.raises(OverBoundViolation):
        jetint.overdetermined_bound([BranchRecord(1, 0, None, 0)], m_found=2)


def test_ord_on_branch_examples():
    t = TruncSeries.var(0, 1, 12)
    assert jetint.ord_on_branch((t, t), W1, p=7) == 0
    assert jetint.ord_on_branch((t**2, t**3), PolyOneForm.parse("s1*ds1"), p=7) == 3
    assert isinstance(jetint.ord_on_branch((t, TruncSeries.zero(1, 12)), PolyOneForm.parse("s2*ds1"), p=7), OrderAtLeast)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([5, 7]), st.integers(0, 10**6), st.integers(0, 6), st.integers(0, 6))
def test_integral_for_both_implies_integral_for_combinations(p, seed, c1, c2):
    rng = random.Random(seed)
    w1 = PolyOneForm(random_poly2(rng, 2), random_poly2(rng, 2))
    w2 = PolyOneForm(random_poly2(rng, 2), random_poly2(rng, 2))
    res = jetint.max_jet_order(w1, w2, p, m_cap=4, node_budget=5000)
    if res.witness is None:
        return
    combo = w1.scale(c1) + w2.scale(c2)
    assert jetint.is_integral(res.witness, combo)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([5, 7]), st.integers(0, 10**6))
def test_pullback_is_linear_in_the_form(p, seed):
    rng = random.Random(seed)
    F = FiniteField(p)
    m = rng.randint(1, 4)
    phi = JetMap(m, tuple(tuple([F(0)] + [F(rng.randrange(p)) for _ in range(m)]) for _ in range(2)), F)
    w1 = PolyOneForm(random_poly2(rng, 2), random_poly2(rng, 2))
    w2 = PolyOneForm(random_poly2(rng, 2), random_poly2(rng, 2))
    g1 = jetint.pullback_form(phi, w1).coeffs
    g2 = jetint.pullback_form(phi, w2).coeffs
    g = jetint.pullback_form(phi, w1 + w2).coeffs
    n = max(len(g1), len(g2), len(g))
    pad = lambda c: list(c) + [0] * (n - len(c))  # noqa: E731
    assert [a + b for a, b in zip(pad(g1), pad(g2))] == pad(g)


@pytest.mark.parametrize("p", [7, 11])
def test_cross_module_link(p):
    G = product_elliptic(p, 6)
    gamma, _ = fgroup.OneParamSubgroup.normalized(G, [1, 2, 1])
    phi = fgroup.reduce_jet_mod_p(gamma, min(p - 1, 6))
    m = jetint.jet_order_in_subvariety(phi, [3])
    rep = fgroup.disk_bound(G, [1, 2, 1], [3], LocalFieldParams(p), jet_link=m)
    assert (m, rep.N) == (0, 1) and rep.N <= m + 1


def test_jet_containment_order():
    phi = jet(5, [0, 1, 2, 0], [0, 0, 0, 3])
    assert jetint.jet_order_in_subvariety(phi, [2]) == 2
    assert jetint.jet_order_in_subvariety(phi, [1]) == 0
    assert phi.closed_immersion and not jet(5, [0, 0, 1], [0, 0, 0]).closed_immersion


def _brute_force_m(w1, w2, p, m_max):
    """Largest m <= m_max with some closed-immersion jet over F_p integral for both forms."""
    best = 0
    for m in range(1, m_max + 1):
        found = False
        for cs in itertools.product(range(p), repeat=2 * m):
            phi1, phi2 = [0, *cs[:m]], [0, *cs[m:]]
            if not (phi1[1] or phi2[1]):
                continue
            phi = jet(p, phi1, phi2)
            if jetint.is_integral(phi, w1) and jetint.is_integral(phi, w2):
                found = True
                break
        if not found:
            break
        best = m
    return best


def test_search_agrees_with_brute_force():
    rng = random.Random(99)
    for _ in range(12):
        p = 5
        w1, w2, _ = _line_instance(rng, p)
        assert jetint.max_jet_order(w1, w2, p, m_cap=3).m == _brute_force_m(w1, w2, p, 3)
    assert _brute_force_m(W1, W2, 5, 3) == 2
