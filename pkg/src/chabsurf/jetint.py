"""Jets into a 2-dimensional chart that are integral for one or two 1-forms.

Arithmetic in the search loop is done on raw field integers (see FiniteField.*_raw)
because the same pullback is recomputed at every node.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import inf
from typing import Iterable, Sequence

from .rings import FFElem, FiniteField
from .series import JetRingForm, PolyOneForm, TruncSeries, jetring_reduce


class JetSearchError(ValueError):
    pass


class OverBoundViolation(AssertionError):
    """A jet order exceeded the overdetermined bound; this would contradict the theory."""


# ---------------------------------------------------------------------------
# jets and raw polynomial arithmetic mod z^(m+1)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JetMap:
    """Map Spec k[z]/(z^(m+1)) -> chart; coords[i] lists the z^0..z^m coefficients of phi_i."""

    m: int
    coords: tuple
    field: FiniteField

    def __post_init__(self):
        for c in self.coords:
            if len(c) != self.m + 1:
                raise JetSearchError(f"coordinate {c} does not have {self.m + 1} coefficients")
            if c[0]:
                raise JetSearchError("jet coordinates must vanish at z = 0")

    @property
    def closed_immersion(self) -> bool:
        return self.m == 0 or any(c[1] for c in self.coords)

    def truncate(self, k: int) -> "JetMap":
        return JetMap(k, tuple(tuple(c[: k + 1]) for c in self.coords), self.field)

    def as_text(self) -> list[str]:
        out = []
        for c in self.coords:
            terms = []
            for d, a in enumerate(c):
                if a:
                    mono = "z" if d == 1 else f"z^{d}"
                    terms.append(mono if a == 1 else f"{a}*{mono}")
            out.append(" + ".join(terms) if terms else "0")
        return out


def _raw(F: FiniteField, c) -> int:
    if isinstance(c, FFElem):
        if c.field.s == 1 or c.field == F:
            if c.field.p != F.p:
                raise JetSearchError("coefficient from a different characteristic")
            return c.value
        raise JetSearchError(f"coefficient {c!r} does not lie in {F!r}")
    if isinstance(c, (int, Fraction)):
        return F(c).value
    raise JetSearchError(f"unsupported coefficient {c!r}")


class _RawPoly:
    """A polynomial in (s1, s2) over a finite field, as raw coefficient ints."""

    def __init__(self, F: FiniteField, s: TruncSeries):
        self.F = F
        self.terms = sorted((a, _raw(F, c)) for a, c in s.coeffs.items())
        self.terms = [(a, c) for a, c in self.terms if c]
        self.const = next((c for a, c in self.terms if a == (0, 0)), 0)


def _pmul(F: FiniteField, a: list[int], b: list[int], n: int) -> list[int]:
    out = [0] * n
    for i, x in enumerate(a[:n]):
        if not x:
            continue
        for j in range(min(len(b), n - i)):
            y = b[j]
            if y:
                out[i + j] = F.add_raw(out[i + j], F.mul_raw(x, y))
    return out


def _padd(F: FiniteField, a: list[int], b: list[int]) -> list[int]:
    return [F.add_raw(x, y) for x, y in zip(a, b)]


def _powers(F: FiniteField, phi: list[int], kmax: int, n: int) -> list[list[int]]:
    one = [1] + [0] * (n - 1)
    out = [one]
    for _ in range(kmax):
        out.append(_pmul(F, out[-1], phi, n))
    return out


def _eval_poly(P: _RawPoly, pw1, pw2, n: int) -> list[int]:
    F = P.F
    acc = [0] * n
    for (i, j), c in P.terms:
        if i >= len(pw1) or j >= len(pw2):
            continue
        mono = _pmul(F, pw1[i], pw2[j], n)
        acc = _padd(F, acc, [F.mul_raw(c, x) for x in mono])
    return acc


def _deriv(F: FiniteField, phi: list[int], n: int) -> list[int]:
    out = [0] * n
    for d in range(1, len(phi)):
        if d - 1 < n and phi[d]:
            out[d - 1] = F.mul_raw(d % F.p, phi[d])
    return out


class _Pullback:
    """g(z) = f1(phi) phi1' + f2(phi) phi2' mod z^n for fixed forms."""

    def __init__(self, F: FiniteField, omega: PolyOneForm):
        self.F = F
        self.f1 = _RawPoly(F, omega.f1)
        self.f2 = _RawPoly(F, omega.f2)
        self.deg = max([sum(a) for a, _ in self.f1.terms + self.f2.terms] or [0])

    def g(self, phi1: list[int], phi2: list[int], n: int) -> list[int]:
        F = self.F
        pw1 = _powers(F, phi1, min(self.deg, n), n)
        pw2 = _powers(F, phi2, min(self.deg, n), n)
        a = _pmul(F, _eval_poly(self.f1, pw1, pw2, n), _deriv(F, phi1, n), n)
        b = _pmul(F, _eval_poly(self.f2, pw1, pw2, n), _deriv(F, phi2, n), n)
        return _padd(F, a, b)


def pullback_form(phi: JetMap, omega: PolyOneForm) -> JetRingForm:
    """phi^*(omega) in the differentials of E_m; phi is omega-integral iff the result is zero."""
    if len(phi.coords) != 2:
        raise JetSearchError("pullbacks are defined on a 2-dimensional chart")
    F = phi.field
    n = phi.m + 1
    g = _Pullback(F, omega).g([_raw(F, c) for c in phi.coords[0]], [_raw(F, c) for c in phi.coords[1]], n)
    return jetring_reduce([FFElem(F, x) for x in g], phi.m, F.p)


def is_integral(phi: JetMap, omega: PolyOneForm) -> bool:
    return pullback_form(phi, omega).is_zero()


def translate_form(omega: PolyOneForm, x: Sequence) -> PolyOneForm:
    """The same form written in coordinates centred at the point x."""
    if not any(x):
        return omega

    def shift(h: TruncSeries) -> TruncSeries:
        s1, s2 = TruncSeries.gens(2, h.T)
        subs = [s1 + TruncSeries.const(x[0], 2, h.T), s2 + TruncSeries.const(x[1], 2, h.T)]
        acc = TruncSeries.zero(2, h.T)
        for (i, j), c in h.coeffs.items():
            acc = acc + (subs[0] ** i * subs[1] ** j).scale(c)
        return acc

    return PolyOneForm(shift(omega.f1), shift(omega.f2))


# ---------------------------------------------------------------------------
# m(x): maximal order of a closed-immersion jet integral for two forms
# ---------------------------------------------------------------------------


@dataclass
class JetSearchResult:
    m: int
    status: str  # "exact", "lower_bound" (hit m_cap) or "inconclusive" (node budget exhausted)
    witness: JetMap | None
    field_size: int
    nodes: int
    m_cap: int
    checks: list[dict] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "m": str(self.m),
            "status": self.status,
            "witness_jet": None if self.witness is None else self.witness.as_text(),
            "field": f"F_{self.field_size}",
            "nodes": str(self.nodes),
            "m_cap": str(self.m_cap),
        }


def max_jet_order(
    omega1: PolyOneForm,
    omega2: PolyOneForm,
    p: int,
    x: Sequence = (0, 0),
    m_cap: int | None = None,
    ext: int = 1,
    node_budget: int = 200_000,
    field_: FiniteField | None = None,
) -> JetSearchResult:
    """Largest m <= m_cap with a closed-immersion jet of order m integral for omega1 and omega2.

    Closed immersions are normalized by reparametrizing the jet: either phi1 = z
    with phi2 free, or phi2 = z with phi1 free of linear term.  The free coordinate
    is extended one coefficient at a time; the new coefficient enters each
    pullback's next condition affinely with slope (d+1) f_free(0), so every node
    has zero, one or all field elements as children.
    """
    if m_cap is None:
        m_cap = max(2 * (p - 2), 1)
    if m_cap < 0:
        raise JetSearchError("m_cap must be >= 0")
    F = field_ or FiniteField(p, ext)
    if F.p != p:
        raise JetSearchError("field characteristic differs from p")
    forms = [translate_form(w, x) for w in (omega1, omega2)]
    pbs = [_Pullback(F, w) for w in forms]
    # f_free(0) per normalization: f2(0) when phi1 = z, f1(0) when phi2 = z
    free_const = {0: [pb.f2.const for pb in pbs], 1: [pb.f1.const for pb in pbs]}
    elements = list(range(F.q))
    best = {"m": 0, "jet": None}
    nodes = 0
    exhausted = False
    n_all = m_cap + 2

    def make_jet(fixed: int, free: list[int], k: int) -> tuple[list[int], list[int]]:
        z = [0, 1] + [0] * (n_all - 2)
        fr = [0] + free[:k] + [0] * (n_all - 1 - k)
        return (z, fr) if fixed == 0 else (fr, z)

    def conditions(fixed: int, free: list[int], k: int) -> list[tuple[int, int]]:
        """(value at c_{k+1} = 0, slope in c_{k+1}) of the z^k coefficient, per form."""
        phi1, phi2 = make_jet(fixed, free, k)
        out = []
        for pb, f_free in zip(pbs, free_const[fixed]):
            g = pb.g(phi1, phi2, k + 1)
            out.append((g[k], F.mul_raw((k + 1) % p, f_free)))
        return out

    def integral_at(fixed: int, free: list[int], k: int) -> bool:
        phi1, phi2 = make_jet(fixed, free, k)
        for pb in pbs:
            g = pb.g(phi1[: k + 1], phi2[: k + 1], k + 1)
            keep = k if (k + 1) % p else k + 1
            if any(g[:keep]):
                return False
        return True

    def dfs(fixed: int, free: list[int]) -> None:
        nonlocal nodes, exhausted
        nodes += 1
        if nodes > node_budget:
            exhausted = True
            return
        k = len(free)
        # an order-k jet with these coefficients
        if k >= 1 and k > best["m"] and integral_at(fixed, free, k):
            phi1, phi2 = make_jet(fixed, free, k)
            best["m"] = k
            best["jet"] = JetMap(k, (tuple(F(c) for c in phi1[: k + 1]), tuple(F(c) for c in phi2[: k + 1])), F)
        if k >= m_cap:
            return
        cand: set[int] | None = None  # None means unconstrained
        for val, slope in conditions(fixed, free, k):
            if slope:
                sol = F.mul_raw(F.neg_raw(val), F.inv_raw(slope))
                cand = {sol} if cand is None else cand & {sol}
            elif val:
                cand = set()
        if fixed == 1 and k == 0:
            cand = {0} if cand is None else cand & {0}
        options = elements if cand is None else sorted(cand)
        for c in options:
            if exhausted:
                return
            dfs(fixed, free + [c])

    for fixed in (0, 1):
        dfs(fixed, [])
        if exhausted:
            break
    status = "inconclusive" if exhausted else ("lower_bound" if best["m"] >= m_cap and m_cap > 0 else "exact")
    checks = []
    if best["jet"] is not None:
        ok = all(is_integral(best["jet"], w) for w in forms) and best["jet"].closed_immersion
        if not ok:
            raise JetSearchError("witness jet failed the independent integrality check")
        checks.append({"name": "witness integrality", "status": "pass", "detail": f"order {best['m']}"})
    return JetSearchResult(best["m"], status, best["jet"], F.q, nodes, m_cap, checks)


# ---------------------------------------------------------------------------
# branch data and the overdetermined bound
# ---------------------------------------------------------------------------


@dataclass
class BranchRecord:
    a: int
    gg: int = 0
    param: tuple[TruncSeries, TruncSeries] | None = None
    ord_w0: int | float | None = None

    def __post_init__(self):
        if self.a < 1:
            raise ValueError("branch multiplicity must be >= 1")
        if self.ord_w0 is not None and self.ord_w0 != inf and self.ord_w0 < 0:
            raise ValueError("order must be >= 0")


@dataclass(frozen=True)
class OrderAtLeast:
    """The pulled-back form vanishes to the full known truncation order."""

    bound: int

    def __str__(self) -> str:
        return f">={self.bound}"


def ord_on_branch(param: Sequence[TruncSeries], omega: PolyOneForm, p: int | None = None):
    """ord_t of f1(phi) phi1' + f2(phi) phi2' along a branch (phi1(t), phi2(t)).

    With ``p`` given, integer coefficients are reduced into F_p first.  Returns an
    int, or OrderAtLeast(T_b - 1) when everything known vanishes.
    """
    phi1, phi2 = param
    if p is not None:
        F = FiniteField(p)
        conv = lambda c: c if isinstance(c, FFElem) else F(c)  # noqa: E731
        phi1, phi2 = phi1.map_coeffs(conv), phi2.map_coeffs(conv)
        omega = omega.map_coeffs(conv)
    T = min(phi1.T, phi2.T)
    if phi1.constant_term() or phi2.constant_term():
        raise ValueError("branch parametrization must vanish at t = 0")
    f1 = omega.f1.compose([phi1.truncate(T), phi2.truncate(T)])
    f2 = omega.f2.compose([phi1.truncate(T), phi2.truncate(T)])
    g = f1 * phi1.derivative(0) + f2 * phi2.derivative(0)
    o = g.order()
    return OrderAtLeast(g.T) if o is None else o


def overdetermined_bound(branches: Iterable, m_found: int | None = None) -> int:
    """sum over branches of a * (ord(omega0 pulled back) + 1); branches may be nested per preimage point."""
    flat: list[BranchRecord] = []
    for b in branches:
        if isinstance(b, BranchRecord):
            flat.append(b)
        else:
            flat.extend(b)
    total = 0
    for k, b in enumerate(flat):
        if b.ord_w0 is None:
            raise ValueError(f"branch {k} has no order for the reference form")
        if b.ord_w0 == inf or isinstance(b.ord_w0, OrderAtLeast):
            raise ValueError(
                f"branch {k} is integral for the reference form: choose omega0 so that no branch is omega0-integral"
            )
        total += b.a * (b.ord_w0 + 1)
    if m_found is not None and m_found > total:
        raise OverBoundViolation(f"jet order {m_found} exceeds the bound {total}")
    return total


def jet_order_in_subvariety(phi: JetMap, eq_indices: Sequence[int]) -> int:
    """Largest k <= phi.m such that phi mod z^(k+1) lies in {t_j = 0 : j in eq_indices} (1-based)."""
    k = phi.m
    for j in eq_indices:
        c = phi.coords[j - 1]
        first = next((d for d in range(1, phi.m + 1) if c[d]), None)
        if first is not None:
            k = min(k, first - 1)
    return k
