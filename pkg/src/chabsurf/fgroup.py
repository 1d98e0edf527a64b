"""Commutative formal group laws with exact rational coefficients.

A law of dimension n is stored as n truncated series in 2n variables, the first n
being x and the last n being y.  Coefficients are ints or Fractions whose
denominators are prime to p (p-integral); p-adic views are produced on demand.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial, floor
from typing import Sequence

from .rings import FiniteField, LocalFieldParams, PadicNum, valuation
from .series import TruncSeries, compose
from .zeroest import disk_formula


class FormalGroupError(ValueError):
    """Bad construction input (non-integral coefficients, bad reduction, ...)."""


class ConsistencyError(AssertionError):
    """An identity that must hold exactly failed; never swallowed."""


def _canon(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c)
    return c


def _canon_series(s: TruncSeries) -> TruncSeries:
    return TruncSeries(s.nvars, s.T, {a: _canon(c) for a, c in s.coeffs.items()})


def _is_p_integral(c, p: int) -> bool:
    return valuation(c, p) >= 0


# ---------------------------------------------------------------------------
# the law itself
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class FormalGroupLaw:
    n: int
    T: int
    F: list[TruncSeries]
    p: int
    prec: int | None = None
    name: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.F) != self.n:
            raise FormalGroupError(f"expected {self.n} series, got {len(self.F)}")
        for j, s in enumerate(self.F):
            if s.nvars != 2 * self.n:
                raise FormalGroupError(f"series {j} is not in {2 * self.n} variables")
            for a, c in s.coeffs.items():
                if not _is_p_integral(c, self.p):
                    raise FormalGroupError(f"coefficient {c} at {list(a)} of F_{j + 1} is not {self.p}-integral")
        if self.prec is None:
            self.prec = self.T + 4
        self._lock = threading.Lock()
        self._psi: list[list[TruncSeries]] = []
        self._exp = None
        self._log = None

    def __repr__(self) -> str:
        return f"FormalGroupLaw({self.name or 'custom'}, n={self.n}, T={self.T}, p={self.p})"

    # -- axioms ---------------------------------------------------------------------

    def _xy(self, T: int):
        gens = TruncSeries.gens(3 * self.n, T)
        n = self.n
        return gens[:n], gens[n : 2 * n], gens[2 * n :]

    def check_axioms(self, T: int | None = None) -> dict[str, bool]:
        """Identity, commutativity and associativity, exactly to order T."""
        T = self.T if T is None else min(T, self.T)
        n = self.n
        x, y, z = self._xy(T)
        zero = [TruncSeries.zero(3 * n, T)] * n
        F = [f.truncate(T) for f in self.F]
        left_id = all(compose(F[j], x + zero) == x[j] for j in range(n))
        right_id = all(compose(F[j], zero + y) == y[j] for j in range(n))
        comm = all(compose(F[j], x + y) == compose(F[j], y + x) for j in range(n))
        xy = [compose(f, x + y) for f in F]
        yz = [compose(f, y + z) for f in F]
        assoc = all(compose(F[j], xy + z) == compose(F[j], x + yz) for j in range(n))
        return {"identity": left_id and right_id, "commutativity": comm, "associativity": assoc}

    def coefficients_padic(self, prec: int | None = None) -> list[TruncSeries]:
        prec = self.prec if prec is None else prec
        return [f.map_coeffs(lambda c: PadicNum.from_rational(c, self.p, prec)) for f in self.F]

    # -- multiplication by m ------------------------------------------------------------

    def _ensure_psi(self, m: int) -> None:
        with self._lock:
            if not self._psi:
                self._psi.append([TruncSeries.zero(self.n, self.T) for _ in range(self.n)])
            t = TruncSeries.gens(self.n, self.T)
            while len(self._psi) <= m:
                prev = self._psi[-1]
                self._psi.append([_canon_series(compose(f, prev + t)) for f in self.F])

    def mult_by_m(self, m: int) -> list[TruncSeries]:
        """Psi^[m] = F(Psi^[m-1], t), with Psi^[0] = 0."""
        if m < 0:
            raise ValueError("m must be >= 0")
        self._ensure_psi(m)
        return list(self._psi[m])

    def iterated_difference(self, m: int) -> list[TruncSeries]:
        """Delta^[m] = sum_i (-1)^(m-i) C(m, i) Psi^[i]; all terms of degree < m vanish (asserted)."""
        if m < 1:
            raise ValueError("m must be >= 1")
        self._ensure_psi(m)
        out = []
        for j in range(self.n):
            acc = TruncSeries.zero(self.n, self.T)
            for i in range(m + 1):
                acc = acc + self._psi[i][j].scale((-1) ** (m - i) * comb(m, i))
            low = acc.order()
            if low is not None and low < min(m, self.T + 1):
                raise ConsistencyError(f"Delta^[{m}]_{j + 1} has a nonzero term of degree {low} < {m}")
            out.append(acc)
        return out

    # -- Exp and Log --------------------------------------------------------------------

    def exp(self) -> list[TruncSeries]:
        """Exp_j = sum_m (degree-m part of Delta^[m]_j) / m!."""
        if self._exp is None:
            parts = [TruncSeries.zero(self.n, self.T) for _ in range(self.n)]
            for m in range(1, self.T + 1):
                d = self.iterated_difference(m)
                for j in range(self.n):
                    parts[j] = parts[j] + d[j].homogeneous_part(m).scale(Fraction(1, factorial(m)))
            self._exp = [_canon_series(s) for s in parts]
        return list(self._exp)

    def log(self) -> list[TruncSeries]:
        """Log_j = sum_m (-1)^(m+1)/m * Delta^[m]_j."""
        if self._log is None:
            parts = [TruncSeries.zero(self.n, self.T) for _ in range(self.n)]
            for m in range(1, self.T + 1):
                d = self.iterated_difference(m)
                for j in range(self.n):
                    parts[j] = parts[j] + d[j].scale(Fraction((-1) ** (m + 1), m))
            self._log = [_canon_series(s) for s in parts]
        return list(self._log)

    def verify_exp_log(self, homomorphism: bool = True, T: int | None = None) -> dict[str, bool]:
        """Round trips, linear parts and (optionally) Log(F(x,y)) = Log(x) + Log(y); raises on failure."""
        T = self.T if T is None else min(T, self.T)
        E = [s.truncate(T) for s in self.exp()]
        L = [s.truncate(T) for s in self.log()]
        t = TruncSeries.gens(self.n, T)
        res = {
            "exp_linear_part": all(E[j].homogeneous_part(1) == t[j] for j in range(self.n)),
            "exp_log_identity": all(compose(E[j], L) == t[j] for j in range(self.n)),
            "log_exp_identity": all(compose(L[j], E) == t[j] for j in range(self.n)),
        }
        if homomorphism:
            n = self.n
            g = TruncSeries.gens(2 * n, T)
            x, y = g[:n], g[n:]
            F = [f.truncate(T) for f in self.F]
            ok = True
            for j in range(n):
                lhs = compose(L[j], F)
                rhs = compose(L[j], x) + compose(L[j], y)
                ok = ok and lhs == rhs
            res["log_homomorphism"] = ok
        bad = [k for k, v in res.items() if not v]
        if bad:
            raise ConsistencyError(f"Exp/Log identities fail to order {T}: {', '.join(bad)}")
        return res

    def check_growth(self, p: int | None = None) -> dict[str, bool]:
        """m! * (degree-m Exp coefficient) is p-integral; |degree-m Log coefficient| <= m."""
        p = self.p if p is None else p
        exp_ok = all(
            _is_p_integral(c * factorial(sum(a)), p) for s in self.exp() for a, c in s.coeffs.items()
        )
        log_ok = True
        for s in self.log():
            for a, c in s.coeffs.items():
                v = valuation(c, p)
                if v < 0 and p ** (-v) > sum(a):
                    log_ok = False
        return {"exp_integrality": exp_ok, "log_growth": log_ok}


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------


def additive(n: int = 1, p: int = 5, T: int = 10, prec: int | None = None) -> FormalGroupLaw:
    g = TruncSeries.gens(2 * n, T)
    return FormalGroupLaw(n, T, [g[j] + g[n + j] for j in range(n)], p, prec, name=f"additive({n})")


def multiplicative(p: int = 5, T: int = 10, prec: int | None = None) -> FormalGroupLaw:
    x, y = TruncSeries.gens(2, T)
    return FormalGroupLaw(1, T, [x + y + x * y], p, prec, name="multiplicative")


def weierstrass_discriminant(a1, a2, a3, a4, a6):
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6


def weierstrass_w(a: Sequence, T: int) -> TruncSeries:
    """w(z) with w = z^3 + a1 z w + a2 z^2 w + a3 w^2 + a4 z w^2 + a6 w^3, to degree T."""
    a1, a2, a3, a4, a6 = a
    z = TruncSeries.var(0, 1, T)
    w = TruncSeries.zero(1, T)
    # each pass fixes at least one more coefficient; w starts in degree 3
    for _ in range(T):
        new = z**3 + (z * w).scale(a1) + (z * z * w).scale(a2) + (w * w).scale(a3)
        new = new + (z * w * w).scale(a4) + (w * w * w).scale(a6)
        new = _canon_series(new)
        if new == w:
            break
        w = new
    return w


def elliptic(a: Sequence, p: int = 5, T: int = 10, prec: int | None = None) -> FormalGroupLaw:
    """Formal group of y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 in z = -x/y, via the chord law."""
    a = tuple(Fraction(c) for c in a)
    if len(a) != 5:
        raise FormalGroupError("need five coefficients a1, a2, a3, a4, a6")
    for name, c in zip(("a1", "a2", "a3", "a4", "a6"), a):
        if not _is_p_integral(c, p):
            raise FormalGroupError(f"{name} = {c} is not {p}-integral")
    disc = weierstrass_discriminant(*a)
    if disc == 0 or valuation(disc, p) > 0:
        raise FormalGroupError(f"bad reduction at {p}: discriminant {disc}")
    a1, a2, a3, a4, a6 = (_canon(c) for c in a)
    w = weierstrass_w((a1, a2, a3, a4, a6), T + 2)
    A = {j: c for (j,), c in w.coeffs.items()}
    z1, z2 = TruncSeries.gens(2, T)
    # slope of the chord through (z1, w(z1)) and (z2, w(z2))
    lam = TruncSeries.zero(2, T)
    for nn, c in A.items():
        if nn - 1 > T:
            continue
        lam = lam + TruncSeries(2, T, {(i, nn - 1 - i): c for i in range(nn)})
    w1 = compose(w.truncate(T), [z1])
    nu = w1 - lam * z1
    # substituting w = lam z + nu into the curve gives a cubic in z; z3 is its third root
    num = lam.scale(a1) + nu.scale(a2) + (lam * lam).scale(a3) + (lam * nu).scale(2 * a4) + (lam * lam * nu).scale(3 * a6)
    den = TruncSeries.const(1, 2, T) + lam.scale(a2) + (lam * lam).scale(a4) + (lam**3).scale(a6)
    z3 = _canon_series(-z1 - z2 - num * den.inverse())
    # inverse: i(z) = z / (a1 z + a3 w(z) - 1)
    zz = TruncSeries.var(0, 1, T)
    inv = zz * (zz.scale(a1) + w.truncate(T).scale(a3) - TruncSeries.const(1, 1, T)).inverse()
    Fz = _canon_series(compose(inv, [z3]))
    return FormalGroupLaw(
        1,
        T,
        [Fz],
        p,
        prec,
        name=f"elliptic({','.join(str(c) for c in (a1, a2, a3, a4, a6))})",
        meta={"a": [str(c) for c in (a1, a2, a3, a4, a6)], "discriminant": str(disc)},
    )


def product(*laws: FormalGroupLaw) -> FormalGroupLaw:
    """Coordinate-wise product law on the concatenated chart."""
    if not laws:
        raise FormalGroupError("empty product")
    p, T = laws[0].p, min(G.T for G in laws)
    if any(G.p != p for G in laws):
        raise FormalGroupError("factors over different primes")
    n = sum(G.n for G in laws)
    F, off = [], 0
    for G in laws:
        pos = [off + i for i in range(G.n)] + [n + off + i for i in range(G.n)]
        F.extend(f.truncate(T).extend_vars(2 * n, pos) for f in G.F)
        off += G.n
    return FormalGroupLaw(n, T, F, p, min(G.prec for G in laws), name=" x ".join(G.name for G in laws))


def _mat_inverse(A: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(A)
    M = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c]), None)
        if piv is None:
            raise FormalGroupError("singular change of coordinates")
        M[c], M[piv] = M[piv], M[c]
        inv = 1 / M[c][c]
        M[c] = [x * inv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c]:
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return [row[n:] for row in M]


def twist(G: FormalGroupLaw, A: Sequence[Sequence[int]]) -> FormalGroupLaw:
    """The isomorphic law A F(A^-1 x, A^-1 y) for A in GL_n(Z_p)."""
    n = G.n
    A = [[Fraction(x) for x in row] for row in A]
    Ainv = _mat_inverse(A)
    for row in Ainv:
        for c in row:
            if not _is_p_integral(c, G.p):
                raise FormalGroupError(f"matrix is not invertible over Z_{G.p}")
    g = TruncSeries.gens(2 * n, G.T)
    x, y = g[:n], g[n:]

    def lin(M, v):
        out = []
        for row in M:
            acc = TruncSeries.zero(2 * n, G.T)
            for c, s in zip(row, v):
                if c:
                    acc = acc + s.scale(c)
            out.append(acc)
        return out

    subs = lin(Ainv, x) + lin(Ainv, y)
    FF = [compose(f, subs) for f in G.F]
    F = [_canon_series(s) for s in lin(A, FF)]
    return FormalGroupLaw(n, G.T, F, G.p, G.prec, name=f"twist({G.name})")


def construct(kind: str, p: int, T: int = 10, prec: int | None = None, a: Sequence | None = None, n: int = 1) -> FormalGroupLaw:
    if kind == "additive":
        return additive(n, p, T, prec)
    if kind == "multiplicative":
        return multiplicative(p, T, prec)
    if kind == "elliptic":
        if a is None:
            raise FormalGroupError("elliptic law needs coefficients a1..a6")
        return elliptic(a, p, T, prec)
    raise FormalGroupError(f"unknown kind {kind!r}")


# ---------------------------------------------------------------------------
# independent logarithm oracles (one-dimensional laws)
# ---------------------------------------------------------------------------


def _integrate(s: TruncSeries, T: int) -> TruncSeries:
    return _canon_series(TruncSeries(1, T, {(k + 1,): Fraction(c) / (k + 1) for (k,), c in s.coeffs.items() if k + 1 <= T}))


def log_from_invariant_differential(G: FormalGroupLaw) -> TruncSeries:
    """Integral of F_x(0, t)^-1 dt for a one-dimensional law."""
    if G.n != 1:
        raise ValueError("one-dimensional law expected")
    Fx = G.F[0].derivative(0)
    t = TruncSeries.var(0, 1, Fx.T)
    restricted = compose(Fx, [TruncSeries.zero(1, Fx.T), t])
    return _integrate(restricted.inverse(), G.T)


def elliptic_log_from_curve(a: Sequence, T: int) -> TruncSeries:
    """Log from omega = dx / (2y + a1 x + a3) written in z = -x/y, w = -1/y."""
    a1, a2, a3, a4, a6 = (_canon(Fraction(c)) for c in a)
    w = weierstrass_w((a1, a2, a3, a4, a6), T + 3)
    z = TruncSeries.var(0, 1, T + 3)
    num = w - z * w.derivative(0).truncate(T + 3)
    den = w * (TruncSeries.const(-2, 1, T + 3) + z.scale(a1) + w.scale(a3))
    # both start in degree 3: divide by z^3 before inverting

    def shift(s: TruncSeries) -> TruncSeries:
        return TruncSeries(1, T, {(k - 3,): c for (k,), c in s.coeffs.items() if 3 <= k <= T + 3})

    omega = shift(num) * shift(den).inverse()
    return _integrate(omega.truncate(T - 1), T)


# ---------------------------------------------------------------------------
# one-parameter subgroups and the residue-disk bound
# ---------------------------------------------------------------------------


def normalize_direction(u: Sequence, p: int) -> tuple[list[Fraction], int]:
    """Rescale u by p^k so that max |u_j| = 1; returns (u', k)."""
    u = [Fraction(x) for x in u]
    vs = [valuation(x, p) for x in u if x]
    if not vs:
        raise ValueError("direction is zero")
    k = -min(vs)
    return [_canon(x * Fraction(p) ** k) for x in u], k


@dataclass
class OneParamSubgroup:
    G: FormalGroupLaw
    u: list

    def __post_init__(self):
        if len(self.u) != self.G.n:
            raise ValueError(f"direction has {len(self.u)} entries, law has dimension {self.G.n}")
        vals = [valuation(x, self.G.p) for x in self.u]
        if min(vals) != 0:
            raise ValueError("direction must satisfy |u| = 1 (rescale with normalize_direction)")

    @classmethod
    def normalized(cls, G: FormalGroupLaw, u: Sequence) -> tuple["OneParamSubgroup", int]:
        v, k = normalize_direction(u, G.p)
        return cls(G, v), k

    def series(self) -> list[TruncSeries]:
        """h_j(z) = Exp_j(z u) = sum_h P_{j,h}(u) z^h."""
        return [_canon_series(e.restrict_to_line(self.u)) for e in self.G.exp()]


def eval_1ps(gamma: OneParamSubgroup) -> list[TruncSeries]:
    return gamma.series()


def equiv(u: Sequence, u2: Sequence, p: int) -> bool:
    """True iff u2 = eta u for a p-adic unit eta (both of norm 1)."""
    u, u2 = [Fraction(x) for x in u], [Fraction(x) for x in u2]
    if len(u) != len(u2):
        return False
    if min(valuation(x, p) for x in u) != 0 or min(valuation(x, p) for x in u2) != 0:
        raise ValueError("directions must have norm 1")
    i = next(k for k, x in enumerate(u) if valuation(x, p) == 0)
    eta = u2[i] / u[i]
    if valuation(eta, p) != 0:
        return False
    return all(b == eta * a for a, b in zip(u, u2))


@dataclass
class DiskBoundReport:
    status: str  # "ok" or "inconclusive"
    N: int | None
    j0: int | None
    lam: Fraction
    bound_real: Fraction | None
    bound_floor: int | None
    jet_order: int | None = None
    jet_bound: Fraction | None = None
    scaling: int = 0
    searched_up_to: int = 0
    checks: list[dict] = field(default_factory=list)

    def as_dict(self) -> dict:
        s = lambda x: None if x is None else str(x)  # noqa: E731
        return {
            "status": self.status,
            "N": s(self.N),
            "j0": s(self.j0),
            "lambda": str(self.lam),
            "bound_real": s(self.bound_real),
            "bound_floor": s(self.bound_floor),
            "jet_order": s(self.jet_order),
            "jet_bound": s(self.jet_bound),
            "direction_scaling": str(self.scaling),
            "searched_up_to": str(self.searched_up_to),
        }


def disk_bound(
    G: FormalGroupLaw,
    u: Sequence,
    eq_indices: Sequence[int],
    params: LocalFieldParams,
    jet_link: int | None = None,
) -> DiskBoundReport:
    """Minimal N with a unit coefficient P_{j0,N}(u) among the local equations, and (N - lam)/(1 - lam).

    ``eq_indices`` are 1-based coordinate indices.  u is rescaled to norm 1 first.
    """
    if not eq_indices:
        raise ValueError("eq_indices must be nonempty")
    if any(not 1 <= j <= G.n for j in eq_indices):
        raise ValueError(f"eq_indices must lie in 1..{G.n}")
    if params.p != G.p:
        raise ValueError("local field parameters and law use different primes")
    lam = params.lam
    if lam >= 1:
        raise ValueError(f"lambda = {lam} >= 1: need p > e + 1")
    gamma, k = OneParamSubgroup.normalized(G, u)
    hs = gamma.series()
    limit = min(G.T, G.p - 2)
    checks = [{"name": "direction norm", "status": "pass", "detail": f"rescaled by p^{k}"}]
    N = j0 = None
    for h in range(1, limit + 1):
        for j in sorted(eq_indices):
            c = hs[j - 1].coeffs.get((h,), 0)
            if c and valuation(c, G.p) <= 0:
                N, j0 = h, j
                break
        if N is not None:
            break
    if N is None:
        checks.append({"name": "unit coefficient", "status": "inconclusive", "detail": f"none for h <= {limit}"})
        return DiskBoundReport("inconclusive", None, None, lam, None, None, jet_link, None, k, limit, checks)
    bound = disk_formula(N, lam)
    checks.append({"name": "unit coefficient", "status": "pass", "detail": f"|P_{j0},{N}(u)| = 1"})
    jet_bound = None
    if jet_link is not None:
        if N > jet_link + 1:
            raise ConsistencyError(f"witness degree N = {N} exceeds jet order + 1 = {jet_link + 1}")
        jet_bound = 1 + jet_link / (1 - lam)
        checks.append({"name": "N <= m + 1", "status": "pass", "detail": f"{N} <= {jet_link + 1}"})
    return DiskBoundReport("ok", N, j0, lam, bound, floor(bound), jet_link, jet_bound, k, limit, checks)


def reduce_jet_mod_p(gamma: OneParamSubgroup, m: int):
    """Reduction mod p of Exp(z u) truncated at z^(m+1), as a JetMap over F_p."""
    from .jetint import JetMap

    p = gamma.G.p
    if m >= p:
        raise ValueError(f"jet order m = {m} must be < p = {p}: Exp coefficients of degree >= p need not be integral")
    if m > gamma.G.T:
        raise ValueError(f"jet order {m} exceeds truncation order {gamma.G.T}")
    F = FiniteField(p)
    coords = []
    for h in gamma.series():
        cs = [F(0)]
        for d in range(1, m + 1):
            c = Fraction(h.coeffs.get((d,), 0))
            if valuation(c, p) < 0:
                raise ConsistencyError(f"coefficient of z^{d} is not {p}-integral")
            cs.append(F(c))
        coords.append(tuple(cs))
    return JetMap(m, tuple(coords), F)
