"""Point counts over finite fields, zeta truncations, A_D and delta-invariants."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .rings import FFElem, FiniteField, ResourceError, enum_cap
from .series import TruncSeries, parse_series
from .surd import QuadSurd


class MissingBranchData(ValueError):
    pass


class DeltaNotCertified(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# varieties
# ---------------------------------------------------------------------------


@dataclass
class VarietyPresentation:
    """Zero set of integer polynomials; projective(n) uses n + 1 homogeneous variables."""

    ambient: str
    n: int
    polys: list[TruncSeries]
    q: int

    def __post_init__(self):
        if self.ambient not in ("affine", "projective"):
            raise ValueError("ambient must be 'affine' or 'projective'")
        nv = self.nvars
        for f in self.polys:
            if f.nvars != nv:
                raise ValueError(f"polynomial in {f.nvars} variables, ambient needs {nv}")
            if self.ambient == "projective" and len({sum(a) for a in f.coeffs}) > 1:
                raise ValueError(f"{f} is not homogeneous")
        p, s = _prime_power(self.q)
        self.p, self.s = p, s

    @property
    def nvars(self) -> int:
        return self.n if self.ambient == "affine" else self.n + 1

    @classmethod
    def parse(cls, ambient: str, polys: Sequence[str], q: int, names: Sequence[str] | None = None):
        if names is None:
            names = ["x", "y", "z", "w"][: (len(set("".join(polys)) & set("xyzw")) or 1)]
        names = list(names)
        n = len(names) if ambient == "affine" else len(names) - 1
        ps = [parse_series(t, nvars=len(names), T=256, names=names) for t in polys]
        return cls(ambient, n, ps, q)


def _prime_power(q: int) -> tuple[int, int]:
    for p in range(2, q + 1):
        if q % p == 0:
            s, r = 0, q
            while r % p == 0:
                r //= p
                s += 1
            if r != 1:
                raise ValueError(f"{q} is not a prime power")
            return p, s
    raise ValueError(f"{q} is not a prime power")


# -- raw univariate polynomials over a finite field (low degree first) -------------------


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(F: FiniteField, a: list[int], m: list[int]) -> list[int]:
    a = list(a)
    inv = F.inv_raw(m[-1])
    dm = len(m) - 1
    while len(_trim(a)) - 1 >= dm:
        c = F.mul_raw(a[-1], inv)
        shift = len(a) - 1 - dm
        for i, mc in enumerate(m):
            if mc:
                a[shift + i] = F.sub_raw(a[shift + i], F.mul_raw(c, mc))
    return a


def _pmulmod(F: FiniteField, a: list[int], b: list[int], m: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b))
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = F.add_raw(out[i + j], F.mul_raw(x, y))
    return _pmod(F, out, m)


def _gcd(F: FiniteField, a: list[int], b: list[int]) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _trim(_pmod(F, a, b))
    return a


def _count_distinct_roots(F: FiniteField, f: list[int]) -> int:
    """Number of distinct roots in F of a nonzero polynomial: deg gcd(f, y^Q - y)."""
    f = _trim(list(f))
    if len(f) <= 1:
        return 0
    # y^Q mod f by repeated squaring
    r, base, e = [1], _pmod(F, [0, 1], f), F.q
    while e:
        if e & 1:
            r = _pmulmod(F, r, base, f)
        e >>= 1
        if e:
            base = _pmulmod(F, base, base, f)
    r = r + [0] * max(0, 2 - len(r))
    r[1] = F.sub_raw(r[1], 1)
    return len(_gcd(F, f, r)) - 1


class _RawMultiPoly:
    def __init__(self, F: FiniteField, s: TruncSeries):
        self.F = F
        self.terms = [(a, F(c).value) for a, c in s.coeffs.items()]
        self.terms = [(a, c) for a, c in self.terms if c]
        self.nvars = s.nvars

    def last_var_poly(self, prefix: Sequence[int], powcache: list[dict]) -> list[int]:
        """Coefficients in the last variable after fixing the others to ``prefix``."""
        F = self.F
        deg = max((a[-1] for a, _ in self.terms), default=0)
        out = [0] * (deg + 1)
        for a, c in self.terms:
            v = c
            for i, k in enumerate(a[:-1]):
                if k:
                    v = F.mul_raw(v, powcache[i][k])
                    if not v:
                        break
            if v:
                out[a[-1]] = F.add_raw(out[a[-1]], v)
        return out

    def value(self, point: Sequence[int]) -> int:
        F = self.F
        acc = 0
        for a, c in self.terms:
            v = c
            for x, k in zip(point, a):
                if k:
                    v = F.mul_raw(v, F.pow_raw(x, k))
            acc = F.add_raw(acc, v)
        return acc


def _affine_count(F: FiniteField, polys: list[TruncSeries], k: int, cap: int) -> int:
    if k == 0:
        return int(all(not _RawMultiPoly(F, f).terms or _RawMultiPoly(F, f).value(()) == 0 for f in polys))
    if F.q ** (k - 1) > cap:
        raise ResourceError(f"{F.q}^{k - 1} prefixes exceed the enumeration cap {cap}")
    raws = [_RawMultiPoly(F, f) for f in polys]
    maxdeg = [max((max(a[i] for a, _ in r.terms) if r.terms else 0) for r in raws) for i in range(k)]
    total = 0
    for prefix in itertools.product(range(F.q), repeat=k - 1):
        powcache = []
        for i, x in enumerate(prefix):
            pw = {0: 1}
            for e in range(1, maxdeg[i] + 1):
                pw[e] = F.mul_raw(pw[e - 1], x)
            powcache.append(pw)
        g: list[int] = []
        for r in raws:
            u = _trim(r.last_var_poly(prefix, powcache))
            if not u:
                continue
            if len(u) == 1:
                g = [1]
                break
            g = u if not g else _gcd(F, g, u)
            if len(g) == 1:
                break
        if not g:
            total += F.q
        elif len(g) > 1:
            total += _count_distinct_roots(F, g)
    return total


def _dehomogenize(f: TruncSeries, keep: int) -> TruncSeries:
    """Set the last variable of f (in keep + 1 variables) to 1."""
    out: dict = {}
    for a, c in f.coeffs.items():
        b = a[:keep]
        out[b] = out.get(b, 0) + c
    return TruncSeries(keep, f.T, out)


def _restrict_last_zero(f: TruncSeries, keep: int) -> TruncSeries:
    return TruncSeries(keep, f.T, {a[:keep]: c for a, c in f.coeffs.items() if a[keep] == 0})


def _projective_count(F: FiniteField, polys: list[TruncSeries], n: int, cap: int) -> int:
    # points with last coordinate 1, then the hyperplane at infinity
    chart = _affine_count(F, [_dehomogenize(f, n) for f in polys], n, cap)
    if n == 0:
        return chart
    return chart + _projective_count(F, [_restrict_last_zero(f, n) for f in polys], n - 1, cap)


def _field_for(V: VarietyPresentation, n: int) -> FiniteField:
    if n > 1 or V.s > 1:
        for f in V.polys:
            for c in f.coeffs.values():
                if isinstance(c, FFElem) and c.field.s > 1:
                    raise ValueError("coefficients must lie in the prime field when extending scalars")
    return FiniteField(V.p, V.s * n)


def count_points(V: VarietyPresentation, n: int = 1, cap: int | None = None) -> int:
    """#V(F_{q^n}) exactly."""
    if n < 1:
        raise ValueError("n must be >= 1")
    cap = enum_cap() if cap is None else cap
    F = _field_for(V, n)
    if V.ambient == "affine":
        return _affine_count(F, V.polys, V.n, cap)
    return _projective_count(F, V.polys, V.n, cap)


def _normalized_points(F: FiniteField, nvars: int):
    """One representative per projective point: first nonzero coordinate equal to 1."""
    for lead in range(nvars):
        for rest in itertools.product(range(F.q), repeat=nvars - lead - 1):
            yield (0,) * lead + (1,) + rest


def count_points_bruteforce(V: VarietyPresentation, n: int = 1, cap: int | None = None) -> int:
    """Enumeration oracle: evaluate every point."""
    cap = enum_cap() if cap is None else cap
    F = _field_for(V, n)
    if F.q ** V.nvars > cap:
        raise ResourceError("point enumeration exceeds the cap")
    raws = [_RawMultiPoly(F, f) for f in V.polys]
    pts = itertools.product(range(F.q), repeat=V.n) if V.ambient == "affine" else _normalized_points(F, V.nvars)
    return sum(1 for pt in pts if all(r.value(pt) == 0 for r in raws))


# ---------------------------------------------------------------------------
# zeta functions
# ---------------------------------------------------------------------------


def _series_exp(a: list[Fraction], B: int) -> list[Fraction]:
    """exp of a series with zero constant term, via E' = a' E."""
    E = [Fraction(0)] * (B + 1)
    E[0] = Fraction(1)
    for k in range(1, B + 1):
        E[k] = sum(j * a[j] * E[k - j] for j in range(1, k + 1)) / k
    return E


def _series_mul(a: list, b: list, B: int) -> list:
    return [sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(B + 1)]


def _log_derivative_counts(Z: list[Fraction], B: int) -> list[Fraction]:
    """N_n from Z = exp(sum N_n T^n / n): T Z'/Z = sum N_n T^n."""
    N = [Fraction(0)] * (B + 1)
    for k in range(1, B + 1):
        N[k] = k * Z[k] - sum(N[j] * Z[k - j] for j in range(1, k))
    return N


@dataclass
class ZetaTruncation:
    B: int
    counts: list[int]
    Z: list[Fraction]
    c_D: int
    Zstar: list[Fraction]
    checks: list[dict] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "B": str(self.B),
            "counts": [str(c) for c in self.counts],
            "c_D": str(self.c_D),
            "Z": [str(c) for c in self.Z],
            "Zstar": [str(c) for c in self.Zstar],
        }


def zeta_ops(counts: Sequence[int], c_D: int = 0) -> ZetaTruncation:
    """Z = exp(sum N_n T^n/n) and Z* = Z/(1-T)^c_D up to T^B, B = len(counts)."""
    B = len(counts)
    if B < 1:
        raise ValueError("need at least one count")
    if any(c < 0 for c in counts) or c_D < 0:
        raise ValueError("counts and c_D must be nonnegative")
    a = [Fraction(0)] + [Fraction(N, n) for n, N in enumerate(counts, start=1)]
    Z = _series_exp(a, B)
    geo = [Fraction(1)] * (B + 1)
    Zs = list(Z)
    for _ in range(c_D):
        Zs = _series_mul(Zs, geo, B)
    checks = []
    integral = all(c.denominator == 1 for c in Z)
    checks.append({"name": "integer coefficients", "status": "pass" if integral else "fail", "detail": ""})
    rec = _log_derivative_counts(Zs, B)
    ok = all(rec[n] == counts[n - 1] + c_D for n in range(1, B + 1))
    if not ok:
        raise ArithmeticError("log-derivative recovery of N* failed")
    checks.append({"name": "N* recovery", "status": "pass", "detail": f"N*_n = N_n + {c_D}"})
    return ZetaTruncation(B, list(counts), Z, c_D, Zs, checks)


def _solve(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction] | None:
    """Solve a square or overdetermined consistent system; None when inconsistent."""
    rows = [list(r) + [v] for r, v in zip(A, b)]
    ncols = len(A[0]) if A else 0
    piv_cols, r = [], 0
    for c in range(ncols):
        k = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if k is None:
            continue
        rows[r], rows[k] = rows[k], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
    if any(all(x == 0 for x in row[:-1]) and row[-1] != 0 for row in rows):
        return None
    sol = [Fraction(0)] * ncols
    for i, c in enumerate(piv_cols):
        sol[c] = rows[i][-1]
    return sol


def pade_check(Zs: Sequence[Fraction], num_deg: int, den_deg: int) -> dict:
    """Fit P/Q with deg P <= num_deg, deg Q <= den_deg, Q(0) = 1, to all known coefficients.

    Uses every coefficient up to len(Zs) - 1, so with len(Zs) > num_deg + den_deg + 1
    the fit is over-determined and its existence is a genuine test.
    """
    B = len(Zs) - 1
    if B < num_deg + den_deg + 1:
        raise ValueError("not enough coefficients for the requested degrees")
    # (Z Q)_k = 0 for num_deg < k <= B
    A, rhs = [], []
    for k in range(num_deg + 1, B + 1):
        A.append([Fraction(Zs[k - j]) if k - j >= 0 else Fraction(0) for j in range(1, den_deg + 1)])
        rhs.append(-Fraction(Zs[k]))
    qs = _solve(A, rhs) if den_deg else []
    if qs is None:
        return {"ok": False}
    Q = [Fraction(1)] + qs
    if not den_deg and any(Zs[k] for k in range(num_deg + 1, B + 1)):
        return {"ok": False}
    P = [sum(Q[j] * Zs[k - j] for j in range(0, min(k, den_deg) + 1)) for k in range(num_deg + 1)]
    return {"ok": True, "P": P, "Q": Q}


# ---------------------------------------------------------------------------
# singular points, branches and A_D
# ---------------------------------------------------------------------------


@dataclass
class BranchSet:
    """Branches of a curve at one point; point coordinates are ints of the prime field."""

    point: tuple
    params: list[tuple[TruncSeries, TruncSeries]]
    field_ext: list[int]

    def r_local(self, n: int) -> int:
        return sum(1 for e in self.field_ext if n % e == 0)


def _normalize_proj(F: FiniteField, pt: Sequence[int]) -> tuple[int, ...]:
    lead = next(x for x in pt if x)
    inv = F.inv_raw(lead)
    return tuple(F.mul_raw(x, inv) for x in pt)


def singular_points(V: VarietyPresentation, ext_cap: int = 2) -> list[tuple[int, tuple[int, ...]]]:
    """Singular points of a projective plane curve over F_{q^s}, s <= ext_cap (Jacobian criterion).

    Returns (s, normalized point) with s the smallest degree where the point is found
    and coordinates as raw elements of F_{q^s}.
    """
    if V.ambient != "projective" or V.n != 2 or len(V.polys) != 1:
        raise ValueError("singular point search is implemented for projective plane curves")
    f = V.polys[0]
    out = []
    for s in range(1, ext_cap + 1):
        F = FiniteField(V.p, V.s * s)
        if F.q**2 > enum_cap():
            raise ResourceError("singular point search exceeds the enumeration cap")
        eqs = [_RawMultiPoly(F, f)] + [_RawMultiPoly(F, f.derivative(i)) for i in range(3)]
        for pt in _normalized_points(F, 3):
            # points over a proper subfield were reported at a smaller s
            if s > 1 and all(F.pow_raw(x, V.q) == x for x in pt):
                continue
            if all(e.value(pt) == 0 for e in eqs):
                out.append((s, pt))
    return out


def a_d_count(V: VarietyPresentation, branch_data: Sequence[BranchSet], n: int = 1, ext_cap: int = 2) -> dict:
    """A_D(F_{q^n}) = #D(F_{q^n}) + sum over singular x of (r_local(x) - 1)."""
    F1 = FiniteField(V.p, V.s)
    sing = singular_points(V, ext_cap)
    by_point = {}
    for b in branch_data:
        by_point[_normalize_proj(F1, [F1(c).value for c in b.point])] = b
    missing = [pt for s, pt in sing if s == 1 and pt not in by_point]
    missing += [pt for s, pt in sing if s > 1]
    if missing:
        raise MissingBranchData(f"no branch data for singular point(s) {missing}")
    N = count_points(V, n)
    corr = 0
    for s, pt in sing:
        corr += by_point[pt].r_local(n) - 1
    return {"count": N, "correction": corr, "A_D": N + corr, "singular_points": [list(pt) for _, pt in sing]}


def weil_bound(r: int, genera: Sequence[int], q: int) -> QuadSurd:
    """(q + 1) r + 2 sqrt(q) sum g."""
    if len(genera) != r:
        raise ValueError("one genus per component")
    return QuadSurd((q + 1) * r) + QuadSurd(0, 2 * sum(genera), q)


def weil_check(A: int, r: int, genera: Sequence[int], q: int) -> bool:
    return A <= weil_bound(r, genera, q)


# ---------------------------------------------------------------------------
# delta-invariants
# ---------------------------------------------------------------------------


def _rank_update(F: FiniteField, basis: dict[int, list[int]], v: list[int]) -> bool:
    """Reduce v against an echelon basis keyed by pivot; insert and return True if independent."""
    v = list(v)
    for piv, row in basis.items():
        if v[piv]:
            c = v[piv]
            v = [F.sub_raw(x, F.mul_raw(c, y)) for x, y in zip(v, row)]
    piv = next((i for i, x in enumerate(v) if x), None)
    if piv is None:
        return False
    inv = F.inv_raw(v[piv])
    v = [F.mul_raw(x, inv) for x in v]
    for k, row in list(basis.items()):
        if row[piv]:
            c = row[piv]
            basis[k] = [F.sub_raw(x, F.mul_raw(c, y)) for x, y in zip(row, v)]
    basis[piv] = v
    return True


def _branch_raw(F: FiniteField, s: TruncSeries, T: int) -> list[int]:
    out = [0] * T
    for (k,), c in s.coeffs.items():
        if k < T:
            out[k] = F(c).value if not isinstance(c, FFElem) else c.value
    if out[0]:
        raise ValueError("branch parametrization must vanish at t = 0")
    return out


def _image_span(F: FiniteField, branches, T: int) -> tuple[dict, int]:
    """Echelon basis of the image of k[s1, s2] in the sum of k[t]/(t^T) over branches."""
    r = len(branches)
    raw = [[_branch_raw(F, s, T) for s in br] for br in branches]

    def mul(a, b):
        out = [0] * T
        for i, x in enumerate(a):
            if x:
                for j in range(T - i):
                    if b[j]:
                        out[i + j] = F.add_raw(out[i + j], F.mul_raw(x, b[j]))
        return out

    one = [1] + [0] * (T - 1)
    basis: dict[int, list[int]] = {}
    dim = 0
    # powers of s1 per branch, then multiply by powers of s2
    p1 = [[one] for _ in range(r)]
    for d in range(T):
        for i in range(r):
            p1[i].append(mul(p1[i][-1], raw[i][0]))
    for a in range(T):
        col = [p1[i][a] for i in range(r)]
        for b in range(T - a):
            if b:
                col = [mul(col[i], raw[i][1]) for i in range(r)]
            vec = [x for i in range(r) for x in col[i]]
            if not any(vec):
                break
            if _rank_update(F, basis, vec):
                dim += 1
    return basis, dim


def delta_invariant(branches: Sequence[tuple[TruncSeries, TruncSeries]], p: int, s: int = 1, T_cap: int = 80) -> dict:
    """delta = dim (sum_i k[[t_i]]) / (image of the complete local ring), with a conductor certificate.

    At truncation T the image W of polynomials is computed in sum_i k[t]/(t^T); if W
    contains t^c k[t]/(t^T) on every branch with T >= 2 max(c, 1), then the full
    ring contains t^c times the normalization and delta = r T - dim W exactly.
    """
    F = FiniteField(p, s)
    r = len(branches)
    if r == 0:
        raise ValueError("no branches")
    T = 4
    while T <= T_cap:
        basis, dim = _image_span(F, branches, T)
        # minimal c with every t^j e_i (j >= c) in W
        c = T
        for cand in range(T - 1, -1, -1):
            ok = True
            for i in range(r):
                e = [0] * (r * T)
                e[i * T + cand] = 1
                test = dict(basis)
                if _rank_update(F, test, e):
                    ok = False
                    break
            if not ok:
                break
            c = cand
        if c < T and T >= 2 * max(c, 1):
            delta = r * T - dim
            if r > delta + 1:
                raise ArithmeticError("branch count exceeds delta + 1")
            return {"delta": delta, "conductor_exponent": c, "T": T, "branches": r}
        T = max(T + 4, 2 * max(c, 1) + 2)
    raise DeltaNotCertified(f"no conductor certificate up to truncation {T_cap}")


def genus_bookkeeping(g_geometric: int, deltas: Sequence[int]) -> int:
    """Arithmetic genus = geometric genus + sum of delta-invariants."""
    return g_geometric + sum(deltas)


def multiplicity(f: TruncSeries) -> int:
    """Order of the lowest nonzero homogeneous part of a local equation."""
    o = f.order()
    if o is None:
        raise ValueError("zero local equation")
    return o


def local_equation(V: VarietyPresentation, point: Sequence[int]) -> TruncSeries:
    """Equation of a projective plane curve at a point of P^2(F_p), in the affine chart
    of its first nonzero coordinate, translated so the point is the origin (over F_p)."""
    if V.ambient != "projective" or V.n != 2 or len(V.polys) != 1:
        raise ValueError("local equations are implemented for projective plane curves")
    F = FiniteField(V.p)
    pt = [F(c) for c in point]
    k = next(i for i, c in enumerate(pt) if c)
    pt = [c / pt[k] for c in pt]
    f = V.polys[0]
    T = sum(next(iter(f.coeffs)))
    X, Y = TruncSeries.gens(2, T, one=F(1))
    free = [i for i in range(3) if i != k]
    sub = {k: TruncSeries.const(F(1), 2, T), free[0]: X + TruncSeries.const(pt[free[0]], 2, T), free[1]: Y + TruncSeries.const(pt[free[1]], 2, T)}
    out = TruncSeries.zero(2, T)
    for a, c in f.coeffs.items():
        term = TruncSeries.const(F(c), 2, T)
        for i, e in enumerate(a):
            if e:
                term = term * sub[i] ** e
        out = out + term
    return out
