"""Zero counting for p-adic power series on closed balls.

Radii and growth constants are handled as exponents of p: a radius r = p^(-rho)
and a growth constant M = p^mu, with rho and mu exact rationals, so that
norm comparisons never touch floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import floor, inf
from typing import Sequence

from .rings import valuation
from .series import TruncSeries


class HypothesisViolation(ValueError):
    """An input fails a hypothesis of the zero estimate; the message names the culprit."""


class ZeroPrecisionError(ArithmeticError):
    """All known coefficients vanish, so no zero count can be certified."""


@dataclass(frozen=True)
class TailGuard:
    """Certificate controlling coefficients beyond the truncation order.

    ``polynomial``: there are no terms beyond the stored ones.
    ``factorial``: |c_j| <= M^(j-1) for every j, with M = p^mu.
    """

    kind: str
    mu: Fraction = Fraction(0)

    def __post_init__(self):
        if self.kind not in ("polynomial", "factorial"):
            raise ValueError(f"unsupported tail guard {self.kind!r}")

    @classmethod
    def polynomial(cls) -> "TailGuard":
        return cls("polynomial")

    @classmethod
    def factorial(cls, mu) -> "TailGuard":
        return cls("factorial", Fraction(mu))


@dataclass
class RadiusNorm:
    nu: int
    # |h|_r = p^(-norm_exponent)
    norm_exponent: Fraction
    rho: Fraction
    checks: list[dict] = field(default_factory=list)

    @property
    def bound_floor(self) -> int:
        return self.nu

    def report(self, p: int) -> dict:
        return {
            "nu": self.nu,
            "h_norm_at_r": f"{p}^-{self.norm_exponent}",
            "hypothesis_checks": self.checks,
            "bound_real": str(self.nu),
            "bound_floor": self.nu,
        }


def radius_norm(h: TruncSeries, p: int, rho, tail: TailGuard | None = None) -> RadiusNorm:
    """|h|_r and nu(h, r) for r = p^(-rho), with the tail certified by ``tail``."""
    rho = Fraction(rho)
    if rho <= 0:
        raise ValueError("radius must be < 1")
    if h.nvars != 1:
        raise ValueError("one-variable series expected")
    if tail is None:
        raise ValueError("a tail guard is required (use TailGuard.polynomial() for polynomials)")
    best, nu = None, None
    for (j,), c in h.coeffs.items():
        v = valuation(c, p)
        if v == inf:
            continue
        e = v + j * rho
        if best is None or e < best or (e == best and j > nu):
            best, nu = e, j
    if best is None:
        raise ZeroPrecisionError("series is zero to known precision")
    checks = [{"name": "nonzero", "status": "pass", "detail": f"max attained at index {nu}"}]
    if tail.kind == "factorial":
        # sup_{j > T} M^(j-1) r^j = M^T r^(T+1) when M r < 1
        if tail.mu >= rho:
            raise HypothesisViolation(f"radius p^-{rho} is not below 1/M = p^-{tail.mu}")
        tail_exp = (h.T + 1) * rho - h.T * tail.mu
        if not tail_exp > best:
            raise HypothesisViolation(
                f"tail bound p^-{tail_exp} does not stay below |h|_r = p^-{best}; raise the truncation order"
            )
        checks.append({"name": "tail", "status": "pass", "detail": f"tail <= p^-{tail_exp} < p^-{best}"})
    return RadiusNorm(nu=nu, norm_exponent=best, rho=rho, checks=checks)


def zero_bound_1var(h: TruncSeries, p: int, rho=1, tail: TailGuard | None = None) -> int:
    """Upper bound nu(h, r) for the number of zeros (with multiplicity) of h in |z| <= p^(-rho)."""
    return radius_norm(h, p, rho, tail).nu


# ---------------------------------------------------------------------------
# several variables
# ---------------------------------------------------------------------------


@dataclass
class MVZeroReport:
    lam: Fraction | tuple[float, float]
    bound_real: Fraction | float
    bound_floor: int
    N: int
    checks: list[dict]

    def as_dict(self) -> dict:
        lam = str(self.lam) if isinstance(self.lam, Fraction) else [repr(x) for x in self.lam]
        return {
            "lambda": lam,
            "N": self.N,
            "bound_real": str(self.bound_real),
            "bound_floor": self.bound_floor,
            "hypothesis_checks": self.checks,
        }


def disk_formula(N: int, lam: Fraction) -> Fraction:
    """(N - lam)/(1 - lam)."""
    lam = Fraction(lam)
    if not 0 <= lam < 1:
        raise ValueError(f"lambda = {lam} outside [0, 1)")
    return (N - lam) / (1 - lam)


def lambda_from(mu: Fraction, rho: Fraction) -> Fraction:
    """log M / log r^{-1} for M = p^mu, r = p^-rho."""
    return Fraction(mu) / Fraction(rho)


def lambda_interval(M: float, r: float) -> tuple[float, float]:
    """Outward-rounded enclosure of log M / log(1/r) for arbitrary positive reals."""
    import mpmath

    with mpmath.workprec(80):
        iv = mpmath.iv
        lam = iv.log(iv.mpf(M)) / iv.log(1 / iv.mpf(r))
        return float(lam.a) - 1e-15, float(lam.b) + 1e-15


def mv_zero_bound(
    H: TruncSeries,
    u: Sequence,
    p: int,
    N: int,
    mu,
    rho,
) -> MVZeroReport:
    """Bound on zeros of z -> H(z u) in |z| <= r, from |c_a| <= M^(|a|-1) and a unit among P_{H,j}(u), j <= N.

    M = p^mu and r = p^-rho.  Hypotheses are checked on the stored coefficients and
    the first violation is reported by exponent tuple or degree.
    """
    mu, rho = Fraction(mu), Fraction(rho)
    if mu < 0:
        raise HypothesisViolation("M must be >= 1")
    if not rho > mu:
        raise HypothesisViolation(f"need r < 1/M, got r = p^-{rho}, M = p^{mu}")
    if N < 1:
        raise HypothesisViolation("witness degree N must be >= 1")
    if min(valuation(x, p) for x in u) != 0:
        raise HypothesisViolation("direction u must have norm exactly 1")
    checks = []
    for a, c in H.sorted_terms():
        d = sum(a)
        # |c| <= p^(mu (d-1))  <=>  v(c) >= -mu (d-1)
        if valuation(c, p) < -mu * (d - 1):
            raise HypothesisViolation(f"hypothesis (i) fails at alpha={list(a)}: |c| > M^{d - 1}")
    checks.append({"name": "coefficient growth (i)", "status": "pass", "detail": f"{len(H)} coefficients"})
    line = H.restrict_to_line(u)
    witness = None
    for j in range(0, min(N, H.T) + 1):
        c = line.coeffs.get((j,), 0)
        if c and valuation(c, p) <= 0:
            witness = j
            break
    if witness is None:
        raise HypothesisViolation(f"hypothesis (ii) fails: |P_j(u)| < 1 for all j <= {N}")
    checks.append({"name": "unit coefficient (ii)", "status": "pass", "detail": f"j = {witness}"})
    lam = lambda_from(mu, rho)
    bound = disk_formula(N, lam)
    return MVZeroReport(lam=lam, bound_real=bound, bound_floor=floor(bound), N=N, checks=checks)


def mv_zero_bound_real(N: int, M: float, r: float) -> tuple[float, int]:
    """Same bound for arbitrary real M, r: safe upper value from an interval for lambda."""
    if not (M >= 1 and 0 < r < 1 / M):
        raise HypothesisViolation("need M >= 1 and 0 < r < 1/M")
    lo, hi = lambda_interval(M, r)
    # (N - lam)/(1 - lam) is increasing in lam for N >= 1
    upper = (N - hi) / (1 - hi)
    return upper, floor(upper)


# ---------------------------------------------------------------------------
# root-count oracle for polynomials over Z_p (independent of nu)
# ---------------------------------------------------------------------------


def _poly_eval(cs: Sequence[int], x: int) -> int:
    acc = 0
    for c in reversed(cs):
        acc = acc * x + c
    return acc


def _taylor_shift(cs: Sequence[int], a: int, scale: int) -> list[int]:
    """Coefficients of f(a + scale*y)."""
    n = len(cs)
    out = [0] * n
    # Horner over polynomials in y
    for c in reversed(cs):
        # out = out * (a + scale y) + c
        new = [0] * n
        for i, v in enumerate(out):
            if v:
                new[i] += v * a
                if i + 1 < n:
                    new[i + 1] += v * scale
        new[0] += c
        out = new
    return out


def count_roots_in_disk(cs: Sequence[int], p: int, depth: int = 12) -> int:
    """Number of distinct roots in pZ_p of a squarefree integer polynomial.

    Recursion over residue disks a + p^k Z_p: after normalizing f(a + p^k y) by its
    content, the reduction mod p has degree equal to the number of roots (in C_p) in
    the disk; degree 0 means none, degree 1 means exactly one (necessarily in Z_p).
    """
    cs = list(cs)
    while cs and cs[-1] == 0:
        cs.pop()
    if not cs:
        raise ValueError("zero polynomial")

    def rec(a: int, k: int) -> int:
        g = _taylor_shift(cs, a, p**k)
        content = min(_v(c, p) for c in g if c)
        g = [c // p**content for c in g]
        red = [c % p for c in g]
        while red and red[-1] == 0:
            red.pop()
        deg = len(red) - 1
        if deg <= 0:
            return 0
        if deg == 1:
            return 1
        if k >= depth:
            raise ArithmeticError(f"roots not separated at depth {depth}")
        total = 0
        for d in range(p):
            if _poly_eval(red, d) % p == 0:
                total += rec(a + d * p**k, k + 1)
        return total

    return rec(0, 1)


def _v(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def roots_in_pZp_with_multiplicity(cs: Sequence[int], p: int, depth: int = 12) -> int:
    """Roots in pZ_p counted with multiplicity, via squarefree factorization over Q."""
    import sympy

    x = sympy.Symbol("x")
    f = sympy.Poly(list(reversed([int(c) for c in cs])), x)
    _, factors = sympy.sqf_list(f)
    total = 0
    for g, mult in factors:
        if g.degree() < 1:
            continue
        coeffs = [int(c) for c in reversed(g.all_coeffs())]
        total += mult * count_roots_in_disk(coeffs, p, depth)
    return total
