"""Sparse multivariate power series truncated at total degree T, and forms on 2-dim charts.

Coefficients are any values supporting ``+ - *`` with ints and a truth value that is
False exactly for zero: ``int``, ``Fraction``, :class:`~chabsurf.rings.FFElem`,
:class:`~chabsurf.rings.PadicNum`.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .rings import FFElem, FiniteField, PadicNum


class SeriesError(ValueError):
    """Usage error on truncated series (bad composition, dimension mismatch, parse error)."""


def _deg(a: tuple[int, ...]) -> int:
    return sum(a)


class TruncSeries:
    """Sum of c_alpha x^alpha over ||alpha|| <= T, stored sparsely without zero coefficients."""

    __slots__ = ("nvars", "T", "coeffs", "_buckets")

    def __init__(self, nvars: int, T: int, coeffs: dict | None = None):
        self.nvars = nvars
        self.T = T
        cleaned = {}
        for a, c in (coeffs or {}).items():
            a = tuple(a)
            if len(a) != nvars:
                raise SeriesError(f"exponent {a} has wrong length for {nvars} variables")
            if sum(a) <= T and c:
                cleaned[a] = c
        self.coeffs = cleaned
        self._buckets = None

    # -- constructors -------------------------------------------------------------

    @classmethod
    def zero(cls, nvars: int, T: int) -> "TruncSeries":
        return cls(nvars, T)

    @classmethod
    def const(cls, c, nvars: int, T: int) -> "TruncSeries":
        return cls(nvars, T, {(0,) * nvars: c})

    @classmethod
    def var(cls, i: int, nvars: int, T: int, one=1) -> "TruncSeries":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, T, {tuple(e): one})

    @classmethod
    def gens(cls, nvars: int, T: int, one=1) -> list["TruncSeries"]:
        return [cls.var(i, nvars, T, one) for i in range(nvars)]

    @classmethod
    def from_univariate(cls, coeffs: Sequence, T: int | None = None) -> "TruncSeries":
        T = len(coeffs) - 1 if T is None else T
        return cls(1, T, {(j,): c for j, c in enumerate(coeffs)})

    # -- basic protocol -------------------------------------------------------------

    def __repr__(self) -> str:
        return f"TruncSeries({self.to_text()!r}, nvars={self.nvars}, T={self.T})"

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, alpha) -> object:
        if isinstance(alpha, int):
            alpha = (alpha,)
        return self.coeffs.get(tuple(alpha), 0)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if isinstance(other, TruncSeries):
            if self.nvars != other.nvars:
                return False
            T = min(self.T, other.T)
            return (self.truncate(T) - other.truncate(T)).is_zero()
        if isinstance(other, (int, Fraction)):
            return self == TruncSeries.const(other, self.nvars, self.T)
        return NotImplemented

    __hash__ = None

    def _like(self, coeffs: dict, T: int | None = None) -> "TruncSeries":
        return TruncSeries(self.nvars, self.T if T is None else T, coeffs)

    def _check(self, other: "TruncSeries") -> None:
        if other.nvars != self.nvars:
            raise SeriesError(f"variable count mismatch: {self.nvars} vs {other.nvars}")

    def buckets(self) -> list[list[tuple[tuple[int, ...], object]]]:
        """Terms grouped by total degree (index = degree)."""
        if self._buckets is None:
            b: list[list] = [[] for _ in range(self.T + 1)]
            for a, c in self.coeffs.items():
                b[sum(a)].append((a, c))
            self._buckets = b
        return self._buckets

    def order(self) -> int | None:
        """Lowest total degree of a nonzero term, None for the zero series."""
        if not self.coeffs:
            return None
        return min(map(_deg, self.coeffs))

    def degree(self) -> int | None:
        if not self.coeffs:
            return None
        return max(map(_deg, self.coeffs))

    def constant_term(self):
        return self.coeffs.get((0,) * self.nvars, 0)

    def truncate(self, T: int) -> "TruncSeries":
        return TruncSeries(self.nvars, T, {a: c for a, c in self.coeffs.items() if sum(a) <= T})

    def map_coeffs(self, f: Callable) -> "TruncSeries":
        return self._like({a: f(c) for a, c in self.coeffs.items()})

    # -- ring operations ---------------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, TruncSeries):
            other = TruncSeries.const(other, self.nvars, self.T)
        self._check(other)
        T = min(self.T, other.T)
        out = {a: c for a, c in self.coeffs.items() if sum(a) <= T}
        for a, c in other.coeffs.items():
            if sum(a) <= T:
                out[a] = out[a] + c if a in out else c
        return self._like(out, T)

    __radd__ = __add__

    def __neg__(self):
        return self._like({a: -c for a, c in self.coeffs.items()})

    def __sub__(self, other):
        if not isinstance(other, TruncSeries):
            other = TruncSeries.const(other, self.nvars, self.T)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "TruncSeries":
        return self._like({a: c * v for a, v in self.coeffs.items()})

    def __mul__(self, other):
        if not isinstance(other, TruncSeries):
            return self.scale(other)
        self._check(other)
        T = min(self.T, other.T)
        A, B = self.buckets(), other.buckets()
        out: dict = {}
        for da in range(min(len(A), T + 1)):
            if not A[da]:
                continue
            for db in range(min(len(B), T - da + 1)):
                if not B[db]:
                    continue
                for a, ca in A[da]:
                    for b, cb in B[db]:
                        key = tuple(x + y for x, y in zip(a, b))
                        term = ca * cb
                        if key in out:
                            out[key] = out[key] + term
                        else:
                            out[key] = term
        return self._like(out, T)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, e: int) -> "TruncSeries":
        if e < 0:
            return self.inverse() ** (-e)
        one = self._one_like()
        result = TruncSeries.const(one, self.nvars, self.T)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def _one_like(self):
        for c in self.coeffs.values():
            if isinstance(c, FFElem):
                return c.field.one()
            if isinstance(c, PadicNum):
                return PadicNum.from_rational(1, c.p, c.prec)
            return 1
        return 1

    def inverse(self) -> "TruncSeries":
        """Multiplicative inverse of a series with invertible constant term."""
        c0 = self.constant_term()
        if not c0:
            raise SeriesError("series with zero constant term is not invertible")
        inv0 = 1 / c0 if not isinstance(c0, int) else Fraction(1, c0)
        if isinstance(c0, int) and abs(c0) == 1:
            inv0 = c0
        rest = self - TruncSeries.const(c0, self.nvars, self.T)
        # 1/(c0 + r) = inv0 * sum_k (-inv0 r)^k
        u = rest.scale(-inv0)
        acc = TruncSeries.const(inv0, self.nvars, self.T)
        power = TruncSeries.const(inv0, self.nvars, self.T)
        for _ in range(self.T):
            power = power * u
            if power.is_zero():
                break
            acc = acc + power
        return acc

    def __truediv__(self, other):
        if isinstance(other, TruncSeries):
            return self * other.inverse()
        if isinstance(other, int):
            other = Fraction(other)
        return self.scale(1 / other)

    # -- calculus / structure ------------------------------------------------------------

    def derivative(self, i: int) -> "TruncSeries":
        """Formal partial derivative in variable i; the truncation order drops by one."""
        out = {}
        for a, c in self.coeffs.items():
            if a[i]:
                b = list(a)
                b[i] -= 1
                out[tuple(b)] = c * a[i]
        return self._like(out, max(self.T - 1, 0))

    def homogeneous_part(self, d: int) -> "TruncSeries":
        if d > self.T:
            raise SeriesError(f"degree {d} exceeds truncation order {self.T}")
        return self._like({a: c for a, c in self.coeffs.items() if sum(a) == d})

    def homogeneous_parts(self) -> list["TruncSeries"]:
        return [self._like(dict(b)) for b in self.buckets()]

    def evaluate(self, point: Sequence):
        """Value at a point (exact for polynomials; a partial sum for true series)."""
        if len(point) != self.nvars:
            raise SeriesError("point has wrong dimension")
        total = 0
        for a, c in self.coeffs.items():
            term = c
            for x, k in zip(point, a):
                if k:
                    term = term * x**k
            total = total + term
        return total

    def restrict_to_line(self, u: Sequence) -> "TruncSeries":
        """H(z*u) = sum_j P_{H,j}(u) z^j as a one-variable series."""
        if len(u) != self.nvars:
            raise SeriesError(f"direction has {len(u)} entries, series has {self.nvars} variables")
        coeffs = {}
        for d, terms in enumerate(self.buckets()):
            if terms:
                coeffs[(d,)] = TruncSeries(self.nvars, self.T, dict(terms)).evaluate(u)
        return TruncSeries(1, self.T, coeffs)

    def compose(self, subs: Sequence["TruncSeries"]) -> "TruncSeries":
        return compose(self, subs)

    def extend_vars(self, nvars: int, positions: Sequence[int]) -> "TruncSeries":
        """Re-embed into nvars variables, variable i going to slot positions[i]."""
        out = {}
        for a, c in self.coeffs.items():
            b = [0] * nvars
            for k, pos in zip(a, positions):
                b[pos] += k
            out[tuple(b)] = c
        return TruncSeries(nvars, self.T, out)

    # -- text and JSON formats ---------------------------------------------------------------

    def sorted_terms(self) -> list[tuple[tuple[int, ...], object]]:
        return sorted(self.coeffs.items(), key=lambda t: (sum(t[0]), tuple(-x for x in t[0])))

    def to_text(self, names: Sequence[str] | None = None) -> str:
        names = default_names(self.nvars) if names is None else list(names)
        if not self.coeffs:
            return "0"
        parts: list[str] = []
        for a, c in self.sorted_terms():
            mono = "*".join(
                n if k == 1 else f"{n}^{k}" for n, k in zip(names, a) if k
            )
            neg, cstr = _coeff_text(c)
            if mono and cstr == "1":
                body = mono
            elif mono:
                body = f"{cstr}*{mono}"
            else:
                body = cstr
            if not parts:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)

    def __str__(self) -> str:
        return self.to_text()

    def to_json(self) -> list[dict]:
        return [{"exps": list(a), "coeff": coeff_to_str(c)} for a, c in self.sorted_terms()]

    def dumps(self) -> str:
        return json.dumps({"nvars": self.nvars, "T": self.T, "terms": self.to_json()})


def default_names(nvars: int) -> list[str]:
    return [f"x{i + 1}" for i in range(nvars)]


def _coeff_text(c) -> tuple[bool, str]:
    if isinstance(c, (int, Fraction)):
        c = Fraction(c)
        return c < 0, str(abs(c))
    if isinstance(c, FFElem) and c.field.s == 1:
        return False, str(c.value)
    return False, "(" + coeff_to_str(c) + ")"


def coeff_to_str(c) -> str:
    if isinstance(c, (int, Fraction)):
        return str(Fraction(c))
    return str(c)


class CoeffParser:
    """Turns coefficient strings into ring elements.

    kind "Q" gives Fractions, "Fq" elements of ``field``, "Qp" PadicNums.
    """

    def __init__(self, kind: str = "Q", field: FiniteField | None = None, p: int | None = None, prec: int = 32):
        if kind not in ("Q", "Fq", "Qp"):
            raise SeriesError(f"unknown coefficient ring {kind!r}")
        if kind == "Fq" and field is None:
            raise SeriesError("finite field required")
        if kind == "Qp" and p is None:
            raise SeriesError("prime required for p-adic coefficients")
        self.kind, self.field, self.p, self.prec = kind, field, p, prec

    def from_rational(self, x: Fraction):
        if self.kind == "Q":
            return x.numerator if x.denominator == 1 else x
        if self.kind == "Fq":
            return self.field(x)
        return PadicNum.from_rational(x, self.p, self.prec)

    def __call__(self, text: str):
        text = text.strip()
        if self.kind == "Qp" and "mod" in text:
            return PadicNum.parse(text)
        if self.kind == "Fq" and text.startswith("["):
            return self.field([int(t) for t in text.strip("[]").split(",")])
        try:
            return self.from_rational(Fraction(text))
        except ValueError as exc:
            raise SeriesError(f"bad coefficient {text!r}") from exc


_TERM_SPLIT = re.compile(r"\s*([+-])\s*")


def _split_terms(text: str) -> list[tuple[str, str]]:
    """Split on top-level + and - (not inside parentheses or brackets)."""
    out, depth, cur, sign = [], 0, [], "+"
    stripped = text.strip()
    for ch in stripped:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch in "+-" and depth == 0:
            prev = "".join(cur).strip()
            if prev:
                out.append((sign, prev))
                sign = ch
            else:
                sign = "-" if (sign == "-") != (ch == "-") else "+"
            cur = []
            continue
        cur.append(ch)
    if depth != 0:
        raise SeriesError(f"unbalanced brackets in {text!r}")
    last = "".join(cur).strip()
    if last:
        out.append((sign, last))
    elif stripped:
        raise SeriesError(f"dangling operator in {text!r}")
    return out


def parse_series(
    text: str,
    nvars: int | None = None,
    T: int = 64,
    names: Sequence[str] | None = None,
    coeff: CoeffParser | None = None,
    constants: dict | None = None,
) -> TruncSeries:
    """Parse a sum of terms like ``3/2*x1^2*x2 - x2 + (5^1 * 2 mod 5^20)*x1``."""
    coeff = CoeffParser() if coeff is None else coeff
    if names is None:
        found = sorted({int(m) for m in re.findall(r"x(\d+)", text)} or {1})
        nvars = max(found) if nvars is None else nvars
        names = default_names(nvars)
    names = list(names)
    nvars = len(names) if nvars is None else nvars
    index = {n: i for i, n in enumerate(names)}
    constants = constants or {}
    coeffs: dict = {}
    extra = TruncSeries(nvars, T)
    if text.strip() in ("", "0"):
        return TruncSeries(nvars, T)
    for sign, body in _split_terms(text):
        c = coeff.from_rational(Fraction(1))
        exps = [0] * nvars
        sub_factors: list[TruncSeries] = []
        for factor in _factors(body):
            if factor.startswith("(") and factor.endswith(")"):
                inner = factor[1:-1]
                try:
                    c = c * coeff(inner)
                except SeriesError:
                    sub_factors.append(
                        parse_series(inner, nvars, T, names, coeff, constants)
                    )
                continue
            if factor.startswith("["):
                c = c * coeff(factor)
                continue
            name, _, power = factor.partition("^")
            name = name.strip()
            k = int(power) if power else 1
            if name in index:
                exps[index[name]] += k
            elif name in constants:
                c = c * constants[name] ** k
            else:
                if power:
                    raise SeriesError(f"unknown symbol {name!r}")
                c = c * coeff(name)
        if sign == "-":
            c = -c
        key = tuple(exps)
        if sub_factors:
            term = TruncSeries(nvars, T, {key: c})
            for f in sub_factors:
                term = term * f
            extra = extra + term
            continue
        coeffs[key] = coeffs[key] + c if key in coeffs else c
    out = TruncSeries(nvars, T, coeffs)
    return out + extra if extra else out


def _factors(body: str) -> list[str]:
    out, depth, cur = [], 0, []
    for ch in body:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if depth == 0 and (ch == "*" or ch.isspace()):
            if cur:
                out.append("".join(cur))
                cur = []
            continue
        cur.append(ch)
    if cur:
        out.append("".join(cur))
    # glue "x1" "^2" produced by spacing around ^
    glued: list[str] = []
    for f in out:
        if glued and (f.startswith("^") or glued[-1].endswith("^")):
            glued[-1] += f
        else:
            glued.append(f)
    return glued


def series_from_json(obj, coeff: CoeffParser | None = None) -> TruncSeries:
    coeff = CoeffParser() if coeff is None else coeff
    if isinstance(obj, str):
        obj = json.loads(obj)
    terms = obj["terms"]
    return TruncSeries(obj["nvars"], obj["T"], {tuple(t["exps"]): coeff(t["coeff"]) for t in terms})


# ---------------------------------------------------------------------------
# composition
# ---------------------------------------------------------------------------


def compose(H: TruncSeries, subs: Sequence[TruncSeries]) -> TruncSeries:
    """H(subs) truncated at the substitutions' order.

    Each substitution must have zero constant term, so monomials of H of degree
    d only contribute in degree >= d; exact up to min(H.T, subs.T).
    """
    if len(subs) != H.nvars:
        raise SeriesError(f"{H.nvars} substitutions needed, got {len(subs)}")
    if not subs:
        raise SeriesError("nothing to substitute")
    m = subs[0].nvars
    T = min(min(s.T for s in subs), H.T)
    subs = [s.truncate(T) for s in subs]
    for s in subs:
        if s.nvars != m:
            raise SeriesError("substitutions live in different variable sets")
        if s.constant_term():
            raise SeriesError("substitution with nonzero constant term")
    cache: dict[tuple[int, ...], TruncSeries] = {(0,) * H.nvars: None}
    out: dict = {}

    def mono(a: tuple[int, ...]) -> TruncSeries | None:
        if a in cache:
            return cache[a]
        i = max(k for k, e in enumerate(a) if e)
        prev = list(a)
        prev[i] -= 1
        base = mono(tuple(prev))
        val = subs[i] if base is None else base * subs[i]
        cache[a] = val
        return val

    for a, c in sorted(H.coeffs.items(), key=lambda t: sum(t[0])):
        if sum(a) > T:
            continue
        s = mono(a)
        if s is None:
            key = (0,) * m
            out[key] = out[key] + c if key in out else c
            continue
        for b, v in s.coeffs.items():
            term = c * v
            out[b] = out[b] + term if b in out else term
    return TruncSeries(m, T, out)


def compose_many(Hs: Sequence[TruncSeries], subs: Sequence[TruncSeries]) -> list[TruncSeries]:
    return [compose(H, subs) for H in Hs]


# ---------------------------------------------------------------------------
# forms on a 2-dimensional chart and differentials of jet rings
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PolyOneForm:
    """f1*ds1 + f2*ds2 on a chart with coordinates (s1, s2)."""

    f1: TruncSeries
    f2: TruncSeries

    def __post_init__(self):
        if self.f1.nvars != 2 or self.f2.nvars != 2:
            raise SeriesError("one-forms live on a 2-variable chart")

    @classmethod
    def parse(cls, text: str, coeff: CoeffParser | None = None, T: int = 64, names=("s1", "s2")) -> "PolyOneForm":
        """Parse ``"<f1> ds1 + <f2> ds2"`` written as ``"(f1)*ds1 + (f2)*ds2"`` or ``"ds1 + s1^2*ds2"``."""
        f = {0: [], 1: []}
        for sign, body in _split_terms(text):
            facs = _factors(body)
            which = [i for i, x in enumerate(facs) if x in ("ds1", "ds2", f"d{names[0]}", f"d{names[1]}")]
            if len(which) != 1:
                raise SeriesError(f"term {body!r} needs exactly one of ds1, ds2")
            k = which[0]
            slot = 0 if facs[k] in ("ds1", f"d{names[0]}") else 1
            inner = [x for i, x in enumerate(facs) if i != k]
            f[slot].append((sign, inner))
        parts = []
        for slot in (0, 1):
            acc = TruncSeries(2, T)
            for sign, factors in f[slot]:
                term = TruncSeries.const((coeff or CoeffParser()).from_rational(Fraction(1)), 2, T)
                for x in factors:
                    term = term * parse_series(x, T=T, names=names, coeff=coeff)
                acc = acc - term if sign == "-" else acc + term
            parts.append(acc)
        return cls(parts[0], parts[1])

    def to_text(self, names=("s1", "s2")) -> str:
        out = []
        for f, d in ((self.f1, "ds1"), (self.f2, "ds2")):
            if f.is_zero():
                continue
            out.append(f"({f.to_text(names)})*{d}")
        return " + ".join(out) if out else "0"

    def __add__(self, other: "PolyOneForm") -> "PolyOneForm":
        return PolyOneForm(self.f1 + other.f1, self.f2 + other.f2)

    def scale(self, c) -> "PolyOneForm":
        return PolyOneForm(self.f1.scale(c), self.f2.scale(c))

    def evaluate_at(self, point) -> tuple:
        return self.f1.evaluate(point), self.f2.evaluate(point)

    def map_coeffs(self, f) -> "PolyOneForm":
        return PolyOneForm(self.f1.map_coeffs(f), self.f2.map_coeffs(f))


def wedge(w1: PolyOneForm, w2: PolyOneForm) -> TruncSeries:
    """F with w1 ^ w2 = F ds1 ^ ds2."""
    return w1.f1 * w2.f2 - w1.f2 * w2.f1


@dataclass(frozen=True)
class JetRingForm:
    """g dz in the Kaehler differentials of E_m = k[z]/(z^{m+1}), reduced."""

    m: int
    coeffs: tuple  # low degree first, trailing zeros removed

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self) -> bool:
        return not self.is_zero()


def jetring_kills_top(m: int, p: int) -> bool:
    """Whether the relation (m+1) z^m dz = 0 kills z^m (i.e. p does not divide m+1)."""
    return (m + 1) % p != 0


def jetring_reduce(g: Sequence, m: int, p: int) -> JetRingForm:
    """Reduce g dz modulo (z^{m+1}, (m+1) z^m) dz in characteristic p."""
    if m < 0:
        raise SeriesError("jet order must be >= 0")
    keep = m if jetring_kills_top(m, p) else m + 1
    cs = list(g[:keep])
    while cs and not cs[-1]:
        cs.pop()
    return JetRingForm(m, tuple(cs))


def univariate_coeffs(h: TruncSeries, upto: int | None = None, zero=0) -> list:
    if h.nvars != 1:
        raise SeriesError("one-variable series expected")
    upto = h.T if upto is None else upto
    return [h.coeffs.get((j,), zero) for j in range(upto + 1)]
