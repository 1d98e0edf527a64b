"""Exact numbers a + b*sqrt(d) with rational a, b, ordered without floating point."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt


def _squarefree_split(d: int) -> tuple[int, int]:
    """d = k^2 * s with s squarefree (trial division; d is small in practice)."""
    k, s, f = 1, d, 2
    while f * f <= s:
        while s % (f * f) == 0:
            s //= f * f
            k *= f
        f += 1
    return k, s


def _sign(a: Fraction, b: Fraction, d: int) -> int:
    """Sign of a + b sqrt(d), d >= 2 squarefree, decided by squaring."""
    if b == 0:
        return (a > 0) - (a < 0)
    if a == 0:
        return 1 if b > 0 else -1
    if a > 0 and b > 0:
        return 1
    if a < 0 and b < 0:
        return -1
    # opposite signs: compare a^2 with b^2 d
    lhs, rhs = a * a, b * b * d
    if a > 0:
        return 1 if lhs > rhs else -1
    return 1 if rhs > lhs else -1


@dataclass(frozen=True)
class QuadSurd:
    a: Fraction
    b: Fraction = Fraction(0)
    d: int = 1

    def __post_init__(self):
        a, b, d = Fraction(self.a), Fraction(self.b), int(self.d)
        if d < 1:
            raise ValueError("radicand must be positive")
        k, s = _squarefree_split(d)
        b = b * k
        if s == 1:
            a, b = a + b, Fraction(0)
        if b == 0:
            s = 1
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", s)

    @classmethod
    def sqrt(cls, n: int) -> "QuadSurd":
        return cls(0, 1, n)

    def _other(self, o) -> "QuadSurd":
        if isinstance(o, QuadSurd):
            if o.d != 1 and self.d != 1 and o.d != self.d:
                raise ValueError(f"surds over sqrt({self.d}) and sqrt({o.d}) do not mix")
            return o
        if isinstance(o, (int, Fraction)):
            return QuadSurd(Fraction(o))
        return NotImplemented

    def _d(self, o: "QuadSurd") -> int:
        return self.d if self.d != 1 else o.d

    def __add__(self, o):
        o = self._other(o)
        if o is NotImplemented:
            return o
        return QuadSurd(self.a + o.a, self.b + o.b, self._d(o))

    __radd__ = __add__

    def __neg__(self):
        return QuadSurd(-self.a, -self.b, self.d)

    def __sub__(self, o):
        o = self._other(o)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        o = self._other(o)
        if o is NotImplemented:
            return o
        d = self._d(o)
        return QuadSurd(self.a * o.a + self.b * o.b * d, self.a * o.b + self.b * o.a, d)

    __rmul__ = __mul__

    def __truediv__(self, o):
        if isinstance(o, (int, Fraction)):
            return QuadSurd(self.a / o, self.b / o, self.d)
        o = self._other(o)
        d = self._d(o)
        # multiply by the conjugate
        den = o.a * o.a - o.b * o.b * d
        return self * QuadSurd(o.a / den, -o.b / den, d)

    def sign(self) -> int:
        return _sign(self.a, self.b, self.d)

    def _cmp(self, o) -> int:
        o = self._other(o)
        if o is NotImplemented:
            raise TypeError("cannot compare")
        return (self - o).sign()

    def __lt__(self, o):
        return self._cmp(o) < 0

    def __le__(self, o):
        return self._cmp(o) <= 0

    def __gt__(self, o):
        return self._cmp(o) > 0

    def __ge__(self, o):
        return self._cmp(o) >= 0

    def __eq__(self, o):
        if not isinstance(o, (QuadSurd, int, Fraction)):
            return NotImplemented
        try:
            return self._cmp(o) == 0
        except ValueError:
            return False

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def approx(self, bits: int = 64) -> Fraction:
        """Rational within 2^-bits * |b| of the value (display only)."""
        r = Fraction(isqrt(self.d << (2 * bits)), 1 << bits)
        return self.a + self.b * r

    def floor(self) -> int:
        n = int(self.approx() // 1)
        while self < n:
            n -= 1
        while self >= n + 1:
            n += 1
        return n

    def ceil(self) -> int:
        n = self.floor()
        return n if self == n else n + 1

    def __float__(self) -> float:
        return float(self.approx())

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        b = "" if self.b == 1 else ("-" if self.b == -1 else f"{self.b}*")
        body = f"{b}sqrt({self.d})"
        if self.a == 0:
            return body
        return f"{self.a}+{body}" if not body.startswith("-") else f"{self.a}{body}"

    def __repr__(self) -> str:
        return f"QuadSurd({self})"


def sqrt_prime_power(p: int, f: int) -> QuadSurd:
    """sqrt(p^f) exactly: an integer for even f, p^((f-1)/2) sqrt(p) otherwise."""
    if f % 2 == 0:
        return QuadSurd(p ** (f // 2))
    return QuadSurd(0, p ** ((f - 1) // 2), p)
