"""Named worked examples, so experiments and the CLI can refer to them by name."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import inf

from . import fgroup
from .count import BranchSet, VarietyPresentation
from .jetint import BranchRecord, ord_on_branch
from .series import PolyOneForm, TruncSeries

# Curves with good reduction away from 2, 3, 37, 43, 53 (checked when the law is built).
ELLIPTIC_CURVES = {
    "y2+y=x3": (0, 0, 1, 0, 0),
    "37a": (0, 0, 1, -1, 0),
    "43a": (0, 1, 1, 0, 0),
    "53a": (1, -1, 1, 0, 0),
}


@dataclass
class JetPreset:
    omega1: PolyOneForm
    omega2: PolyOneForm
    branches: list[tuple[TruncSeries, TruncSeries]]
    multiplicities: list[int]
    reference: str = "omega1"

    def branch_records(self, p: int) -> list[BranchRecord]:
        """Orders of the reference form along each branch, over F_p."""
        w0 = self.omega1 if self.reference == "omega1" else self.omega2
        out = []
        for a, br in zip(self.multiplicities, self.branches):
            o = ord_on_branch(br, w0, p=p)
            out.append(BranchRecord(a=a, gg=0, param=br, ord_w0=o if isinstance(o, int) else inf))
        return out


def sharp_forms(T: int = 12) -> JetPreset:
    """omega1 = ds1 + s1^2 ds2, omega2 = ds1 + s2^2 ds2; the wedge vanishes on s2 = +-s1."""
    t = TruncSeries.var(0, 1, T)
    return JetPreset(
        PolyOneForm.parse("ds1 + s1^2*ds2"),
        PolyOneForm.parse("ds1 + s2^2*ds2"),
        branches=[(t, t), (t, -t)],
        multiplicities=[1, 1],
    )


@dataclass
class CurvePreset:
    name: str
    poly: str
    r: int
    genera: list[int]
    c_D: int
    branch_sets: list[BranchSet] = field(default_factory=list)
    bad_chars: tuple[int, ...] = (2,)

    def variety(self, q: int) -> VarietyPresentation:
        return VarietyPresentation.parse("projective", [self.poly], q, names=["x", "y", "z"])


def _t(T: int = 16) -> TruncSeries:
    return TruncSeries.var(0, 1, T)


def nodal_cubic() -> CurvePreset:
    # z y^2 = x^2 (x + z): the node at (0:0:1) has tangents y = +-x, both rational
    t = _t()
    return CurvePreset(
        "nodal-cubic",
        "z*y^2 - x^3 - x^2*z",
        r=1,
        genera=[0],
        c_D=1,
        branch_sets=[BranchSet((0, 0, 1), [(t, t), (t, -t)], [1, 1])],
    )


def cuspidal_cubic() -> CurvePreset:
    t = _t()
    return CurvePreset("cuspidal-cubic", "y^2*z - x^3", r=1, genera=[0], c_D=0, branch_sets=[BranchSet((0, 0, 1), [(t**2, t**3)], [1])], bad_chars=(2, 3))


def conic_pair() -> CurvePreset:
    """(x^2 + y^2 - 2 z^2)(2 x^2 + y^2 - 3 z^2): two smooth conics meeting transversally at (+-1 : +-1 : 1)."""
    t = _t()
    sets = []
    for sx in (1, -1):
        for sy in (1, -1):
            # one branch per conic, given by its tangent line in (x - sx, y - sy); for a
            # transversal crossing the tangent lines already determine delta = 1
            sets.append(BranchSet((sx, sy, 1), [(t.scale(sy), t.scale(-sx)), (t.scale(sy), t.scale(-2 * sx))], [1, 1]))
    return CurvePreset(
        "conic-pair",
        "(x^2 + y^2 - 2*z^2)*(2*x^2 + y^2 - 3*z^2)",
        r=2,
        genera=[0, 0],
        c_D=4,
        branch_sets=sets,
        bad_chars=(2, 3),
    )


CURVES = {"nodal-cubic": nodal_cubic, "cuspidal-cubic": cuspidal_cubic, "conic-pair": conic_pair}


def product_elliptic(p: int, T: int = 8) -> fgroup.FormalGroupLaw:
    """E1 x E2 x E3 from three distinct curves; X = E1 x E2 x {e} has local equation t3."""
    laws = [fgroup.elliptic(ELLIPTIC_CURVES[k], p, T) for k in ("37a", "43a", "53a")]
    return fgroup.product(*laws)


def multiplicative_group(p: int, T: int = 10) -> fgroup.FormalGroupLaw:
    return fgroup.multiplicative(p, T)


SYM2_GENUS3 = {"genus": 3, "p": 521}
PRESETS = ("rmk-sharp", "multiplicative-group", "nodal-cubic", "cuspidal-cubic", "conic-pair", "sym2-genus3", "product-elliptic")


def random_poly2(rng, deg: int = 3, T: int = 16, lo: int = -9, hi: int = 9) -> TruncSeries:
    """Random integer polynomial in (s1, s2) of total degree <= deg."""
    coeffs = {}
    for i in range(deg + 1):
        for j in range(deg + 1 - i):
            c = rng.randint(lo, hi)
            if c:
                coeffs[(i, j)] = c
    return TruncSeries(2, T, coeffs)


def random_form_pair(rng, p: int, deg: int = 3) -> tuple[PolyOneForm, PolyOneForm]:
    """Two random integer 1-forms whose wedge is a unit at the origin mod p."""
    while True:
        w1 = PolyOneForm(random_poly2(rng, deg), random_poly2(rng, deg))
        w2 = PolyOneForm(random_poly2(rng, deg), random_poly2(rng, deg))
        a, b = w1.evaluate_at((0, 0))
        c, d = w2.evaluate_at((0, 0))
        if (a * d - b * c) % p:
            return w1, w2
