"""Command-line driver: every pipeline emits one JSON document {manifest, inputs_echo, result, checks}.

Exit codes: 0 success, 1 usage error, 2 hypothesis failure, 3 inconclusive.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import re
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from math import inf
from typing import Any

from . import __version__, bounds, count, fgroup, jetint, presets, zeroest
from .rings import LocalFieldParams, ResourceError, is_prime
from .series import CoeffParser, PolyOneForm, SeriesError, TruncSeries, parse_series

EXIT_OK, EXIT_USAGE, EXIT_HYPOTHESIS, EXIT_INCONCLUSIVE = 0, 1, 2, 3
DEFAULT_SEED = 20240607


class UsageError(Exception):
    pass


class HypothesisFailure(Exception):
    pass


class Inconclusive(Exception):
    def __init__(self, msg: str, result: dict | None = None):
        super().__init__(msg)
        self.result = result or {}


@dataclass
class Outcome:
    result: dict
    checks: list[dict]
    code: int = EXIT_OK


# ---------------------------------------------------------------------------
# structured input files
# ---------------------------------------------------------------------------


class SchemaError(UsageError):
    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


def _read_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def _branch_series(text: str, T: int, where: str, problems: list[str]) -> TruncSeries | None:
    try:
        return parse_series(str(text), nvars=1, T=T, names=["t"])
    except (SeriesError, ValueError) as exc:
        problems.append(f"{where}: {exc}")
        return None


SCHEMA_VERSION = 1


def load_inputs(path_or_obj, kind: str, T: int = 16):
    """Validate a branch file; every problem is reported with its JSON-pointer path.

    kind "weil": [{point, params: [[phi1, phi2], ...], field_ext}] -> list of BranchSet
    kind "jets": [{a, gg, params: [phi1, phi2], ord_w0?}] -> list of BranchRecord
    The list may be wrapped as {"schema_version": 1, "branches": [...]}.
    """
    obj = _read_json(path_or_obj) if isinstance(path_or_obj, str) else path_or_obj
    prefix = ""
    problems: list[str] = []
    if isinstance(obj, dict):
        ver = obj.get("schema_version", SCHEMA_VERSION)
        if ver != SCHEMA_VERSION:
            raise SchemaError([f"/schema_version: expected {SCHEMA_VERSION}, got {ver!r}"])
        if "branches" not in obj:
            raise SchemaError(["/branches: missing"])
        obj, prefix = obj["branches"], "/branches"
    if not isinstance(obj, list):
        raise SchemaError([f"{prefix or '/'}: expected a list"])
    out = []
    for i, item in enumerate(obj):
        here = f"{prefix}/{i}"
        if not isinstance(item, dict):
            problems.append(f"{here}: expected an object")
            continue
        if "params" not in item:
            problems.append(f"{here}/params: missing")
            continue
        if kind == "weil":
            if "point" not in item:
                problems.append(f"{here}/point: missing")
                continue
            params, exts = [], []
            raw_ext = item.get("field_ext", 1)
            for k, pr in enumerate(item["params"]):
                if not (isinstance(pr, list) and len(pr) == 2):
                    problems.append(f"{here}/params/{k}: expected a pair of series")
                    continue
                a = _branch_series(pr[0], T, f"{here}/params/{k}/0", problems)
                b = _branch_series(pr[1], T, f"{here}/params/{k}/1", problems)
                params.append((a, b))
                exts.append(raw_ext[k] if isinstance(raw_ext, list) else raw_ext)
            out.append(count.BranchSet(tuple(item["point"]), params, exts))
        elif kind == "jets":
            pr = item["params"]
            if not (isinstance(pr, list) and len(pr) == 2):
                problems.append(f"{here}/params: expected a pair of series")
                continue
            if "a" not in item:
                problems.append(f"{here}/a: missing")
                continue
            a = _branch_series(pr[0], T, f"{here}/params/0", problems)
            b = _branch_series(pr[1], T, f"{here}/params/1", problems)
            ordv = item.get("ord_w0")
            out.append(jetint.BranchRecord(a=int(item["a"]), gg=int(item.get("gg", 0)), param=(a, b), ord_w0=ordv))
        else:
            raise ValueError(f"unknown input kind {kind!r}")
    if problems:
        raise SchemaError(problems)
    return out


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from exc


def _fracs(text: str) -> list[Fraction]:
    try:
        return [Fraction(x.strip()) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated rationals, got {text!r}") from exc


def _prime(p: int) -> int:
    if not is_prime(p):
        raise UsageError(f"{p} is not prime")
    return p


def _series_text(s: TruncSeries, names=None) -> str:
    return s.to_text(names)


def _check(name: str, ok: bool, detail: str = "") -> dict:
    return {"name": name, "status": "pass" if ok else "fail", "detail": detail}


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _law_from_args(args) -> fgroup.FormalGroupLaw:
    p = _prime(args.p)
    if args.kind == "elliptic":
        if not args.a:
            raise UsageError("--a is required for elliptic laws")
        return fgroup.elliptic(_ints(args.a), p, args.order, args.prec)
    if args.kind == "product-elliptic":
        return presets.product_elliptic(p, args.order)
    return fgroup.construct(args.kind, p, args.order, args.prec, n=args.n)


def cmd_fgroup(args) -> Outcome:
    G = _law_from_args(args)
    names = ["t"] if G.n == 1 else [f"t{i + 1}" for i in range(G.n)]
    checks = []
    if args.action == "exp":
        ax = G.check_axioms(min(G.T, args.axiom_order) if G.n > 1 else None)
        for k, v in ax.items():
            checks.append(_check(k, v))
        v = G.verify_exp_log(homomorphism=G.n == 1)
        for k, ok in v.items():
            checks.append(_check(k, ok))
        for k, ok in G.check_growth().items():
            checks.append(_check(k, ok))
        result = {"law": [f.to_text() for f in G.F], "exp": [e.to_text(names) for e in G.exp()], "log": [l.to_text(names) for l in G.log()]}
    elif args.action == "mult":
        result = {"m": str(args.m), "psi": [s.to_text(names) for s in G.mult_by_m(args.m)]}
    elif args.action == "diff":
        result = {"m": str(args.m), "delta": [s.to_text(names) for s in G.iterated_difference(args.m)]}
        checks.append(_check("degree < m terms vanish", True))
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(args.action)
    code = EXIT_OK if all(c["status"] == "pass" for c in checks) else EXIT_HYPOTHESIS
    return Outcome(result, checks, code)


def cmd_zeros(args) -> Outcome:
    p = _prime(args.p)
    coeff = CoeffParser("Q")
    if args.action == "one":
        # the variable may be written z or x1
        var = "x1" if re.search(r"\bx1\b", args.series) else "z"
        h = parse_series(args.series, nvars=1, T=args.order, names=[var], coeff=coeff)
        tail = zeroest.TailGuard.polynomial() if args.tail == "polynomial" else zeroest.TailGuard.factorial(Fraction(args.mu))
        try:
            rn = zeroest.radius_norm(h, p, Fraction(args.rho), tail)
        except zeroest.HypothesisViolation as exc:
            raise HypothesisFailure(str(exc)) from exc
        except zeroest.ZeroPrecisionError as exc:
            raise Inconclusive(str(exc)) from exc
        return Outcome(rn.report(p), rn.checks)
    names = [f"x{i + 1}" for i in range(args.nvars)]
    H = parse_series(args.series, nvars=args.nvars, T=args.order, names=names, coeff=coeff)
    try:
        rep = zeroest.mv_zero_bound(H, _fracs(args.u), p, args.N, Fraction(args.mu), Fraction(args.rho))
    except zeroest.HypothesisViolation as exc:
        raise HypothesisFailure(str(exc)) from exc
    return Outcome(rep.as_dict(), rep.hypothesis_checks if hasattr(rep, "hypothesis_checks") else rep.checks)


def cmd_disk_bound(args) -> Outcome:
    p = _prime(args.p)
    params = LocalFieldParams(p, args.e, args.f)
    if args.N is not None:
        b = zeroest.disk_formula(args.N, params.lam)
        alt = 1 + (args.N - 1) / (1 - params.lam)
        ok = b == alt
        return Outcome(
            {"N": str(args.N), "lambda": str(params.lam), "bound_real": str(b), "bound_floor": str(b.numerator // b.denominator)},
            [_check("(N-lam)/(1-lam) = 1 + (N-1)/(1-lam)", ok, str(alt))],
        )
    if args.preset == "product-elliptic":
        G = presets.product_elliptic(p, args.order)
    elif args.preset == "multiplicative-group":
        G = presets.multiplicative_group(p, args.order)
    else:
        raise UsageError("choose --preset or --N")
    u = _fracs(args.u) if args.u else [Fraction(1)] * G.n
    eq = _ints(args.eq) if args.eq else [G.n]
    jet_m = None
    if args.link:
        gamma, _ = fgroup.OneParamSubgroup.normalized(G, u)
        jet = fgroup.reduce_jet_mod_p(gamma, min(p - 1, G.T))
        jet_m = jetint.jet_order_in_subvariety(jet, eq)
    rep = fgroup.disk_bound(G, u, eq, params, jet_link=jet_m)
    if rep.status == "inconclusive":
        raise Inconclusive("no unit coefficient among the local equations", rep.as_dict())
    return Outcome(rep.as_dict(), rep.checks)


def _forms(args) -> tuple[PolyOneForm, PolyOneForm, presets.JetPreset | None]:
    if args.preset == "rmk-sharp":
        pre = presets.sharp_forms()
        return pre.omega1, pre.omega2, pre
    if not (args.omega1 and args.omega2):
        raise UsageError("give --omega1 and --omega2, or --preset rmk-sharp")
    return PolyOneForm.parse(args.omega1), PolyOneForm.parse(args.omega2), None


def cmd_jets(args) -> Outcome:
    p = _prime(args.p)
    w1, w2, pre = _forms(args)
    x = _ints(args.x) if args.x else [0, 0]
    res = jetint.max_jet_order(w1, w2, p, x=x, m_cap=args.mcap, ext=args.ext, node_budget=args.budget)
    result = res.as_dict()
    checks = list(res.checks)
    records = None
    if args.branches:
        records = load_inputs(args.branches, "jets")
        for r in records:
            if r.ord_w0 is None:
                o = jetint.ord_on_branch(r.param, w1, p=p)
                r.ord_w0 = o if isinstance(o, int) else inf
    elif pre is not None and not any(x):
        records = pre.branch_records(p)
    if records is not None:
        try:
            b = jetint.overdetermined_bound(records, m_found=res.m if res.status == "exact" else None)
        except ValueError as exc:
            raise HypothesisFailure(str(exc)) from exc
        result["bound_thm_over"] = str(b)
        checks.append(_check("m <= overdetermined bound", res.m <= b, f"{res.m} <= {b}"))
    if res.status == "inconclusive":
        raise Inconclusive("node budget exhausted", result)
    return Outcome(result, checks)


def cmd_count(args) -> Outcome:
    if args.action == "delta":
        return cmd_delta(args)
    q = args.q
    if args.preset:
        cp = presets.CURVES[args.preset]()
        polys, projective = [cp.poly], True
    else:
        if not args.poly:
            raise UsageError("--poly or --preset required")
        polys, projective, cp = args.poly, args.projective, None
    names = args.vars.split(",") if args.vars else (["x", "y", "z"] if projective else ["x", "y"])
    try:
        V = count.VarietyPresentation.parse("projective" if projective else "affine", polys, q, names=names)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    checks: list[dict] = []
    if args.action == "points":
        N = count.count_points(V, args.n)
        return Outcome({"count": str(N), "q": str(q), "n": str(args.n)}, checks)
    if args.action == "zeta":
        counts = [count.count_points(V, n) for n in range(1, args.nmax + 1)]
        c_D = args.cd if args.cd is not None else (cp.c_D if cp else 0)
        z = count.zeta_ops(counts, c_D)
        result = z.as_dict()
        checks += z.checks
        if cp is not None:
            pd = count.pade_check(z.Zstar, 2 * sum(cp.genera), 2 * cp.r)
            checks.append(_check("rational fit of Z*", pd["ok"], f"[{2 * sum(cp.genera)}/{2 * cp.r}]"))
        code = EXIT_OK if all(c["status"] == "pass" for c in checks) else EXIT_HYPOTHESIS
        return Outcome(result, checks, code)
    if args.action == "weil":
        if args.branches:
            sets = load_inputs(args.branches, "weil")
        elif cp is not None:
            sets = cp.branch_sets
        else:
            raise UsageError("--branches required without --preset")
        r = args.r if args.r is not None else (cp.r if cp else 1)
        genera = _ints(args.genera) if args.genera else (cp.genera if cp else [0] * r)
        try:
            ad = count.a_d_count(V, sets, args.n)
        except count.MissingBranchData as exc:
            raise UsageError(str(exc)) from exc
        Q = q**args.n
        wb = count.weil_bound(r, genera, Q)
        ok = ad["A_D"] <= wb
        checks.append(_check("A_D <= (q+1)r + 2 sqrt(q) sum g", ok, f"{ad['A_D']} <= {wb}"))
        result = {k: (str(v) if not isinstance(v, list) else v) for k, v in ad.items()}
        result["weil_bound"] = str(wb)
        return Outcome(result, checks, EXIT_OK if ok else EXIT_HYPOTHESIS)
    raise UsageError(args.action)  # pragma: no cover


def cmd_delta(args) -> Outcome:
    p = _prime(args.q)
    if not args.branch:
        raise UsageError("count delta needs at least one --branch")
    branches = []
    for b in args.branch:
        parts = b.split(",")
        if len(parts) != 2:
            raise UsageError(f"branch {b!r} must be 'phi1,phi2'")
        branches.append(tuple(parse_series(x, nvars=1, T=args.order, names=["t"]) for x in parts))
    try:
        d = count.delta_invariant(branches, p)
    except count.DeltaNotCertified as exc:
        raise Inconclusive(str(exc)) from exc
    return Outcome({k: str(v) for k, v in d.items()}, [_check("r <= delta + 1", d["branches"] <= d["delta"] + 1)])


def cmd_bound(args) -> Outcome:
    kind = args.kind
    if args.preset == "sym2-genus3":
        if kind != "sym2":
            raise UsageError("--preset sym2-genus3 goes with 'bound sym2'")
        args.genus = 3
        if args.p is None:
            args.p = bounds.GENUS3_THRESHOLD
    if args.p is None:
        raise UsageError("--p is required")
    if kind == "surface":
        inp = bounds.SurfaceBoundInputs(
            p=_prime(args.p), c1sq=args.c1sq, e=args.e, f=args.f, n=args.n, NXk=args.nxk,
            degH2X=args.degH2X, degHKX=args.degHKX, degHn=args.degHn,
        )
        if inp.NXk is None and None not in (args.b1, args.b2, args.b3):
            _, inp.NXk = bounds.rh_point_upper(inp.p, inp.f, args.b1, args.b2, args.b3)
        try:
            res = bounds.main_bound(inp, formula_only=args.formula_only)
        except bounds.MissingInput as exc:
            raise UsageError(str(exc)) from exc
        except ValueError as exc:
            raise HypothesisFailure(str(exc)) from exc
        # the bound needs (i) or (ii); it is still emitted, flagged, when neither holds
        statuses = {c["name"]: c["status"] for c in res.checks}
        met = "pass" in (statuses.get("hyp_i"), statuses.get("hyp_ii"))
        result = res.as_dict()
        result["hypotheses_met"] = met
        return Outcome(result, res.checks, EXIT_OK if met or args.formula_only else EXIT_HYPOTHESIS)
    if kind == "rh":
        val, up = bounds.rh_point_upper(_prime(args.p), args.f, args.b1 or 0, args.b2 or 0, args.b3 or 0)
        return Outcome({"value": str(val), "upper": str(up), "rounding": "ceil"}, [])
    if kind == "sym2":
        rep = bounds.genus3_bound(args.p, args.count) if args.genus == 3 else bounds.sym2_bound(args.genus, args.p, args.count)
        inv = bounds.sym2_invariants(args.genus)
        result = rep.as_dict()
        result["invariants"] = {k: str(v) for k, v in inv.__dict__.items()}
        if args.genus == 3:
            gen = bounds.sym2_bound(3, args.p, args.count)
            result["general_threshold"] = str(inv.threshold)
            result["general_hypotheses_met"] = gen.hypotheses_met
        code = EXIT_OK if rep.hypotheses_met else EXIT_HYPOTHESIS
        return Outcome(result, rep.checks, code)
    if kind == "coleman":
        rep = bounds.coleman_bound(args.genus, args.p, args.count)
        return Outcome(rep.as_dict(), rep.checks, EXIT_OK if rep.hypotheses_met else EXIT_HYPOTHESIS)
    raise UsageError(kind)  # pragma: no cover


# ---------------------------------------------------------------------------
# self test
# ---------------------------------------------------------------------------


def _selftest_quick() -> list[dict]:
    from .rings import FiniteField, PadicNum

    out = []
    F5, F7, F4 = FiniteField(5), FiniteField(7), FiniteField(2, 2)
    out.append(_check("F5: 3 + 4 = 2", F5(3) + F5(4) == 2))
    out.append(_check("F7: 1/2 = 4", F7(2).inverse() == 4))
    w = F4.gen()
    out.append(_check("F4: w*w = w + 1", w * w == w + 1))
    a = PadicNum.from_rational(5**3 * 2, 5) + PadicNum.from_rational(5**3 * 3, 5)
    out.append(_check("val(5^3*2 + 5^3*3) = 4", a.v == 4))
    x1, x2 = TruncSeries.gens(2, 4)
    out.append(_check("compose x1*x2 at (z, z^2)", (x1 * x2).compose([TruncSeries.var(0, 1, 4), TruncSeries.var(0, 1, 4) ** 2]) == TruncSeries.var(0, 1, 4) ** 3))
    G = fgroup.additive(1, 5, 6)
    out.append(_check("additive Exp = Log = t", G.exp()[0] == G.log()[0] == TruncSeries.var(0, 1, 6)))
    M = fgroup.multiplicative(5, 6)
    t = TruncSeries.var(0, 1, 6)
    out.append(_check("multiplicative Psi^[3] = 3t + 3t^2 + t^3", M.mult_by_m(3)[0] == t.scale(3) + (t * t).scale(3) + t**3))
    out.append(_check("nu(c) = 0", zeroest.zero_bound_1var(TruncSeries.const(3, 1, 3), 5, 1, zeroest.TailGuard.polynomial()) == 0))
    out.append(_check("overdetermined bound, a = 3, ord = 1", jetint.overdetermined_bound([jetint.BranchRecord(3, 0, None, 1)]) == 6))
    out.append(_check("empty branch list gives 0", jetint.overdetermined_bound([]) == 0))
    out.append(_check("weil bound r=2, g=(0,0), q=7", count.weil_bound(2, [0, 0], 7) == 16))
    out.append(_check("rh upper, b = 0", bounds.rh_point_upper(7, 1, 0, 0, 0)[1] == 50))
    out.append(_check("zeta of N_n = 1 is 1/(1-T)", count.zeta_ops([1] * 5).Z == [1] * 6))
    return out


def _selftest_full(seed: int) -> list[dict]:
    out = []
    for p in (5, 7, 11, 13):
        for name, a in presets.ELLIPTIC_CURVES.items():
            G = fgroup.elliptic(a, p, 10)
            ok = all(G.check_axioms().values()) and all(G.verify_exp_log().values()) and all(G.check_growth().values())
            ok = ok and fgroup.log_from_invariant_differential(G) == G.log()[0]
            out.append(_check(f"formal group {name} over Z_{p}", ok))
        pre = presets.sharp_forms()
        r = jetint.max_jet_order(pre.omega1, pre.omega2, p)
        b = jetint.overdetermined_bound(pre.branch_records(p))
        out.append(_check(f"m((0,0)) = 2 = bound, p = {p}", r.m == 2 and b == 2 and r.status == "exact", f"m = {r.m}, bound = {b}"))
    rng = random.Random(seed)
    bad = 0
    for _ in range(200):
        p = rng.choice((5, 7, 11))
        cs = [rng.randint(-60, 60) for _ in range(rng.randint(2, 7))]
        if not any(cs[1:]):
            cs[1] = 1
        h = TruncSeries.from_univariate(cs)
        if h.is_zero():
            continue
        roots = zeroest.roots_in_pZp_with_multiplicity(cs, p)
        nu = zeroest.zero_bound_1var(h, p, 1, zeroest.TailGuard.polynomial())
        bad += roots > nu
    out.append(_check("root counts <= nu(h, 1/p) on 200 random polynomials", bad == 0, f"{bad} violations"))
    for key in ("nodal-cubic", "cuspidal-cubic", "conic-pair"):
        cp = presets.CURVES[key]()
        for q in (5, 7):
            ad = count.a_d_count(cp.variety(q), cp.branch_sets, 1)
            wb = count.weil_bound(cp.r, cp.genera, q)
            out.append(_check(f"{key}: A_D <= weil bound over F_{q}", ad["A_D"] <= wb, f"{ad['A_D']} <= {wb}"))
    viol = 0
    for _ in range(50):
        p = rng.choice((5, 7, 11, 13))
        w1, w2 = presets.random_form_pair(rng, p)
        viol += jetint.max_jet_order(w1, w2, p, m_cap=4).m != 0
    out.append(_check("unit wedge at the origin forces m = 0 (50 random pairs)", viol == 0, f"{viol} violations"))
    t = TruncSeries.var(0, 1, 40)
    for br, want in (([(t**2, t**3)], 1), ([(t**3, t**4)], 3), ([(t, t**2)], 0), ([(t, t), (t, -t)], 1)):
        d = count.delta_invariant(br, 5)["delta"]
        out.append(_check(f"delta of {[tuple(x.to_text(['t']) for x in b) for b in br]} = {want}", d == want, str(d)))
    inv = bounds.sym2_invariants(3)
    out.append(_check("sym2 genus 3 invariants", (inv.c1sq, inv.thetaK, inv.degHg, inv.degH2X, inv.degHKX) == (6, 6, 48, 24, 12)))
    out.append(_check("least prime above 512 is 521", bounds.GENUS3_THRESHOLD == 521))
    out.append(_check("genus 3 comparison with 7.1p", bounds.genus3_bound(521, 0).checks[1]["status"] == "pass"))
    out.append(_check("(8g-10)^g identity for 3 <= g <= 12", all(bounds.sym2_invariants(g).threshold == (8 * g - 10) ** g for g in range(3, 13))))
    from .rings import primes_between

    bad = [p for p in primes_between(7, 10**4) if not bounds.four_p_dominates(p)]
    out.append(_check("4p dominance for primes 7 <= p <= 10^4", not bad, f"{len(bad)} failures"))
    out.append(_check("disk formula p = 7, N = 3", zeroest.disk_formula(3, Fraction(1, 6)) == Fraction(17, 5)))
    return out


def cmd_selftest(args) -> Outcome:
    checks = _selftest_quick()
    if args.full:
        checks += _selftest_full(args.seed)
    ok = all(c["status"] == "pass" for c in checks)
    passed = sum(c["status"] == "pass" for c in checks)
    return Outcome({"passed": str(passed), "total": str(len(checks)), "mode": "full" if args.full else "quick"}, checks, EXIT_OK if ok else EXIT_HYPOTHESIS)


# ---------------------------------------------------------------------------
# parser and dispatch
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_help(sys.stderr)
        raise UsageError(message)


def _global_options(ap: argparse.ArgumentParser, default) -> None:
    top = default is None
    ap.add_argument("--json", dest="json_in", default=None if top else default, help="JSON file with arguments (keys are option names)")
    ap.add_argument("--out", default=None if top else default, help="write the JSON document here instead of standard output")
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED if top else default)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="chabsurf", description=__doc__.splitlines()[0])
    _global_options(ap, None)
    # the same options are accepted after the subcommand; SUPPRESS keeps the top-level value
    common = _Parser(add_help=False)
    _global_options(common, argparse.SUPPRESS)
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    def add(name: str, **kw) -> argparse.ArgumentParser:
        return sub.add_parser(name, parents=[common], **kw)

    f = add("fgroup", help="formal group laws, Exp and Log")
    f.add_argument("action", choices=["exp", "mult", "diff"])
    f.add_argument("--kind", default="elliptic", choices=["additive", "multiplicative", "elliptic", "product-elliptic"])
    f.add_argument("--a", help="a1,a2,a3,a4,a6")
    f.add_argument("--p", type=int, default=5)
    f.add_argument("--prec", type=int, default=None)
    f.add_argument("--order", type=int, default=10)
    f.add_argument("--n", type=int, default=1)
    f.add_argument("--m", type=int, default=3)
    f.add_argument("--axiom-order", type=int, default=4)
    f.set_defaults(func=cmd_fgroup)

    z = add("zeros", help="zero counts on p-adic balls")
    z.add_argument("action", choices=["one", "mv"])
    z.add_argument("--series", required=True)
    z.add_argument("--p", type=int, required=True)
    z.add_argument("--rho", default="1", help="radius p^-rho")
    z.add_argument("--mu", default="0", help="growth constant M = p^mu")
    z.add_argument("--tail", choices=["polynomial", "factorial"], default="polynomial")
    z.add_argument("--order", type=int, default=32)
    z.add_argument("--nvars", type=int, default=2)
    z.add_argument("--u", default="1,0")
    z.add_argument("--N", type=int, default=1)
    z.set_defaults(func=cmd_zeros)

    d = add("disk-bound", help="residue-disk bound")
    d.add_argument("--preset", choices=["product-elliptic", "multiplicative-group"])
    d.add_argument("--p", type=int, required=True)
    d.add_argument("--e", type=int, default=1)
    d.add_argument("--f", type=int, default=1)
    d.add_argument("--N", type=int, default=None, help="evaluate the formula for this N only")
    d.add_argument("--u", help="direction, comma separated rationals")
    d.add_argument("--eq", help="1-based local-equation coordinates")
    d.add_argument("--order", type=int, default=8)
    d.add_argument("--link", action="store_true", help="compare with the order of the reduced jet")
    d.set_defaults(func=cmd_disk_bound)

    j = add("jets", help="integral jets for two 1-forms")
    j.add_argument("action", choices=["mx"])
    j.add_argument("--preset", choices=["rmk-sharp"])
    j.add_argument("--omega1")
    j.add_argument("--omega2")
    j.add_argument("--p", type=int, required=True)
    j.add_argument("--x", help="chart point s1,s2")
    j.add_argument("--mcap", type=int, default=None)
    j.add_argument("--ext", type=int, default=1, choices=[1, 2])
    j.add_argument("--budget", type=int, default=200_000)
    j.add_argument("--branches", help="JSON branch file for the overdetermined bound")
    j.set_defaults(func=cmd_jets)

    c = add("count", help="point counts, zeta functions, A_D")
    c.add_argument("action", choices=["points", "zeta", "weil", "delta"])
    c.add_argument("--poly", action="append")
    c.add_argument("--preset", choices=sorted(presets.CURVES))
    c.add_argument("--projective", action="store_true")
    c.add_argument("--vars")
    c.add_argument("--q", type=int, required=True)
    c.add_argument("--n", type=int, default=1)
    c.add_argument("--nmax", type=int, default=4)
    c.add_argument("--cd", type=int, default=None)
    c.add_argument("--branches")
    c.add_argument("--r", type=int, default=None)
    c.add_argument("--genera")
    c.add_argument("--branch", action="append", help="delta: branch 'phi1,phi2' in t (repeatable)")
    c.add_argument("--order", type=int, default=40)
    c.set_defaults(func=cmd_count)

    b = add("bound", help="closed-form bounds")
    b.add_argument("kind", choices=["surface", "sym2", "coleman", "rh"])
    b.add_argument("--preset", choices=["sym2-genus3"], help="sym2 with genus 3 and p = 521 unless given")
    b.add_argument("--p", type=int, default=None)
    b.add_argument("--e", type=int, default=1)
    b.add_argument("--f", type=int, default=1)
    b.add_argument("--c1sq", type=int, default=1)
    b.add_argument("--nxk", type=int, default=None)
    b.add_argument("--n", type=int, default=None)
    b.add_argument("--degH2X", type=int, default=None)
    b.add_argument("--degHKX", type=int, default=None)
    b.add_argument("--degHn", type=int, default=None)
    b.add_argument("--b1", type=int, default=None)
    b.add_argument("--b2", type=int, default=None)
    b.add_argument("--b3", type=int, default=None)
    b.add_argument("--genus", type=int, default=3)
    b.add_argument("--count", type=int, default=0)
    b.add_argument("--formula-only", action="store_true")
    b.set_defaults(func=cmd_bound)

    s = add("selftest", help="built-in invariant suite")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--quick", action="store_true")
    g.add_argument("--full", action="store_true")
    s.set_defaults(func=cmd_selftest)
    return ap


def _merge_json_args(ap: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    args = ap.parse_args(argv)
    if args.json_in:
        extra = _read_json(args.json_in)
        if not isinstance(extra, dict):
            raise UsageError("--json file must hold an object of option values")
        for k, v in extra.items():
            key = k.replace("-", "_")
            if not hasattr(args, key):
                raise UsageError(f"/{k}: unknown option for {args.command}")
            setattr(args, key, v)
    return args


def _echo(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out", "json_in") and v is not None}


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = time.gmtime(int(epoch)) if epoch else time.gmtime()
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", t)


def run(argv: list[str]) -> tuple[int, dict, str | None]:
    """Parse and execute; returns (exit code, JSON document, --out target)."""
    ap = build_parser()
    out_path = None
    try:
        args = _merge_json_args(ap, argv)
        out_path = args.out
        if not args.command:
            raise UsageError("a subcommand is required")
        command = args.command + ("" if not hasattr(args, "action") else f" {args.action}")
        if getattr(args, "kind", None) and args.command == "bound":
            command = f"bound {args.kind}"
        manifest = {"command": command, "parameters": _echo(args), "version": __version__, "seed": args.seed, "timestamp": _timestamp()}
        try:
            out = args.func(args)
            code, result, checks = out.code, out.result, out.checks
        except Inconclusive as exc:
            code, result, checks = EXIT_INCONCLUSIVE, {"status": "inconclusive", "reason": str(exc), **exc.result}, []
        except HypothesisFailure as exc:
            code, result, checks = EXIT_HYPOTHESIS, {"status": "hypothesis failure", "reason": str(exc)}, []
        except ResourceError as exc:
            code, result, checks = EXIT_INCONCLUSIVE, {"status": "resource cap", "reason": str(exc)}, []
        doc = {"manifest": manifest, "inputs_echo": _echo(args), "result": result, "checks": checks}
        return code, doc, out_path
    except SchemaError as exc:
        return EXIT_USAGE, {"error": "schema", "problems": exc.problems}, out_path
    except (UsageError, SeriesError, fgroup.FormalGroupError) as exc:
        return EXIT_USAGE, {"error": "usage", "message": str(exc)}, out_path


def _exact(obj):
    """Numbers become exact strings; booleans and None stay JSON literals."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, (int, Fraction)):
        return str(obj)
    if isinstance(obj, float):
        return "inf" if obj == inf else repr(obj)
    if isinstance(obj, dict):
        return {str(k): _exact(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_exact(v) for v in obj]
    if isinstance(obj, str):
        return obj
    return str(obj)


def _dumps(doc: dict) -> str:
    return json.dumps(_exact(doc), indent=2, sort_keys=True) + "\n"


def main(argv: list[str] | None = None) -> int:
    code, doc, target = run(sys.argv[1:] if argv is None else argv)
    text = _dumps(doc)
    if target:
        with open(target, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
