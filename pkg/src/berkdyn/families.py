"""One-parameter families z -> f_l(z): period curves, multipliers, bifurcation flags.

Symbolic work over Q[l] (iteration, dynatomic division, resultants, factoring)
goes through sympy; everything evaluated at a parameter point is p-adic.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache

import sympy as sp
from sympy.functions.combinatorial.numbers import mobius

from .berk import Disc, RadiusExp, TypeI, abs_exp, format_point, seminorm
from .dynamics import RationalMap
from .errors import (BerkError, CollisionRadiusExceeded, FactorDegreeTooLarge,
                     LeadingCoeffVanishes, MultipleRoot, NotRepelling, PrecisionExhausted,
                     Unsupported)
from .padic import poly as P
from .padic.field import FieldConfig
from .padic.newton import field_roots, newton_polygon, polygon_from_heights, residual_ok
from .padic.residue import is_square_poly_upto_const, pdeg, pgcd, pformat, ptrim
from .padic.scalar import PadicScalar, residue_field, scalar

Z, L, W = sp.symbols("z l w")

UNSTABLY_INDIFFERENT = "UNSTABLY_INDIFFERENT"
MULTIPLICITY_GT_1 = "MULTIPLICITY_GT_1"
OK = "OK"


def _qq(c) -> Fraction:
    c = sp.Rational(c)
    return Fraction(int(c.p), int(c.q))


def lpoly(expr) -> list:
    """Ascending Fraction coefficients of a polynomial in l."""
    p = sp.Poly(expr, L, domain=sp.QQ)
    if p.is_zero:
        return []
    cs = [_qq(c) for c in reversed(p.all_coeffs())]
    return P.trim(cs)


def zcoeffs(poly) -> list:
    """Ascending z-coefficients of a polynomial in z and l, each a Fraction list in l."""
    p = sp.Poly(sp.expand(poly), Z)
    return [lpoly(c) for c in reversed(p.all_coeffs())]


class AnalyticFamily:
    """f_l(z) = num(z, l) / den(z, l) with rational coefficients."""

    def __init__(self, expr):
        expr = sp.together(sp.sympify(expr))
        num, den = sp.fraction(expr)
        self.num = sp.expand(num)
        self.den = sp.expand(den)
        self.d = max(sp.degree(self.num, Z), sp.degree(self.den, Z))
        if self.d < 1:
            raise BerkError("family must depend on z")
        if sp.resultant(self.num, self.den, Z) == 0:
            raise BerkError("numerator and denominator share a factor")
        self.expr = expr

    @property
    def is_polynomial(self) -> bool:
        return sp.degree(self.den, Z) == 0

    def __repr__(self):
        return f"AnalyticFamily({self.expr})"

    def at(self, lam0, field: FieldConfig) -> RationalMap:
        """Specialized map at a type I parameter."""
        lam0 = scalar(field, lam0)
        num = [P.evaluate(P.to_field(c, field), lam0) for c in zcoeffs(self.num)]
        den = [P.evaluate(P.to_field(c, field), lam0) for c in zcoeffs(self.den)]
        if max(P.degree(num), P.degree(den)) != self.d:
            raise Unsupported("DegreeDrop: specialized map has smaller degree")
        return RationalMap(num, den, field)

    @lru_cache(maxsize=None)
    def iterate(self, n: int):
        """(N_n, D_n) with f^n = N_n / D_n, homogeneous composition."""
        if n == 1:
            return self.num, self.den
        N, D = self.iterate(n - 1)
        cn = sp.Poly(self.num, Z).all_coeffs()[::-1]
        cd = sp.Poly(self.den, Z).all_coeffs()[::-1]
        cn += [0] * (self.d + 1 - len(cn))
        cd += [0] * (self.d + 1 - len(cd))
        outN = sum(cn[i] * N ** i * D ** (self.d - i) for i in range(self.d + 1))
        outD = sum(cd[i] * N ** i * D ** (self.d - i) for i in range(self.d + 1))
        return sp.expand(outN), sp.expand(outD)


@dataclass(frozen=True)
class PeriodCurveSlice:
    phi: object   # sympy expression in z, l
    n: int
    hom_degree: int

    def specialize(self, lam0, field):
        return [P.evaluate(P.to_field(c, field), scalar(field, lam0)) for c in zcoeffs(self.phi)]


def period_curve(fam: AnalyticFamily, n: int) -> PeriodCurveSlice:
    N, D = fam.iterate(n)
    return PeriodCurveSlice(sp.expand(N - Z * D), n, fam.d ** n + 1)


@lru_cache(maxsize=None)
def _dynatomic(fam: AnalyticFamily, n: int):
    num, den = sp.Integer(1), sp.Integer(1)
    for m in sp.divisors(n):
        mu = int(mobius(n // m))
        phi = period_curve(fam, m).phi
        if mu == 1:
            num *= phi
        elif mu == -1:
            den *= phi
    q, r = sp.div(sp.expand(num), sp.expand(den), Z, L)
    if r != 0:
        raise BerkError("dynatomic division is not exact")
    return sp.expand(q)


def dynatomic(fam: AnalyticFamily, n: int):
    """Points of exact period n (generically)."""
    return _dynatomic(fam, n)


@lru_cache(maxsize=None)
def _period_factors(fam: AnalyticFamily, n: int):
    _, facs = sp.factor_list(dynatomic(fam, n), Z, L)
    out = [sp.expand(f) for f, _ in facs if sp.degree(f, Z) >= 1]
    return tuple(sorted(out, key=lambda f: (sp.degree(f, Z), sp.srepr(f))))


def period_factors(fam: AnalyticFamily, n: int):
    """Irreducible factors over Q(l) of the exact-period-n curve, in a fixed order."""
    return list(_period_factors(fam, n))


def monic_normalize(phi, x, field: FieldConfig):
    """Monic polynomial in z with the same roots near x, switching to w = 1/z if needed.

    Returns (chart, coefficients) with chart "z" or "1/z"; coefficients are
    p-adic at type I parameters and rational functions of l at disc points.
    """
    cs = zcoeffs(phi)
    for chart, coeffs in (("z", cs), ("1/z", cs[::-1])):
        coeffs = P.trim(coeffs) if chart == "z" else coeffs
        while coeffs and not coeffs[-1]:
            coeffs = coeffs[:-1]
        lead = coeffs[-1]
        if isinstance(x, TypeI):
            vals = [P.evaluate(P.to_field(c, field), x.coord) for c in coeffs]
            if vals[-1].is_zero:
                continue
            return chart, [v / vals[-1] for v in vals]
        if seminorm(P.to_field(lead, field), x) is not None:
            return chart, [(c, lead) for c in coeffs]
    raise LeadingCoeffVanishes("leading coefficient vanishes at x in both charts")


@lru_cache(maxsize=None)
def _multiplier_factor(fam: AnalyticFamily, n: int, phi):
    N, D = fam.iterate(n)
    dN, dD = sp.diff(N, Z), sp.diff(D, Z)
    top = sp.expand(dN * D - N * dD)
    bot = sp.expand(D * D)
    res = sp.resultant(phi, sp.expand(W * bot - top), Z)
    _, facs = sp.factor_list(sp.expand(res), W, L)
    out = sp.Integer(1)
    for f, _ in facs:
        if sp.degree(f, W) >= 1:
            out *= f
    return sp.expand(out)


def multiplier_polynomial(fam: AnalyticFamily, n: int, phi=None):
    """M(w, l) whose roots are the period-n multipliers on the factor phi.

    Each orbit contributes its multiplier once (the squarefree part is kept).
    With phi None the product over all exact-period-n factors is returned.
    """
    if phi is not None:
        return _multiplier_factor(fam, n, sp.expand(phi))
    out = sp.Integer(1)
    for f in period_factors(fam, n):
        out *= _multiplier_factor(fam, n, f)
    return sp.expand(out)


def wcoeffs(M) -> list:
    p = sp.Poly(M, W)
    return [lpoly(c) for c in reversed(p.all_coeffs())]


# ---- reduction at disc parameter points ----

def _lexp(coeffs, x: Disc, field):
    """Exponent of |A|_x for A in Q[l] (None for A = 0)."""
    if not coeffs:
        return None
    return seminorm(P.to_field(coeffs, field), x)


def _pi_power(field, k: int):
    return PadicScalar(field, k, 1, 0)


def reduce_lpoly(coeffs, x: Disc, field):
    """(m, red): |A|_x = p^-m and the reduction of A / (p^m) as a polynomial in l~."""
    RF = residue_field(field)
    if not coeffs:
        return None, []
    shifted = P.taylor_shift(P.to_field(coeffs, field), x.center)
    ex = {k: abs_exp(c) + k * x.rexp for k, c in enumerate(shifted) if not c.is_zero}
    m = min(ex.values())
    red = [RF.zero()] * len(shifted)
    for k, e in ex.items():
        if e == m:
            c = shifted[k]
            red[k] = (c / _pi_power(field, c.k)).reduce()
    return m, ptrim(red)


def is_square_at(coeffs, x, field) -> bool:
    """Square test for A in Q[l] in the completed residue field at x."""
    if isinstance(x, TypeI):
        return True
    m, red = reduce_lpoly(coeffs, x, field)
    if m is None:
        return True
    # H(x) is taken over the algebraic closure: |H(x)^x| contains p^Q and every
    # residue constant is a square.
    if x.type == 3:
        # |A|_x = |c| r^k for the one dominant monomial; residue field is constant
        return (len(red) - 1) % 2 == 0
    return is_square_poly_upto_const(red)


def _format_bivariate(rows, wvar="w", lvar="L") -> str:
    """rows[j] is the l~-polynomial multiplying w~^j."""
    terms = []
    for j in range(len(rows) - 1, -1, -1):
        r = ptrim(rows[j])
        if not r:
            continue
        cs = pformat(r, lvar)
        if j == 0:
            terms.append(cs if len(r) == 1 or "+" not in cs else f"({cs})")
            continue
        mono = wvar if j == 1 else f"{wvar}^{j}"
        if cs == "1":
            terms.append(mono)
        elif pdeg(r) == 0 or ("+" not in cs and " " not in cs):
            terms.append(f"{cs}*{mono}")
        else:
            terms.append(f"({cs})*{mono}")
    return " + ".join(terms) if terms else "0"


@dataclass
class UIResult:
    root_exps: list       # exponent of |w| per root (with multiplicity)
    verdicts: list        # bool per root, same order
    reduction_poly: str   # reduced multiplier polynomial on |w| = 1, or ""
    constant_roots: int = 0

    @property
    def any(self) -> bool:
        return any(self.verdicts)


def unstably_indifferent(fam: AnalyticFamily, n: int, x, field: FieldConfig, phi=None) -> UIResult:
    """Which multipliers at x reduce to the Gauss point (transcendental reduction)."""
    M = multiplier_polynomial(fam, n, phi)
    wc = wcoeffs(M)
    if isinstance(x, TypeI):
        vals = [P.evaluate(P.to_field(c, field), x.coord) for c in wc]
        vals = P.trim(vals)
        npg = newton_polygon(vals, field.prime)
        exps = [RadiusExp(v) for v in npg.root_valuations()] + [None] * npg.zero_order
        return UIResult(exps, [False] * len(exps), "")
    heights = [_lexp(c, x, field) for c in wc]
    npg = polygon_from_heights(heights)
    exps = list(npg.root_valuations()) + [None] * npg.zero_order
    exps = [RadiusExp.of(e) if e is not None else None for e in exps]
    seg = [(s, ln) for s, ln in npg.segments if s == 0]
    verdicts = [False] * len(exps)
    if not seg:
        return UIResult(exps, verdicts, "")
    # vertices of the slope-0 segment
    verts = list(npg.vertices)
    i0 = next(i for (i, h), (j, h2) in zip(verts, verts[1:]) if h == h2)
    i1 = i0 + seg[0][1]
    hstar = heights[i0]
    reds = {}
    for j in range(i0, i1 + 1):
        if heights[j] is not None and heights[j] == hstar:
            reds[j - i0] = reduce_lpoly(wc[j], x, field)[1]
    rows = [reds.get(j, []) for j in range(i1 - i0 + 1)]
    # constant roots: common roots of the l~-coefficient slices
    depth = max(len(r) for r in rows)
    RF = residue_field(field)
    g = None
    for ell in range(depth):
        s = ptrim([r[ell] if ell < len(r) else RF.zero() for r in rows])
        if not s:
            continue
        g = s if g is None else pgcd(g, s)
    nconst = pdeg(g) if g is not None else 0
    nunit = i1 - i0
    unit_idx = [k for k, e in enumerate(exps) if e is not None and e == 0]
    assert len(unit_idx) == nunit
    for k in unit_idx[nconst:]:
        verdicts[k] = True
    return UIResult(exps, verdicts, _format_bivariate(rows), nconst)


def _repelling(ui: UIResult) -> bool:
    return bool(ui.root_exps) and all(e is not None and e < 0 for e in ui.root_exps)


def discriminant_z(phi):
    return sp.expand(sp.discriminant(phi, Z))


def type1_multiplicity(fam: AnalyticFamily, n: int, x, field: FieldConfig, phi,
                       require_repelling=True) -> int:
    """Degree of the selected period factor's points over the residue field at x (<= 2)."""
    if require_repelling and not _repelling(unstably_indifferent(fam, n, x, field, phi)):
        raise NotRepelling("selected periodic points are not repelling at x")
    if isinstance(x, TypeI):
        return 1
    deg = sp.degree(phi, Z)
    if deg == 1:
        return 1
    if deg > 2:
        raise FactorDegreeTooLarge(f"period factor of degree {deg} over H(x)")
    delta = lpoly(discriminant_z(phi))
    return 1 if is_square_at(delta, x, field) else 2


def reduced_discriminant(phi, x, field) -> str:
    if isinstance(x, TypeI) or sp.degree(phi, Z) != 2:
        return ""
    m, red = reduce_lpoly(lpoly(discriminant_z(phi)), x, field)
    return pformat(red, "L")


# ---- continuation ----

def _specialize(phi, lam, field):
    return P.trim([P.evaluate(P.to_field(c, field), lam) for c in zcoeffs(phi)])


def _factor_through(fam, n, lam0, xi0, field):
    for n_ in [n]:
        for phi in period_factors(fam, n_):
            coeffs = _specialize(phi, lam0, field)
            if coeffs and residual_ok(coeffs, xi0):
                return phi
    # xi0 may have smaller exact period; fall back to the whole period curve
    return period_curve(fam, n).phi


def continue_periodic_point(fam: AnalyticFamily, n: int, lam0, xi0, lam1, field: FieldConfig):
    """Follow the simple root xi0 of Phi_n(lam0, .) to the parameter lam1."""
    lam0, lam1 = scalar(field, lam0), scalar(field, lam1)
    xi0 = scalar(field, xi0)
    phi = _factor_through(fam, n, lam0, xi0, field)
    delta = lpoly(discriminant_z(phi)) if sp.degree(phi, Z) >= 2 else None
    if delta is not None:
        for lam in (lam0, lam1):
            dv = P.evaluate(P.to_field(delta, field), lam)
            if dv.is_zero:
                raise MultipleRoot("discriminant vanishes: periodic points collide")
    h = _specialize(phi, lam1, field)
    t = P.taylor_shift(h, xi0)
    t = t + [PadicScalar.zero(field)] * (2 - len(t))
    h0, h1 = t[0], t[1]
    if h1.is_zero:
        raise MultipleRoot("derivative vanishes at the seed")
    if h0.is_zero:
        return xi0
    e1 = abs_exp(h1)
    # Newton converges to the unique root of |t| < R when |h0/h1| < R
    R = None
    for k, hk in enumerate(t[2:], start=2):
        ek = abs_exp(hk)
        if ek is None:
            continue
        r = (e1 - ek) / (k - 1)
        R = r if R is None or r > R else R
    step = abs_exp(h0) - e1
    if R is not None and not step > R:
        raise CollisionRadiusExceeded("parameter step leaves the root-separation radius")
    dh = P.deriv(h)
    z = xi0
    for _ in range(field.cap.bit_length() + 6):
        v = P.evaluate(h, z)
        if v.is_zero:
            break
        z = (z - v / P.evaluate(dh, z)).with_prec()
    if not residual_ok(h, z):
        raise PrecisionExhausted("continued root could not be certified")
    return z


# ---- scanning ----

@dataclass
class ScanRow:
    param: str
    period: int
    flag: str
    evidence: dict = dc_field(default_factory=dict)

    def to_json(self):
        return {"param": self.param, "period": self.period, "flag": self.flag,
                "evidence": self.evidence}


@dataclass
class BifurcationReport:
    rows: list

    def to_json(self):
        return [r.to_json() for r in self.rows]

    def flags(self):
        return {(r.param, r.period): r.flag for r in self.rows}


def _exp_json(e):
    if e is None:
        return "+inf"
    return e.to_json()


def scan_point(fam: AnalyticFamily, n: int, x, field: FieldConfig, steps=2) -> ScanRow:
    """Flag for one (parameter point, period) pair; errors become diagnostic rows."""
    label = format_point(x)
    try:
        return _scan_point(fam, n, x, field, label, steps)
    except BerkError as exc:
        flag = "UNSUPPORTED" if isinstance(exc, Unsupported) else "ERROR"
        return ScanRow(label, n, flag, {"multiplier_val": None, "reduction_poly": "",
                                        "m": None, "error": f"{type(exc).__name__}: {exc}"})


def _scan_point(fam, n, x, field, label, steps):
    if isinstance(x, TypeI):
        fam.at(x.coord, field)
    factors = period_factors(fam, n)
    best = None
    for phi in factors:
        ui = unstably_indifferent(fam, n, x, field, phi)
        if ui.any:
            e = RadiusExp(0)
            return ScanRow(label, n, UNSTABLY_INDIFFERENT,
                           {"multiplier_val": _exp_json(e), "reduction_poly": ui.reduction_poly,
                            "m": None})
        if _repelling(ui):
            m = type1_multiplicity(fam, n, x, field, phi, require_repelling=False)
            ev = {"multiplier_val": _exp_json(ui.root_exps[0]),
                  "reduction_poly": reduced_discriminant(phi, x, field), "m": m}
            if m > 1:
                best = ScanRow(label, n, MULTIPLICITY_GT_1, ev)
            elif best is None:
                best = ScanRow(label, n, OK, ev)
        elif best is None:
            e = min((r for r in ui.root_exps if r is not None), default=None)
            best = ScanRow(label, n, OK, {"multiplier_val": _exp_json(e),
                                          "reduction_poly": "", "m": 1 if isinstance(x, TypeI) else None})
    if best is None:
        best = ScanRow(label, n, OK, {"multiplier_val": None, "reduction_poly": "", "m": None})
    if best.flag == OK and isinstance(x, TypeI) and steps:
        best.evidence["continued"] = _exercise_continuation(fam, n, x, field, steps)
    return best


def _exercise_continuation(fam, n, x, field, steps) -> int:
    """Continue every field-rational exact-period-n point through small parameter steps."""
    lam0 = x.coord
    done = 0
    for phi in period_factors(fam, n):
        coeffs = _specialize(phi, lam0, field)
        try:
            roots = field_roots(coeffs, field)
        except BerkError:
            continue
        for xi in roots:
            lam, z = lam0, xi
            try:
                for k in range(1, steps + 1):
                    nxt = lam + scalar(field, field.prime) ** (k + 1)
                    z = continue_periodic_point(fam, n, lam, z, nxt, field)
                    lam = nxt
                done += 1
            except BerkError:
                pass
    return done


def _scan_task(args):
    return scan_point(*args)


def stability_scan(fam: AnalyticFamily, n_max: int, points, field: FieldConfig, jobs=1,
                   steps=2) -> BifurcationReport:
    tasks = [(x, n) for x in points for n in range(1, n_max + 1)]
    if jobs > 1 and len(tasks) > 1:
        from concurrent.futures import ProcessPoolExecutor
        # map() keeps input order, so output is independent of scheduling
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(_scan_task, [(fam, n, x, field, steps) for x, n in tasks]))
    else:
        rows = [scan_point(fam, n, x, field, steps) for x, n in tasks]
    return BifurcationReport(rows)
