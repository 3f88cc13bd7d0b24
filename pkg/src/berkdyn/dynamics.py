"""Rational maps acting on the Berkovich line."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import sympy as sp

from .berk import (INF, Disc, Infinity, RadiusExp, TypeI, _uniformizer_power,
                   format_point, gauss_point)
from .errors import (BerkError, BranchLeavesField, IrreducibleFactorTooLarge, NotASquare,
                     NotFixed, OddValuation, PrecisionExhausted, Unsupported)
from .padic import poly as P
from .padic.field import FieldConfig
from .padic.newton import field_roots, newton_polygon, residual_ok
from .padic.residue import pdeg, pdivmod, pgcd, pformat, ptrim
from .padic.scalar import PadicScalar, format_literal, scalar, sqrt
from .series import push_rational


class DegenerateMap(BerkError):
    """F and G share a root: not a morphism of the stated degree."""


def _det(rows):
    """Determinant by elimination with largest-pivot choice."""
    m = [list(r) for r in rows]
    n = len(m)
    det = m[0][0] * 0 + 1
    for c in range(n):
        piv = None
        for r in range(c, n):
            if not m[r][c].is_zero and (piv is None or m[r][c].valuation < m[piv][c].valuation):
                piv = r
        if piv is None:
            return PadicScalar.zero(m[0][0].field)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det = det * m[c][c]
        for r in range(c + 1, n):
            if m[r][c].is_zero:
                continue
            t = m[r][c] / m[c][c]
            m[r] = [x - t * y for x, y in zip(m[r], m[c])]
    return det


def homogeneous_resultant(F, G, d):
    """Res of the degree-d forms with coefficient lists F, G (index i = X^i Y^(d-i))."""
    field = next(c.field for c in F + G if isinstance(c, PadicScalar))
    zero = PadicScalar.zero(field)
    rows = []
    for coeffs in (F, G):
        desc = list(reversed(coeffs))
        for i in range(d):
            rows.append([zero] * i + desc + [zero] * (d - 1 - i))
    return _det(rows)


class RationalMap:
    """z -> F(z,1)/G(z,1) with F, G homogeneous of degree d, scaled to max |coef| = 1."""

    def __init__(self, num, den, field: FieldConfig, check=True):
        num = [scalar(field, c) for c in num]
        den = [scalar(field, c) for c in den]
        d = max(P.degree(num), P.degree(den))
        if d < 1:
            raise DegenerateMap("constant map")
        num = num + [PadicScalar.zero(field)] * (d + 1 - len(num))
        den = den + [PadicScalar.zero(field)] * (d + 1 - len(den))
        best = min((c for c in num + den if not c.is_zero), key=lambda c: c.valuation)
        self.F = [c / best for c in num[:d + 1]]
        self.G = [c / best for c in den[:d + 1]]
        self.d = d
        self.field = field
        if check and homogeneous_resultant(self.F, self.G, d).is_zero:
            raise DegenerateMap("F and G have a common root")

    @classmethod
    def polynomial(cls, coeffs, field):
        return cls(coeffs, [1], field)

    @property
    def num(self):
        return P.trim(self.F)

    @property
    def den(self):
        return P.trim(self.G)

    def compose(self, g: "RationalMap") -> "RationalMap":
        """self o g."""
        gn, gd = g.F, g.G
        num, den = [], []
        for i in range(self.d + 1):
            term = P.mul(P.power(gn, i), P.power(gd, self.d - i))
            num = P.add(num, P.scale(term, self.F[i]))
            den = P.add(den, P.scale(term, self.G[i]))
        return RationalMap(num, den, self.field, check=False)

    def iterate(self, n: int) -> "RationalMap":
        if n < 1:
            raise ValueError("n must be at least 1")
        out = self
        for _ in range(n - 1):
            out = self.compose(out)
        return out

    def derivative_at(self, z: PadicScalar) -> PadicScalar:
        n, d = self.num, self.den
        dv = P.evaluate(d, z)
        top = P.evaluate(P.deriv(n), z) * dv - P.evaluate(n, z) * P.evaluate(P.deriv(d), z)
        return top / (dv * dv)

    def __repr__(self):
        return f"RationalMap(d={self.d})"


def evaluate(f: RationalMap, xi):
    if isinstance(xi, Infinity):
        X, Y = f.F[f.d], f.G[f.d]
    else:
        z = xi.coord if isinstance(xi, TypeI) else scalar(f.field, xi)
        X, Y = P.evaluate(f.F, z), P.evaluate(f.G, z)
    if Y.is_zero:
        if X.is_zero:
            raise PrecisionExhausted("both homogeneous coordinates vanish to working precision")
        return INF
    return TypeI(X / Y)


def push_disc_point(f: RationalMap, xi):
    """Image of any Berkovich point; disc points use the min-max seminorm formula."""
    if isinstance(xi, (Infinity, TypeI)):
        return evaluate(f, xi)
    return push_rational(f.F, f.G, xi)


@dataclass
class Reduction:
    num: list
    den: list
    degree: int
    nonconstant: bool

    def format(self, var="z") -> str:
        if not self.nonconstant:
            return "degenerate"
        if pdeg(self.den) == 0:
            return pformat([c / self.den[0] for c in self.num], var)
        return f"({pformat(self.num, var)})/({pformat(self.den, var)})"


def _reduce_pair(F, G):
    best = min((c for c in F + G if not c.is_zero), key=lambda c: c.valuation)
    RF = best.residue_field()

    def red(c):
        c = c / best
        return RF.zero() if c.is_zero or c.valuation > 0 else c.reduce()

    rn, rd = ptrim([red(c) for c in F]), ptrim([red(c) for c in G])
    if not rn or not rd:
        return Reduction(rn, rd, 0, False)
    g = pgcd(rn, rd)
    if pdeg(g) > 0:
        rn, rd = pdivmod(rn, g)[0], pdivmod(rd, g)[0]
    deg = max(pdeg(rn), pdeg(rd))
    return Reduction(rn, rd, deg, deg >= 1)


def reduction_at_gauss(f: RationalMap) -> Reduction:
    red = _reduce_pair(f.F, f.G)
    fixed = push_disc_point(f, gauss_point(f.field)) == gauss_point(f.field)
    if fixed != red.nonconstant:
        raise AssertionError("reduction disagrees with the Gauss-point pushforward")
    return red


def conjugate_to_gauss(f: RationalMap, xi: Disc):
    """(num, den) of L^-1 o f o L with L(z) = a + c z mapping the Gauss point to xi."""
    c = _uniformizer_power(f.field, xi.rexp)
    a = xi.center
    n = P.substitute_scale(P.taylor_shift(f.num, a), c)
    d = P.substitute_scale(P.taylor_shift(f.den, a), c)
    return P.sub(n, P.scale(d, a)), P.scale(d, c)


def local_degree(f: RationalMap, xi: Disc):
    """(degree, class) at a fixed type II point."""
    if not isinstance(xi, Disc):
        raise Unsupported("local degree is computed at disc points")
    if xi.type != 2:
        raise Unsupported("local degree at type III points is not modelled")
    if push_disc_point(f, xi) != xi:
        raise NotFixed(f"{format_point(xi)} is not fixed")
    n, d = conjugate_to_gauss(f, xi)
    red = _reduce_pair(n, d)
    return red.degree, ("indifferent" if red.degree == 1 else "repelling")


def period_polynomial(f: RationalMap, n: int):
    """Homogeneous Y F_n - X G_n as a list, index i = coefficient of X^i Y^(D+1-i)."""
    fn = f.iterate(n)
    D = fn.d
    zero = PadicScalar.zero(f.field)
    out = []
    for i in range(D + 2):
        a = fn.F[i] if i <= D else zero
        b = fn.G[i - 1] if i >= 1 else zero
        out.append(a - b)
    return out


# ---- periodic points ----

def classify_multiplier(e) -> str:
    """e is the exponent of |multiplier| (None for multiplier 0), |m| = p^-e."""
    if e is None or e > 0:
        return "attracting"
    return "indifferent" if e == 0 else "repelling"


@dataclass
class UnsplitRoots:
    """Roots of an irreducible quadratic factor over the working field."""

    factor: list        # monic, ascending
    abs_exp: RadiusExp  # shared exponent of |root|

    def to_json(self):
        return {"factor": [format_literal(c) if c.exact is None else str(c.exact)
                           for c in self.factor],
                "abs": self.abs_exp.to_json()}


@dataclass
class PeriodicPointRecord:
    point: object
    period: int
    multiplier_abs: RadiusExp | None   # exponent; None means multiplier 0
    cls: str
    local_degree: int | None = None
    count: int = 1

    def to_json(self):
        if isinstance(self.point, UnsplitRoots):
            pt = self.point.to_json()
        else:
            pt = format_point(self.point)
        m = "+inf" if self.multiplier_abs is None else self.multiplier_abs.to_json()
        out = {"point": pt, "period": self.period, "multiplier_abs": m, "class": self.cls}
        if self.local_degree is not None:
            out["local_degree"] = self.local_degree
        if self.count != 1:
            out["count"] = self.count
        return out


def _affine(phi):
    return P.trim(phi)


def _divisors(n):
    return [m for m in range(1, n) if n % m == 0]


def _exact_period(f, z, n, cache):
    for m in _divisors(n):
        if m not in cache:
            cache[m] = _affine(period_polynomial(f, m))
        if residual_ok(cache[m], z):
            return m
    return n


def _quadratic_multiplier(h: RationalMap, q):
    """Exponent of |h'(x)| at a root x of the monic quadratic q (Galois-invariant)."""
    beta, gamma = q[1], q[0]

    def red(poly):
        # poly mod q as (c0, c1) in the basis 1, x
        r = P.divmod_poly(poly, q)[1] if P.degree(poly) >= 2 else P.trim(poly)
        r = r + [PadicScalar.zero(h.field)] * (2 - len(r))
        return r[0], r[1]

    def norm(a, b):
        return a * a - a * b * beta + b * b * gamma

    n, d = h.num, h.den
    top = P.sub(P.mul(P.deriv(n), d), P.mul(n, P.deriv(d)))
    bot = P.mul(d, d)
    Nt, Nb = norm(*red(top)), norm(*red(bot))
    if Nt.is_zero:
        return None
    return RadiusExp((Nt.valuation - Nb.valuation) / 2)


def _split(poly, field):
    """Field roots of poly and the leftover cofactor."""
    roots = field_roots(poly, field)
    rest = poly
    for r in roots:
        rest = P.divmod_poly(rest, [-r, scalar(field, 1)])[0]
    return roots, P.trim(rest)


def _rational_factors(rest, field):
    """Monic factors of the leftover: over Q when the data are exact, else as is."""
    if len(rest) <= 1:
        return []
    if all(c.exact is not None for c in rest):
        x = sp.Symbol("x")
        expr = sum(sp.Rational(c.exact.numerator, c.exact.denominator) * x ** i
                   for i, c in enumerate(rest))
        out = []
        for fac, mult in sp.factor_list(expr, x)[1]:
            coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(sp.Poly(fac, x).all_coeffs())]
            out += [[scalar(field, c / coeffs[-1]) for c in coeffs]] * mult
        return out
    return [[c / rest[-1] for c in rest]]


def _unsplit_record(f, n, rest):
    if len(rest) - 1 > 2:
        npg = newton_polygon(rest, f.field.prime)
        raise IrreducibleFactorTooLarge(
            f"unsplit factor of degree {len(rest) - 1} with root valuations "
            f"{[str(v) for v in npg.root_valuations()]}")
    v = newton_polygon(rest, f.field.prime).root_valuations()[0]
    m = n
    for k in _divisors(n):
        sub = _affine(period_polynomial(f, k))
        if P.trim(P.divmod_poly(sub, rest)[1]) == []:
            m = k
            break
    e = _quadratic_multiplier(f.iterate(m), rest)
    return PeriodicPointRecord(UnsplitRoots(rest, RadiusExp(v)), m, e, classify_multiplier(e),
                               count=2)


def periodic_points(f: RationalMap, n: int, max_period: int = 4):
    """Type I points of period dividing n, with exact periods and multipliers."""
    if n < 1:
        raise ValueError("period must be at least 1")
    if n > max_period:
        raise Unsupported(f"period {n} exceeds the configured maximum {max_period}")
    fn = f.iterate(n)
    phi = period_polynomial(f, n)
    records = []
    cache = {}
    roots, rest = _split(_affine(phi), f.field)
    for z in roots:
        m = _exact_period(f, z, n, cache)
        lam = (fn if m == n else f.iterate(m)).derivative_at(z)
        e = None if lam.is_zero else RadiusExp(lam.valuation)
        records.append(PeriodicPointRecord(TypeI(z), m, e, classify_multiplier(e)))
    if phi[-1].is_zero:
        # infinity is periodic; multiplier G_{D-1}/F_D in the chart w = 1/z
        m = n
        for k in _divisors(n):
            if f.iterate(k).G[-1].is_zero:
                m = k
                break
        fm = f.iterate(m)
        lam = fm.G[fm.d - 1] / fm.F[fm.d]
        e = None if lam.is_zero else RadiusExp(lam.valuation)
        records.append(PeriodicPointRecord(INF, m, e, classify_multiplier(e)))
    too_large = []
    for factor in _rational_factors(rest, f.field):
        try:
            records.append(_unsplit_record(f, n, factor))
        except IrreducibleFactorTooLarge as exc:
            too_large.append(str(exc))
    if too_large:
        raise IrreducibleFactorTooLarge("; ".join(too_large), records)
    return records


# ---- Cantor coding for z^2 + c with |c| > 1 ----

def _branch_data(lam0: PadicScalar):
    if lam0.is_zero or not lam0.valuation < 0:
        raise BerkError("need |lambda0| > 1")
    try:
        s = sqrt(-lam0)
    except (NotASquare, OddValuation) as exc:
        raise BranchLeavesField(f"-lambda0 is not a square: {exc}") from None
    return s


def inverse_branch(lam0: PadicScalar, y: PadicScalar, letter: int, s=None) -> PadicScalar:
    """(-1)^letter * s * sqrt(1 - y/lam0), s the canonical root of -lam0."""
    if s is None:
        s = _branch_data(lam0)
    u = 1 - y / lam0
    try:
        r = sqrt(u)
    except (NotASquare, OddValuation) as exc:
        raise BranchLeavesField(str(exc)) from None
    out = s * r
    return -out if letter else out


def _letters(word: str):
    bad = set(word) - {"0", "1"}
    if bad:
        raise ValueError(f"word must be binary, got {sorted(bad)}")
    return [int(ch) for ch in word]


def cantor_coding(lam0, word: str, field: FieldConfig | None = None) -> TypeI:
    """Point with itinerary prefix ``word``; a trailing '...' asks for the periodic point."""
    if field is not None:
        lam0 = scalar(field, lam0)
    periodic = word.endswith("...") or word.endswith("…")
    word = word.rstrip(".…")
    letters = _letters(word)
    if not letters:
        raise ValueError("empty word")
    s = _branch_data(lam0)
    F = lam0.field
    if periodic:
        return TypeI(_periodic_coding(lam0, letters, s))
    x = PadicScalar.zero(F)
    for letter in reversed(letters):
        x = inverse_branch(lam0, x, letter, s).with_prec()
    return TypeI(x)


def _periodic_coding(lam0, block, s):
    F = lam0.field
    x = PadicScalar.zero(F)
    # each pass contracts by |lam0|^(-len/2)
    passes = int(F.cap / (-lam0.valuation * F.ram / 2 * len(block))) + 3
    for _ in range(passes):
        prev = x
        for letter in reversed(block):
            x = inverse_branch(lam0, x, letter, s).with_prec()
        if (x - prev).is_zero:
            break
    return x


def shift_word(word: str) -> str:
    return word[1:]
