"""Newton polygons and root finding in the working field."""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from ..errors import NoRootsInField, NotSquarefree, PrecisionExhausted, ZeroPolynomial
from . import poly as P
from .field import FieldConfig
from .residue import ResidueElem, pdivmod, peval, ptrim
from .scalar import PadicScalar, rational_guess, residue_field, scalar

# digits a certified root may fall short of the working precision
MARGIN = 12


@dataclass(frozen=True)
class NewtonPolygon:
    """Lower convex hull of (i, v(c_i)); ``zero_order`` counts vanishing at z = 0."""

    segments: tuple = ()  # (slope, length), slopes strictly increasing
    zero_order: int = 0
    vertices: tuple = dc_field(default=(), compare=False)

    def root_valuations(self):
        """Multiset of root valuations (negated slopes) as a sorted list."""
        out = []
        for slope, length in self.segments:
            out.extend([-slope] * length)
        return sorted(out)

    @property
    def total_length(self) -> int:
        return sum(length for _, length in self.segments)


def lower_hull(points):
    """Lower convex hull of points sorted by x; heights may be any ordered ring values."""
    hull = []
    for pt in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            x3, y3 = pt
            # drop the middle point unless it lies strictly below the chord
            if (y2 - y1) * (x3 - x1) >= (y3 - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def polygon_from_heights(heights) -> NewtonPolygon:
    """``heights[i]`` is the valuation of the i-th coefficient, None for zero."""
    pts = [(i, h) for i, h in enumerate(heights) if h is not None]
    if not pts:
        raise ZeroPolynomial("newton polygon of the zero polynomial")
    hull = lower_hull(pts)
    segs = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        segs.append(((y2 - y1) / (x2 - x1), x2 - x1))
    return NewtonPolygon(tuple(segs), pts[0][0], tuple(hull))


def newton_polygon(coeffs, p: int | None = None) -> NewtonPolygon:
    if p is None:
        p = next(c.field.prime for c in coeffs if isinstance(c, PadicScalar))
    return polygon_from_heights([P.val_of(c, p) for c in coeffs])


# ---- root finding ----

def _normalize(Q):
    """Divide by a coefficient of minimal valuation so Q is primitive over O_L."""
    best = None
    for c in Q:
        if c.is_zero:
            continue
        if best is None or c.valuation < best.valuation:
            best = c
    return [c / best for c in Q]


def _reduce_poly(Q):
    RF = residue_field(Q[0].field)
    out = []
    for c in Q:
        if c.is_zero or c.valuation > 0:
            out.append(RF.zero())
        else:
            out.append(c.reduce())
    return ptrim(out)


def _lift_residue(F: FieldConfig, r: ResidueElem) -> PadicScalar:
    x = PadicScalar.from_rational(F, r.c0)
    if r.c1:
        x = x + PadicScalar.theta(F) * r.c1
    return x


def _newton_lift(Q, y):
    dQ = P.deriv(Q)
    F = y.field
    for _ in range(F.cap.bit_length() + 4):
        q = P.evaluate(Q, y)
        if q.is_zero:
            break
        d = P.evaluate(dQ, y)
        y = (y - q / d).with_prec()
    return y


def _unit_disc_roots(Q, depth: int, max_depth: int, skip_zero_class=False):
    F = Q[0].field
    Q = _normalize(P.trim(Q))
    if len(Q) <= 1:
        return []
    red = _reduce_poly(Q)
    if len(red) <= 1:
        return []
    RF = residue_field(F)
    roots = []
    for r in RF.elements():
        if skip_zero_class and not r:
            continue
        m, cur = 0, red
        while len(cur) > 1 and not peval(cur, r):
            cur = pdivmod(cur, [-r, RF.one()])[0]
            m += 1
        if m == 0:
            continue
        lift = _lift_residue(F, r)
        if m == 1:
            roots.append(_newton_lift(Q, lift))
            continue
        if depth >= max_depth:
            raise NotSquarefree("roots do not separate within the working precision")
        pi = PadicScalar(F, 1, 1, 0)
        Q1 = P.substitute_scale(P.taylor_shift(Q, lift), pi)
        for y in _unit_disc_roots(Q1, depth + 1, max_depth):
            roots.append(lift + pi * y)
    return roots


def residual_ok(coeffs, z, margin: int = MARGIN) -> bool:
    """|P(z)| is below the dominant term at |z| by at least N - margin digits."""
    F = z.field
    terms = [P.val_of(c, F.prime) for c in coeffs]
    if z.is_exact_zero:
        return not coeffs or P.is_zero(coeffs[0])
    vz = z.valuation
    dom = min(t + i * vz for i, t in enumerate(terms) if t is not None)
    r = P.evaluate(coeffs, z)
    if r.is_exact_zero:
        return True
    return r.val_lower() >= dom + F.precision - margin


def _exact_if_rational(coeffs, z):
    if any(c.exact is None for c in coeffs):
        return z
    q = rational_guess(z)
    if q is None or P.evaluate([c.exact for c in coeffs], q) != 0:
        return z
    return PadicScalar.from_rational(z.field, q)


def hensel_roots(coeffs, target_valuation, field: FieldConfig | None = None):
    """All roots in the working field of valuation ``target_valuation``."""
    if field is None:
        field = next(c.field for c in coeffs if isinstance(c, PadicScalar))
    coeffs = [scalar(field, c) for c in coeffs]
    coeffs = P.trim(coeffs)
    if not coeffs:
        raise ZeroPolynomial("zero polynomial")
    t = Fraction(target_valuation)
    s = t * field.ram
    if s.denominator != 1:
        raise NoRootsInField(f"valuation {t} is not in the value group of the working field")
    pi_s = PadicScalar(field, int(s), 1, 0)
    Q = P.substitute_scale(coeffs, pi_s)
    ys = _unit_disc_roots(Q, 0, field.cap // 2, skip_zero_class=True)
    roots = []
    for y in ys:
        z = (pi_s * y).with_prec()
        if not residual_ok(coeffs, z):
            raise PrecisionExhausted("root could not be certified to working precision")
        dz = P.evaluate(P.deriv(coeffs), z)
        if dz.is_zero:
            raise NotSquarefree("multiple root")
        roots.append(_exact_if_rational(coeffs, z))
    if not roots:
        raise NoRootsInField(f"no roots of valuation {t} in the working field")
    return roots


def field_roots(coeffs, field: FieldConfig | None = None):
    """Every root in the working field (0 included once per vanishing order)."""
    if field is None:
        field = next(c.field for c in coeffs if isinstance(c, PadicScalar))
    coeffs = P.trim([scalar(field, c) for c in coeffs])
    npg = newton_polygon(coeffs, field.prime)
    roots = [PadicScalar.zero(field)] * npg.zero_order
    body = coeffs[npg.zero_order:]
    for slope, _ in npg.segments:
        try:
            roots.extend(hensel_roots(body, -slope, field))
        except NoRootsInField:
            pass
    return roots
