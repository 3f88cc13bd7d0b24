"""Points of the Berkovich projective line and their metric data.

Radii are written ``r = p**(-e)`` and every absolute value is handled through
its exponent ``e``; an exponent is a number ``a + b*sqrt(2)`` with rational
``a, b`` so that radii outside ``p**Q`` (type III points) stay exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering

from .errors import (InfinityHasNoDiameter, NotNested, SamePoint, TypeIPoint,
                     TypeIVLimit, Unsupported)
from .padic import poly as P
from .padic.scalar import PadicScalar, format_literal, scalar


@total_ordering
class RadiusExp:
    """Exact number ``a + b*sqrt(2)``; as a radius exponent, r = p**-(a + b*sqrt2)."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = Fraction(a)
        self.b = Fraction(b)

    @classmethod
    def of(cls, x) -> "RadiusExp":
        return x if isinstance(x, RadiusExp) else cls(x)

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def sign(self) -> int:
        a, b = self.a, self.b
        sa = (a > 0) - (a < 0)
        sb = (b > 0) - (b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        return sa if a * a > 2 * b * b else sb

    def __add__(self, o):
        o = RadiusExp.of(o)
        return RadiusExp(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return RadiusExp(-self.a, -self.b)

    def __sub__(self, o):
        return self + (-RadiusExp.of(o))

    def __rsub__(self, o):
        return RadiusExp.of(o) - self

    def __mul__(self, k):
        if isinstance(k, RadiusExp):
            if k.b == 0:
                k = k.a
            elif self.b == 0:
                return k * self.a
            else:
                return RadiusExp(self.a * k.a + 2 * self.b * k.b, self.a * k.b + self.b * k.a)
        k = Fraction(k)
        return RadiusExp(self.a * k, self.b * k)

    __rmul__ = __mul__

    def __truediv__(self, k):
        if isinstance(k, RadiusExp):
            if k.b != 0:
                # multiply by the conjugate
                n = k.a * k.a - 2 * k.b * k.b
                return self * RadiusExp(k.a / n, -k.b / n)
            k = k.a
        k = Fraction(k)
        return RadiusExp(self.a / k, self.b / k)

    def __eq__(self, o):
        if isinstance(o, (int, Fraction)):
            o = RadiusExp(o)
        if not isinstance(o, RadiusExp):
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __lt__(self, o):
        return (self - RadiusExp.of(o)).sign() < 0

    def __hash__(self):
        return hash((self.a, self.b))

    def __float__(self):
        return float(self.a) + float(self.b) * 2 ** 0.5

    def __repr__(self):
        if self.b == 0:
            return str(self.a)
        return f"({self.a} + {self.b}*sqrt2)"

    def to_json(self):
        if self.b == 0:
            return str(self.a)
        return {"a": str(self.a), "b": str(self.b)}


def exp_min(*xs):
    """Smallest exponent (= largest absolute value); None entries mean |.| = 0."""
    vals = [x for x in xs if x is not None]
    return min(vals) if vals else None


def abs_exp(x, p: int | None = None):
    """Exponent of |x| (None for zero)."""
    if isinstance(x, PadicScalar):
        v = x.val_lower()
        return None if v is None or x.is_zero else RadiusExp(v)
    v = P.val_of(x, p)
    return None if v is None else RadiusExp(v)


# ---- points ----

class BerkPoint:
    kind = None

    @property
    def type(self) -> int | None:
        return None


@dataclass(frozen=True, eq=False)
class TypeI(BerkPoint):
    coord: PadicScalar
    kind = "I"

    @property
    def type(self):
        return 1

    def __eq__(self, other):
        if not isinstance(other, TypeI):
            return False
        return (self.coord - other.coord).is_zero

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Disc(BerkPoint):
    """zeta_{center, p**-rexp}: the sup-norm over the closed disc."""

    center: PadicScalar
    rexp: RadiusExp
    kind = "disc"

    def __post_init__(self):
        object.__setattr__(self, "rexp", RadiusExp.of(self.rexp))

    @property
    def type(self):
        return 2 if self.rexp.is_rational else 3

    @property
    def field(self):
        return self.center.field

    def contains(self, x) -> bool:
        """Is the type I point x in the closed disc?"""
        e = abs_exp(x - self.center)
        return e is None or e >= self.rexp

    def __eq__(self, other):
        if not isinstance(other, Disc):
            return False
        return self.rexp == other.rexp and self.contains(other.center)

    def __hash__(self):
        return hash(("disc", self.rexp))


@dataclass(frozen=True, eq=False)
class Infinity(BerkPoint):
    kind = "inf"

    @property
    def type(self):
        return 1

    def __eq__(self, other):
        return isinstance(other, Infinity)

    def __hash__(self):
        return hash("inf")


INF = Infinity()


def gauss_point(field) -> Disc:
    return Disc(PadicScalar.zero(field), RadiusExp(0))


def zeta(field, center, rexp) -> Disc:
    return Disc(scalar(field, center), RadiusExp.of(rexp))


# ---- operations ----

def diam(xi: BerkPoint):
    """Radius exponent of a disc point; None (radius 0) at type I points."""
    if isinstance(xi, Infinity):
        raise InfinityHasNoDiameter("diameter is undefined at infinity")
    if isinstance(xi, TypeI):
        return None
    return xi.rexp


def hyperbolic_distance(x1: BerkPoint, x2: BerkPoint) -> RadiusExp:
    """d_H in units of log p."""
    if not (isinstance(x1, Disc) and isinstance(x2, Disc)):
        raise TypeIPoint("hyperbolic distance to a type I point is infinite")
    m = exp_min(x1.rexp, x2.rexp, abs_exp(x1.center - x2.center))
    return -2 * m + x1.rexp + x2.rexp


def gauss_seminorm(coeffs, xi: Disc):
    """max_k |c_k| r^k for a polynomial written in powers of (z - center)."""
    p = xi.field.prime
    best = None
    for k, c in enumerate(coeffs):
        e = abs_exp(c, p)
        if e is None:
            continue
        t = e + k * xi.rexp
        best = t if best is None or t < best else best
    return best


def seminorm(coeffs, xi: BerkPoint):
    """|P|_xi for P written in powers of z (exponent, None for 0)."""
    if isinstance(xi, TypeI):
        return abs_exp(P.evaluate([scalar(xi.coord.field, c) for c in coeffs], xi.coord))
    if isinstance(xi, Disc):
        shifted = P.taylor_shift([scalar(xi.field, c) for c in coeffs], xi.center)
        return gauss_seminorm(shifted, xi)
    raise TypeIPoint("seminorm at infinity is not finite")


def _uniformizer_power(field, e: RadiusExp) -> PadicScalar:
    s = e.a * field.ram
    if not e.is_rational or s.denominator != 1:
        raise Unsupported(f"radius exponent {e} is outside the working field's value group")
    return PadicScalar(field, int(s), 1, 0)


@dataclass(frozen=True)
class TangentDir:
    base: Disc
    direction: object  # ResidueElem, or None for the direction toward infinity

    @property
    def is_infinity(self) -> bool:
        return self.direction is None


def tangent_direction(xi: Disc, target: BerkPoint) -> TangentDir:
    if not isinstance(xi, Disc) or xi.type != 2:
        raise Unsupported("tangent directions are modelled at type II points only")
    if isinstance(target, Infinity):
        return TangentDir(xi, None)
    if isinstance(target, Disc):
        if target == xi:
            raise SamePoint("target equals the base point")
        if target.rexp < xi.rexp or not xi.contains(target.center):
            return TangentDir(xi, None)
        point = target.center
    else:
        point = target.coord
        if not xi.contains(point):
            return TangentDir(xi, None)
    c = _uniformizer_power(xi.field, xi.rexp)
    return TangentDir(xi, ((point - xi.center) / c).reduce())


def nested_disc_limit(chain, limit_rexp=None) -> BerkPoint:
    """Limit point of a decreasing chain of closed discs ``[(center, rexp), ...]``.

    With ``limit_rexp`` given (or a constant tail of radii) the limit is the disc
    point of that radius; otherwise radii are taken to shrink to 0 and the limit
    is the type I point the centers converge to.
    """
    if not chain:
        raise NotNested("empty chain")
    chain = [(c, RadiusExp.of(r)) for c, r in chain]
    for (c0, r0), (c1, r1) in zip(chain, chain[1:]):
        if r1 < r0:
            raise NotNested("radii must be nonincreasing")
        e = abs_exp(c1 - c0)
        if e is not None and e < r0:
            raise NotNested("disc is not contained in its predecessor")
    last_c, last_r = chain[-1]
    if limit_rexp is None and len(chain) >= 2 and chain[-2][1] == last_r:
        limit_rexp = last_r
    if limit_rexp is None:
        # radii -> 0: successive centers are Cauchy by nestedness
        return TypeI(last_c)
    limit_rexp = RadiusExp.of(limit_rexp)
    if last_r > limit_rexp:
        raise NotNested("chain already smaller than the stated limit radius")
    # t_j -> diam: every sampled radius dominates the limit, and the tail
    # centers all lie within the limiting radius of one another
    tail = chain[len(chain) // 2:]
    for c, _ in tail:
        e = abs_exp(c - last_c)
        if e is not None and e < limit_rexp:
            raise TypeIVLimit("tail centers do not settle inside one disc of the limit radius")
    return Disc(last_c, limit_rexp)


# ---- literals ----

def format_scalar(x: PadicScalar) -> str:
    if x.exact is not None:
        return str(x.exact)
    return format_literal(x)


def format_rexp(e: RadiusExp) -> str:
    if e.is_rational:
        return f"p^-{e.a}" if e.a >= 0 else f"p^-({e.a})"
    if e.b < 0:
        return f"p^-({e.a} - {-e.b}*sqrt2)"
    return f"p^-({e.a} + {e.b}*sqrt2)"


def format_point(xi: BerkPoint) -> str:
    if isinstance(xi, Infinity):
        return "inf"
    if isinstance(xi, TypeI):
        return format_scalar(xi.coord)
    return f"zeta({format_scalar(xi.center)}, {format_rexp(xi.rexp)})"
