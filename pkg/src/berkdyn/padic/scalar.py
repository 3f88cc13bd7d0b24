"""Capped-relative-precision scalars of the working field.

A nonzero scalar is ``pi**k * (a + b*theta)`` where ``pi`` is the uniformizer,
``a + b*theta`` is a unit known to ``prec`` uniformizer digits, and the integers
``a, b`` are kept modulo ``p**(N + guard)``.  Besides exact zero there is an
internal "indistinct zero" state ``O(pi**k)`` produced when cancellation eats
every tracked digit.  Python operators are lax and may produce it; ``arith``
is the checked entry point and raises ``PrecisionExhausted`` instead.
"""
from __future__ import annotations

from fractions import Fraction
from math import isqrt

from ..errors import DivisionByZero, NotASquare, NotIntegral, OddValuation, PrecisionExhausted
from .field import MIN_DIGITS, FieldConfig, vp_int
from .residue import ResidueField

NONZERO, EXACT_ZERO, FUZZY_ZERO = 0, 1, 2
_EXACT_BITS = 2048
_DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"


def _vp_mod(n: int, p: int, M: int) -> int | None:
    n %= M
    if n == 0:
        return None
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


class _Ring:
    """Unit arithmetic on pairs (a, b) ~ a + b*theta modulo p**(N+guard)."""

    def __init__(self, F: FieldConfig):
        self.F = F
        self.p = F.prime
        self.M = F.modulus
        self.D = F.theta_sq or 0
        self.ram = F.ram
        self.ud = (self.D // self.p) if F.ram == 2 else None
        self.ud_inv = pow(self.ud, -1, self.M) if F.ram == 2 else None

    def mul(self, a, b, c, d):
        M = self.M
        return (a * c + self.D * b * d) % M, (a * d + b * c) % M

    def inv(self, a, b):
        M = self.M
        n = (a * a - self.D * b * b) % M
        ni = pow(n, -1, M)
        return (a * ni) % M, (-b * ni) % M

    def val(self, a, b):
        p, M = self.p, self.M
        va, vb = _vp_mod(a, p, M), _vp_mod(b, p, M)
        if self.ram == 1:
            vals = [v for v in (va, vb) if v is not None]
        else:
            vals = [v for v in (None if va is None else 2 * va, None if vb is None else 2 * vb + 1)
                    if v is not None]
        return min(vals) if vals else None

    def shift_up(self, a, b, j):
        if j == 0:
            return a, b
        M, p = self.M, self.p
        if self.ram == 1:
            s = pow(p, j, M)
            return (a * s) % M, (b * s) % M
        i, odd = divmod(j, 2)
        s = pow(self.D, i, M)
        a, b = (a * s) % M, (b * s) % M
        if odd:
            a, b = (b * self.D) % M, a
        return a, b

    def shift_down(self, a, b, j):
        if j == 0:
            return a % self.M, b % self.M
        p, M = self.p, self.M
        if self.ram == 1:
            s = p ** j
            return (a // s) % M, (b // s) % M
        i, odd = divmod(j, 2)
        if i:
            s = p ** i
            ui = pow(self.ud_inv, i, M)
            a, b = ((a // s) * ui) % M, ((b // s) * ui) % M
        if odd:
            a, b = b, ((a // p) * self.ud_inv) % M
        return a, b


_RINGS: dict = {}


def _ring(F: FieldConfig) -> _Ring:
    r = _RINGS.get(F)
    if r is None:
        r = _RINGS[F] = _Ring(F)
    return r


class PadicScalar:
    __slots__ = ("field", "k", "a", "b", "prec", "state", "exact")

    def __init__(self, field: FieldConfig, k=0, a=0, b=0, prec=None, state=NONZERO, exact=None):
        self.field = field
        self.k = k
        self.a = a
        self.b = b
        self.prec = field.cap if prec is None else prec
        self.state = state
        self.exact = exact

    # ---- constructors ----
    @classmethod
    def zero(cls, field):
        return cls(field, state=EXACT_ZERO, exact=Fraction(0))

    @classmethod
    def fuzzy_zero(cls, field, k):
        return cls(field, k=k, prec=0, state=FUZZY_ZERO)

    @classmethod
    def from_rational(cls, field: FieldConfig, x) -> "PadicScalar":
        x = Fraction(x)
        if x == 0:
            return cls.zero(field)
        p = field.prime
        R = _ring(field)
        num, den = x.numerator, x.denominator
        vn, vd = vp_int(num, p), vp_int(den, p)
        v = vn - vd
        u = (num // p ** vn) * pow(den // p ** vd, -1, R.M) % R.M
        if field.ram == 2:
            # p = theta^2 / ud
            u = u * pow(R.ud_inv, v, R.M) % R.M if v >= 0 else u * pow(R.ud, -v, R.M) % R.M
            return cls(field, 2 * v, u, 0, exact=x)
        return cls(field, v, u, 0, exact=x)

    @classmethod
    def theta(cls, field: FieldConfig) -> "PadicScalar":
        """The adjoined square root of ``field.ext_square``'s normal form."""
        if not field.has_ext:
            raise NotASquare("no quadratic extension configured")
        if field.ram == 2:
            return cls(field, 1, 1, 0)
        return cls(field, 0, 0, 1)

    def coerce(self, other):
        if isinstance(other, PadicScalar):
            return other
        if isinstance(other, (int, Fraction)):
            return PadicScalar.from_rational(self.field, other)
        return NotImplemented

    # ---- state ----
    @property
    def is_exact_zero(self) -> bool:
        return self.state == EXACT_ZERO

    @property
    def is_fuzzy_zero(self) -> bool:
        return self.state == FUZZY_ZERO

    @property
    def is_zero(self) -> bool:
        """Exactly zero or indistinguishable from zero at the tracked precision."""
        return self.state != NONZERO

    @property
    def valuation(self) -> Fraction:
        if self.state == EXACT_ZERO:
            raise ValueError("valuation of exact zero")
        if self.state == FUZZY_ZERO:
            raise PrecisionExhausted(f"valuation undetermined beyond O(p^{Fraction(self.k, self.field.ram)})")
        return Fraction(self.k, self.field.ram)

    @property
    def abs_prec(self):
        """Absolute precision in p-adic digits (None for exact zero)."""
        if self.state == EXACT_ZERO:
            return None
        if self.state == FUZZY_ZERO:
            return Fraction(self.k, self.field.ram)
        return Fraction(self.k + self.prec, self.field.ram)

    def val_lower(self):
        """Exact valuation, the precision bound for an indistinct zero, None for 0."""
        if self.state == EXACT_ZERO:
            return None
        return Fraction(self.k, self.field.ram)

    @property
    def unit_digits(self) -> int:
        return self.a % self.field.prime ** max(-(-self.prec // self.field.ram), 1)

    @property
    def precision(self) -> Fraction:
        return Fraction(self.prec, self.field.ram)

    def with_prec(self, prec=None):
        """Same digits, relative precision reset (used once Hensel certifies a root)."""
        if self.state != NONZERO:
            return self
        return PadicScalar(self.field, self.k, self.a, self.b,
                           self.field.cap if prec is None else prec, NONZERO, self.exact)

    # ---- arithmetic (lax) ----
    def __neg__(self):
        if self.state != NONZERO:
            return self
        M = self.field.modulus
        ex = -self.exact if self.exact is not None else None
        return PadicScalar(self.field, self.k, (-self.a) % M, (-self.b) % M, self.prec, NONZERO, ex)

    def __add__(self, other):
        y = self.coerce(other)
        if y is NotImplemented:
            return y
        x = self
        if x.state == EXACT_ZERO:
            return y
        if y.state == EXACT_ZERO:
            return x
        ex = _exact(x, y, "+")
        if ex is not None and ex == 0:
            return PadicScalar.zero(x.field)
        if x.state == FUZZY_ZERO or y.state == FUZZY_ZERO:
            if x.state == FUZZY_ZERO and y.state == FUZZY_ZERO:
                return PadicScalar.fuzzy_zero(x.field, min(x.k, y.k))
            z, w = (x, y) if x.state == FUZZY_ZERO else (y, x)
            if z.k <= w.k:
                return PadicScalar.fuzzy_zero(x.field, z.k)
            return PadicScalar(x.field, w.k, w.a, w.b, min(w.prec, z.k - w.k))
        R = _ring(x.field)
        k = min(x.k, y.k)
        a1, b1 = R.shift_up(x.a, x.b, x.k - k)
        a2, b2 = R.shift_up(y.a, y.b, y.k - k)
        A = min(x.k + x.prec, y.k + y.prec) - k
        sa, sb = (a1 + a2) % R.M, (b1 + b2) % R.M
        v = R.val(sa, sb)
        if v is None or v >= A:
            return PadicScalar.fuzzy_zero(x.field, k + A)
        ua, ub = R.shift_down(sa, sb, v)
        return PadicScalar(x.field, k + v, ua, ub, min(A - v, x.field.cap), NONZERO, ex)

    __radd__ = __add__

    def __sub__(self, other):
        y = self.coerce(other)
        if y is NotImplemented:
            return y
        return self + (-y)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        y = self.coerce(other)
        if y is NotImplemented:
            return y
        x = self
        if x.state == EXACT_ZERO or y.state == EXACT_ZERO:
            return PadicScalar.zero(x.field)
        if x.state == FUZZY_ZERO or y.state == FUZZY_ZERO:
            return PadicScalar.fuzzy_zero(x.field, x.k + y.k)
        R = _ring(x.field)
        a, b = R.mul(x.a, x.b, y.a, y.b)
        return PadicScalar(x.field, x.k + y.k, a, b, min(x.prec, y.prec), NONZERO, _exact(x, y, "*"))

    __rmul__ = __mul__

    def inverse(self):
        if self.state == EXACT_ZERO:
            raise DivisionByZero("division by exact zero")
        if self.state == FUZZY_ZERO:
            raise PrecisionExhausted("division by a value indistinguishable from zero")
        a, b = _ring(self.field).inv(self.a, self.b)
        ex = 1 / self.exact if self.exact is not None else None
        return PadicScalar(self.field, -self.k, a, b, self.prec, NONZERO, ex)

    def __truediv__(self, other):
        y = self.coerce(other)
        if y is NotImplemented:
            return y
        return self * y.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = PadicScalar.from_rational(self.field, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        y = self.coerce(other)
        if y is NotImplemented:
            return NotImplemented
        return (self - y).is_zero

    __hash__ = None

    def __bool__(self):
        return self.state == NONZERO

    # ---- residue field ----
    def residue_field(self) -> ResidueField:
        return residue_field(self.field)

    def reduce(self):
        """Image in the residue field (valuation must be >= 0)."""
        RF = residue_field(self.field)
        if self.state == EXACT_ZERO:
            return RF.zero()
        if self.k < 0:
            if self.state == FUZZY_ZERO:
                raise PrecisionExhausted("residue undetermined")
            raise NotIntegral(f"valuation {self.valuation} < 0")
        if self.k > 0:
            return RF.zero()
        if self.state == FUZZY_ZERO:
            raise PrecisionExhausted("residue undetermined")
        if self.field.ram == 2:
            return RF(self.a)
        return RF(self.a, self.b)

    def sqrt(self):
        return sqrt(self)

    def __repr__(self):
        if self.state == EXACT_ZERO:
            return "0"
        if self.state == FUZZY_ZERO:
            return f"O(p^{Fraction(self.k, self.field.ram)})"
        if self.exact is not None:
            return f"{self.exact}"
        return format_literal(self)


def _exact(x, y, op):
    if x.exact is None or y.exact is None:
        return None
    r = x.exact + y.exact if op == "+" else x.exact * y.exact
    if r.numerator.bit_length() + r.denominator.bit_length() > _EXACT_BITS:
        return None
    return r


def residue_field(F: FieldConfig) -> ResidueField:
    if F.unramified_ext:
        return ResidueField(F.prime, F.theta_sq % F.prime)
    return ResidueField(F.prime)


def scalar(field: FieldConfig, x) -> PadicScalar:
    if isinstance(x, PadicScalar):
        return x
    return PadicScalar.from_rational(field, x)


def arith(x: PadicScalar, y: PadicScalar, op: str) -> PadicScalar:
    """Checked arithmetic: raises instead of returning fewer than MIN_DIGITS digits."""
    if x.field != y.field:
        raise ValueError("operands live in different working fields")
    if op == "add":
        z = x + y
    elif op == "sub":
        z = x - y
    elif op == "mul":
        z = x * y
    elif op == "div":
        z = x / y
    else:
        raise ValueError(f"unknown op {op!r}")
    if z.state == FUZZY_ZERO:
        raise PrecisionExhausted(f"{op}: cancellation consumed all tracked digits")
    if z.state == NONZERO and z.prec < MIN_DIGITS * z.field.ram:
        raise PrecisionExhausted(f"{op}: only {z.precision} digits left")
    return z


def sqrt(x: PadicScalar) -> PadicScalar:
    """Square root whose unit part reduces to the residue root with the smallest key."""
    F = x.field
    if x.state == EXACT_ZERO:
        return x
    if x.state == FUZZY_ZERO:
        raise PrecisionExhausted("square root of a value indistinguishable from zero")
    if x.k % 2:
        raise OddValuation(f"valuation {x.valuation} is not in 2*(value group)")
    R = _ring(F)
    RF = residue_field(F)
    wbar = RF(x.a) if F.ram == 2 else RF(x.a, x.b)
    r = wbar.sqrt()
    if r is None:
        raise NotASquare(f"residue {wbar!r} is not a square in F_{RF.order}")
    ya, yb = r.c0, r.c1
    if F.ram == 2:
        yb = 0
    half = pow(2, -1, R.M)
    steps = max(F.cap, 2).bit_length() + 3
    for _ in range(steps):
        ia, ib = R.inv(ya, yb)
        qa, qb = R.mul(x.a, x.b, ia, ib)
        ya, yb = ((ya + qa) * half) % R.M, ((yb + qb) * half) % R.M
    ex = None
    if x.exact is not None and x.exact > 0:
        n, d = x.exact.numerator, x.exact.denominator
        sn, sd = isqrt(n), isqrt(d)
        if sn * sn == n and sd * sd == d:
            cand = PadicScalar.from_rational(F, Fraction(sn, sd))
            ex = Fraction(sn, sd) if _same_unit(cand, x.k // 2, ya, yb) else -Fraction(sn, sd)
    return PadicScalar(F, x.k // 2, ya, yb, x.prec, NONZERO, ex)


def _same_unit(c, k, a, b):
    p = c.field.prime
    return c.k == k and (c.a - a) % p == 0 and (c.b - b) % p == 0


def rational_guess(x: PadicScalar):
    """Small-height rational agreeing with x to its precision, or None."""
    if x.state != NONZERO or x.b % x.field.modulus or x.field.ram != 1:
        return None
    if x.exact is not None:
        return x.exact
    p = x.field.prime
    M = p ** x.prec
    # extended Euclid stopped at the half-size remainder
    r0, r1, t0, t1 = M, x.a % M, 0, 1
    bound = isqrt(M // 2)
    while r1 > bound:
        q = r0 // r1
        r0, r1, t0, t1 = r1, r0 - q * r1, t1, t0 - q * t1
    if t1 == 0 or abs(t1) > bound:
        return None
    return Fraction(r1, t1) * Fraction(p) ** x.k


def digits_base_p(n: int, p: int, count: int) -> str:
    if p > len(_DIGITS):
        raise ValueError("digit strings support p <= 36")
    out = []
    for _ in range(count):
        out.append(_DIGITS[n % p])
        n //= p
    return "".join(reversed(out))


def format_literal(x: PadicScalar) -> str:
    """``padic(val, digits[, theta_digits])`` with digits most significant first."""
    if x.state == EXACT_ZERO:
        return "0"
    if x.state == FUZZY_ZERO:
        raise PrecisionExhausted("cannot print an indistinct zero")
    F = x.field
    n = -(-x.prec // F.ram)
    s = f"padic({Fraction(x.k, F.ram)}, {digits_base_p(x.a, F.prime, n)}"
    if F.has_ext:
        s += f", {digits_base_p(x.b, F.prime, n)}"
    return s + ")"


def to_json(x: PadicScalar) -> dict:
    if x.state == EXACT_ZERO:
        return {"zero": True}
    if x.state == FUZZY_ZERO:
        raise PrecisionExhausted("cannot serialize an indistinct zero")
    F = x.field
    n = -(-x.prec // F.ram)
    out = {"val": str(Fraction(x.k, F.ram)), "unit": digits_base_p(x.a, F.prime, n),
           "prec": int(x.precision) if x.precision.denominator == 1 else str(x.precision)}
    if F.has_ext:
        out["unit_theta"] = digits_base_p(x.b, F.prime, n)
    return out


def from_json(field: FieldConfig, d: dict) -> PadicScalar:
    if d.get("zero"):
        return PadicScalar.zero(field)
    v = Fraction(d["val"])
    k = v * field.ram
    if k.denominator != 1:
        raise ValueError("valuation outside the value group")
    p = field.prime
    a = int(d["unit"], p)
    b = int(d.get("unit_theta", "0"), p)
    prec = Fraction(d["prec"]) * field.ram
    return PadicScalar(field, int(k), a, b, int(prec))
