"""Dense univariate polynomials as ascending coefficient lists.

Coefficients may be ``Fraction`` (exact rational data) or ``PadicScalar``;
the helpers only use ring operations, so the same code serves both.
"""
from fractions import Fraction
from math import comb

from .field import vp_rational
from .scalar import PadicScalar


def is_zero(c) -> bool:
    if isinstance(c, PadicScalar):
        return c.is_zero
    return c == 0


def val_of(c, p: int):
    """p-adic valuation, or None for zero (exact or below tracked precision)."""
    if isinstance(c, PadicScalar):
        return None if c.is_zero else c.valuation
    if c == 0:
        return None
    return Fraction(vp_rational(c, p))


def trim(a):
    a = list(a)
    while a and is_zero(a[-1]):
        a.pop()
    return a


def degree(a) -> int:
    return len(trim(a)) - 1


def add(a, b):
    n = max(len(a), len(b))
    return trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def neg(a):
    return [-c for c in a]


def sub(a, b):
    return add(a, neg(b))


def scale(a, c):
    return trim([c * x for x in a])


def mul(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if is_zero(x):
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return trim(out)


def power(a, n: int):
    out = [1]
    for _ in range(n):
        out = mul(out, a)
    return out


def evaluate(a, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def deriv(a):
    return trim([c * i for i, c in enumerate(a)][1:])


def taylor_shift(a, c):
    """Coefficients of a(z + c) in powers of z."""
    n = len(a)
    out = [0] * n
    cpow = [1]
    for _ in range(n):
        cpow.append(cpow[-1] * c)
    for i, ai in enumerate(a):
        if is_zero(ai):
            continue
        for j in range(i + 1):
            out[j] = out[j] + ai * comb(i, j) * cpow[i - j]
    return trim(out)


def substitute_scale(a, c):
    """Coefficients of a(c*z)."""
    out, cp = [], 1
    for x in a:
        out.append(x * cp)
        cp = cp * c
    return trim(out)


def divmod_poly(a, b):
    """Long division; b's leading coefficient must be invertible."""
    a, b = trim(a), trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [0] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    lead = b[-1]
    while len(r) >= len(b) and r:
        c = r[-1] / lead
        s = len(r) - len(b)
        q[s] = c
        for i, y in enumerate(b):
            r[s + i] = r[s + i] - c * y
        r.pop()
        r = trim(r)
    return trim(q), r


def compose(a, b):
    """a(b(z))."""
    out = []
    for c in reversed(a):
        out = add(mul(out, b), [c])
    return out


def to_field(a, field):
    """Lift rational coefficients into the working field."""
    from .scalar import scalar
    return [scalar(field, c) for c in a]
