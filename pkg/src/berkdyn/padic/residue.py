"""Finite residue fields F_p, F_p[t]/(t^2 - D) and dense polynomials over them."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from ..errors import DivisionByZero


@dataclass(frozen=True)
class ResidueField:
    prime: int
    t_sq: int | None = None  # nonresidue mod p when the field has order p^2

    @property
    def order(self) -> int:
        return self.prime ** (2 if self.t_sq is not None else 1)

    def __call__(self, c0, c1=0) -> "ResidueElem":
        p = self.prime
        if self.t_sq is None:
            c1 = 0
        return ResidueElem(self, c0 % p, c1 % p)

    def zero(self):
        return self(0)

    def one(self):
        return self(1)

    def gen(self):
        """The class of theta (only meaningful for the order-p^2 field)."""
        return self(0, 1)

    def elements(self):
        """All elements, ordered by the integer key c0 + c1*p."""
        p = self.prime
        if self.t_sq is None:
            return [self(c) for c in range(p)]
        return [self(c0, c1) for c1, c0 in product(range(p), range(p))]


@dataclass(frozen=True)
class ResidueElem:
    field: ResidueField
    c0: int
    c1: int = 0

    def _coerce(self, other):
        if isinstance(other, ResidueElem):
            return other
        if isinstance(other, int):
            return self.field(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self.field(self.c0 + o.c0, self.c1 + o.c1)

    __radd__ = __add__

    def __neg__(self):
        return self.field(-self.c0, -self.c1)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        d = self.field.t_sq or 0
        return self.field(self.c0 * o.c0 + d * self.c1 * o.c1, self.c0 * o.c1 + self.c1 * o.c0)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out, base = self.field.one(), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def inverse(self):
        if not self:
            raise DivisionByZero("inverse of 0 in residue field")
        p = self.field.prime
        d = self.field.t_sq or 0
        norm = (self.c0 * self.c0 - d * self.c1 * self.c1) % p
        ni = pow(norm, -1, p)
        return self.field(self.c0 * ni, -self.c1 * ni)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __bool__(self):
        return bool(self.c0 or self.c1)

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.field(other)
        if not isinstance(other, ResidueElem):
            return NotImplemented
        return (self.c0, self.c1) == (other.c0, other.c1) and self.field == other.field

    def __hash__(self):
        # agrees with int hashing for the canonical representatives 0..p-1
        return hash(self.c0) if not self.c1 else hash((self.c0, self.c1, self.field.prime))

    @property
    def key(self) -> int:
        return self.c0 + self.c1 * self.field.prime

    def is_square(self) -> bool:
        if not self:
            return True
        q = self.field.order
        return self ** ((q - 1) // 2) == 1

    def sqrt(self) -> "ResidueElem | None":
        """Square root with the smallest key, or None for a nonsquare."""
        for r in self.field.elements():
            if r * r == self:
                return r
        return None

    def __repr__(self):
        if self.field.t_sq is None or self.c1 == 0:
            return str(self.c0)
        if self.c0 == 0:
            return f"{self.c1}*t"
        return f"{self.c0}+{self.c1}*t"


# ---- dense polynomials over a residue field: lists, ascending degree ----

def ptrim(a):
    a = list(a)
    while a and not a[-1]:
        a.pop()
    return a


def pdeg(a) -> int:
    return len(ptrim(a)) - 1


def padd(a, b):
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else 0
        y = b[i] if i < len(b) else 0
        out.append(x + y)
    return ptrim(out)


def pneg(a):
    return [-c for c in a]


def psub(a, b):
    return padd(a, pneg(b))


def pmul(a, b):
    a, b = ptrim(a), ptrim(b)
    if not a or not b:
        return []
    F = (a + b)[0].field if isinstance((a + b)[0], ResidueElem) else None
    out = [F.zero() if F else 0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return ptrim(out)


def pscale(a, c):
    return ptrim([c * x for x in a])


def pdivmod(a, b):
    a, b = ptrim(a), ptrim(b)
    if not b:
        raise DivisionByZero("polynomial division by zero")
    lead_inv = b[-1].inverse()
    F = b[-1].field
    q = [F.zero()] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    while len(r) >= len(b) and r:
        c = r[-1] * lead_inv
        s = len(r) - len(b)
        q[s] = c
        for i, y in enumerate(b):
            r[s + i] = r[s + i] - c * y
        r = ptrim(r)
    return ptrim(q), r


def pmonic(a):
    a = ptrim(a)
    if not a:
        return a
    return pscale(a, a[-1].inverse())


def pgcd(a, b):
    a, b = ptrim(a), ptrim(b)
    while b:
        a, b = b, pdivmod(a, b)[1]
    return pmonic(a)


def pderiv(a):
    return ptrim([c * i for i, c in enumerate(a)][1:])


def peval(a, x):
    acc = x.field.zero() if isinstance(x, ResidueElem) else 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def proots(a):
    """Roots in the residue field itself (brute force), with multiplicity."""
    a = ptrim(a)
    if len(a) <= 1:
        return []
    F = a[-1].field
    out = []
    for r in F.elements():
        m = 0
        cur = a
        while len(cur) > 1 and not peval(cur, r):
            cur = pdivmod(cur, [-r, F.one()])[0]
            m += 1
        out.extend([r] * m)
    return out


def psqrt(a):
    """Square root of a polynomial (None when not a square); p odd."""
    a = ptrim(a)
    if not a:
        return []
    n = len(a) - 1
    if n % 2:
        return None
    lead = a[-1].sqrt()
    if lead is None:
        return None
    m = n // 2
    g = [None] * (m + 1)
    g[m] = lead
    two_inv = (lead.field.one() * 2).inverse()
    for i in range(m - 1, -1, -1):
        # coefficient of x^(m+i) in g^2 fixes g[i]
        s = a[m + i]
        for j in range(i + 1, m):
            if m + i - j <= m and m + i - j > i:
                s = s - g[j] * g[m + i - j]
        g[i] = s * two_inv / lead
    if pmul(g, g) != a:
        return None
    return g


def is_square_poly_upto_const(a) -> bool:
    """Square in the algebraic closure's polynomial ring, i.e. up to a constant."""
    a = ptrim(a)
    if not a:
        return True
    return psqrt(pmonic(a)) is not None


def pformat(a, var="x") -> str:
    a = ptrim(a)
    if not a:
        return "0"
    terms = []
    for i in range(len(a) - 1, -1, -1):
        c = a[i]
        if not c:
            continue
        cs = repr(c)
        if "+" in cs:
            cs = f"({cs})"
        if i == 0:
            terms.append(cs)
        elif i == 1:
            terms.append(f"{'' if cs == '1' else cs + '*'}{var}")
        else:
            terms.append(f"{'' if cs == '1' else cs + '*'}{var}^{i}")
    return " + ".join(terms)
