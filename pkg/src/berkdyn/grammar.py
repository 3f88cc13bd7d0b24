"""Parsers for map/family expressions and point literals.

Expressions: rationals, ``z``, ``l`` (parameter), ``+ - * / ^`` (``**`` too)
and parentheses.  Points: ``inf``, a rational, ``padic(val, digits[, theta])``,
``zeta(center, radius)`` with radius ``p^-s``, ``p^-(a + b*sqrt2)`` or a
plain rational power of p such as ``3`` or ``1/9``.
"""
from __future__ import annotations

import re
from fractions import Fraction

import sympy as sp

from .berk import INF, Disc, RadiusExp, TypeI
from .errors import ParseError
from .padic.field import FieldConfig, vp_rational
from .padic.scalar import PadicScalar

_TOKEN = re.compile(r"\s*(?:(\d+)|(\*\*|[-+*/^(),])|([A-Za-z_][A-Za-z_0-9]*))")


def tokenize(text: str):
    pos, out = 0, []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[start]!r}", start)
        num, op, name = m.groups()
        start = m.start(m.lastindex)
        if num is not None:
            out.append(("num", num, start))
        elif op is not None:
            out.append(("op", "^" if op == "**" else op, start))
        else:
            out.append(("name", name, start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text, names):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.names = names

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None, value=None):
        t = self.toks[self.i]
        if (kind and t[0] != kind) or (value is not None and t[1] != value):
            want = value if value is not None else kind
            got = t[1] or "end of input"
            raise ParseError(f"expected {want!r}, got {got!r}", t[2])
        self.i += 1
        return t

    def at(self, value):
        t = self.peek()
        return t[0] in ("op", "name") and t[1] == value

    # expr := term (('+'|'-') term)*
    def expr(self):
        v = self.term()
        while self.at("+") or self.at("-"):
            op = self.take()[1]
            r = self.term()
            v = v + r if op == "+" else v - r
        return v

    def term(self):
        v = self.unary()
        while self.at("*") or self.at("/"):
            _, op, pos = self.take()
            r = self.unary()
            if op == "/":
                if r == 0:
                    raise ParseError("division by zero", pos)
                v = v / r
            else:
                v = v * r
        return v

    def unary(self):
        if self.at("-"):
            self.take()
            return -self.unary()
        if self.at("+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.at("^"):
            self.take()
            neg = False
            if self.at("-"):
                self.take()
                neg = True
            t = self.take("num")
            e = int(t[1])
            if neg and base == 0:
                raise ParseError("division by zero", t[2])
            return base ** (-e if neg else e)
        return base

    def atom(self):
        t = self.peek()
        if t[0] == "num":
            self.take()
            return sp.Integer(int(t[1]))
        if t[0] == "name":
            if t[1] not in self.names:
                raise ParseError(f"unknown name {t[1]!r}", t[2])
            self.take()
            return self.names[t[1]]
        if self.at("("):
            self.take()
            v = self.expr()
            self.take("op", ")")
            return v
        raise ParseError(f"unexpected {t[1] or 'end of input'!r}", t[2])

    def finish(self):
        t = self.peek()
        if t[0] != "end":
            raise ParseError(f"trailing input {t[1]!r}", t[2])


def parse_expr(text: str, allow_param=True):
    """Rational expression in z (and l) as a sympy expression."""
    from .families import L, Z
    names = {"z": Z}
    if allow_param:
        names.update({"l": L, "lam": L, "lambda": L})
    ps = _Parser(text, names)
    v = ps.expr()
    ps.finish()
    return sp.together(v)


def map_coefficients(text: str):
    """(numerator, denominator) Fraction coefficient lists of a map in z."""
    from .families import Z
    expr = parse_expr(text, allow_param=False)
    num, den = sp.fraction(expr)
    out = []
    for part in (num, den):
        poly = sp.Poly(sp.expand(part), Z, domain=sp.QQ)
        out.append([Fraction(int(c.p), int(c.q)) for c in reversed(poly.all_coeffs())])
    return out[0], out[1]


# ---- point literals ----

def _rational(ps: _Parser) -> Fraction:
    sign = 1
    while ps.at("-") or ps.at("+"):
        if ps.take()[1] == "-":
            sign = -sign
    n = Fraction(int(ps.take("num")[1]))
    if ps.at("/"):
        ps.take()
        t = ps.take("num")
        if int(t[1]) == 0:
            raise ParseError("zero denominator", t[2])
        n /= int(t[1])
    return sign * n


def _digits(ps: _Parser, p: int):
    """Digit string (adjacent number/name tokens glued) as (value, length)."""
    t = ps.peek()
    if t[0] not in ("num", "name"):
        raise ParseError("expected a digit string", t[2])
    text, end = "", t[2]
    while ps.peek()[0] in ("num", "name") and ps.peek()[2] == end:
        tok = ps.take()
        text += tok[1]
        end = tok[2] + len(tok[1])
    try:
        return int(text, p), len(text)
    except ValueError:
        raise ParseError(f"invalid base-{p} digits {text!r}", t[2]) from None


def _padic(ps: _Parser, F: FieldConfig) -> PadicScalar:
    ps.take("name", "padic")
    ps.take("op", "(")
    val = _rational(ps)
    ps.take("op", ",")
    start = ps.peek()
    a, ndig = _digits(ps, F.prime)
    b = 0
    if ps.at(","):
        ps.take()
        if not F.has_ext:
            raise ParseError("theta digits need --ext", ps.peek()[2])
        b, _ = _digits(ps, F.prime)
    ps.take("op", ")")
    k = val * F.ram
    if k.denominator != 1:
        raise ParseError("valuation outside the value group", start[2])
    if a % F.prime == 0 and b % F.prime == 0:
        raise ParseError("unit digits must not be divisible by p", start[2])
    return PadicScalar(F, int(k), a, b, min(ndig * F.ram, F.cap))


def _scalar(ps: _Parser, F: FieldConfig) -> PadicScalar:
    if ps.at("padic"):
        return _padic(ps, F)
    return PadicScalar.from_rational(F, _rational(ps))


def _radius(ps: _Parser, F: FieldConfig) -> RadiusExp:
    t = ps.peek()
    if t[0] == "name" and t[1] == "p":
        ps.take()
        ps.take("op", "^")
        neg = False
        if ps.at("-"):
            ps.take()
            neg = True
        if ps.at("("):
            ps.take()
            a = _rational(ps)
            b = Fraction(0)
            if ps.at("+") or ps.at("-"):
                sign = 1 if ps.take()[1] == "+" else -1
                b = _rational(ps)
                if ps.at("*"):
                    ps.take()
                ps.take("name", "sqrt2")
                b *= sign
            ps.take("op", ")")
            e = RadiusExp(a, b)
        else:
            e = RadiusExp(_rational(ps))
        return e if neg else -e
    r = _rational(ps)
    if r <= 0:
        raise ParseError("radius must be positive", t[2])
    v = vp_rational(r, F.prime)
    if r != Fraction(F.prime) ** v:
        raise ParseError(f"radius {r} is not a power of p; use p^-s", t[2])
    return RadiusExp(-v)


def parse_point(text: str, F: FieldConfig):
    ps = _Parser(text, {})
    t = ps.peek()
    if t[0] == "name" and t[1] in ("inf", "infinity"):
        ps.take()
        pt = INF
    elif t[0] == "name" and t[1] == "zeta":
        ps.take()
        ps.take("op", "(")
        c = _scalar(ps, F)
        ps.take("op", ",")
        e = _radius(ps, F)
        ps.take("op", ")")
        pt = Disc(c, e)
    else:
        pt = TypeI(_scalar(ps, F))
    ps.finish()
    return pt


def parse_points_file(text: str, F: FieldConfig):
    """One literal per line; blank lines and '#' comments are skipped."""
    out = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(parse_point(line, F))
    return out
