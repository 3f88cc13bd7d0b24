from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, strategies as st

from berkdyn.berk import INF, RadiusExp, TypeI, format_point, zeta
from berkdyn.errors import ParseError
from berkdyn.families import L, Z
from berkdyn.grammar import map_coefficients, parse_expr, parse_point, parse_points_file
from berkdyn.padic.field import FieldConfig
from berkdyn.padic.scalar import PadicScalar

from conftest import q

F3 = FieldConfig(3)


def same(text, want):
    return sp.simplify(parse_expr(text) - want) == 0


def test_expressions():
    assert same("z^2 + l", Z ** 2 + L)
    assert same("z**2 + lambda*z", Z ** 2 + L * Z)
    assert same("(z - 1)/z", (Z - 1) / Z)
    assert same("-z^-1", -1 / Z)
    assert same("z^2 - 1/9", Z ** 2 - sp.Rational(1, 9))
    assert same("2*(z + l)^2 / 4", (Z + L) ** 2 / 2)


def test_map_coefficients():
    num, den = map_coefficients("z^2 - 1/9")
    assert [c / den[0] for c in num] == [Fraction(-1, 9), 0, 1] and len(den) == 1
    num, den = map_coefficients("1/z")
    assert (num, den) == ([1], [0, 1])
    num, den = map_coefficients("(3*z)")
    assert num == [0, 3]


@pytest.mark.parametrize("text,pos", [
    ("z^2 +* 1", 5),
    ("z^2 + q", 6),
    ("z / 0", 2),
    ("(z + 1", 6),
    ("z $ 1", 2),
    ("z^2 1", 4),
])
def test_parse_error_positions(text, pos):
    with pytest.raises(ParseError) as e:
        parse_expr(text)
    assert e.value.pos == pos


def test_maps_reject_parameter():
    with pytest.raises(ParseError):
        map_coefficients("z^2 + l")


def test_point_literals():
    assert parse_point("inf", F3) == INF
    assert parse_point("-1/9", F3) == TypeI(q(F3, Fraction(-1, 9)))
    assert parse_point("zeta(0, 1)", F3) == zeta(F3, 0, 0)
    assert parse_point("zeta(0, 3)", F3) == zeta(F3, 0, -1)
    assert parse_point("zeta(0,1/9)", F3) == zeta(F3, 0, 2)
    assert parse_point("zeta(0, p^-2)", F3) == zeta(F3, 0, 2)
    assert parse_point("zeta(0, p^(1/2))", F3) == zeta(F3, 0, Fraction(-1, 2))
    assert parse_point("zeta(5, p^-(1 + 2*sqrt2))", F3) == zeta(F3, 5, RadiusExp(1, 2))
    assert parse_point("zeta(0, p^-(0 - 1*sqrt2))", F3) == zeta(F3, 0, RadiusExp(0, -1))
    x = parse_point("padic(-1, 1201)", F3).coord
    assert x.valuation == -1 and x.a == int("1201", 3)


@pytest.mark.parametrize("text", ["zeta(0, 2)", "zeta(0, 0)", "zeta(0 1)", "padic(0, 3)",
                                  "padic(0, 10, 1)", "1/0", "zeta(0, p^-(1 + 2))"])
def test_point_literal_errors(text):
    with pytest.raises(ParseError):
        parse_point(text, F3)


def test_points_file_skips_comments():
    pts = parse_points_file("# header\nzeta(0,1)  # gauss\n\n4\n", F3)
    assert pts == [zeta(F3, 0, 0), TypeI(q(F3, 4))]


rationals = st.builds(Fraction, st.integers(-10 ** 6, 10 ** 6), st.integers(1, 10 ** 4))
rexps = st.builds(RadiusExp, st.builds(Fraction, st.integers(-20, 20), st.integers(1, 6)),
                  st.sampled_from([0, 0, 1, -1, Fraction(3, 2)]))


@given(rationals)
def test_round_trip_type_one(x):
    pt = TypeI(q(F3, x))
    assert parse_point(format_point(pt), F3) == pt


@given(rationals, rexps)
def test_round_trip_discs(c, e):
    pt = zeta(F3, c, e)
    back = parse_point(format_point(pt), F3)
    assert back == pt and back.rexp == pt.rexp


@given(st.integers(-5, 5), st.integers(1, 3 ** 30))
def test_round_trip_inexact_scalars(k, u):
    if u % 3 == 0:
        u += 1
    pt = TypeI(PadicScalar(F3, k, u, 0))
    assert parse_point(format_point(pt), F3) == pt


def test_round_trip_other_fields():
    F13 = FieldConfig(13)
    pt = TypeI(PadicScalar(F13, 2, 12345, 0))
    assert parse_point(format_point(pt), F13) == pt
    Fe = FieldConfig(3, ext_square=-1)
    t = PadicScalar.theta(Fe)
    for x in (t, t + 1, t * 3 + Fraction(1, 3)):
        assert parse_point(format_point(TypeI(x)), Fe) == TypeI(x)
