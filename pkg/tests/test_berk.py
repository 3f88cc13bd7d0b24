import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from berkdyn.berk import (INF, RadiusExp, TypeI, diam, format_point, gauss_point,
                          gauss_seminorm, hyperbolic_distance, nested_disc_limit, seminorm,
                          tangent_direction, zeta)
from berkdyn.errors import (InfinityHasNoDiameter, NotNested, SamePoint, TypeIPoint,
                            TypeIVLimit)
from berkdyn.padic import poly as P
from berkdyn.padic.field import FieldConfig, vp_rational

from conftest import q

F3 = FieldConfig(3)
SQRT2 = RadiusExp(0, 1)

small = st.builds(Fraction, st.integers(-200, 200), st.integers(1, 30))
exps = st.builds(Fraction, st.integers(-12, 12), st.integers(1, 4))
irr_exps = st.builds(RadiusExp, exps, st.sampled_from([0, 0, Fraction(1, 2), -1, 1]))


def vdist(a, b) -> RadiusExp | None:
    """Exponent of |a - b| from the rationals themselves."""
    return None if a == b else RadiusExp(vp_rational(Fraction(a) - Fraction(b), 3))


# ---- RadiusExp ----

@given(irr_exps, irr_exps)
def test_radius_order_agrees_with_floats(x, y):
    fx, fy = float(x), float(y)
    if abs(fx - fy) > 1e-9:
        assert (x < y) == (fx < fy)
    assert (x == y) == (x.a == y.a and x.b == y.b)


def test_sqrt2_sign_decision():
    assert RadiusExp(Fraction(141, 100), -1).sign() == -1
    assert RadiusExp(Fraction(142, 100), -1).sign() == 1
    assert (SQRT2 * SQRT2) == 2


# ---- diameter ----

def test_diam_examples():
    assert diam(TypeI(q(F3, 5))) is None
    assert diam(gauss_point(F3)) == RadiusExp(0, 0)
    assert diam(zeta(F3, 0, SQRT2)) == RadiusExp(0, 1)
    assert zeta(F3, 0, SQRT2).type == 3
    with pytest.raises(InfinityHasNoDiameter):
        diam(INF)


# ---- hyperbolic distance ----

def test_distance_examples():
    g = gauss_point(F3)
    assert hyperbolic_distance(g, zeta(F3, 0, 1)) == 1
    assert hyperbolic_distance(zeta(F3, 0, 1), zeta(F3, 1, 1)) == 2
    x = zeta(F3, Fraction(2, 7), Fraction(3, 2))
    assert hyperbolic_distance(x, x) == 0
    with pytest.raises(TypeIPoint):
        hyperbolic_distance(g, TypeI(q(F3, 1)))


def test_distance_oracle_by_logs():
    # d_H = 2 log max(r, s, |a-b|) - log r - log s, evaluated in floats
    for a, r, b, s in [(0, 0, 1, 2), (3, 1, 0, 1), (Fraction(1, 3), -1, 5, 2), (0, 2, 9, 3)]:
        got = hyperbolic_distance(zeta(F3, a, r), zeta(F3, b, s))
        d = vdist(a, b)
        big = max(3.0 ** -r, 3.0 ** -s, 0.0 if d is None else 3.0 ** -float(d))
        want = (2 * math.log(big) + r * math.log(3) + s * math.log(3)) / math.log(3)
        assert abs(float(got) - want) < 1e-9


@given(small, exps, exps, exps)
def test_distance_additive_along_radii(a, r1, r2, r3):
    r, s, t = sorted([r1, r2, r3], reverse=True)  # radii r <= s <= t
    x, y, z = zeta(F3, a, r), zeta(F3, a, s), zeta(F3, a, t)
    assert hyperbolic_distance(x, z) == hyperbolic_distance(x, y) + hyperbolic_distance(y, z)


@given(small, irr_exps, small, irr_exps)
def test_distance_symmetric_and_definite(a, r, b, s):
    x, y = zeta(F3, a, r), zeta(F3, b, s)
    d = hyperbolic_distance(x, y)
    assert d == hyperbolic_distance(y, x)
    assert d >= 0
    assert (d == 0) == (x == y)


def test_distance_additivity_thousand_triples():
    rng = random.Random(7)
    for _ in range(1000):
        a = Fraction(rng.randint(-99, 99), rng.randint(1, 9))
        rs = sorted((RadiusExp(Fraction(rng.randint(-9, 9), rng.randint(1, 3)), rng.choice([0, 1]))
                     for _ in range(3)), reverse=True)
        x, y, z = (zeta(F3, a, e) for e in rs)
        assert hyperbolic_distance(x, z) == hyperbolic_distance(x, y) + hyperbolic_distance(y, z)


# ---- equality ----

@given(small, small, small, exps)
def test_disc_equality_is_an_equivalence(a, b, c, r):
    x, y, z = zeta(F3, a, r), zeta(F3, b, r), zeta(F3, c, r)
    assert x == x
    assert (x == y) == (y == x)
    if x == y and y == z:
        assert x == z


@given(small, exps, small, exps)
def test_equality_matches_seminorm_extensionality(a, r, b, s):
    x, y = zeta(F3, a, r), zeta(F3, b, s)
    rng = random.Random(hash((a, b)))
    probes = [a, b] + [Fraction(rng.randint(-500, 500), rng.randint(1, 40)) for _ in range(48)]
    agree = all(seminorm([-c, 1], x) == seminorm([-c, 1], y) for c in probes)
    assert agree == (x == y)


def test_disc_equality_definition():
    assert zeta(F3, 0, 1) == zeta(F3, 3, 1)
    assert zeta(F3, 0, 1) != zeta(F3, 1, 1)
    assert zeta(F3, 0, 1) != zeta(F3, 0, 2)


# ---- seminorms ----

def test_gauss_seminorm_examples():
    assert gauss_seminorm([q(F3, 3), 0, 1], gauss_point(F3)) == 0
    assert gauss_seminorm([0, 1], zeta(F3, 0, 2)) == 2
    assert gauss_seminorm([3, -4, 1], gauss_point(F3)) == 0
    assert gauss_seminorm([0, 0], gauss_point(F3)) is None


polys = st.lists(small, min_size=1, max_size=5)


@given(polys, polys, small, irr_exps)
def test_seminorm_multiplicative_and_ultrametric(f, g, a, r):
    xi = zeta(F3, a, r)
    nf, ng = seminorm(f, xi), seminorm(g, xi)
    npq = seminorm(P.mul(f, g), xi)
    if nf is None or ng is None:
        assert npq is None
    else:
        assert npq == nf + ng
    ns = seminorm(P.add(f, g), xi)
    if ns is not None:
        assert ns >= min(e for e in (nf, ng) if e is not None)


@given(polys, small)
def test_seminorm_at_type_one_is_evaluation(f, c):
    val = sum(Fraction(k) * Fraction(c) ** i for i, k in enumerate(f))
    got = seminorm(f, TypeI(q(F3, c)))
    assert got == (None if val == 0 else RadiusExp(vp_rational(val, 3)))


# ---- tangent directions ----

def test_tangent_examples():
    g = gauss_point(F3)
    assert tangent_direction(g, TypeI(q(F3, 1))).direction == 1
    assert tangent_direction(g, INF).is_infinity
    assert tangent_direction(g, zeta(F3, 3, 1)).direction == 0
    assert tangent_direction(g, TypeI(q(F3, Fraction(1, 3)))).is_infinity
    with pytest.raises(SamePoint):
        tangent_direction(g, zeta(F3, 1, 0))


@given(st.lists(small, min_size=2, max_size=8), st.integers(-2, 2))
def test_tangent_partition(pts, k):
    xi = zeta(F3, 0, k)
    inside = [c for c in pts if vdist(c, 0) is None or vdist(c, 0) >= k]
    for c in inside:
        for d in inside:
            same = tangent_direction(xi, TypeI(q(F3, c))).direction == \
                tangent_direction(xi, TypeI(q(F3, d))).direction
            close = c == d or vdist(c, d) > k
            assert same == close


# ---- nested limits ----

def test_nested_limit_to_type_one():
    chain = [(q(F3, 0), j) for j in range(1, 21)]
    assert nested_disc_limit(chain) == TypeI(q(F3, 0))


def test_nested_limit_to_disc():
    # radii 3^-1 + 3^-j shrink toward 3^-1; exponents increase to 1
    chain = [(q(F3, 0), Fraction(1) - Fraction(1, j)) for j in range(2, 22)]
    lim = nested_disc_limit(chain, limit_rexp=1)
    assert lim == zeta(F3, 0, 1)


def test_nested_limit_geometric_series():
    chain = [(q(F3, sum(3 ** i for i in range(j + 1))), j) for j in range(1, 21)]
    lim = nested_disc_limit(chain)
    assert isinstance(lim, TypeI)
    # 1 + 3 + 9 + ... = 1/(1-3) = -1/2 in Q_3
    assert (lim.coord - q(F3, Fraction(-1, 2))).val_lower() >= 21


def test_nested_limit_errors():
    with pytest.raises(NotNested):
        nested_disc_limit([(q(F3, 0), 2), (q(F3, 0), 1)])
    with pytest.raises(NotNested):
        nested_disc_limit([(q(F3, 0), 1), (q(F3, 1), 2)])
    with pytest.raises(TypeIVLimit):
        nested_disc_limit([(q(F3, 0), 0), (q(F3, 0), 0), (q(F3, 1), 0), (q(F3, 0), 0)],
                          limit_rexp=1)


def test_point_literals():
    assert format_point(zeta(F3, 0, SQRT2)) == "zeta(0, p^-(0 + 1*sqrt2))"
    assert format_point(zeta(F3, 0, RadiusExp(3, -1))) == "zeta(0, p^-(3 - 1*sqrt2))"
    assert format_point(INF) == "inf"
