from collections import Counter
from fractions import Fraction

import pytest
import sympy as sp

from berkdyn.berk import INF, RadiusExp, TypeI, format_point, gauss_point, zeta
from berkdyn.dynamics import evaluate, period_polynomial, periodic_points
from berkdyn.errors import (CollisionRadiusExceeded, LeadingCoeffVanishes, MultipleRoot,
                            NotRepelling, Unsupported)
from berkdyn.families import (L, W, Z, AnalyticFamily, continue_periodic_point, dynatomic,
                              monic_normalize, multiplier_polynomial, period_curve,
                              period_factors, stability_scan, type1_multiplicity,
                              unstably_indifferent)
from berkdyn.padic import poly as P
from berkdyn.padic.field import FieldConfig
from berkdyn.padic.newton import field_roots, residual_ok
from berkdyn.padic.scalar import sqrt

from conftest import q

F3 = FieldConfig(3)
QUAD = AnalyticFamily(Z ** 2 + L)
QUADZ = AnalyticFamily(Z ** 2 + L * Z)
NINTH = Fraction(1, 9)


def same_up_to_constant(a, b, *gens):
    r = sp.cancel(sp.expand(a) / sp.expand(b))
    return r.free_symbols.isdisjoint(gens) and r != 0


# ---- period curves ----

def test_period_curve_examples():
    assert sp.expand(period_curve(QUAD, 1).phi - (Z ** 2 - Z + L)) == 0
    want = (Z ** 2 - Z + L) * (Z ** 2 + Z + L + 1)
    assert sp.expand(period_curve(QUAD, 2).phi - want) == 0
    assert sp.expand(period_curve(QUADZ, 1).phi - (Z ** 2 + (L - 1) * Z)) == 0
    assert period_curve(QUAD, 3).hom_degree == 9


def test_dynatomic_and_factors():
    assert sp.expand(dynatomic(QUAD, 2) - (Z ** 2 + Z + L + 1)) == 0
    assert set(period_factors(QUADZ, 1)) == {Z, Z + L - 1}


def test_divisibility_of_period_curves():
    for n in (2, 3):
        _, r = sp.div(period_curve(QUAD, n).phi, period_curve(QUAD, 1).phi, Z, L)
        assert r == 0
    _, r = sp.div(period_curve(QUAD, 4).phi, period_curve(QUAD, 2).phi, Z, L)
    assert r == 0


@pytest.mark.parametrize("lam", [-NINTH, Fraction(2, 9), 3, 4, Fraction(5, 7)])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_specialization_matches_period_polynomial(lam, n):
    sliced = P.trim(period_curve(QUAD, n).specialize(lam, F3))
    phi = P.trim(period_polynomial(QUAD.at(lam, F3), n))
    assert len(sliced) == len(phi)
    scale = phi[-1] / sliced[-1]
    for a, b in zip(sliced, phi):
        assert (a * scale - b).is_zero


# ---- monic normalization ----

def test_monic_normalize_examples():
    chart, cs = monic_normalize(Z ** 2 - Z + L, TypeI(q(F3, 5)), F3)
    assert chart == "z" and cs[-1].exact == 1
    phi = L * Z ** 2 - Z + 1
    chart, cs = monic_normalize(phi, TypeI(q(F3, 3)), F3)
    assert chart == "z"
    assert [c.exact for c in cs] == [Fraction(1, 3), Fraction(-1, 3), 1]
    chart, cs = monic_normalize(phi, TypeI(q(F3, 0)), F3)
    assert chart == "1/z"
    assert [c.exact for c in cs] == [0, -1, 1]
    with pytest.raises(LeadingCoeffVanishes):
        monic_normalize(L * Z ** 2 + L, TypeI(q(F3, 0)), F3)


# ---- multiplier polynomials ----

def test_multiplier_polynomial_examples():
    assert same_up_to_constant(multiplier_polynomial(QUAD, 1), W ** 2 - 2 * W + 4 * L, W, L)
    assert same_up_to_constant(multiplier_polynomial(QUADZ, 1, Z), W - L, W, L)
    const = AnalyticFamily(Z ** 2)
    assert same_up_to_constant(multiplier_polynomial(const, 1), W * (W - 2), W)


@pytest.mark.parametrize("lam", [-NINTH, Fraction(2, 9), Fraction(-10, 9), 4])
@pytest.mark.parametrize("n", [1, 2])
def test_multiplier_roots_match_periodic_points(lam, n):
    ui = unstably_indifferent(QUAD, n, TypeI(q(F3, lam)), F3)
    want = Counter()
    for r in periodic_points(QUAD.at(lam, F3), n):
        # infinity is not on the affine period curve
        if r.period == n and r.point != INF:
            want[r.multiplier_abs] += r.count
    for k in want:
        assert want[k] % n == 0
        want[k] //= n  # one multiplier per orbit
    assert Counter(ui.root_exps) == want


# ---- unstably indifferent ----

def test_ui_gauss_point():
    res = unstably_indifferent(QUAD, 1, gauss_point(F3), F3)
    assert res.verdicts == [True, True]
    assert res.root_exps == [RadiusExp(0), RadiusExp(0)]
    res = unstably_indifferent(QUADZ, 1, gauss_point(F3), F3, phi=Z)
    assert res.verdicts == [True]


def test_ui_type_one_is_false():
    res = unstably_indifferent(QUAD, 1, TypeI(q(F3, -NINTH)), F3)
    assert res.verdicts == [False, False]
    # |w| = |lambda0|^(1/2) = 3
    assert res.root_exps == [RadiusExp(-1), RadiusExp(-1)]


def test_ui_off_gauss_points():
    for x in (zeta(F3, 0, 1), zeta(F3, 0, -1), zeta(F3, 1, 1)):
        assert not unstably_indifferent(QUAD, 1, x, F3).any


# ---- type I multiplicity ----

def test_multiplicity_examples():
    phi = Z ** 2 - Z + L
    assert type1_multiplicity(QUAD, 1, zeta(F3, 0, -1), F3, phi) == 2
    assert type1_multiplicity(QUAD, 1, TypeI(q(F3, -NINTH)), F3, phi) == 1
    assert type1_multiplicity(QUAD, 1, zeta(F3, 0, 1), F3, phi, require_repelling=False) == 1
    with pytest.raises(NotRepelling):
        type1_multiplicity(QUAD, 1, zeta(F3, 0, 1), F3, phi)


def test_multiplicity_type_three():
    phi = Z ** 2 - Z + L
    x = zeta(F3, 0, RadiusExp(0, -1))
    assert type1_multiplicity(QUAD, 1, x, F3, phi) == 2


def test_multiplicity_off_segment_splits():
    # D(1/3, 1) does not contain 0: 1 - 4l has constant reduction there
    phi = Z ** 2 - Z + L
    assert type1_multiplicity(QUAD, 1, zeta(F3, Fraction(1, 3), 0), F3, phi) == 1


# ---- continuation ----

def fixed_points(lam):
    s = sqrt(q(F3, 1 - 4 * lam))
    return (1 + s) / 2, (1 - s) / 2


def test_continuation_identity():
    xi = fixed_points(-NINTH)[0]
    out = continue_periodic_point(QUAD, 1, -NINTH, xi, -NINTH, F3)
    assert (out - xi).is_zero


def test_continuation_to_nearby_parameter():
    lam1 = -NINTH + Fraction(1, 3)
    for xi in fixed_points(-NINTH):
        out = continue_periodic_point(QUAD, 1, -NINTH, xi, lam1, F3)
        assert residual_ok([q(F3, lam1), q(F3, -1), q(F3, 1)], out)
        # the Hensel oracle: the root of z^2 - z + lam1 closest to the seed
        cands = field_roots([lam1, -1, 1], F3)
        best = min(cands, key=lambda c: -(c - xi).valuation)
        assert (out - best).is_zero


def test_continuation_multiple_root():
    with pytest.raises(MultipleRoot):
        continue_periodic_point(QUAD, 1, -2, 2, Fraction(1, 4), F3)


def test_continuation_radius():
    # roots 2 and -1 are 3^-1 apart; Newton needs |dl| <= 3^-3
    with pytest.raises(CollisionRadiusExceeded):
        continue_periodic_point(QUAD, 1, -2, 2, 7, F3)
    out = continue_periodic_point(QUAD, 1, -2, 2, 25, F3)
    assert (out * out - out + 25).is_zero
    assert (out - 2).valuation >= 2


@pytest.mark.parametrize("lam0,lam1", [(-NINTH, -NINTH + 27), (Fraction(2, 9), Fraction(2, 9) + 9)])
def test_continuation_conjugacy_on_period_two(lam0, lam1):
    pts = [r.point.coord for r in periodic_points(QUAD.at(lam0, F3), 2) if r.period == 2]
    assert len(pts) == 2
    f0, f1 = QUAD.at(lam0, F3), QUAD.at(lam1, F3)
    for xi in pts:
        xi1 = continue_periodic_point(QUAD, 2, lam0, xi, lam1, F3)
        img0 = evaluate(f0, TypeI(xi)).coord
        cont_img = continue_periodic_point(QUAD, 2, lam0, img0, lam1, F3)
        assert evaluate(f1, TypeI(xi1)) == TypeI(cont_img)


# ---- scanner ----

def scan(points, n_max=2):
    return {(r.param, r.period): r for r in stability_scan(QUAD, n_max, points, F3).rows}


def test_scan_gauss_point():
    rows = scan([gauss_point(F3)])
    assert {r.flag for r in rows.values()} == {"UNSTABLY_INDIFFERENT"}


def test_scan_segment_points():
    rows = scan([zeta(F3, 0, -1), zeta(F3, 0, -2)])
    for r in rows.values():
        assert r.flag == "MULTIPLICITY_GT_1"
        assert r.evidence["m"] == 2


def test_scan_type_one_points_continue():
    rows = scan([TypeI(q(F3, -NINTH)), TypeI(q(F3, -NINTH + Fraction(1, 3)))])
    for r in rows.values():
        assert r.flag == "OK"
        assert r.evidence["continued"] >= 2


def test_scan_soundness_on_quadratic_family():
    on_segment = [gauss_point(F3), zeta(F3, 0, -1), zeta(F3, 0, -2),
                  zeta(F3, 0, Fraction(-1, 2)), zeta(F3, 0, RadiusExp(0, -1))]
    off = [zeta(F3, 0, 1), zeta(F3, 0, 2), zeta(F3, 1, 1), zeta(F3, Fraction(1, 3), 0),
           zeta(F3, NINTH, -1), TypeI(q(F3, 4)), TypeI(q(F3, 1)), TypeI(q(F3, -NINTH)),
           TypeI(q(F3, Fraction(2, 9))), TypeI(q(F3, Fraction(-10, 27)))]
    report = stability_scan(QUAD, 2, on_segment + off, F3)
    flagged = {r.param for r in report.rows if r.flag != "OK"}
    assert flagged == {format_point(x) for x in on_segment}


def test_scan_reports_unsupported_rows():
    rows = scan([zeta(F3, 0, -1)], n_max=3)
    r = rows[("zeta(0, p^-(-1))", 3)]
    assert r.flag == "UNSUPPORTED"
    assert "FactorDegreeTooLarge" in r.evidence["error"]


def test_scan_parallel_matches_serial():
    pts = [gauss_point(F3), zeta(F3, 0, -1), TypeI(q(F3, -NINTH))]
    a = stability_scan(QUAD, 2, pts, F3).to_json()
    b = stability_scan(QUAD, 2, pts, F3, jobs=2).to_json()
    assert a == b


def test_degree_drop_is_reported():
    fam = AnalyticFamily(L * Z ** 2 + Z)
    with pytest.raises(Unsupported):
        fam.at(0, F3)
    rows = stability_scan(fam, 1, [TypeI(q(F3, 0))], F3).rows
    assert rows[0].flag == "UNSUPPORTED"
