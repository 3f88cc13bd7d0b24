"""Laurent polynomials on annuli and rational functions on basic open sets."""
from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field

from .berk import (INF, Disc, Infinity, RadiusExp, TypeI, abs_exp, exp_min, gauss_seminorm,
                   hyperbolic_distance, seminorm)
from .errors import DegreesSplit, HasZeros, HypothesisFails, ZeroFunction
from .padic import poly as P
from .padic.newton import newton_polygon
from .padic.residue import pdeg, pdivmod, peval, pgcd, ptrim
from .padic.scalar import PadicScalar, residue_field, scalar


@dataclass(frozen=True)
class LaurentSegment:
    """psi(z) = sum b_k (z - center)^k on D(center, s) minus the closed disc of radius r.

    ``r`` and ``s`` are radius exponents, so r < s as radii means ``r > s`` here.
    """

    center: PadicScalar
    coeffs: dict
    r: RadiusExp
    s: RadiusExp

    def __post_init__(self):
        F = self.center.field
        object.__setattr__(self, "r", RadiusExp.of(self.r))
        object.__setattr__(self, "s", RadiusExp.of(self.s))
        object.__setattr__(self, "coeffs", {int(k): scalar(F, c) for k, c in self.coeffs.items()
                                            if not P.is_zero(c)})
        if not self.r > self.s:
            raise ValueError("inner radius must be smaller than outer radius")

    @property
    def field(self):
        return self.center.field

    def b(self, k):
        return self.coeffs.get(k, PadicScalar.zero(self.field))

    def minus_constant(self) -> "LaurentSegment":
        return LaurentSegment(self.center, {k: c for k, c in self.coeffs.items() if k != 0},
                              self.r, self.s)

    def scaled(self, c) -> "LaurentSegment":
        return LaurentSegment(self.center, {k: v * c for k, v in self.coeffs.items()}, self.r, self.s)

    def as_rational(self):
        """(numerator, denominator) as polynomials in z."""
        F = self.field
        if not self.coeffs:
            return [], [scalar(F, 1)]
        lo = min(min(self.coeffs), 0)
        num_w = [self.b(k + lo) for k in range(max(self.coeffs) - lo + 1)]
        num = P.taylor_shift(num_w, -self.center)
        den = P.taylor_shift([scalar(F, 0)] * (-lo) + [scalar(F, 1)], -self.center)
        return num, den

    def to_json(self):
        from .padic.scalar import to_json
        return {"center": to_json(self.center),
                "coeffs": {str(k): to_json(c) for k, c in sorted(self.coeffs.items())},
                "r": self.r.to_json(), "s": self.s.to_json()}


def _term_exps(psi: LaurentSegment, rexp):
    return {k: abs_exp(c) + k * rexp for k, c in psi.coeffs.items()}


def inner_wdeg(psi: LaurentSegment) -> int:
    if not psi.coeffs:
        raise ZeroFunction("psi is identically zero")
    t = _term_exps(psi, psi.r)
    m = min(t.values())
    return max(k for k, v in t.items() if v == m)


def outer_wdeg(psi: LaurentSegment) -> int:
    if not psi.coeffs:
        raise ZeroFunction("psi is identically zero")
    t = _term_exps(psi, psi.s)
    m = min(t.values())
    return min(k for k, v in t.items() if v == m)


def zero_count(psi: LaurentSegment) -> int:
    return outer_wdeg(psi) - inner_wdeg(psi)


def newton_zero_count(psi: LaurentSegment) -> int:
    """Roots of the numerator with |z - a| strictly between r and s (Newton polygon)."""
    if not psi.coeffs:
        raise ZeroFunction("psi is identically zero")
    lo = min(psi.coeffs)
    w = [psi.b(k + lo) for k in range(max(psi.coeffs) - lo + 1)]
    npg = newton_polygon(w, psi.field.prime)
    return sum(1 for v in npg.root_valuations() if psi.s < v < psi.r)


def push_annulus_skeleton(psi: LaurentSegment, t) -> BerkPointLike:
    """Image of zeta_{a,t} for t inside the annulus, via the dominant term of psi - b_0."""
    t = RadiusExp.of(t)
    b0 = psi.b(0)
    rest = psi.minus_constant()
    if not rest.coeffs:
        return TypeI(b0)
    ex = _term_exps(rest, t)
    m = min(ex.values())
    dom = [k for k, v in ex.items() if v == m]
    if len(dom) > 1:
        raise DegreesSplit(f"psi - b0 has competing terms {dom} at this radius")
    return canonical_disc(b0, m)


BerkPointLike = object


def push_rational(num, den, xi):
    """Image of any point under z -> num(z)/den(z).

    For a disc point zeta_{a,r}: with num, den expanded at a as sum p_k T^k and
    sum q_k T^k, |num - c*den|_xi = max_k |p_k - c q_k| r^k, so the image
    zeta_{b,s} has s * |den|_xi = min_c max(...), and the minimum is attained
    at one of the ratios b = p_k / q_k.
    """
    if isinstance(xi, Infinity):
        dn, dd = P.degree(num), P.degree(den)
        if dn > dd:
            return INF
        if dn < dd:
            return TypeI(PadicScalar.zero(den[-1].field))
        return TypeI(P.trim(num)[-1] / P.trim(den)[-1])
    if isinstance(xi, TypeI):
        F = xi.coord.field
        q = P.evaluate([scalar(F, c) for c in den], xi.coord)
        n = P.evaluate([scalar(F, c) for c in num], xi.coord)
        if q.is_zero:
            return INF
        return TypeI(n / q)
    F = xi.field
    pk = P.taylor_shift([scalar(F, c) for c in num], xi.center)
    qk = P.taylor_shift([scalar(F, c) for c in den], xi.center)
    n = max(len(pk), len(qk))
    pk = pk + [PadicScalar.zero(F)] * (n - len(pk))
    qk = qk + [PadicScalar.zero(F)] * (n - len(qk))
    const = []
    ratios = []
    for k in range(n):
        if qk[k].is_zero:
            e = abs_exp(pk[k])
            if e is not None:
                const.append(e + k * xi.rexp)
        else:
            ratios.append((k, pk[k] / qk[k], abs_exp(qk[k]) + k * xi.rexp))
    base = exp_min(*const)
    best = None
    for _, beta, _w in ratios:
        terms = [base]
        for _, beta_k, w_k in ratios:
            e = abs_exp(beta - beta_k)
            if e is not None:
                terms.append(w_k + e)
        cost = exp_min(*terms)
        if best is None or (cost is None) or (best[0] is not None and cost > best[0]):
            best = (cost, beta)
            if cost is None:
                break
    cost, b = best
    if cost is None:
        return TypeI(b)
    return canonical_disc(b, cost - gauss_seminorm(qk, xi))


def canonical_disc(center, rexp) -> Disc:
    """Disc with center 0 whenever the disc contains 0."""
    e = abs_exp(center)
    if e is None or e >= rexp:
        return Disc(PadicScalar.zero(center.field), rexp)
    return Disc(center, rexp)


def scaling_check(psi: LaurentSegment):
    """Both sides of d_H(psi(zeta_r), psi(zeta_s)) = |N| d_H(zeta_r, zeta_s)."""
    rest = psi.minus_constant()
    if not rest.coeffs:
        raise HypothesisFails("psi is constant")
    n_in, n_out = inner_wdeg(rest), outer_wdeg(rest)
    if n_in != n_out:
        raise HypothesisFails(f"psi - b0 has inner degree {n_in} != outer degree {n_out}")
    num, den = psi.as_rational()
    a = psi.center
    lhs = hyperbolic_distance(push_rational(num, den, Disc(a, psi.r)),
                              push_rational(num, den, Disc(a, psi.s)))
    rhs = abs(n_in) * hyperbolic_distance(Disc(a, psi.r), Disc(a, psi.s))
    return ScalingWitness(lhs, rhs, n_in)


@dataclass(frozen=True)
class ScalingWitness:
    lhs: RadiusExp
    rhs: RadiusExp
    degree: int

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs


# ---- rational functions on basic open sets ----
# U = D(0, 1/r) minus the closed discs D(a_i, r), a_i integral in distinct residue classes

def _roots_in_region(poly, arms, rexp) -> int:
    """Roots of poly (with multiplicity) lying in U."""
    poly = P.trim(poly)
    if len(poly) <= 1:
        return 0
    big = sum(1 for v in _root_vals(poly) if v > -rexp)
    small = 0
    for a in arms:
        small += sum(1 for v in _root_vals(P.taylor_shift(poly, a)) if v >= rexp)
    return big - small


def _root_vals(poly):
    npg = newton_polygon(poly)
    # roots at the expansion point count with valuation +infinity
    return [RadiusExp(v) for v in npg.root_valuations()] + [RadiusExp(10 ** 9)] * npg.zero_order


def _check_arms(arms, rexp):
    if not rexp > 0:
        raise HypothesisFails("need r < 1")
    red = []
    for a in arms:
        e = abs_exp(a)
        if e is not None and e < 0:
            raise HypothesisFails("arm centers must lie in the closed unit disc")
        red.append(a.reduce())
    if len(set(red)) != len(red):
        raise HypothesisFails("arm centers must lie in distinct residue classes")


def _wdeg_at(poly, center, t, outer: bool) -> int:
    """Dominant index of poly at radius t around center: largest (outer) or smallest tie."""
    shifted = P.taylor_shift(poly, center)
    ex = {k: abs_exp(c) + k * t for k, c in enumerate(shifted) if not c.is_zero}
    m = min(ex.values())
    ties = [k for k, v in ex.items() if v == m]
    return max(ties) if outer else min(ties)


def _reduce_normalized(poly):
    poly = P.trim(poly)
    best = min((c for c in poly if not c.is_zero), key=lambda c: c.valuation)
    return ptrim([(c / best).reduce() if not c.is_zero else residue_field(best.field).zero()
                  for c in poly])


def _ord_at(fq_poly, r) -> int:
    m = 0
    while len(fq_poly) > 1 and not peval(fq_poly, r):
        fq_poly = pdivmod(fq_poly, [-r, r.field.one()])[0]
        m += 1
    return m


def reduce_rational(num, den):
    """Reduction of num/den at the Gauss point, common factor removed."""
    rn, rd = _reduce_normalized(num), _reduce_normalized(den)
    g = pgcd(rn, rd)
    if len(g) > 1:
        rn, rd = pdivmod(rn, g)[0], pdivmod(rd, g)[0]
    return rn, rd


@dataclass
class BasicOpenReport:
    boundary: list            # (boundary point, image point)
    gauss_image: object
    reduction: tuple          # (numerator, denominator) over the residue field
    degree: int               # d = deg of the reduction
    direction_degrees: dict   # residue class (or None for infinity) -> Weierstrass degree
    reduction_orders: dict    # same keys -> order of vanishing of the reduction
    on_segment: bool          # psi(zeta_{0,1}) lies on [0, inf]
    constant_abs: bool        # every direction has degree 0
    R: RadiusExp              # exponent of the range bound
    attained_max: RadiusExp   # exponent of max |psi| over the boundary and the Gauss point
    notes: list = dc_field(default_factory=list)


def _field_of(field, *lists):
    if field is not None:
        return field
    for lst in lists:
        for c in lst:
            if isinstance(c, PadicScalar):
                return c.field
    raise ValueError("pass field= when all data are rational")


def basic_open_analysis(num, den, arms, rexp, field=None) -> BasicOpenReport:
    F = _field_of(field, num, den, arms)
    num = [scalar(F, c) for c in num]
    den = [scalar(F, c) for c in den]
    arms = [scalar(F, a) for a in arms]
    rexp = RadiusExp.of(rexp)
    _check_arms(arms, rexp)
    nz, npole = _roots_in_region(num, arms, rexp), _roots_in_region(den, arms, rexp)
    if nz or npole:
        raise HasZeros(f"psi has {nz} zeros and {npole} poles on U")
    gauss = Disc(PadicScalar.zero(F), RadiusExp(0))
    g_img = push_rational(num, den, gauss)
    boundary = [(Disc(a, rexp), push_rational(num, den, Disc(a, rexp))) for a in arms]
    outer = Disc(PadicScalar.zero(F), -rexp)
    boundary.append((outer, push_rational(num, den, outer)))
    rn, rd = reduce_rational(num, den)
    d = max(pdeg(rn), pdeg(rd), 0)
    dir_deg, red_ord = {}, {}
    for a in arms:
        key = a.reduce()
        dir_deg[key] = (_wdeg_at(num, a, RadiusExp(0), outer=False)
                        - _wdeg_at(den, a, RadiusExp(0), outer=False))
        red_ord[key] = _ord_at(rn, key) - _ord_at(rd, key)
    dir_deg[None] = (_wdeg_at(num, PadicScalar.zero(F), RadiusExp(0), outer=True)
                     - _wdeg_at(den, PadicScalar.zero(F), RadiusExp(0), outer=True))
    red_ord[None] = pdeg(rn) - pdeg(rd)
    notes = []
    if dir_deg != red_ord:
        notes.append("direction degrees disagree with the reduction")
    psi_abs = seminorm(num, gauss) - seminorm(den, gauss)
    R = psi_abs - d * rexp
    on_seg = _abs_point(g_img) is not None and isinstance(g_img, Disc) and g_img.contains(
        PadicScalar.zero(F))
    images = [img for _, img in boundary] + [g_img]
    attained = exp_min(*[_abs_point(x) for x in images])
    return BasicOpenReport(boundary, g_img, (rn, rd), d, dir_deg, red_ord, on_seg,
                           all(v == 0 for v in dir_deg.values()), R, attained, notes)


def _abs_point(xi):
    """Exponent of |T|_xi."""
    if isinstance(xi, TypeI):
        return abs_exp(xi.coord)
    return exp_min(abs_exp(xi.center), xi.rexp)


def random_point_in_U(rng: random.Random, F, arms, rexp):
    """A disc point of U with a random center and radius."""
    p = F.prime
    while True:
        shift = rng.choice([0, 0, 0, -1])
        c = scalar(F, rng.randrange(p ** 4)) * scalar(F, p) ** shift
        rad = RadiusExp(rng.randint(int(-rexp.a) + 1, int(rexp.a) + 2))
        xi = Disc(c, rad)
        if _in_U(xi, arms, rexp):
            return xi


def _in_U(xi, arms, rexp) -> bool:
    if not exp_min(abs_exp(xi.center), xi.rexp) > -rexp:
        return False
    for a in arms:
        if xi.rexp >= rexp and Disc(a, rexp).contains(xi.center):
            return False
    return True


@dataclass(frozen=True)
class RatioWitness:
    ratio: RadiusExp          # exponent of t2/t1
    probes: int


def injectivity_ratio_check(psi1, psi2, arms, rexp, x0, n_random=50, seed=0) -> RatioWitness:
    """Check the hypotheses, then that |psi2|/|psi1| is constant on U."""
    (n1, d1), (n2, d2) = psi1, psi2
    F = x0.coord.field if isinstance(x0, TypeI) else x0.field
    n1, d1, n2, d2 = ([scalar(F, c) for c in x] for x in (n1, d1, n2, d2))
    arms = [scalar(F, a) for a in arms]
    rexp = RadiusExp.of(rexp)
    _check_arms(arms, rexp)
    diff_num = [scalar(F, c) for c in P.sub(P.mul(n1, d2), P.mul(n2, d1))]
    for name, poly in (("psi1", n1), ("psi1", d1), ("psi2", n2), ("psi2", d2),
                       ("psi1 - psi2", diff_num)):
        if not P.trim(poly):
            raise HypothesisFails(f"{name} vanishes identically", clause=1)
        if _roots_in_region(poly, arms, rexp):
            raise HypothesisFails(f"{name} has zeros or poles on U", clause=1)
    if not _in_U(x0, arms, rexp) if isinstance(x0, Disc) else False:
        raise HypothesisFails("x0 is not in U", clause=0)
    F1 = [scalar(F, 1)]
    r0 = max([seminorm(P.sub([scalar(F, 0), F1[0]], [a]), x0) for a in arms]
             + [-seminorm([scalar(F, 0), F1[0]], x0)])
    t1 = seminorm(n1, x0) - seminorm(d1, x0)
    t2 = seminorm(n2, x0) - seminorm(d2, x0)
    if r0 > 0:
        lower = exp_min(r0, rexp - r0)
        if not (lower + t1 > t2 > t1):
            raise HypothesisFails("need max(r0, r/r0) t1 < t2 < t1", clause=2)
    else:
        if not (rexp + t1 > t2 > t1):
            raise HypothesisFails("need r t1 < t2 < t1", clause=3)
    ratio = t2 - t1
    rng = random.Random(seed)
    probes = [Disc(a, rexp) for a in arms] + [Disc(PadicScalar.zero(F), -rexp),
                                              Disc(PadicScalar.zero(F), RadiusExp(0))]
    probes += [random_point_in_U(rng, F, arms, rexp) for _ in range(n_random)]
    for x in probes:
        got = (seminorm(n2, x) - seminorm(d2, x)) - (seminorm(n1, x) - seminorm(d1, x))
        if got != ratio:
            raise AssertionError(f"ratio {got} != {ratio} at a probe point")
    return RatioWitness(ratio, len(probes))
