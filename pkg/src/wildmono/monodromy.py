"""Curve family data and the wild-monodromy certification pipeline.

A parameter set (p, n, units, c) describes the p-cyclic cover Y^p = f(X) of
the projective line over K = Qp(lambda^(1/(1+q))), q = p^n, whose reduction
behaviour is governed by a degree-q^2 companion ("monodromy") polynomial.
The functions here certify, with exact arithmetic:

* the pure Newton slope of the monodromy polynomial (with the three
  inequality families that force it),
* irreducibility over K via a valuation identity for an explicit radicand,
* the power-descent ladder that rewrites the shifted cover equation as a
  p-th power plus an Artin-Schreier tail, and the two congruences (linear
  normal form, p-th power decomposition) that exhibit good reduction after
  base change,
* the pairwise root distances through an exact discriminant.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .errors import BadUnit, CertificateFailure, CongruenceFailure
from .padic import Elt, Valuation, build_tower, valuation
from .polylab import NewtonPolygon, ValuedPolynomial, discriminant, newton_polygon, taylor_shift


@dataclass(frozen=True)
class CurveParams:
    """Derived data of one cover in the family."""

    tower: object
    units: tuple
    c: Elt
    rho: tuple          # rho_k = units[k] * pi^(p(q - p^k)), exact at K
    a_const: Elt        # (-1)^q (-p)^(p + p^2 + ... + q)
    b_const: Elt        # -(-p)^(1 + p + ... + p^(n-1)); b^p = a
    d_exps: tuple       # d_i = p^(n-i+1) + ... + q (d_0 = 0)

    @property
    def p(self):
        return self.tower.p

    @property
    def n(self):
        return self.tower.n

    @property
    def q(self):
        return self.tower.q

    @property
    def v_a(self):
        return Fraction(sum(self.p ** j for j in range(1, self.n + 1)))

    @property
    def v_c(self):
        v = self.c.valuation()
        return None if v.is_bottom else v.value


class ReductionType(Enum):
    GOOD_OVER_BASE = "good_over_base"
    WILD = "wild"


def make_params(tower, units, c):
    """Validate units and assemble all derived constants, exactly."""
    p, n, q = tower.p, tower.n, tower.q
    units = tuple(int(u) for u in units)
    if len(units) != n:
        raise BadUnit(f"expected {n} units, got {len(units)}")
    for u in units:
        if u != 0 and u % p == 0:
            raise BadUnit(f"unit lift {u} is divisible by p={p}")
    if not isinstance(c, Elt):
        c = tower.K.from_fraction(Fraction(c))
    vc = c.valuation()
    if not vc.is_bottom and vc.value < 0:
        raise BadUnit("coefficient c must be integral (v(c) >= 0)")
    K = tower.K
    rho = tuple(K.from_int(units[k]) * K.pi_pow(p * (q - p ** k)) for k in range(n))
    a_exp = sum(p ** j for j in range(1, n + 1))
    a_const = K.from_fraction(Fraction((-1) ** q * (-p) ** a_exp))
    b_exp = sum(p ** j for j in range(n))
    b_const = K.from_fraction(Fraction(-((-p) ** b_exp)))
    d_exps = tuple(sum(p ** j for j in range(n - i + 1, n + 1)) for i in range(n))
    return CurveParams(tower, units, c, rho, a_const, b_const, d_exps)


def cover_polynomial(params):
    """f(X) = 1 + sum rho_k X^(1+p^k) + c X^q + X^(1+q), over K."""
    K = params.tower.K
    q = params.q
    coeffs = [K.zero() for _ in range(q + 2)]
    coeffs[0] = K.one()
    for k, r in enumerate(params.rho):
        coeffs[1 + params.p ** k] = coeffs[1 + params.p ** k] + r
    coeffs[q] = coeffs[q] + params.c
    coeffs[q + 1] = coeffs[q + 1] + K.one()
    return ValuedPolynomial(K, coeffs)


def tangent_polynomial(params):
    """s(X) = 2 rho_0 X + sum_(k>=1) rho_k X^(p^k) + X^q: the linearization
    of the cover polynomial that survives reduction."""
    K = params.tower.K
    q = params.q
    coeffs = [K.zero() for _ in range(q + 1)]
    coeffs[1] = 2 * params.rho[0]
    for k in range(1, params.n):
        coeffs[params.p ** k] = coeffs[params.p ** k] + params.rho[k]
    coeffs[q] = coeffs[q] + K.one()
    return ValuedPolynomial(K, coeffs)


def monodromy_polynomial(params):
    """The degree-q^2 polynomial whose splitting field is the wild monodromy.

    s(X)^q - a f(X)^(q-1) (c + X)
           - (-1)^q sum_(k=1..n-1) (rho_k X)^(q/p^k) (-p)^(d_k) f(X)^(q(p^k-1)/p^k)
    """
    p, q, n = params.p, params.q, params.n
    K = params.tower.K
    f = cover_polynomial(params)
    s = tangent_polynomial(params)
    c_plus_x = ValuedPolynomial(K, [params.c, K.one()])
    out = s ** q - (f ** (q - 1)) * c_plus_x * params.a_const
    sign = (-1) ** q
    for k in range(1, n):
        if params.units[k] == 0:
            continue
        qk = q // p ** k
        scale = params.rho[k] ** qk * K.from_fraction(Fraction(sign * (-p) ** params.d_exps[k]))
        term = ValuedPolynomial(K, [K.zero()] * qk + [scale])
        out = out - term * (f ** (q - qk))
    return out


def boundary_valuation(params):
    """v(lambda^(p/(1+q))): the good/wild classification threshold."""
    return Fraction(params.p, (params.p - 1) * (params.q + 1))


def classify_reduction(params):
    """Good reduction over K iff v(c) clears the classification threshold."""
    vc = params.c.valuation()
    if vc.is_bottom or vc.value >= boundary_valuation(params):
        return ReductionType.GOOD_OVER_BASE
    return ReductionType.WILD


@dataclass(frozen=True)
class SlopeCertificate:
    slope: Fraction
    polygon: NewtonPolygon
    margins: dict

    @property
    def min_margin(self):
        return min(self.margins.values())


def certify_slope(params):
    """Certify the monodromy polynomial has a pure Newton slope v(a c)/q^2.

    Re-checks the three coefficient-source inequality families that force
    purity and returns the margin of each; any negative margin or an impure
    polygon raises CertificateFailure.
    """
    if classify_reduction(params) is ReductionType.GOOD_OVER_BASE:
        raise CertificateFailure("good reduction over the base: no slope certificate")
    p, q, n = params.p, params.q, params.n
    slope = (params.v_a + params.v_c) / (q * q)
    margins = {}
    m1 = Fraction(params.v_a, q * q - 1) - slope
    margins["cover_power"] = m1
    for i in range(1, n):
        if params.units[i] == 0:
            continue
        v_rho = params.rho[i].valuation().value
        qi = q // p ** i
        margins[f"scaled_tail_{i}"] = \
            Fraction(qi * v_rho + params.d_exps[i], q * q - qi) - slope
    for i in range(n):
        if params.units[i] == 0:
            continue
        v_rho = params.rho[i].valuation().value
        margins[f"tangent_power_{i}"] = Fraction(v_rho, q - p ** i) - slope
    for name, m in margins.items():
        if m < 0:
            raise CertificateFailure(f"slope inequality {name} violated (margin {m})")
    poly = monodromy_polynomial(params)
    ngon = newton_polygon(poly)
    if not ngon.is_single_slope or ngon.segments[0] != (slope, q * q):
        raise CertificateFailure(
            f"polygon {ngon.segments} is not the single segment ({slope}, {q * q})")
    return SlopeCertificate(slope, ngon, margins)


def attach_root(params, cert):
    """Register L = K[Y]/(monodromy polynomial) in the tower; return (L, y)."""
    tower = params.tower
    poly = monodromy_polynomial(params)
    lvl = tower.attach_poly_level("L", tower.K, list(poly.coeffs), cert.slope)
    return lvl, lvl.gen()


def attach_kummer_level(params, y):
    """Register M = L[W]/(W^p - f(y)); return (M, w)."""
    tower = params.tower
    L = y.level
    fy = cover_polynomial(params)(y)
    coeffs = [-fy] + [L.zero()] * (params.p - 1) + [L.one()]
    vf = fy.valuation()
    v_gen = Fraction(0) if vf.is_bottom else vf.value / params.p
    lvl = tower.attach_poly_level("M", L, coeffs, v_gen)
    return lvl, lvl.gen()


@dataclass(frozen=True)
class IrreducibilityCertificate:
    v_t: Fraction
    target: Fraction    # v(a y): p * v_t must equal it
    degree: int         # [L:K] = q^2, forced by the ramification jump


def radicand_element(params, y):
    """The explicit element t of L whose p-th power has valuation v(a y)."""
    p, q, n = params.p, params.q, params.n
    L = y.level
    fy = cover_polynomial(params)(y)
    sy = tangent_polynomial(params)(y)
    s_tilde = sy - y ** q
    t = y ** (q * q // p) - L.embed(params.b_const) + s_tilde ** (q // p)
    for k in range(1, n):
        if params.units[k] == 0:
            continue
        scale = Fraction((-p) ** (params.d_exps[k] // p))
        t = t + (L.embed(params.rho[k]) * y) ** (q // p ** (k + 1)) \
            * fy ** (q * (p ** k - 1) // p ** (k + 1)) * scale
    return t


def irreducibility_certificate(params, y):
    """Certify the monodromy polynomial is irreducible over K (c = 1 scope).

    Builds the explicit radicand t with p*v(t) = v(a y); that identity forces
    q^2 to divide the ramification index of K(y)/K, hence irreducibility.
    """
    if not (params.c - 1).is_exact_zero():
        raise CertificateFailure("irreducibility certificate only applies to c = 1")
    p, q = params.p, params.q
    t = radicand_element(params, y)
    vt = t.valuation()
    target = params.v_a + y.level.v_gen
    if vt.is_bottom or p * vt.value != target:
        raise CertificateFailure(
            f"radicand valuation {vt!r} does not satisfy p*v(t) = v(a*y) = {target}")
    return IrreducibilityCertificate(vt.value, target, q * q)


@dataclass(frozen=True)
class DescentData:
    """Power-descent ladder: elements B_0..B_n of L and S-cofactors of the
    p-th root side (stored with the radical factored out, so coefficients
    stay in L)."""

    ladder: tuple           # ladder[i] = B_i, i = 0..n
    cofactors: tuple        # cofactors[i] = g_i as an S-coefficient tuple over L
    ladder_valuations: tuple
    congruence_slack: Fraction  # may be None when the congruence is exact
    bridge_slack: Fraction


def _ladder_target(params, i):
    """Claimed v(B_(i+1)) for 0 <= i <= n-1."""
    p = params.p
    return (Fraction(sum(p ** j for j in range(i + 1)), p ** i)
            + params.v_c / p ** (i + 1))


def build_descent_data(params, y):
    """Compute the descent ladder, assert its valuations and closing congruence."""
    p, q, n = params.p, params.q, params.n
    L = y.level
    fy = cover_polynomial(params)(y)
    sy = tangent_polynomial(params)(y)
    denom_inv = (L.embed(params.tower.K.from_fraction(Fraction((-p) ** p)))
                 * fy ** (p - 1)).invert()
    B = [None] * (n + 1)
    B[n] = -sy
    for i in range(n - 1, 0, -1):
        B[i] = B[i + 1] ** p * denom_inv - y * L.embed(params.rho[n - i])
    B[0] = B[1] ** p * denom_inv
    vals = []
    for i in range(n):
        target = _ladder_target(params, i)
        v = B[i + 1].valuation()
        vals.append(v.value if not v.is_bottom else None)
        if v.is_bottom or v.value != target:
            raise CertificateFailure(
                f"ladder valuation v(B_{i + 1}) = {v!r}, expected {target}")
    v0 = B[0].valuation()
    vals.insert(0, None if v0.is_bottom else v0.value)

    # closing congruence modulo lambda^(p q^2/(q+1)) * (maximal ideal)
    modulus = Fraction(p * q * q, (p - 1) * (q + 1))
    sign = Fraction((-1) ** q)
    rhs = L.embed(params.a_const) * fy ** (q - 1) * B[0] * sign
    for k in range(1, n):
        if params.units[k] == 0:
            continue
        rhs = rhs + (L.embed(params.rho[k]) * y) ** (q // p ** k) \
            * fy ** (q * (p ** k - 1) // p ** k) * Fraction((-p) ** params.d_exps[k])
    diff = B[n] ** q - rhs
    vdiff = diff.valuation()
    if not vdiff.exceeds(modulus):
        raise CertificateFailure(
            f"ladder congruence fails: v(diff) = {vdiff!r}, needs > {modulus}")
    cong_slack = None if vdiff.is_bottom else vdiff.value - modulus

    # bridge to the linear normal form: B_0 = c + y up to high valuation
    bridge_mod = modulus - params.v_a
    vbr = (B[0] - L.embed(params.c) - y).valuation()
    if not vbr.exceeds(bridge_mod):
        raise CertificateFailure(
            f"bridge fails: v(B_0 - c - y) = {vbr!r}, needs > {bridge_mod}")
    bridge_slack = None if vbr.is_bottom else vbr.value - bridge_mod

    # cofactors of the p-th root side: g_(i+1) = g_i - B_(i+1) S^(q/p^(i+1) - 1)
    #                                             / (p f(y))          (radical out)
    pf_inv = (L.embed(params.tower.K.from_int(p)) * fy).invert()
    cof = [(L.zero(),)]
    for i in range(n):
        g = list(cof[-1])
        d = q // p ** (i + 1) - 1
        while len(g) <= d:
            g.append(L.zero())
        g[d] = g[d] - B[i + 1] * pf_inv
        cof.append(tuple(g))
    for i, g in enumerate(cof):
        for coeff in g:
            v = coeff.valuation()
            if not v.is_bottom and v.value < 0:
                raise CertificateFailure(
                    f"cofactor g_{i} has a non-integral coefficient (v = {v.value})")
    return DescentData(tuple(B), tuple(cof), tuple(vals), cong_slack, bridge_slack)


@dataclass(frozen=True)
class CongruenceReport:
    """Per-degree slack of a polynomial congruence; slacks are lower bounds
    when the difference vanished to working precision (exact=False)."""

    entries: tuple   # (degree, slack, exact)

    @property
    def min_slack(self):
        return min((s for _, s, _ in self.entries), default=None)

    @property
    def holds(self):
        return all(s is None or s > 0 for _, s, _ in self.entries)


def _congruence_threshold(params, d):
    """v-threshold for the S^d coefficient of a congruence mod lambda^p m[T]."""
    p, q = params.p, params.q
    return Fraction(p * (1 + q - d), (p - 1) * (1 + q))


def _slack_report(params, diff_coeffs):
    entries = []
    for d, coeff in enumerate(diff_coeffs):
        if coeff.is_exact_zero():
            continue
        thr = _congruence_threshold(params, d)
        v = coeff.valuation()
        if not v.exceeds(thr):
            raise CongruenceFailure(
                f"congruence fails at S^{d}: v = {v!r}, needs > {thr}", degree=d)
        if v.is_bottom:
            entries.append((d, None if v.bound is None else v.bound - thr, False))
        else:
            entries.append((d, v.value - thr, True))
    return CongruenceReport(tuple(entries))


def check_reduction_form(params, y, descent):
    """Shifted cover polynomial minus its six-term linear normal form lies in
    lambda^p m[T] coefficientwise; returns the slack at each S-degree."""
    p, q, n = params.p, params.q, params.n
    L = y.level
    f = cover_polynomial(params)
    shifted = taylor_shift(f, y)
    fy = f(y)
    sy = tangent_polynomial(params)(y)
    form = [L.zero() for _ in range(q + 2)]
    form[0] = fy
    form[1] = form[1] + sy
    for k in range(n):
        form[1 + p ** k] = form[1 + p ** k] + L.embed(params.rho[k])
    for k in range(1, n):
        form[p ** k] = form[p ** k] + y * L.embed(params.rho[k])
    form[q] = form[q] + descent.ladder[0]
    form[q + 1] = form[q + 1] + L.one()
    diff = [shifted[d] - form[d] for d in range(q + 2)]
    return _slack_report(params, diff)


def check_power_form(params, y, descent):
    """Shifted cover polynomial minus (p-th power + Artin-Schreier tail) lies
    in lambda^p m[T]; the p-th power is f(y) (1 + S g_n(S))^p."""
    p, q, n = params.p, params.q, params.n
    L = y.level
    f = cover_polynomial(params)
    shifted = taylor_shift(f, y)
    fy = f(y)
    g = descent.cofactors[n]
    one_plus = [L.one()] + [c for c in g]  # 1 + S*g(S)
    power = [L.one()]
    for _ in range(p):
        power = _smul(power, one_plus, L)
    form = [c * fy for c in power]
    while len(form) < q + 2:
        form.append(L.zero())
    for k in range(n):
        form[1 + p ** k] = form[1 + p ** k] + L.embed(params.rho[k])
    form[q + 1] = form[q + 1] + L.one()
    top = max(len(form), q + 2)
    diff = [shifted[d] - form[d] if d < len(form) else L.embed(shifted[d])
            for d in range(top)]
    return _slack_report(params, diff)


def _smul(a, b, level):
    out = [level.zero()] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if not x.is_exact_zero():
            for j, z in enumerate(b):
                out[i + j] = out[i + j] + x * z
    return out


@dataclass(frozen=True)
class DistanceReport:
    disc_valuation: Fraction
    distance: Fraction      # common v(y_i - y_j)
    derivative_valuation: Fraction  # v of the monodromy polynomial derivative at a root


def root_distance_report(params):
    """Exact discriminant valuation certifies all pairwise root distances.

    v(disc) = q^2 v(a) forces v(L'(root)) = v(a) = (q^2-1) * boundary, hence
    every root distance equals the classification boundary valuation.
    """
    if classify_reduction(params) is ReductionType.GOOD_OVER_BASE:
        raise CertificateFailure("good reduction over the base: no distance report")
    q = params.q
    poly = monodromy_polynomial(params)
    disc = discriminant(poly)
    v = disc.valuation()
    expected = q * q * params.v_a
    if v.is_bottom or v.value != expected:
        raise CertificateFailure(
            f"discriminant valuation {v!r}, expected q^2 v(a) = {expected}")
    dist = boundary_valuation(params)
    if (q * q - 1) * dist != params.v_a:
        raise CertificateFailure("distance cross-check (q^2-1)*distance = v(a) failed")
    return DistanceReport(v.value, dist, params.v_a)
