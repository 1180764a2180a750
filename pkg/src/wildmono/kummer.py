"""Different exponent of the quadratic top step via square refinement (p = 2).

The extension M = L(sqrt(z)) for a unit z has its different determined by
max_u v_L(z u^2 - 1): the classical square-peeling loop raises an even
valuation by multiplying u with 1 + delta, delta^2 cancelling the leading
term, until the valuation is odd (ramified: d = 2 v_L(2) + 1 - m), exceeds
2 v_L(2) (split), or equals it (inert).  The loop is seeded with an explicit
unit built from the descent data, which already lands one step away from the
exit; every element stays exact, so the loop ends with a certificate rather
than a heuristic.
"""

from dataclasses import dataclass
from fractions import Fraction

from .errors import CertificateFailure, CongruenceFailure, ConstraintViolation, InsufficientPrecision
from .monodromy import cover_polynomial, tangent_polynomial
from .padic import Elt, _invert_exact_scalar
from .ramification import RamFiltration


@dataclass(frozen=True)
class KummerSeed:
    """Explicit unit u and companion h with
    f(y) u^2 = 1 + rho_(n-1) y^(1+q/2) + 2 y^(q/2) h + (residual above s)."""

    u: Elt
    h: Elt
    s: int              # threshold (q+1)(2q^2 - 1), in v_L units
    slack: Fraction     # v_L(residual) - s; None when the residual vanished exactly


def build_kummer_seed(params, y):
    """Construct the seed unit and certify both congruences at threshold s."""
    p, q, n = params.p, params.q, params.n
    if p != 2:
        raise ConstraintViolation("square-refinement seed exists for p = 2 only")
    L = y.level
    fy = cover_polynomial(params)(y)
    sy = tangent_polynomial(params)(y)
    b_inv = L.embed(_invert_exact_scalar(params.b_const))

    h = sy ** (q // 2) * b_inv - L.one()
    for k in range(1, n):
        if params.units[k] == 0:
            continue
        denom = Fraction(1, 2 ** (2 ** (n - k) - 1))
        h = h + (L.embed(params.rho[k]) * y) ** (q // 2 ** (k + 1)) \
            * fy ** (q * (2 ** k - 1) // 2 ** (k + 1)) * denom

    u = L.one() - y ** (q // 2)
    for k in range(n - 1):
        u = u - y ** (2 ** k * (1 + q)) * Fraction(1, 2 ** (2 ** (k + 1) - 1))
    for i in range(1, n):
        if params.units[i] == 0:
            continue
        for k in range(n - i - 1, n - 1):
            u = u + L.embed(params.rho[i]) ** (2 ** k) \
                * y ** (2 ** k * (1 + 2 ** i)) * Fraction(1, 2 ** (2 ** (k + 1) - 1))

    s = (q + 1) * (2 * q * q - 1)
    e_L = L.e_abs
    lead = 2 * y ** (q // 2) * h
    v_lead = lead.valuation()
    if v_lead.is_bottom or v_lead.value * e_L != s:
        raise CongruenceFailure(
            f"v_L(2 y^(q/2) h) = {v_lead!r} (x{e_L}), expected {s}")
    residual = fy * u * u - L.one() \
        - L.embed(params.rho[n - 1]) * y ** (1 + q // 2) - lead
    v_res = residual.valuation()
    if not v_res.exceeds(Fraction(s, e_L)):
        raise CongruenceFailure(
            f"seed congruence fails: v_L(residual) = {v_res!r}, needs > {s}")
    slack = None if v_res.is_bottom else v_res.value * e_L - s
    return KummerSeed(u, h, s, slack)


class UniformizerKit:
    """Produce elements of any prescribed v_L valuation at an attached level.

    Built from an explicit element t of valuation coprime to v_L(pi_K); the
    kit realizes v_L = s as pi_K^a t^b with 0 <= b < [L:K].
    """

    def __init__(self, level, t, vL_t):
        self.level = level
        self.t = t
        self.vL_t = vL_t
        self.vL_piK = level.e_rel
        if self._gcd(self.vL_t, self.vL_piK) != 1:
            raise ConstraintViolation("kit element valuation not coprime to v_L(pi_K)")
        self._t_pows = [level.one()]
        self._t_inv_pows = None

    @staticmethod
    def _gcd(a, b):
        while b:
            a, b = b, a % b
        return a

    def element_of_valuation(self, s):
        q2 = self.vL_piK
        b = s * pow(self.vL_t % q2, -1, q2) % q2
        a = (s - b * self.vL_t) // q2
        while len(self._t_pows) <= b:
            self._t_pows.append(self._t_pows[-1] * self.t)
        lower = self.level.below
        return self.level.embed(lower.pi_pow(a)) * self._t_pows[b]


def _kit_for(level, kit):
    if level.kind == "eis":
        class _PiKit:
            def element_of_valuation(self, s, _level=level):
                return _level.pi_pow(s)
        return _PiKit()
    if kit is None:
        raise ConstraintViolation(
            "an attached level needs a UniformizerKit to run the refinement loop")
    return kit


def quadratic_different(z, seed=None, kit=None, history=None):
    """Different exponent (v_M units) of L(sqrt(z))/L for a unit z, p = 2.

    Returns 2 v_L(2) + 1 - m when the refinement exits at odd m < 2 v_L(2),
    and 0 when z is a square (split) or the extension is inert; the loop
    strictly increases m each round and is seeded with ``seed`` when given.
    """
    level = z.level
    tower = level.tower
    if tower.p != 2:
        raise ConstraintViolation("quadratic refinement applies to p = 2")
    vz = z.valuation()
    if vz.is_bottom or vz.value != 0:
        raise ConstraintViolation("z must be a unit")
    kit = _kit_for(level, kit)
    e_L = level.e_abs
    two_v2 = 2 * e_L
    u = seed if seed is not None else level.one()
    eps = z * u * u - level.one()
    guard = two_v2 + 4
    for _ in range(guard):
        v = eps.valuation()
        if v.is_bottom:
            if v.bound is None or v.bound * e_L > two_v2:
                return 0  # square to certified depth: split
            raise InsufficientPrecision(
                f"cannot decide square class: bound {v.bound!r} too shallow")
        m_frac = v.value * e_L
        if m_frac.denominator != 1:
            raise CertificateFailure(f"non-integral v_L = {m_frac}")
        m = int(m_frac)
        if history is not None:
            history.append(m)
        if m > two_v2:
            return 0
        if m == two_v2:
            # inert over an F_2 residue field: X^2 + X = 1 has no root
            return 0
        if m % 2 == 1:
            return two_v2 + 1 - m
        delta = kit.element_of_valuation(m // 2)
        u = u * (level.one() + delta)
        eps = z * u * u - level.one()
    raise InsufficientPrecision("refinement loop hit its iteration ceiling")


def center_break_filtration(params, d_upper):
    """Filtration of the order-p top step from its different exponent.

    d = (t+1)(p-1) gives the single break t; the break must lie in 1 + qN,
    be at least 1 + q (else the full group were abelian) and, for p = 2, be
    odd.  Violations are listed by name.
    """
    p, q = params.p, params.q
    if d_upper % (p - 1) != 0:
        raise ConstraintViolation(
            f"different {d_upper} not a multiple of p-1", failed=("divisibility",))
    t = d_upper // (p - 1) - 1
    failed = []
    if p == 2 and t % 2 == 0:
        failed.append("parity")
    if (t - 1) % q != 0:
        failed.append("progression")
    if t < 1 + q:
        failed.append("lower_bound")
    if failed:
        raise ConstraintViolation(
            f"break t={t} violates {failed}", failed=tuple(failed))
    return RamFiltration(((0, t, p),))
