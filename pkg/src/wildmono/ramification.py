"""Lower-numbering ramification filtrations, Herbrand transforms, differents.

Filtrations are stored in lower numbering only, as contiguous index segments
of constant subgroup order; upper numbering is always derived on demand
through the Herbrand function, which is kept as an exact piecewise-linear
object over the rationals.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import ceil

from .errors import ConstraintViolation


@dataclass(frozen=True)
class RamFiltration:
    """Segments ((lo, hi, order), ...): group order `order` on indices lo..hi.

    Indices are contiguous from 0, orders are non-increasing and divide their
    predecessors (equal-order refinements are a permitted re-representation);
    the group is trivial beyond the last segment.
    """

    segments: tuple

    def __post_init__(self):
        segs = tuple(tuple(s) for s in self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise ConstraintViolation("empty filtration")
        if segs[0][0] != 0:
            raise ConstraintViolation("filtration must start at index 0")
        prev_hi, prev_order = None, None
        for lo, hi, order in segs:
            if hi < lo or order < 1:
                raise ConstraintViolation(f"bad segment {(lo, hi, order)}")
            if prev_hi is not None:
                if lo != prev_hi + 1:
                    raise ConstraintViolation("segments not contiguous")
                if order > prev_order or prev_order % order:
                    raise ConstraintViolation("orders must divide down the chain")
            prev_hi, prev_order = hi, order

    @property
    def group_order(self):
        return self.segments[0][2]

    @property
    def last_break(self):
        return self.segments[-1][1]

    def order_at(self, i):
        """|G_i| for integer or rational i >= 0 (step function, G_i = G_ceil(i))."""
        i = ceil(i) if not isinstance(i, int) else i
        if i < 0:
            return self.group_order
        for lo, hi, order in self.segments:
            if lo <= i <= hi:
                return order
        return 1

    def breaks(self):
        """Indices b with G_b != G_(b+1)."""
        out = []
        segs = self.segments
        for idx, (lo, hi, order) in enumerate(segs):
            nxt = segs[idx + 1][2] if idx + 1 < len(segs) else 1
            if nxt < order:
                out.append(hi)
        return tuple(out)

    def __iter__(self):
        return iter(self.segments)


@dataclass(frozen=True)
class HerbrandFn:
    """Continuous piecewise-linear function through exact breakpoints.

    ``points`` starts at (0, 0); ``final_slope`` applies past the last point.
    """

    points: tuple
    final_slope: Fraction

    def __call__(self, u):
        u = Fraction(u)
        pts = self.points
        if u <= pts[0][0]:
            # extend leftwards with the first slope (identity region for phi)
            first = self.slopes()[0] if len(pts) > 1 else self.final_slope
            return pts[0][1] + (u - pts[0][0]) * first
        for (x1, y1), (x2, y2) in zip(pts, pts[1:]):
            if u <= x2:
                return y1 + (u - x1) * Fraction(y2 - y1, 1) / (x2 - x1)
        xl, yl = pts[-1]
        return yl + (u - xl) * self.final_slope

    def slopes(self):
        out = []
        for (x1, y1), (x2, y2) in zip(self.points, self.points[1:]):
            out.append(Fraction(y2 - y1) / (x2 - x1))
        return out

    def inverse(self):
        pts = tuple((y, x) for x, y in self.points)
        return HerbrandFn(pts, Fraction(1) / self.final_slope)

    def compose(self, inner):
        """self o inner, exact on merged breakpoints."""
        xs = {x for x, _ in inner.points}
        inv = inner.inverse()
        for bx, _ in self.points:
            pre = inv(bx)
            if pre >= 0:
                xs.add(pre)
        xs = sorted(xs)
        pts = tuple((x, self(inner(x))) for x in xs)
        return HerbrandFn(pts, self.final_slope * inner.final_slope)

    def canonical(self):
        """Equivalent function with collinear interior breakpoints removed."""
        pts = list(self.points)
        out = [pts[0]]
        for i in range(1, len(pts)):
            if i + 1 < len(pts):
                (x1, y1), (x2, y2), (x3, y3) = out[-1], pts[i], pts[i + 1]
                if (y2 - y1) * (x3 - x2) == (y3 - y2) * (x2 - x1):
                    continue
            elif out[-1] != pts[i]:
                x1, y1 = out[-1]
                x2, y2 = pts[i]
                if y2 - y1 == self.final_slope * (x2 - x1):
                    continue
            out.append(pts[i])
        return HerbrandFn(tuple(out), self.final_slope)


def phi(filt):
    """Herbrand function: slope |G_i|/|G_0| on (i-1, i]."""
    g0 = filt.group_order
    pts = [(Fraction(0), Fraction(0))]
    x, y = Fraction(0), Fraction(0)
    for lo, hi, order in filt.segments:
        if hi <= x and (lo, hi) != (0, 0):
            continue
        if hi == 0:  # an index-0-only segment contributes no length
            continue
        slope = Fraction(order, g0)
        y = y + (hi - x) * slope
        x = Fraction(hi)
        pts.append((x, y))
    return HerbrandFn(tuple(pts), Fraction(1, g0))


def psi(filt):
    """Inverse Herbrand function."""
    return phi(filt).inverse()


def different_exponent(filt):
    """sum_(i>=0) (|G_i| - 1), in top-field uniformizer units."""
    return sum((hi - lo + 1) * (order - 1) for lo, hi, order in filt.segments)


def different_exponent_via_breaks(filt):
    """Independent formula: sum over breaks b of (b+1)(|G_b| - |G_(b+1)|)."""
    total = 0
    segs = filt.segments
    for idx, (lo, hi, order) in enumerate(segs):
        nxt = segs[idx + 1][2] if idx + 1 < len(segs) else 1
        total += (hi + 1) * (order - nxt)
    return total


def tower_transitivity(d_upper, e_upper, d_lower):
    """Different of a tower: d(top/bottom) = d(top/mid) + e(top/mid) d(mid/bottom)."""
    if min(d_upper, e_upper, d_lower) < 0:
        raise ConstraintViolation("negative input to tower transitivity")
    return d_upper + e_upper * d_lower


def hasse_arf_check(filt):
    """True iff every upper break (phi of a lower break) is an integer.

    The caller vouches that the filtration belongs to an abelian extension.
    """
    f = phi(filt)
    return all(f(b).denominator == 1 for b in filt.breaks())


@dataclass(frozen=True)
class BreakFamily:
    """Arithmetic progression offset + modulus*N of admissible breaks."""

    offset: int
    modulus: int
    minimum: int

    def __contains__(self, t):
        return t >= self.minimum and (t - self.offset) % self.modulus == 0

    def members(self, count=4):
        first = self.minimum + (-(self.minimum - self.offset)) % self.modulus
        return tuple(first + k * self.modulus for k in range(count))

    def describe(self):
        return f"{self.offset} + {self.modulus}*N, t >= {self.minimum}"


def admissible_center_breaks(p, n, outer):
    """Admissible breaks 1 + p^n N of the center step, given the outer shape.

    ``outer`` is the filtration of the quotient by the center; its second
    group must already be trivial.
    """
    if outer.order_at(2) != 1:
        raise ConstraintViolation("outer filtration must have trivial second group")
    return BreakFamily(offset=1, modulus=p ** n, minimum=1)


@dataclass(frozen=True)
class FiltrationFamily:
    """Shape G_0 = G_1 = G, G_2..G_t = center, parametrized by an open break."""

    p: int
    n: int
    family: BreakFamily

    @property
    def q(self):
        return self.p ** self.n

    def filtration_for(self, t):
        if t not in self.family:
            raise ConstraintViolation(f"break {t} not in {self.family.describe()}")
        q = self.q
        return RamFiltration(((0, 1, self.p * q * q), (2, t, self.p)))


def assemble_galois_filtration(p, n, d_center=None):
    """Full lower filtration of the degree-pq^2 monodromy group.

    Splices the outer shape (breaks at 1, second group trivial) with the
    center step's break t = d_center - 1.  For p = 2 the constraints pin
    t = 1 + q and a concrete filtration is returned; for p >= 3 the break is
    genuinely open and a FiltrationFamily over 1 + qN (t >= 1 + q) is
    returned instead -- never a chosen member.
    """
    q = p ** n
    if p != 2:
        return FiltrationFamily(p, n, BreakFamily(offset=1, modulus=q, minimum=1 + q))
    if d_center is None:
        raise ConstraintViolation("p = 2 assembly needs the center different exponent")
    t = d_center // (p - 1) - 1
    failed = []
    if (t - 1) % q != 0:
        failed.append("progression")
    if t < 1 + q:
        failed.append("lower_bound")
    if t % 2 == 0:
        failed.append("parity")
    if t > 1 + q:
        failed.append("upper_bound")
    if failed:
        raise ConstraintViolation(f"center break t={t} violates {failed}",
                                  failed=tuple(failed))
    return RamFiltration(((0, 1, p * q * q), (2, 1 + q, p)))


def restrict_to_subgroup(filt, sub_order):
    """Filtration of a subgroup H (same indices) for chain filtrations.

    Valid when every nontrivial G_i contains H, which holds for the tower
    shapes here (G_i ranges over G, center, 1); then H_i = H unless G_i = 1.
    """
    segs = []
    for lo, hi, order in filt.segments:
        o = min(order, sub_order)
        if segs and segs[-1][2] == o:
            segs[-1] = (segs[-1][0], hi, o)
        else:
            segs.append((lo, hi, o))
    out = [s for s in segs if s[2] > 1]
    return RamFiltration(tuple(out) if out else ((0, 0, 1),))


def quotient_filtration(filt, sub_filt):
    """Filtration of G/H in its own (Herbrand-transported) numbering."""
    transport = phi(sub_filt)
    segs = []
    for lo, hi, order in filt.segments:
        sub_order = sub_filt.order_at(hi)
        q_order = order // sub_order
        new_hi = transport(hi)
        if new_hi.denominator != 1:
            raise ConstraintViolation("quotient break is not an integer")
        segs.append((int(transport(max(lo - 1, 0))) + (1 if lo else 0), int(new_hi), q_order))
    merged = []
    for lo, hi, order in segs:
        if merged and merged[-1][2] == order:
            merged[-1] = (merged[-1][0], hi, order)
        elif merged and order >= merged[-1][2]:
            continue
        else:
            lo_fix = merged[-1][1] + 1 if merged else 0
            merged.append((lo_fix, hi, order))
    out = [s for s in merged if s[2] > 1]
    return RamFiltration(tuple(out) if out else ((0, 0, 1),))
