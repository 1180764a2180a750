"""Polynomials over tower elements: Newton polygons, resultants, shifts.

The slope convention is fixed once here: a returned segment (s, l) means the
polynomial has exactly l roots of valuation s (v(p) = 1 normalization), i.e.
s is the negated geometric slope of the lower convex hull of the points
(degree, coefficient valuation).  Segments are sorted by ascending s.

Resultants of exact integer-coefficient data run over the exact quotient ring
Z[pi]/(eisenstein) through a subresultant pseudo-remainder chain, so the
discriminant checks carry no precision caveat; anything truncated falls back
to Euclidean reduction over the field with precision tracking.
"""

from dataclasses import dataclass
from fractions import Fraction

from .errors import InsufficientPrecision, LevelMismatch
from .padic import (
    Elt,
    Valuation,
    _invert_exact_scalar,
    _pow,
    _resultant_exact_eis,
    _trim_poly,
    resultant_in_field,
)


class ValuedPolynomial:
    """A polynomial with tower-element coefficients, low degree first."""

    __slots__ = ("level", "coeffs")

    def __init__(self, level, coeffs):
        coeffs = [level.embed(c) if isinstance(c, Elt) else level.from_fraction(c)
                  for c in coeffs]
        while coeffs and coeffs[-1].is_exact_zero():
            coeffs.pop()
        if coeffs and coeffs[-1].valuation().is_bottom:
            raise InsufficientPrecision("leading coefficient is zero to precision")
        self.level = level
        self.coeffs = tuple(coeffs)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __getitem__(self, i):
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return self.level.zero()

    def __iter__(self):
        return iter(self.coeffs)

    def __call__(self, x):
        level = x.level
        acc = level.zero()
        for c in reversed(self.coeffs):
            acc = acc * x + level.embed(c)
        return acc

    def __add__(self, other):
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return ValuedPolynomial(self.level, [self[i] + other[i] for i in range(n)])

    def __sub__(self, other):
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return ValuedPolynomial(self.level, [self[i] - other[i] for i in range(n)])

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Elt)):
            c = other if isinstance(other, Elt) else self.level.from_fraction(other)
            return ValuedPolynomial(self.level, [a * c for a in self.coeffs])
        self._check(other)
        out = [self.level.zero()] * (len(self.coeffs) + len(other.coeffs) - 1 or 1)
        for i, a in enumerate(self.coeffs):
            if not a.is_exact_zero():
                for j, b in enumerate(other.coeffs):
                    out[i + j] = out[i + j] + a * b
        return ValuedPolynomial(self.level, out)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = ValuedPolynomial(self.level, [self.level.one()])
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def derivative(self):
        return ValuedPolynomial(
            self.level, [i * c for i, c in enumerate(self.coeffs)][1:] or [self.level.zero()])

    def _check(self, other):
        if other.level is not self.level:
            raise LevelMismatch("polynomials over different levels")

    def __repr__(self):
        return f"<poly deg {self.degree} over {self.level.name}>"


@dataclass(frozen=True)
class NewtonPolygon:
    """Lower-hull summary: ((root valuation, multiplicity), ...) ascending."""

    segments: tuple

    @property
    def is_single_slope(self):
        return len(self.segments) == 1

    @property
    def total_length(self):
        return sum(l for _, l in self.segments)

    def merged_with(self, other):
        """Polygon of a product: multiset union of slopes."""
        slopes = []
        for s, l in self.segments + other.segments:
            slopes.extend([s] * l)
        slopes.sort()
        out = []
        for s in slopes:
            if out and out[-1][0] == s:
                out[-1][1] += 1
            else:
                out.append([s, 1])
        return NewtonPolygon(tuple((s, l) for s, l in out))


def newton_polygon(f):
    """Newton polygon of f (see module docstring for the sign convention)."""
    pts = []
    pending = []  # (i, lower bound) for coefficients that are zero to precision
    for i, c in enumerate(f.coeffs):
        if c.is_exact_zero():
            continue
        v = c.valuation()
        if v.is_bottom:
            pending.append((i, v.bound))
        else:
            pts.append((i, v.value))
    if not pts:
        raise InsufficientPrecision("no coefficient with a determined valuation")
    ord0 = pts[0][0]
    for i, _ in pending:
        if i < ord0:
            raise InsufficientPrecision(
                f"coefficient {i} is zero to precision below the first determined one")
    hull = _lower_hull(pts)
    for i, bound in pending:
        if bound is not None and bound <= _hull_height(hull, i):
            raise InsufficientPrecision(
                f"coefficient {i} undetermined at a point that could cut the hull")
    segs = []
    for (i1, v1), (i2, v2) in zip(hull, hull[1:]):
        segs.append((-Fraction(v2 - v1, i2 - i1), i2 - i1))
    segs.sort(key=lambda t: t[0])
    return NewtonPolygon(tuple(segs))


def _lower_hull(pts):
    pts = sorted(pts)
    hull = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (p[1] - y1) <= (p[0] - x1) * (y2 - y1):
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def _hull_height(hull, x):
    if x <= hull[0][0]:
        return hull[0][1]
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        if x1 <= x <= x2:
            return y1 + Fraction(y2 - y1, x2 - x1) * (x - x1)
    return hull[-1][1]


def resultant(f, g):
    """Res(f, g) over the common coefficient level."""
    if f.level is not g.level:
        raise LevelMismatch("resultant of polynomials over different levels")
    level = f.level
    fc, gc = list(f.coeffs), list(g.coeffs)
    if not fc or not gc:
        raise InsufficientPrecision("resultant with a zero polynomial")
    if level.kind == "eis" and all(c.prec is None for c in fc + gc):
        return _resultant_exact_eis(level, fc, gc)
    return resultant_in_field(fc, gc)


def discriminant(f):
    """disc(f) = (-1)^(d(d-1)/2) Res(f, f') / lc(f)."""
    d = f.degree
    res = resultant(f, f.derivative())
    lc = f.coeffs[-1]
    if res.prec is None and lc.prec is None and lc.level.kind == "eis":
        lc_inv = _invert_exact_scalar(lc)
    else:
        lc_inv = lc.invert()
    out = res * lc_inv
    return -out if (d * (d - 1) // 2) % 2 else out


def taylor_shift(f, y):
    """Coefficients of f(S + y) as a polynomial in S over y's level."""
    level = y.level
    acc = [level.zero()]
    # Horner in (S + y): acc <- acc*(S + y) + c
    for c in reversed(f.coeffs):
        nxt = [level.zero()] * (len(acc) + 1)
        for i, a in enumerate(acc):
            if a.is_exact_zero():
                continue
            nxt[i + 1] = nxt[i + 1] + a
            nxt[i] = nxt[i] + a * y
        nxt[0] = nxt[0] + level.embed(c)
        acc = nxt
    while len(acc) > 1 and acc[-1].is_exact_zero():
        acc.pop()
    return ValuedPolynomial(level, acc)


def gauss_determinant(rows):
    """Determinant of a square matrix of exact elements (test oracle).

    Exact fraction arithmetic over the field of the entries' level; intended
    for cross-checking the subresultant chain on small cases.
    """
    n = len(rows)
    m = [list(r) for r in rows]
    level = rows[0][0].level
    det = level.one()
    for col in range(n):
        piv = next((r for r in range(col, n) if not m[r][col].is_exact_zero()), None)
        if piv is None:
            return level.zero()
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        pval = m[col][col]
        det = det * pval
        pinv = _invert_exact_scalar(pval)
        for r in range(col + 1, n):
            if m[r][col].is_exact_zero():
                continue
            fct = m[r][col] * pinv
            for cc in range(col, n):
                m[r][cc] = m[r][cc] - fct * m[col][cc]
    return det


def sylvester_resultant(f, g):
    """Resultant via the Sylvester determinant (exact inputs only; test oracle)."""
    level = f.level
    fc, gc = list(f.coeffs), list(g.coeffs)
    df, dg = len(fc) - 1, len(gc) - 1
    if df == 0 and dg == 0:
        return level.one()
    size = df + dg
    rows = []
    for r in range(dg):
        row = [level.zero()] * size
        for i, c in enumerate(reversed(fc)):
            row[r + i] = c
        rows.append(row)
    for r in range(df):
        row = [level.zero()] * size
        for i, c in enumerate(reversed(gc)):
            row[r + i] = c
        rows.append(row)
    return gauss_determinant(rows)
