"""Exact truncated arithmetic in the ramified tower Qp < K < L < M.

Representation conventions
--------------------------

Every element is ``pi^shift * unit`` at its level, where ``pi`` is the level
uniformizer.  The two bottom levels ("eisenstein levels") hold the unit as a
coefficient tuple in the powers of the uniformizer:

* level Qp: tuple of length 1, uniformizer p;
* level K = Qp(pi), pi^e = p * mu(pi) with e = (p-1)(q+1) and mu an integer
  polynomial read off the Eisenstein relation.

Levels L = K[Y]/(Ldef) and M = L[W]/(W^p - rhs) hold the unit as a coefficient
tuple over the level below with ``shift`` identically 0; Laurent behaviour
lives in the K coefficients (the uniformizer of L is not monomial in pi and
the generator, so it is never factored out of the representation).

Elements are exact (``prec is None``, rational coefficients, closed under
ring operations) or truncated (integer coefficients modulo a fixed storage
power of p, with ``prec`` the guaranteed absolute precision in the level's
own uniformizer units).  Inversion always produces a truncated element.
Valuations are exact rationals normalized so v(p) = 1; the distinguished
PrecisionBottom value means "zero to the stated precision".  Valuations above
K are computed through norms (resultants against the defining polynomial),
exactly whenever the element is exact.
"""

from fractions import Fraction
from math import comb, gcd

from .errors import InsufficientPrecision, LevelMismatch

_BOTTOM = object()


def _vp_int(a, p):
    """p-adic valuation of a nonzero int."""
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v


def _vp(a, p):
    """p-adic valuation of an int or Fraction; None for 0."""
    if a == 0:
        return None
    if isinstance(a, Fraction):
        return _vp_int(a.numerator, p) - _vp_int(a.denominator, p)
    return _vp_int(a, p)


class Valuation:
    """An exact rational valuation with v(p) = 1, or PrecisionBottom.

    A bottom value carries the proven lower bound (in v(p) = 1 units), or
    None when the element is exactly zero.
    """

    __slots__ = ("value", "bound")

    def __init__(self, value, bound=None):
        self.value = Fraction(value) if value is not _BOTTOM else _BOTTOM
        self.bound = Fraction(bound) if bound is not None else None

    @classmethod
    def bottom(cls, bound=None):
        v = cls.__new__(cls)
        v.value = _BOTTOM
        v.bound = Fraction(bound) if bound is not None else None
        return v

    @property
    def is_bottom(self):
        return self.value is _BOTTOM

    def in_level_units(self, level):
        """Rescale to the v_F(pi_F) = 1 normalization of ``level``."""
        if self.is_bottom:
            return Valuation.bottom(None if self.bound is None else self.bound * level.e_abs)
        return Valuation(self.value * level.e_abs)

    def exceeds(self, threshold):
        """True when v > threshold is certain (bottom counts if its bound does)."""
        threshold = Fraction(threshold)
        if self.is_bottom:
            return self.bound is None or self.bound > threshold
        return self.value > threshold

    def __eq__(self, other):
        if isinstance(other, Valuation):
            if self.is_bottom or other.is_bottom:
                return self.is_bottom and other.is_bottom
            return self.value == other.value
        if self.is_bottom:
            return NotImplemented
        return self.value == other

    def __hash__(self):
        return hash(None if self.is_bottom else self.value)

    def __repr__(self):
        if self.is_bottom:
            if self.bound is None:
                return "PrecisionBottom"
            return f"PrecisionBottom(>= {self.bound})"
        return f"v={self.value}"


class Level:
    """One floor of the tower.  Arithmetic dispatches on ``kind``."""

    def __init__(self, tower, name, kind, below, rel_degree, e_rel):
        self.tower = tower
        self.name = name
        self.kind = kind  # "eis" (Qp, K) or "poly" (L, M)
        self.below = below
        self.rel_degree = rel_degree
        self.e_rel = e_rel
        self.e_abs = e_rel * (below.e_abs if below else 1)
        self.abs_degree = rel_degree * (below.abs_degree if below else 1)
        # eis levels
        self.e = None
        self.mu = None
        self._mu_inv = None
        # poly levels
        self.def_coeffs = None   # defining polynomial, exact coeffs at `below`
        self.monic = True
        self._lc_inv_frac = None
        self.v_gen = None        # valuation of the generator, v(p)=1 units

    def __repr__(self):
        return f"<level {self.name}>"

    # --- constructors ---

    def zero(self):
        return Elt._exact(self, 0, self._zero_unit())

    def one(self):
        return self.from_int(1)

    def from_int(self, k):
        return self.from_fraction(Fraction(k))

    def from_fraction(self, fr):
        fr = Fraction(fr)
        if self.kind == "eis":
            unit = (fr,) + (Fraction(0),) * (self.e - 1)
            return Elt._exact(self, 0, unit)
        return self._from_coeffs([self.below.from_fraction(fr)] +
                                 [self.below.zero()] * (self.rel_degree - 1))

    def pi(self):
        """The uniformizer as an element (eis levels only)."""
        if self.kind != "eis":
            raise LevelMismatch(f"level {self.name} has no explicit uniformizer element")
        unit = tuple(Fraction(1 if i == min(1, self.e - 1) else 0) for i in range(self.e))
        if self.e == 1:
            return Elt._exact(self, 1, (Fraction(1),))
        return Elt._exact(self, 0, unit)

    def pi_pow(self, k):
        """pi^k, exact, any integer k (eis levels)."""
        if self.kind != "eis":
            raise LevelMismatch("pi_pow on a polynomial level")
        e = self.e
        s, r = divmod(k, e)
        # pi^(e*s) = (p*mu)^s ; negative s stays exact over the rationals
        out = self.from_fraction(Fraction(self.tower.p) ** s)
        mu_elt = Elt._exact(self, 0, tuple(Fraction(c) for c in self.mu)) if e > 1 \
            else self.one()
        if s >= 0:
            for _ in range(s):
                out = out if e == 1 else _mul(out, mu_elt)
        else:
            inv = self._mu_inv_exact()
            for _ in range(-s):
                out = out if e == 1 else _mul(out, inv)
        if r:
            unit = [Fraction(0)] * e
            unit[r] = Fraction(1)
            out = _mul(out, Elt._exact(self, 0, tuple(unit)))
        return out

    def _mu_inv_exact(self):
        if self._mu_inv is None:
            self._mu_inv = _kinv_frac(self, tuple(Fraction(c) for c in self.mu))
        return Elt._exact(self, 0, self._mu_inv)

    def gen(self):
        """Generator of a polynomial level (the attached root / radical)."""
        if self.kind != "poly":
            raise LevelMismatch("gen() on an eisenstein level")
        coeffs = [self.below.zero() for _ in range(self.rel_degree)]
        coeffs[1] = self.below.one()
        return self._from_coeffs(coeffs)

    def _zero_unit(self):
        if self.kind == "eis":
            return (Fraction(0),) * self.e
        return tuple(self.below.zero() for _ in range(self.rel_degree))

    def _from_coeffs(self, coeffs):
        coeffs = list(coeffs)
        if len(coeffs) > self.rel_degree:
            coeffs = _poly_reduce(self, coeffs)
        coeffs += [self.below.zero()] * (self.rel_degree - len(coeffs))
        prec = None
        if any(c.prec is not None for c in coeffs):
            prec = _poly_prec(self, coeffs)
        return Elt(self, 0, tuple(coeffs), prec)

    def embed(self, x):
        """Lift an element of a lower level into this level."""
        if x.level is self:
            return x
        chain = []
        lvl = self
        while lvl is not None and lvl is not x.level:
            chain.append(lvl)
            lvl = lvl.below
        if lvl is None:
            raise LevelMismatch(f"{x.level.name} is not below {self.name}")
        for lvl in reversed(chain):
            coeffs = [x] + [x.level.zero()] * (lvl.rel_degree - 1)
            x = lvl._from_coeffs(coeffs)
        return x


class Tower:
    """The tower Qp < K with slots for the monodromy levels L and M.

    ``prec_p`` is the working precision in v(p) = 1 units used whenever a
    truncated element has to be created; truncated coefficients are stored
    modulo p^(prec_p + guard).
    """

    GUARD = 8

    def __init__(self, p, n, prec_p, residue_degree=1):
        self.p = p
        self.n = n
        self.q = p ** n
        self.residue_degree = residue_degree
        self.prec_p = prec_p
        self.stor = prec_p + self.GUARD
        self.pmod = p ** self.stor

        e = (p - 1) * (self.q + 1)
        # defining polynomial of pi over Qp: ((1 + X^(1+q))^p - 1)/X^(1+q)
        eis = [0] * (e + 1)
        for j in range(1, p + 1):
            eis[(1 + self.q) * (j - 1)] = comb(p, j)
        self.eisenstein = tuple(eis)
        self.e_K = e

        qp = Level(self, "Qp", "eis", None, 1, 1)
        qp.e = 1
        qp.mu = (1,)
        K = Level(self, "K", "eis", qp, e, e)
        K.e = e
        # pi^e = p*mu(pi) read off the Eisenstein relation
        K.mu = tuple(-(eis[i] // p) if i < e else 0 for i in range(e))
        self.levels = {"Qp": qp, "K": K}

    def __repr__(self):
        return f"Tower(p={self.p}, n={self.n}, prec_p={self.prec_p})"

    @property
    def Qp(self):
        return self.levels["Qp"]

    @property
    def K(self):
        return self.levels["K"]

    def lam(self):
        """lambda = zeta_p - 1 = pi^(1+q), exact."""
        return self.K.pi_pow(1 + self.q)

    def attach_poly_level(self, name, below, def_coeffs, v_gen):
        """Register K[Y]/(def) (or L[W]/(def)) as a new tower level.

        ``def_coeffs`` are exact elements of ``below``, low degree first, with
        unit leading coefficient.
        """
        if name in self.levels:
            raise LevelMismatch(f"level {name} already attached")
        deg = len(def_coeffs) - 1
        e_rel = deg  # totally ramified steps only, in this tower shape
        lvl = Level(self, name, "poly", below, deg, e_rel)
        lvl.def_coeffs = tuple(def_coeffs)
        lc = def_coeffs[-1]
        lvl.monic = _is_exact_one(lc)
        lvl.v_gen = Fraction(v_gen)
        self.levels[name] = lvl
        return lvl


def _is_exact_one(x):
    if x.prec is not None or x.shift != 0:
        return False
    return x.unit[0] == 1 and all(c == 0 for c in x.unit[1:])


class Elt:
    """A ring element of one tower level (see module docstring)."""

    __slots__ = ("level", "shift", "unit", "prec", "_val")

    def __init__(self, level, shift, unit, prec):
        self.level = level
        self.shift = shift
        self.unit = unit
        self.prec = prec
        self._val = None

    @classmethod
    def _exact(cls, level, shift, unit):
        return cls(level, shift, unit, None)

    @property
    def is_exact(self):
        return self.prec is None

    def is_exact_zero(self):
        if self.level.kind == "eis":
            return self.prec is None and all(c == 0 for c in self.unit)
        return self.prec is None and all(c.is_exact_zero() for c in self.unit)

    def is_zero_to_prec(self):
        v = self.valuation()
        return v.is_bottom

    def valuation(self):
        if self._val is None:
            self._val = _valuation(self)
        return self._val

    def residue(self):
        return _residue(self)

    def truncated(self, prec_p=None):
        """Truncated copy at the tower working precision (or prec_p p-units)."""
        return _truncate(self, prec_p)

    # operators ------------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Elt):
            if other.level is not self.level:
                raise LevelMismatch(
                    f"levels {self.level.name} and {other.level.name} differ")
            return other
        if isinstance(other, (int, Fraction)):
            return self.level.from_fraction(Fraction(other))
        return None

    def __add__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is None else _add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is None else _add(self, _neg(other))

    def __rsub__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is None else _add(other, _neg(self))

    def __neg__(self):
        return _neg(self)

    def __mul__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is None else _mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, k):
        return _pow(self, k)

    def invert(self):
        return _invert(self)

    def __truediv__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is None else _mul(self, _invert(other))

    def __repr__(self):
        tag = "exact" if self.prec is None else f"prec={self.prec}"
        return f"<{self.level.name}-elt v={self.valuation()!r} {tag}>"


# ---------------------------------------------------------------------------
# eisenstein-level helpers
# ---------------------------------------------------------------------------

def _kmul_raw(level, a, b, mod):
    """Coefficient product of unit tuples modulo the defining relation.

    mod is the integer storage modulus, or None for exact (Fraction) work.
    """
    e = level.e
    if e == 1:
        v = a[0] * b[0]
        return (v % mod if mod else v,)
    p = level.tower.p
    mu = level.mu
    raw = [0] * (2 * e - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                raw[i + j] += ai * bj
    for i in range(2 * e - 2, e - 1, -1):
        c = raw[i]
        if c:
            raw[i] = 0
            cp = c * p
            for k in range(e):
                if mu[k]:
                    raw[i - e + k] += cp * mu[k]
    if mod:
        return tuple(v % mod for v in raw[:e])
    return tuple(raw[:e])


def _kinv_frac(level, unit):
    """Exact inverse of a unit tuple over the rationals (XGCD against the relation)."""
    e = level.e
    if e == 1:
        return (Fraction(1) / unit[0],)
    mod_poly = [Fraction(c) for c in level.tower.eisenstein]
    a = [Fraction(c) for c in unit]
    inv = _poly_xgcd_inverse(a, mod_poly)
    return tuple(inv[i] if i < len(inv) else Fraction(0) for i in range(e))


def _poly_xgcd_inverse(a, mod_poly):
    """Inverse of a modulo mod_poly over the rationals (lists, low first)."""
    def trim(u):
        while u and u[-1] == 0:
            u.pop()
        return u

    def polydiv(num, den):
        num = num[:]
        q = [Fraction(0)] * max(1, len(num) - len(den) + 1)
        inv_lead = Fraction(1) / den[-1]
        while len(num) >= len(den) and trim(num):
            f = num[-1] * inv_lead
            off = len(num) - len(den)
            q[off] = f
            for j in range(len(den)):
                num[off + j] -= f * den[j]
            trim(num)
        return trim(q), num

    r0, r1 = [Fraction(c) for c in mod_poly], trim([Fraction(c) for c in a])
    s0, s1 = [Fraction(0)], [Fraction(1)]
    while len(r1) > 1:
        q, r = polydiv(r0, r1)
        s = [Fraction(0)] * max(len(s0), len(q) + len(s1) - 1 or 1)
        for i, si in enumerate(s0):
            s[i] += si
        for i, qi in enumerate(q):
            if qi:
                for j, sj in enumerate(s1):
                    s[i + j] -= qi * sj
        r0, r1, s0, s1 = r1, r, s1, trim(s) or [Fraction(0)]
    if not r1 or r1[0] == 0:
        raise ZeroDivisionError("element is a zero divisor")
    c = Fraction(1) / r1[0]
    return [si * c for si in s1]


def _unit_min_val(level, unit, p, cap=None):
    """min_i (e*vp(a_i) + i) over nonzero coefficients, or None if all zero.

    ``cap``: stop counting p-divisions past this many (storage exhaustion).
    """
    e = level.e
    best = None
    for i, a in enumerate(unit):
        if a == 0:
            continue
        v = _vp(a, p)
        t = e * v + i
        if best is None or t < best:
            best = t
    return best


def _eis_normalize(level, shift, unit, prec):
    """Re-split pi^shift * unit so the unit part has valuation zero."""
    tower = level.tower
    p = tower.p
    e = level.e
    exact = prec is None
    t = _unit_min_val(level, unit, p)
    if t is None:
        if exact:
            return Elt._exact(level, 0, level._zero_unit())
        return Elt(level, 0, (0,) * e, prec)
    if not exact and shift + t >= prec:
        return Elt(level, 0, (0,) * e, prec)
    if t == 0:
        return Elt(level, shift, unit, prec)
    if exact and e > 1:
        # keep exact elements unnormalized rather than leave the exact world
        return Elt._exact(level, shift, unit)
    if e == 1:
        a = unit[0]
        if exact:
            return Elt._exact(level, shift + t, (a / Fraction(p) ** t,))
        return Elt(level, shift + t, (a // p ** t % tower.pmod,), prec)
    # truncated, e > 1: divide each monomial a_i pi^i by pi^t
    out = [0] * e
    for i, a in enumerate(unit):
        if a == 0:
            continue
        s, r = divmod(i - t, e)
        coeff = a * p ** s if s >= 0 else a // (p ** (-s))
        term = [0] * e
        term[r] = coeff % tower.pmod
        if s > 0:
            for _ in range(s):
                term = list(_kmul_raw(level, tuple(term), level.mu, tower.pmod))
        elif s < 0:
            mu_inv = _mu_inv_trunc(level)
            for _ in range(-s):
                term = list(_kmul_raw(level, tuple(term), mu_inv, tower.pmod))
        for k in range(e):
            out[k] = (out[k] + term[k]) % tower.pmod
    return Elt(level, shift + t, tuple(out), prec)


def _mu_inv_trunc(level):
    if level._mu_inv is None:
        level._mu_inv = _kinv_frac(level, tuple(Fraction(c) for c in level.mu))
    pmod = level.tower.pmod
    return tuple(_frac_to_mod(c, level.tower.p, pmod) for c in level._mu_inv)


def _frac_to_mod(fr, p, pmod):
    num, den = fr.numerator, fr.denominator
    if den % p == 0:
        raise ValueError("fraction is not p-integral")
    return num * pow(den, -1, pmod) % pmod


def _truncate(x, prec_p=None):
    """Exact -> truncated at the tower working precision (no-op when truncated)."""
    level = x.level
    tower = level.tower
    if level.kind == "poly":
        if x.prec is not None:
            return x
        coeffs = [_truncate(c, prec_p) for c in x.unit]
        return Elt(level, 0, tuple(coeffs), _poly_prec(level, coeffs))
    if x.prec is not None:
        return x
    p = tower.p
    e = level.e
    kmin = 0
    for a in x.unit:
        if a != 0:
            kmin = min(kmin, _vp(a, p))
    scale = Fraction(p) ** (-kmin)
    ints = tuple(_frac_to_mod(a * scale, p, tower.pmod) for a in x.unit)
    shift = x.shift + e * kmin
    rel = e * (prec_p if prec_p is not None else tower.prec_p)
    t = _unit_min_val(level, ints, p)
    if t is None:
        # exact zero becomes a deeply-known truncated zero
        return Elt(level, 0, (0,) * e, rel)
    return _eis_normalize(level, shift, ints, shift + t + rel)


def _val_pi_units(x):
    """Valuation in the element's own level-uniformizer units (or bottom)."""
    v = x.valuation()
    if v.is_bottom:
        return None
    return v.value * x.level.e_abs


def _add(x, y):
    level = x.level
    if level.kind == "poly":
        coeffs = [a + b for a, b in zip(x.unit, y.unit)]
        prec = None if all(c.prec is None for c in coeffs) else _poly_prec(level, coeffs)
        return Elt(level, 0, tuple(coeffs), prec)
    if x.prec is None and y.prec is None:
        if x.shift <= y.shift:
            lo, hi = x, y
        else:
            lo, hi = y, x
        unit_hi = _pi_mul_unit(level, hi.unit, hi.shift - lo.shift, None)
        unit = tuple(a + b for a, b in zip(lo.unit, unit_hi))
        return _eis_normalize(level, lo.shift, unit, None)
    x, y = _truncate(x), _truncate(y)
    prec = min(x.prec, y.prec)
    if x.shift <= y.shift:
        lo, hi = x, y
    else:
        lo, hi = y, x
    pmod = level.tower.pmod
    unit_hi = _pi_mul_unit(level, hi.unit, hi.shift - lo.shift, pmod)
    unit = tuple((a + b) % pmod for a, b in zip(lo.unit, unit_hi))
    return _eis_normalize(level, lo.shift, unit, prec)


def _pi_mul_unit(level, unit, k, mod):
    """unit * pi^k as a coefficient tuple, k >= 0."""
    if k == 0:
        return unit
    e = level.e
    p = level.tower.p
    mu = level.mu
    out = list(unit)
    full, r = divmod(k, e)
    for _ in range(full):
        out = [c * p for c in out]
        out = list(_kmul_raw(level, tuple(out), mu, mod)) if e > 1 else out
        if mod:
            out = [c % mod for c in out]
    if r:
        raw = [0] * r + out
        for i in range(len(raw) - 1, e - 1, -1):
            c = raw[i]
            if c:
                raw[i] = 0
                cp = c * p
                for kk in range(e):
                    if mu[kk]:
                        raw[i - e + kk] += cp * mu[kk]
        out = [c % mod if mod else c for c in raw[:e]]
    return tuple(out)


def _neg(x):
    level = x.level
    if level.kind == "poly":
        coeffs = [-c for c in x.unit]
        return Elt(level, 0, tuple(coeffs), x.prec)
    if x.prec is None:
        return Elt._exact(level, x.shift, tuple(-a for a in x.unit))
    pmod = level.tower.pmod
    return Elt(level, x.shift, tuple((-a) % pmod for a in x.unit), x.prec)


def _mul(x, y):
    level = x.level
    if level.kind == "poly":
        n = level.rel_degree
        raw = [level.below.zero() for _ in range(2 * n - 1)]
        for i, a in enumerate(x.unit):
            if a.is_exact_zero():
                continue
            for j, b in enumerate(y.unit):
                if not b.is_exact_zero():
                    raw[i + j] = raw[i + j] + a * b
        return level._from_coeffs(raw)
    if x.prec is None and y.prec is None:
        unit = _kmul_raw(level, x.unit, y.unit, None)
        return _eis_normalize(level, x.shift + y.shift, unit, None)
    xt, yt = _truncate(x), _truncate(y)
    vx = xt.shift if any(xt.unit) else xt.prec
    vy = yt.shift if any(yt.unit) else yt.prec
    prec = min(xt.prec + vy, yt.prec + vx)
    if not any(xt.unit) or not any(yt.unit):
        return Elt(level, 0, (0,) * level.e, prec)
    unit = _kmul_raw(level, xt.unit, yt.unit, level.tower.pmod)
    return _eis_normalize(level, xt.shift + yt.shift, unit, prec)


def _pow(x, k):
    if k < 0:
        return _pow(_invert(x), -k)
    out = x.level.one()
    base = x
    while k:
        if k & 1:
            out = _mul(out, base)
        base = _mul(base, base)
        k >>= 1
    return out


def _invert(x):
    level = x.level
    if level.kind == "poly":
        return _poly_invert(x)
    xt = _truncate(x)
    if not any(xt.unit):
        raise InsufficientPrecision("inverting an element that is zero to precision")
    tower = level.tower
    pmod = tower.pmod
    if level.e == 1:
        u = xt.unit[0]
        if u % tower.p == 0:
            raise InsufficientPrecision("non-normalized unit in invert")
        inv = (pow(u, -1, pmod),)
    else:
        inv = _newton_unit_inverse(level, xt.unit)
    prec = xt.prec - 2 * xt.shift
    return _eis_normalize(level, -xt.shift, inv, prec)


def _newton_unit_inverse(level, unit):
    tower = level.tower
    pmod = tower.pmod
    a0 = unit[0]
    if a0 % tower.p == 0:
        raise InsufficientPrecision("unit tuple has non-unit constant term")
    z = (pow(a0, -1, pmod),) + (0,) * (level.e - 1)
    two = (2 % pmod,) + (0,) * (level.e - 1)
    steps = max(1, (level.e * tower.stor).bit_length() + 1)
    for _ in range(steps):
        uz = _kmul_raw(level, unit, z, pmod)
        corr = tuple((t - u) % pmod for t, u in zip(two, uz))
        z = _kmul_raw(level, z, corr, pmod)
    return z


# ---------------------------------------------------------------------------
# polynomial-level helpers
# ---------------------------------------------------------------------------

def _poly_prec(level, coeffs):
    """Guaranteed absolute precision, in level-uniformizer units (int)."""
    vals = []
    for j, c in enumerate(coeffs):
        if c.prec is None:
            continue
        prec_p = Fraction(c.prec, c.level.e_abs)
        vals.append(prec_p + j * level.v_gen)
    if not vals:
        return None
    bound_p = min(vals)
    from math import floor
    return floor(bound_p * level.e_abs)


def _poly_reduce(level, coeffs):
    """Reduce a coefficient list modulo the level's defining polynomial."""
    deg = level.rel_degree
    defc = level.def_coeffs
    lc = defc[-1]
    coeffs = list(coeffs)
    use_exact = all(c.prec is None for c in coeffs)
    if level.monic:
        lc_inv = None
    elif use_exact:
        if level._lc_inv_frac is None:
            level._lc_inv_frac = _invert_exact_scalar(lc)
        lc_inv = level._lc_inv_frac
    else:
        lc_inv = _invert(lc)
    for i in range(len(coeffs) - 1, deg - 1, -1):
        c = coeffs[i]
        if c.is_exact_zero():
            continue
        f = c if level.monic else c * lc_inv
        for j in range(deg):
            coeffs[i - deg + j] = coeffs[i - deg + j] - f * defc[j]
        coeffs[i] = c.level.zero()
    return coeffs[:deg]


def _invert_exact_scalar(x):
    """Exact inverse of an exact eis-level element (rational coefficients)."""
    if x.prec is not None:
        raise ValueError("exact scalar expected")
    level = x.level
    inv_unit = _kinv_frac(level, x.unit)
    return Elt._exact(level, -x.shift, inv_unit)


def _poly_invert(x):
    """Inverse at a polynomial level via extended Euclid against the modulus."""
    level = x.level
    below = level.below
    f = [_truncate(c) for c in level.def_coeffs]
    g = [_truncate(c) for c in x.unit]
    # extended euclid: maintain r, s with r = s*g  (mod f)
    r0, s0 = f, [below.zero()]
    r1, s1 = _trim_poly(g), [below.one()]
    if not r1:
        raise InsufficientPrecision("inverting zero at a polynomial level")
    while len(r1) > 1:
        q, r = _poly_divmod_field(r0, r1)
        s = _poly_sub(s0, _poly_mul_lists(q, s1))
        r0, s0 = r1, s1
        r1, s1 = _trim_poly(r), s
        if not r1:
            raise InsufficientPrecision("modulus and element share a factor to precision")
    c_inv = _invert(r1[0])
    inv = [ci * c_inv for ci in s1]
    return level._from_coeffs(inv)


def _trim_poly(coeffs):
    """Drop leading coefficients that are zero to stored knowledge.

    Exact zeros are always safe to drop.  A truncated all-zero coefficient is
    dropped too: its true value is below its own precision, and downstream
    precision bookkeeping keeps that uncertainty visible.
    """
    out = list(coeffs)
    while out:
        c = out[-1]
        if c.is_exact_zero():
            out.pop()
            continue
        if c.prec is not None and not _has_unit_data(c):
            out.pop()
            continue
        break
    return out


def _has_unit_data(c):
    if c.level.kind == "eis":
        return any(c.unit)
    return any(_has_unit_data(x) or x.prec is None and not x.is_exact_zero()
               for x in c.unit)


def _poly_divmod_field(num, den):
    """Polynomial division over a field level; den already trimmed, deg >= 1."""
    lead_inv = _invert(den[-1])
    num = list(num)
    qlen = max(1, len(num) - len(den) + 1)
    q = [den[0].level.zero()] * qlen
    while len(num) >= len(den):
        top = num[-1]
        if top.is_exact_zero() or (top.prec is not None and not _has_unit_data(top)):
            num.pop()
            continue
        f = top * lead_inv
        off = len(num) - len(den)
        q[off] = f
        for j in range(len(den)):
            num[off + j] = num[off + j] - f * den[j]
        num.pop()
    return q, num


def _poly_sub(a, b):
    n = max(len(a), len(b))
    zero = (a[0] if a else b[0]).level.zero()
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else zero
        y = b[i] if i < len(b) else zero
        out.append(x - y)
    return out


def _poly_mul_lists(a, b):
    if not a or not b:
        return []
    zero = a[0].level.zero()
    out = [zero] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if not ai.is_exact_zero():
            for j, bj in enumerate(b):
                out[i + j] = out[i + j] + ai * bj
    return out


# ---------------------------------------------------------------------------
# valuations, norms, residues
# ---------------------------------------------------------------------------

def _valuation(x):
    level = x.level
    if level.kind == "eis":
        e = level.e
        if x.prec is None:
            t = _unit_min_val(level, x.unit, level.tower.p)
            if t is None:
                return Valuation.bottom(None)
            return Valuation(Fraction(x.shift + t, e))
        if not any(x.unit):
            return Valuation.bottom(Fraction(x.prec, e))
        return Valuation(Fraction(x.shift, e))
    # polynomial level: norm down one floor
    if all(c.is_exact_zero() for c in x.unit):
        return Valuation.bottom(None)
    if all(c.is_exact_zero() or (c.prec is not None and not _has_unit_data(c))
           for c in x.unit):
        # zero to stored knowledge: bounded by the coefficient precisions
        return Valuation.bottom(Fraction(x.prec, level.e_abs))
    nrm = norm_to_base(x)
    v = nrm.valuation()
    d = level.rel_degree
    if v.is_bottom:
        bound = None if v.bound is None else v.bound / d
        own = None if x.prec is None else Fraction(x.prec, level.e_abs)
        if own is not None:
            bound = own if bound is None else max(bound, own)
        return Valuation.bottom(bound)
    return Valuation(v.value / d)


def valuation(x):
    """Exact rational valuation of ``x``, normalized v(p) = 1."""
    return x.valuation()


def norm_to_base(x):
    """Field norm of an element of L (or M) down to the level below."""
    level = x.level
    if level.kind != "poly":
        raise LevelMismatch("norm_to_base applies to attached extension levels")
    rep = _trim_poly(list(x.unit))
    below = level.below
    if not rep:
        if x.prec is None:
            return below.zero()
        raise InsufficientPrecision("norm of an element with no determined coefficient")
    if len(rep) == 1:
        return _pow(rep[0], level.rel_degree)
    defc = list(level.def_coeffs)
    if all(c.prec is None for c in rep) and below.kind == "eis":
        res = _resultant_exact_eis(below, defc, rep)
    else:
        res = resultant_in_field(defc, rep)
    lc = defc[-1]
    if _is_exact_one(lc):
        return res
    corr = _pow(_invert_exact_scalar(lc) if res.prec is None and below.kind == "eis"
                else _invert(lc), len(rep) - 1)
    return res * corr


def resultant_in_field(F, G):
    """Resultant of two coefficient lists over a common field level (Euclid).

    Leading coefficients must be determined; raises InsufficientPrecision when
    a degree cannot be certified.
    """
    F = _trim_poly(list(F))
    G = _trim_poly(list(G))
    if not F or not G:
        raise InsufficientPrecision("resultant of a polynomial with no determined terms")
    level = F[0].level
    acc = level.one()
    sign = 1
    while True:
        dF, dG = len(F) - 1, len(G) - 1
        if dG == 0:
            acc = acc * _pow(G[0], dF)
            break
        if dF < dG:
            F, G = G, F
            if (dF & 1) and (dG & 1):
                sign = -sign
            continue
        _, R = _poly_divmod_field(F, G)
        R = _trim_poly(R)
        if not R:
            return level.zero()
        dR = len(R) - 1
        acc = acc * _pow(G[-1], dF - dR)
        if (dF & 1) and (dG & 1):
            sign = -sign
        F, G = G, R
    return acc if sign == 1 else -acc


# --- exact resultants over Z[pi]/(eisenstein) ------------------------------

def _clear_denoms(level, coeffs):
    """Exact eis-level poly -> (integer unit tuples, p-power scale, lcm scale)."""
    p = level.tower.p
    D = 1
    shift_min = 0
    for c in coeffs:
        shift_min = min(shift_min, c.shift)
        for a in c.unit:
            if a != 0:
                D = D * a.denominator // gcd(D, a.denominator)
    out = []
    for c in coeffs:
        unit = [a * D for a in c.unit]
        assert all(u.denominator == 1 for u in unit)
        ints = tuple(int(u) for u in unit)
        ints = _pi_mul_unit(level, ints, c.shift - shift_min, None)
        out.append(ints)
    return out, shift_min, D


def _resultant_exact_eis(level, F, G):
    """Exact resultant of exact eis-coefficient polynomials, as an exact element."""
    Fc, sF, DF = _clear_denoms(level, F)
    Gc, sG, DG = _clear_denoms(level, G)
    dF, dG = len(F) - 1, len(G) - 1
    res_int = _subresultant_resultant(level, Fc, Gc)
    res = Elt._exact(level, 0, tuple(Fraction(c) for c in res_int))
    # undo the clearing: Res(c*F, G) = c^(deg G) Res(F, G) with c = D * pi^(-s)
    scale = Fraction(DF) ** dG * Fraction(DG) ** dF
    res = res * level.from_fraction(Fraction(1) / scale)
    back = -(sF * dG + sG * dF)
    if back:
        res = res * level.pi_pow(back)
    return res


def _subresultant_resultant(level, A, B):
    """Resultant of integer-coefficient unit-tuple polynomials (subresultant PRS)."""
    def deg(P):
        d = len(P) - 1
        while d >= 0 and not any(P[d]):
            d -= 1
        return d

    def lc(P):
        return P[deg(P)]

    one = (1,) + (0,) * (level.e - 1)
    dA, dB = deg(A), deg(B)
    if dA < 0 or dB < 0:
        return (0,) * level.e
    s = 1
    if dA < dB:
        A, B, dA, dB = B, A, dB, dA
        if (dA & 1) and (dB & 1):
            s = -s
    if dB == 0:
        r = one
        for _ in range(dA):
            r = _kmul_raw(level, r, B[0], None)
        return tuple(c * s for c in r)
    g, h = one, one
    A = [tuple(c) for c in A[:dA + 1]]
    B = [tuple(c) for c in B[:dB + 1]]
    while True:
        dA, dB = deg(A), deg(B)
        delta = dA - dB
        if (dA & 1) and (dB & 1):
            s = -s
        R = _pseudo_rem(level, A, B)
        dR = deg(R)
        if dR < 0:
            if deg(B) > 0:
                return (0,) * level.e
        A = B
        denom = g
        for _ in range(delta):
            denom = _kmul_raw(level, denom, h, None)
        B = [_kint_divexact(level, c, denom) for c in (R[:dR + 1] if dR >= 0 else [(0,) * level.e])]
        g = lc(A)
        if delta > 0:
            num = one
            for _ in range(delta):
                num = _kmul_raw(level, num, g, None)
            den = one
            for _ in range(delta - 1):
                den = _kmul_raw(level, den, h, None)
            h = _kint_divexact(level, num, den)
        if deg(B) <= 0:
            break
    if not any(B[0]):
        return (0,) * level.e
    dA = deg(A)
    num = one
    for _ in range(dA):
        num = _kmul_raw(level, num, B[0], None)
    den = one
    for _ in range(dA - 1):
        den = _kmul_raw(level, den, h, None)
    r = _kint_divexact(level, num, den)
    return tuple(c * s for c in r)


def _pseudo_rem(level, A, B):
    """lc(B)^(deg A - deg B + 1) * A mod B over the exact coefficient ring."""
    def deg(P):
        d = len(P) - 1
        while d >= 0 and not any(P[d]):
            d -= 1
        return d

    dA, dB = deg(A), deg(B)
    lcB = B[dB]
    R = [tuple(c) for c in A[:dA + 1]]
    for _ in range(dA - dB + 1):
        dR = deg(R)
        if dR < dB:
            R = [_kmul_raw(level, c, lcB, None) for c in R]
            continue
        top = R[dR]
        R = [_kmul_raw(level, c, lcB, None) for c in R]
        off = dR - dB
        for j in range(dB + 1):
            prod = _kmul_raw(level, top, B[j], None)
            R[off + j] = tuple(a - b for a, b in zip(R[off + j], prod))
    return R


def _kint_divexact(level, A, B):
    """Exact division A/B in Z[pi]/(eisenstein); asserts integrality."""
    if not any(A):
        return (0,) * level.e
    inv = _kinv_frac(level, tuple(Fraction(c) for c in B))
    prod = _kmul_raw(level, tuple(Fraction(c) for c in A), inv, None)
    assert all(c.denominator == 1 for c in prod), "inexact division in subresultant chain"
    return tuple(int(c) for c in prod)


# ---------------------------------------------------------------------------
# residues
# ---------------------------------------------------------------------------

def _residue(x):
    """Residue in F_p of a unit (valuation-zero element)."""
    level = x.level
    p = level.tower.p
    v = x.valuation()
    if v.is_bottom or v.value != 0:
        raise ValueError("residue of a non-unit")
    if level.kind == "eis":
        xt = _truncate(x)
        return xt.unit[0] % p
    # totally ramified: res(N(x)) = res(x)^[level:below]; the degree is a
    # p-power, hence invertible as an exponent mod p - 1 (trivial for p = 2)
    r = _residue(norm_to_base(x))
    if p == 2:
        return r
    d = level.rel_degree % (p - 1)
    inv = pow(d if d else 1, -1, p - 1) if (p - 1) > 1 else 1
    return pow(r, inv, p)


# ---------------------------------------------------------------------------
# public construction API
# ---------------------------------------------------------------------------

def default_precision(p, n):
    """Working precision (p-units) able to certify every norm the checks need."""
    q = p ** n
    return 4 * q * q + 2 * q + 16


def build_tower(p, n, precision=None, residue_degree=1):
    """Build the ground tower Qp < K = Qp(lambda^(1/(1+q))) for q = p^n.

    ``precision`` is the working precision in v(p) = 1 units; the default is
    large enough for every certification the pipeline runs at this (p, n).
    Only residue degree 1 is supported (units are rational integers).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if p < 2 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
        raise ValueError("p must be prime")
    if residue_degree != 1:
        raise ValueError("unramified coefficient rings of degree > 1 are not supported; "
                         "units must be rational integers")
    prec = precision if precision is not None else default_precision(p, n)
    return Tower(p, n, prec, residue_degree)


def ring_arith(op, x, y=None):
    """Functional dispatch for {add, sub, mul, invert} on ring elements."""
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "invert":
        return x.invert()
    raise ValueError(f"unknown op {op!r}")
