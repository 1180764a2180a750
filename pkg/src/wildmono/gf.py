"""Arithmetic in F_{p^m} plus F_p-linear algebra helpers.

Field elements are coefficient tuples of length m (low degree first) over a
deterministic smallest-lexicographic irreducible modulus, so equal fields are
reproducible across runs.  Everything here is sized for desk scale (p in
{2, 3, 5}, m <= 16): plain lists and tuples, no external dependencies.
"""

from functools import lru_cache
from itertools import product


def _poly_trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mulmod(a, b, mod, p):
    """Product of coefficient lists a*b reduced mod the monic poly `mod`, over F_p."""
    m = len(mod) - 1
    out = [0] * (len(a) + len(b) - 1 or 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    for i in range(len(out) - 1, m - 1, -1):
        c = out[i]
        if c:
            out[i] = 0
            for j in range(m):
                out[i - m + j] = (out[i - m + j] - c * mod[j]) % p
    return _poly_trim(out)


def _poly_powmod(a, e, mod, p):
    r = [1]
    while e:
        if e & 1:
            r = _poly_mulmod(r, a, mod, p)
        a = _poly_mulmod(a, a, mod, p)
        e >>= 1
    return r


def _poly_gcd(a, b, p):
    a, b = list(a), list(b)
    while _poly_trim(b):
        lead_inv = pow(b[-1], -1, p)
        # reduce a mod b
        while len(a) >= len(b) and _poly_trim(a):
            f = a[-1] * lead_inv % p
            off = len(a) - len(b)
            for j in range(len(b)):
                a[off + j] = (a[off + j] - f * b[j]) % p
            _poly_trim(a)
        a, b = b, a
    return a


def _is_irreducible(mod, p):
    """Rabin test for a monic polynomial over F_p."""
    m = len(mod) - 1
    x = [0, 1]
    xq = _poly_powmod(x, p ** m, mod, p)
    if _poly_trim([(c - d) % p for c, d in zip(xq + [0] * 4, x + [0] * 4)]):
        return False
    for r in {f for f in range(2, m + 1) if m % f == 0 and _is_prime(f)}:
        xr = _poly_powmod(x, p ** (m // r), mod, p)
        diff = [(c - d) % p for c, d in zip(xr + [0] * 4, x + [0] * 4)]
        g = _poly_gcd(list(mod), _poly_trim(diff), p)
        if len(g) != 1:
            return False
    return True


def _is_prime(k):
    return k >= 2 and all(k % d for d in range(2, int(k ** 0.5) + 1))


@lru_cache(maxsize=None)
def _find_modulus(p, m):
    """Smallest monic irreducible of degree m over F_p, lexicographic in low coeffs."""
    if m == 1:
        return (0, 1)
    for tail in product(range(p), repeat=m):
        mod = tuple(tail) + (1,)
        if mod[0] == 0:
            continue
        if _is_irreducible(mod, p):
            return mod
    raise RuntimeError("no irreducible modulus found")  # unreachable


class GF:
    """The finite field F_{p^m}; elements are length-m coefficient tuples."""

    def __init__(self, p, m=1):
        self.p = p
        self.m = m
        self.size = p ** m
        self.modulus = _find_modulus(p, m)
        self.zero = (0,) * m
        self.one = (1,) + (0,) * (m - 1)

    def __repr__(self):
        return f"GF({self.p}^{self.m})"

    def __eq__(self, other):
        return isinstance(other, GF) and (self.p, self.m) == (other.p, other.m)

    def __hash__(self):
        return hash((self.p, self.m))

    def elements(self):
        for tup in product(range(self.p), repeat=self.m):
            yield tup

    def from_int(self, k):
        return ((k % self.p),) + (0,) * (self.m - 1)

    def gen(self):
        if self.m == 1:
            return self.one
        return (0, 1) + (0,) * (self.m - 2)

    def add(self, a, b):
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def sub(self, a, b):
        p = self.p
        return tuple((x - y) % p for x, y in zip(a, b))

    def neg(self, a):
        p = self.p
        return tuple((-x) % p for x in a)

    def smul(self, k, a):
        p = self.p
        return tuple((k * x) % p for x in a)

    def mul(self, a, b):
        r = _poly_mulmod(list(a), list(b), list(self.modulus), self.p)
        return tuple(r) + (0,) * (self.m - len(r))

    def pow(self, a, e):
        if e < 0:
            a, e = self.inv(a), -e
        r = self.one
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r

    def inv(self, a):
        if a == self.zero:
            raise ZeroDivisionError("inverting 0 in GF")
        return self.pow(a, self.size - 2)

    def frob(self, a):
        return self.pow(a, self.p)

    def pth_root(self, a):
        """Inverse Frobenius; x -> x^(p^(m-1)) since Frobenius has order m."""
        return self.pow(a, self.p ** (self.m - 1))

    def trace(self, a):
        t, x = self.zero, a
        for _ in range(self.m):
            t = self.add(t, x)
            x = self.frob(x)
        return t[0]

    # --- F_p-linear algebra on the field viewed as an F_p-vector space ---

    def _basis(self):
        return [tuple(1 if j == i else 0 for j in range(self.m)) for i in range(self.m)]

    def linear_matrix(self, fn):
        """Columns fn(e_i) of an F_p-linear map, as a list of m columns."""
        return [fn(e) for e in self._basis()]

    def solve_linear(self, fn, rhs):
        """One solution x of fn(x) = rhs for F_p-linear fn, or None."""
        cols = self.linear_matrix(fn)
        sol = _gauss_solve(cols, rhs, self.p)
        return tuple(sol) if sol is not None else None

    def kernel(self, fn):
        """All solutions of fn(x) = 0 for F_p-linear fn."""
        cols = self.linear_matrix(fn)
        basis = _gauss_nullspace(cols, self.p)
        out = []
        for coeffs in product(range(self.p), repeat=len(basis)):
            v = self.zero
            for k, b in zip(coeffs, basis):
                v = self.add(v, self.smul(k, tuple(b)))
            out.append(v)
        return out


def _gauss_solve(cols, rhs, p):
    m = len(rhs)
    ncols = len(cols)
    aug = [[cols[j][i] % p for j in range(ncols)] + [rhs[i] % p] for i in range(m)]
    pivots = []
    row = 0
    for col in range(ncols):
        sel = next((r for r in range(row, m) if aug[r][col]), None)
        if sel is None:
            continue
        aug[row], aug[sel] = aug[sel], aug[row]
        inv = pow(aug[row][col], -1, p)
        aug[row] = [v * inv % p for v in aug[row]]
        for r in range(m):
            if r != row and aug[r][col]:
                f = aug[r][col]
                aug[r] = [(v - f * w) % p for v, w in zip(aug[r], aug[row])]
        pivots.append(col)
        row += 1
    for r in range(row, m):
        if aug[r][ncols]:
            return None
    sol = [0] * ncols
    for r, col in enumerate(pivots):
        sol[col] = aug[r][ncols]
    return sol


def _gauss_nullspace(cols, p):
    m = len(cols[0]) if cols else 0
    ncols = len(cols)
    mat = [[cols[j][i] % p for j in range(ncols)] for i in range(m)]
    pivots = {}
    row = 0
    for col in range(ncols):
        sel = next((r for r in range(row, m) if mat[r][col]), None)
        if sel is None:
            continue
        mat[row], mat[sel] = mat[sel], mat[row]
        inv = pow(mat[row][col], -1, p)
        mat[row] = [v * inv % p for v in mat[row]]
        for r in range(m):
            if r != row and mat[r][col]:
                f = mat[r][col]
                mat[r] = [(v - f * w) % p for v, w in zip(mat[r], mat[row])]
        pivots[col] = row
        row += 1
    basis = []
    for col in range(ncols):
        if col in pivots:
            continue
        vec = [0] * ncols
        vec[col] = 1
        for pc, pr in pivots.items():
            vec[pc] = (-mat[pr][col]) % p
        basis.append(vec)
    return basis
