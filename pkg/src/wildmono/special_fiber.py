"""Characteristic-p side: the Artin-Schreier curve, its translations, and the
extra-special automorphism group model.

The curve is w^p - w = t*R(t) with R an additive polynomial of degree q; a
translation t -> t + a prolongs to the curve iff a satisfies an explicit
additive equation of degree q^2, so the prolonging translations form an
F_p-vector space V of size at most q^2.  Each prolongation is modelled as a
pair (a, z) with the twisted composition law coming from an explicit cocycle,
giving a group of order p|V| that is extra-special precisely in the maximal
case |V| = q^2.
"""

from dataclasses import dataclass
from itertools import product

from .errors import ModelFailure
from .gf import GF
from .ramification import RamFiltration


def genus_AS(p, n):
    """Genus of w^p - w = t R(t), deg tR = 1 + q: one wild point at infinity."""
    q = p ** n
    return (p - 1) * q // 2


def _prolongation_image(field, ubar, n, a):
    """Left side of the prolongation equation at a (zero iff a prolongs)."""
    p = field.p
    q = p ** n
    acc = field.pow(a, q * q)
    acc = field.add(acc, field.pow(field.smul(2, field.mul(ubar[0], a)), q))
    for k in range(1, n):
        acc = field.add(acc, field.mul(field.pow(ubar[k], q), field.pow(a, q * p ** k)))
        acc = field.add(acc, field.pow(field.mul(ubar[k], a), q // p ** k))
    return field.add(acc, a)


def prolongation_solutions(units, p, n, m):
    """All a in F_{p^m} whose translation prolongs to the curve.

    Exhaustive scan for small fields (the stated oracle); kernel of the
    F_p-linear evaluation map for larger ones.  Returns (field, solutions).
    """
    field = GF(p, m)
    ubar = [field.from_int(u) for u in units]
    fn = lambda a: _prolongation_image(field, ubar, n, a)
    if field.size <= 4096:
        sols = [a for a in field.elements() if fn(a) == field.zero]
    else:
        sols = field.kernel(fn)
    return field, sols


@dataclass(frozen=True)
class ExtraSpecialModel:
    """Prolongation group modelled on pairs (a, z), a in V, z in Z/p.

    Composition: (a, z)(b, w) = (a + b, z + w + beta(a, b)) with the F_p
    cocycle beta(a, b) = P_a(b) + s_a + s_b - s_(a+b); commutators land in
    the center through the alternating pairing P_a(b) - P_b(a).
    """

    field: GF
    translations: tuple        # V as a tuple of field elements
    cocycle: dict              # (a, b) -> int in Z/p
    pairing: dict              # (a, b) -> int in Z/p

    @property
    def p(self):
        return self.field.p

    def elements(self):
        return [(a, z) for a in self.translations for z in range(self.p)]

    @property
    def order(self):
        return self.p * len(self.translations)

    def mul(self, g, h):
        (a, z), (b, w) = g, h
        return (self.field.add(a, b), (z + w + self.cocycle[(a, b)]) % self.p)

    def identity(self):
        return (self.field.zero, 0)

    def inverse(self, g):
        a, z = g
        na = self.field.neg(a)
        return (na, (-z - self.cocycle[(a, na)]) % self.p)

    def commutator(self, g, h):
        return self.mul(self.mul(g, h), self.inverse(self.mul(h, g)))

    def power(self, g, k):
        out = self.identity()
        for _ in range(k):
            out = self.mul(out, g)
        return out

    def element_order(self, g):
        k, x = 1, g
        while x != self.identity():
            x = self.mul(x, g)
            k += 1
        return k

    def center(self):
        els = self.elements()
        return [g for g in els if all(self.mul(g, h) == self.mul(h, g) for h in els)]

    def derived_subgroup(self):
        els = self.elements()
        gens = {self.commutator(g, h) for g in els for h in els}
        return _closure(self, gens)

    def frattini_subgroup(self):
        els = self.elements()
        gens = {self.commutator(g, h) for g in els for h in els}
        gens |= {self.power(g, self.p) for g in els}
        return _closure(self, gens)

    def abelian_above_center(self):
        """An abelian subgroup J with center <= J and |J| = p^(n+1).

        Found as (isotropic subspace of the pairing) x center.
        """
        field = self.field
        V = list(self.translations)
        dim_half = (_ilog(len(V), self.p)) // 2
        iso = [field.zero]
        basis = []
        for v in V:
            if v == field.zero or v in iso:
                continue
            if all(self.pairing[(v, w)] == 0 for w in iso):
                basis.append(v)
                iso = _span(field, basis)
                if len(basis) == dim_half:
                    break
        if len(basis) != dim_half:
            raise ModelFailure("no isotropic subspace of half dimension found")
        return [(a, z) for a in iso for z in range(self.p)]

    def is_associative(self):
        els = self.elements()
        return all(self.mul(self.mul(g, h), k) == self.mul(g, self.mul(h, k))
                   for g in els for h in els for k in els)


def _ilog(x, p):
    k = 0
    while p ** k < x:
        k += 1
    return k


def _span(field, basis):
    out = set()
    for coeffs in product(range(field.p), repeat=len(basis)):
        v = field.zero
        for c, b in zip(coeffs, basis):
            v = field.add(v, field.smul(c, b))
        out.add(v)
    return out


def _closure(model, gens):
    out = {model.identity()}
    frontier = set(gens)
    while frontier:
        out |= frontier
        nxt = set()
        for g in frontier:
            for h in list(out):
                for e in (model.mul(g, h), model.mul(h, g)):
                    if e not in out:
                        nxt.add(e)
        frontier = nxt - out
    return out


def _lift_polynomial(field, ubar, n, a):
    """Additive P_a with P_a^p - P_a = Delta_a - a R(a): coefficients beta_i
    of t^(p^i), solved top-down by p-th roots; returns None when the
    consistency (= prolongation) condition fails."""
    p = field.p
    beta = [field.zero] * n
    beta[n - 1] = field.pth_root(a)
    for i in range(n - 1, 0, -1):
        beta[i - 1] = field.pth_root(field.add(beta[i], field.mul(a, ubar[i])))
    r_of_a = _R_eval(field, ubar, n, a)
    want = field.neg(field.add(r_of_a, field.mul(a, ubar[0])))
    if beta[0] != want:
        return None
    return beta


def _R_eval(field, ubar, n, a):
    p = field.p
    acc = field.pow(a, p ** n)
    for k in range(n):
        acc = field.add(acc, field.mul(ubar[k], field.pow(a, p ** k)))
    return acc


def _P_eval(field, beta, b):
    p = field.p
    acc = field.zero
    for i, coeff in enumerate(beta):
        acc = field.add(acc, field.mul(coeff, field.pow(b, p ** i)))
    return acc


def build_extraspecial(units, p, n, m=None):
    """Build the prolongation group over a field where it fully splits.

    Finds the least residue degree carrying all q^2 translations (searched
    incrementally: the splitting degree need not be a power of two), then
    bumps it by factors of p until every cocycle constant has a root; the
    composed group is returned with its full cocycle and pairing tables.
    """
    q = p ** n
    if m is not None:
        degrees = [m]
    else:
        base = next((d for d in range(1, 17)
                     if len(prolongation_solutions(units, p, n, d)[1]) == q * q), None)
        if base is None:
            raise ModelFailure("translation space does not split by residue degree 16")
        degrees = [base, p * base, p * p * base]
    last_error = None
    for deg in degrees:
        field, sols = prolongation_solutions(units, p, n, deg)
        if len(sols) != q * q:
            last_error = f"only {len(sols)} of {q * q} translations over F_{p}^{deg}"
            continue
        ubar = [field.from_int(u) for u in units]
        lifts = {}
        s_const = {}
        ok = True
        for a in sols:
            beta = _lift_polynomial(field, ubar, n, a)
            if beta is None:
                raise ModelFailure(
                    "translation in the solution set fails the lift consistency")
            # s_a solves x^p - x = a R(a): exists iff the trace vanishes
            sa = field.solve_linear(lambda x: field.sub(field.pow(x, p), x),
                                    field.mul(a, _R_eval(field, ubar, n, a)))
            if sa is None:
                ok = False
                last_error = f"cocycle constant has no root over F_{p}^{deg}"
                break
            lifts[a] = beta
            s_const[a] = sa
        if not ok:
            continue
        cocycle = {}
        pairing = {}
        for a in sols:
            for b in sols:
                e = field.add(_P_eval(field, lifts[a], b),
                              field.sub(field.add(s_const[a], s_const[b]),
                                        s_const[field.add(a, b)]))
                if any(e[1:]) if field.m > 1 else False:
                    raise ModelFailure("cocycle value not in the prime field")
                cocycle[(a, b)] = e[0]
        for a in sols:
            for b in sols:
                pairing[(a, b)] = (cocycle[(a, b)] - cocycle[(b, a)]) % p
        return ExtraSpecialModel(field, tuple(sols), cocycle, pairing)
    raise ModelFailure(f"could not realize the model: {last_error}")


def special_filtration(p, n):
    """Ramification filtration of the special-fiber automorphism group at
    infinity, as stated for this curve family: full group at indices 0..1,
    center at 2..1+q."""
    q = p ** n
    return RamFiltration(((0, 1, p * q * q), (2, 1 + q, p)))
