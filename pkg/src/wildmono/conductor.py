"""Swan and conductor exponents of the Jacobian from filtration data.

Inputs are a lower-numbering filtration together with the dimensions of the
l-torsion fixed spaces dim Jac[l]^(G_i), keyed by subgroup order; those
dimensions come from quotient genera (2 g(C/H) for l prime to |H|), so Tate
modules never have to be materialized.  Fixed dimensions for subgroups that
actually occur must be supplied explicitly; nothing is guessed.
"""

from dataclasses import dataclass
from fractions import Fraction

from .errors import ConstraintViolation, NonIntegralSwan


def fixed_torsion_dim(quotient_genus):
    """dim of the l-torsion fixed space of H: twice the quotient genus."""
    if quotient_genus < 0:
        raise ConstraintViolation("genus cannot be negative")
    return 2 * quotient_genus


@dataclass(frozen=True)
class ConductorInput:
    filtration: object   # RamFiltration
    genus: int
    fixed_dims: dict     # subgroup order -> dim Jac[l]^(G_i)

    def __post_init__(self):
        two_g = 2 * self.genus
        if self.fixed_dims.get(1, two_g) != two_g:
            raise ConstraintViolation("trivial subgroup must fix everything (dim 2g)")
        seen = sorted(self.fixed_dims.items())
        for (o1, d1), (o2, d2) in zip(seen, seen[1:]):
            if d2 > d1:
                raise ConstraintViolation("fixed dims must be non-increasing in the subgroup")
        for _, _, order in self.filtration.segments:
            if order != 1 and order not in self.fixed_dims:
                raise ConstraintViolation(
                    f"no fixed-space dimension supplied for subgroup order {order}")

    def _dim_drop(self, order):
        if order == 1:
            return 0
        return 2 * self.genus - self.fixed_dims[order]


def swan(inp):
    """sum_(i>=1) |G_i|/|G_0| * dim(Jac[l]/Jac[l]^(G_i)); must be an integer."""
    g0 = inp.filtration.group_order
    total = Fraction(0)
    for lo, hi, order in inp.filtration.segments:
        start = max(lo, 1)
        if hi < start:
            continue
        total += (hi - start + 1) * Fraction(order, g0) * inp._dim_drop(order)
    if total.denominator != 1 or total < 0:
        raise NonIntegralSwan(f"swan came out {total}")
    return int(total)


def epsilon(inp):
    """Codimension of the inertia-fixed space (large-l identity)."""
    return inp._dim_drop(inp.filtration.group_order)


def conductor_exponent(inp):
    """f = epsilon + swan."""
    return epsilon(inp) + swan(inp)


def base_change_unramified(filt, tame_order):
    """Filtration over the unramified ground field: prepend the tame segment.

    The ground step is tame of degree ``tame_order / group order``, so inertia
    grows only at index 0 and the wild segments keep their indices.
    """
    from .ramification import RamFiltration

    if tame_order % filt.group_order:
        raise ConstraintViolation("tame order must be a multiple of the wild order")
    if tame_order == filt.group_order:
        return filt
    segs = [(0, 0, tame_order)]
    for lo, hi, order in filt.segments:
        segs.append((max(lo, 1), hi, order))
    return RamFiltration(tuple(s for s in segs if s[0] <= s[1]))
