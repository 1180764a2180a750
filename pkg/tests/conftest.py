import pytest

from wildmono import kummer as ku
from wildmono import monodromy as mo
from wildmono.padic import build_tower


class Bundle:
    """One fully-attached scenario pipeline, memoized for the whole session."""

    def __init__(self, p, n, units, c=1):
        self.p, self.n = p, n
        self.tower = build_tower(p, n)
        self.params = mo.make_params(self.tower, units, c)
        self.cert = mo.certify_slope(self.params)
        self.L, self.y = mo.attach_root(self.params, self.cert)
        self._cache = {}

    def _memo(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    @property
    def fy(self):
        return self._memo("fy", lambda: mo.cover_polynomial(self.params)(self.y))

    @property
    def descent(self):
        return self._memo("descent", lambda: mo.build_descent_data(self.params, self.y))

    @property
    def irr(self):
        return self._memo(
            "irr", lambda: mo.irreducibility_certificate(self.params, self.y))

    @property
    def seed(self):
        return self._memo("seed", lambda: ku.build_kummer_seed(self.params, self.y))

    @property
    def kit(self):
        def make():
            t_elt = mo.radicand_element(self.params, self.y)
            return ku.UniformizerKit(self.L, t_elt, int(self.irr.v_t * self.L.e_abs))
        return self._memo("kit", make)

    def different(self, history=None):
        return ku.quadratic_different(self.fy, seed=self.seed.u, kit=self.kit,
                                      history=history)


@pytest.fixture(scope="session")
def ex1():
    return Bundle(2, 2, (1, 1))


@pytest.fixture(scope="session")
def ex0():
    return Bundle(2, 1, (1,))
