"""Random units, symbols and polynomials for property checks."""

from __future__ import annotations

import random

from .exact import Field, Poly, RationalFunctionField
from .fields import Twist
from .mw import MWElement


def random_unit(F: Field, rng: random.Random):
    return F.random_unit(rng)


def random_poly_unit(K: RationalFunctionField, rng: random.Random, max_deg: int = 3):
    """A nonzero polynomial in t (as an element of K) with random coefficients."""
    k = K.base
    while True:
        d = rng.randint(0, max_deg)
        cs = [k.random_element(rng) for _ in range(d)] + [random_unit(k, rng)]
        p = Poly(k, cs)
        if p:
            return K(p)


def random_rational_unit(K: RationalFunctionField, rng: random.Random, max_deg: int = 3):
    return random_poly_unit(K, rng, max_deg) / random_poly_unit(K, rng, max(1, max_deg - 1))


def random_mw(F: Field, degree: int, rng: random.Random, terms: int = 2, unit=None,
              twist: Twist = Twist()) -> MWElement:
    """Random Z-combination of words eta^r [u_1..u_m] of the given degree."""
    unit = unit if unit is not None else (lambda: random_unit(F, rng))
    out = MWElement.zero(F, degree, twist)
    for _ in range(terms):
        m = max(degree, 0) + rng.randint(0, 1)
        r = m - degree
        c = rng.choice([-2, -1, 1, 1, 2])
        out = out + MWElement.word(F, r, [unit() for _ in range(m)], c, twist)
    return out
