"""Shared random-instance generators for the test suites."""
import random
from fractions import Fraction as F

import pytest

from lgllab.ratcore import Poly, RatFunc

Z = RatFunc.z()


def rand_rational(rng, num=5, dens=(1, 2, 3)):
    return F(rng.randint(-num, num), rng.choice(dens))


def rand_poly(rng, deg, num=3):
    return Poly([rng.randint(-num, num) for _ in range(deg + 1)])


def rand_split_ratfunc(rng, max_poles=3, max_order=3, poly_deg=1):
    """Random f with rational poles, so every denominator splits over Q."""
    pts = rng.sample([F(0), F(1), F(-1), F(2), F(1, 2), F(-3, 2)], rng.randint(0, max_poles))
    f = RatFunc(rand_poly(rng, rng.randint(-1, poly_deg)) if poly_deg >= 0 else Poly())
    for p in pts:
        for k in range(1, rng.randint(1, max_order) + 1):
            c = rand_rational(rng)
            if c:
                f = f + RatFunc(c) / (Z - p) ** k
    return f


def non_integer(rng, dens=(2, 3, 4, 5)):
    while True:
        x = F(rng.randint(-7, 7), rng.choice(dens))
        if x.denominator != 1:
            return x


@pytest.fixture
def rng():
    return random.Random(20241016)
