import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lgllab.errors import DivisionByZeroPolynomial, InsufficientPrecision, NonSplitDenominator
from lgllab.ratcore import (
    INF,
    LaurentSeries,
    Place,
    Poly,
    RatFunc,
    laurent_expand,
    order_at,
    parse_place,
    partial_fractions,
    poles,
    residue,
    to_rational,
)

from conftest import Z, rand_split_ratfunc

P = Place.finite


def test_to_rational_rejects_floats():
    assert to_rational("3/4") == F(3, 4)
    assert to_rational(" -2 ") == -2
    with pytest.raises((TypeError, ValueError)):
        to_rational(0.5)


def test_poly_arithmetic():
    p = Poly([1, 2, 3])
    q = Poly([0, 1])
    assert p * q == Poly([0, 1, 2, 3])
    assert (p + q).coeffs == (1, 3, 3)
    assert divmod(p, q) == (Poly([2, 3]), Poly([1]))
    assert p.derivative() == Poly([2, 6])
    assert p(2) == 17
    assert Poly([1, 1]).shift(1) == Poly([2, 1])
    assert Poly().degree < 0


def test_division_by_zero_polynomial():
    with pytest.raises(DivisionByZeroPolynomial):
        divmod(Poly([1]), Poly())
    with pytest.raises(DivisionByZeroPolynomial):
        RatFunc(1, 0)


def test_ratfunc_normalizes():
    f = RatFunc(Poly([-1, 0, 1]), Poly([-2, 2]))  # (z^2 - 1)/(2z - 2)
    assert f.num == Poly([F(1, 2), F(1, 2)]) and f.den == Poly([1])
    assert (Z / Z) == RatFunc(1)
    assert (1 / (Z - 1)).derivative() == -1 / (Z - 1) ** 2


def test_place_parsing():
    assert parse_place("inf") == INF
    assert parse_place("-1/2") == P(F(-1, 2))
    assert str(P(F(1, 3))) == "1/3"


# ---- partial fractions


def test_partial_fractions_simple():
    pf = partial_fractions((2 * Z + 1) / (Z * (Z - 1)))
    assert pf.polynomial_part == Poly()
    assert pf.sorted_terms() == [(0, 1, -1), (1, 1, 3)]


def test_partial_fractions_polynomial():
    pf = partial_fractions(Z**2 + 3)
    assert pf.polynomial_part == Poly([3, 0, 1])
    assert not pf.terms


def test_partial_fractions_non_split():
    with pytest.raises(NonSplitDenominator):
        partial_fractions(1 / (Z**2 + 1))


def test_partial_fraction_round_trip_random():
    rng = random.Random(11)
    for _ in range(60):
        f = rand_split_ratfunc(rng, max_poles=4, max_order=4, poly_deg=2)
        assert partial_fractions(f).reassemble() == f


# ---- residues


@pytest.mark.parametrize(
    "f, place, expected",
    [
        (1 / (Z - 2), P(2), 1),
        (1 / (Z - 2), INF, -1),
        (1 / (Z - 2) ** 2, P(2), 0),
        (Z**3, INF, 0),
        (Z / (Z**2 - 1), INF, -1),
    ],
)
def test_residue_values(f, place, expected):
    assert residue(f, place) == expected


def test_residue_theorem_random():
    rng = random.Random(5)
    for _ in range(60):
        f = rand_split_ratfunc(rng, max_poles=4, max_order=3, poly_deg=3)
        total = sum(residue(f, p) for p in poles(f)) + residue(f, INF)
        assert total == 0


# ---- Laurent expansions and orders


def test_laurent_examples():
    s = laurent_expand(1 / (1 - Z), P(0), 4)
    assert (s.valuation, list(s.coeffs)) == (0, [1, 1, 1, 1])
    s = laurent_expand(1 / Z, P(0), 2)
    assert s.valuation == -1 and s.coefficient(-1) == 1 and s.coefficient(0) == 0
    s = laurent_expand(Z**2, INF, 3)
    assert (s.valuation, list(s.coeffs)) == (-2, [1, 0, 0])


def test_laurent_precision_is_tracked():
    s = laurent_expand(1 / (1 - Z), P(0), 3)
    with pytest.raises(InsufficientPrecision):
        s.coefficient(3)
    z0 = LaurentSeries.zero(P(0), 5)
    assert z0.is_zero() and z0.valuation == 5 and z0.coeffs == ()


@pytest.mark.parametrize(
    "f, place, expected",
    [
        ((Z - 1) ** 3 / Z, P(1), 3),
        ((Z - 1) ** 3 / Z, INF, -2),
        (RatFunc(5), P(0), 0),
        (RatFunc(0), P(0), math.inf),
    ],
)
def test_order_at(f, place, expected):
    assert order_at(f, place) == expected


def test_expansion_is_multiplicative_and_matches_order():
    rng = random.Random(3)
    places = [P(0), P(1), P(F(1, 2)), INF]
    for _ in range(40):
        f = rand_split_ratfunc(rng)
        g = rand_split_ratfunc(rng)
        if not f or not g:
            continue
        p = rng.choice(places)
        n = 6
        ef, eg, efg = laurent_expand(f, p, n), laurent_expand(g, p, n), laurent_expand(f * g, p, n)
        assert ef.valuation == order_at(f, p)
        prod = ef * eg
        top = min(prod.abs_precision, efg.abs_precision)
        assert prod.truncate(top) == efg.truncate(top)


def test_series_calculus():
    e = laurent_expand(Z, P(0), 8).exp()
    assert [e.coefficient(k) for k in range(4)] == [1, 1, F(1, 2), F(1, 6)]
    s = laurent_expand(1 / (1 - Z), P(0), 5)
    assert s.d_dz().truncate(3) == laurent_expand(1 / (1 - Z) ** 2, P(0), 3)
    # at infinity d/dz = -t^2 d/dt
    s = laurent_expand(Z**2, INF, 4)
    assert s.d_dz().to_dict() == {-1: 2}


coef = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@settings(max_examples=60, deadline=None)
@given(st.lists(coef, min_size=1, max_size=4), st.lists(coef, min_size=1, max_size=3), st.sampled_from([0, 1, -2]))
def test_residue_theorem_property(num, ks, base):
    f = RatFunc(Poly(num))
    for i, k in enumerate(ks):
        f = f + RatFunc(k) / (Z - (base + i)) ** (i + 1)
    assert sum(residue(f, p) for p in poles(f)) + residue(f, INF) == 0
    assert partial_fractions(f).reassemble() == f
