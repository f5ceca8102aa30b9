import random
from fractions import Fraction as F

import pytest

from lgllab.diffop import DiffOp, DiffSystem, parse_operator
from lgllab.errors import NonRationalEigenvalues, NonSplitLeadingCoefficient, UnnormalizedEigenvalues
from lgllab.local import (
    LocalSolver,
    TruncationPolicy,
    analyze,
    classify_rank1_place,
    indicial_polynomial,
    irregularity,
    local_solvable,
    rank1_residue_criterion,
    singular_places,
    system_singular_places,
    t0_of_residue_matrix,
)
from lgllab.diffop import MatrixOperator, clear_denominators
from lgllab.ratcore import INF, Place, Poly, RatFunc, order_at

from conftest import Z, non_integer, rand_split_ratfunc

D = DiffOp.D()
P = Place.finite


def rank1(f):
    return DiffOp((-f, RatFunc(1)))


# ---- singular places and irregularity


@pytest.mark.parametrize(
    "text, expected",
    [
        ("D - z^5", ["inf"]),
        ("2*z^5*D + 2 + z^4", ["0", "inf"]),
        ("D", []),
        ("z*(z - 1)*D^2 + D + z", ["0", "1", "inf"]),
    ],
)
def test_singular_places(text, expected):
    assert [str(p) for p in singular_places(parse_operator(text))] == expected


def test_non_split_leading_coefficient():
    with pytest.raises(NonSplitLeadingCoefficient):
        singular_places(parse_operator("(z^2 + 1)*D + 1"))


def test_irregularity_examples():
    assert irregularity(parse_operator("z^5*D + 1 + (1/2)*z^4"), P(0)) == 4
    assert irregularity(D - 1 / (Z - 3), P(3)) == 0


def test_irregularity_at_infinity_of_D_minus_z5():
    # t = 1/z turns (D - z^5) dz into -(d/dt + t^-7) dt: f dz has a pole of
    # order 7 in t, so the rank one irregularity (pole order minus one) is 6.
    # The global count 2g - 2 + #S + irr = -2 + 1 + 6 = 5 is the dimension.
    L = parse_operator("D - z^5")
    assert irregularity(L, INF) == 6
    assert classify_rank1_place(Z**5, INF).irr == 6


def test_irregularity_matches_rank1_classification():
    rng = random.Random(29)
    for _ in range(50):
        f = rand_split_ratfunc(rng, max_poles=3, max_order=4, poly_deg=2)
        for p in [P(0), P(1), P(-1), P(2), P(F(1, 2)), P(F(-3, 2))]:
            expected = max(0, -order_at(f, p) - 1) if f else 0
            assert irregularity(rank1(f), p) == expected
            c = classify_rank1_place(f, p)
            assert c.irr == (expected if c.tag == "Irregular" else 0)


# ---- indicial polynomials


def test_indicial_examples():
    assert indicial_polynomial(Z * D - 3, P(0)) == Poly([-3, 1])
    assert indicial_polynomial(Z**2 * D * D, P(0)) == Poly([0, -1, 1])
    assert indicial_polynomial(D, P(0)) == Poly([0, 1])


def test_indicial_at_infinity():
    # z D - 3 sends z^k to (k - 3) z^k; with t = 1/z the exponent is s = -k
    assert indicial_polynomial(Z * D - 3, INF) == Poly([3, 1])


# ---- rank one classification


@pytest.mark.parametrize(
    "f, place, tag, extra",
    [
        (RatFunc(F(1, 3)) / (Z - 1), P(1), "RegularSingular", F(1, 3)),
        (2 / (Z - 1), P(1), "Regular", None),
        (Z**5, INF, "Irregular", 6),
        (1 / Z**3, P(0), "Irregular", 2),
        (RatFunc(F(1, 2)) / Z, INF, "RegularSingular", F(-1, 2)),
    ],
)
def test_classify_rank1_place(f, place, tag, extra):
    c = classify_rank1_place(f, place)
    assert c.tag == tag
    if tag == "RegularSingular":
        assert c.residue == extra
    if tag == "Irregular":
        assert c.irr == extra


# ---- local solvability


def test_local_solvable_examples():
    ok, obs = local_solvable(D - 1 / (Z - 1), RatFunc(1), P(1))
    assert not ok and obs.rank == 1
    ok, obs = local_solvable(D - RatFunc(F(1, 3)) / Z, Z**3 - 2 * Z + 5, P(0))
    assert ok and obs.rank == 0
    ok, _ = local_solvable(D, RatFunc(1), P(0))
    assert ok


def test_irregular_rank1_is_formally_bijective():
    for f, p in [(Z**5, INF), (1 / Z**3 + 1 / Z, P(0)), (2 / (Z - 1) ** 2, P(1))]:
        for g in [RatFunc(1), Z**4 - Z, 1 / (Z - 1) ** 3]:
            ok, obs = local_solvable(rank1(f), g, p)
            assert ok and obs.rank == 0


def test_regular_singular_rank1_always_solvable():
    rng = random.Random(37)
    for _ in range(20):
        lam = non_integer(rng)
        p = P(rng.choice([0, 1, -2]))
        f = RatFunc(lam) / (Z - p.point) + rng.randint(-2, 2)
        g = rand_split_ratfunc(rng)
        ok, obs = local_solvable(rank1(f), g, p)
        assert ok and obs.rank == 0


def test_regular_place_matches_residue_criterion():
    rng = random.Random(53)
    checked = 0
    for _ in range(40):
        n = rng.randint(-2, 3)
        p = rng.choice([P(0), P(1), INF])
        if p.is_infinite:
            f = RatFunc(-n - 2) / Z + rng.randint(0, 1) / Z**2
        else:
            f = RatFunc(n) / (Z - p.point) + rng.randint(-1, 1)
        g = rand_split_ratfunc(rng)
        if classify_rank1_place(f, p).tag != "Regular":
            continue
        ok, obs = local_solvable(rank1(f), g, p)
        assert ok == rank1_residue_criterion(f, g, p)
        assert obs.rank == 1
        checked += 1
    assert checked > 20


def test_obstruction_rank_stable_under_margin_increments():
    L = parse_operator("z^2*D^2 - 3*z*D + 4 - z")  # indicial (s - 2)^2 at 0
    T = MatrixOperator.from_diffop(clear_denominators(L))
    ranks = set()
    for extra in (0, 3, 7):
        solver = LocalSolver(T, P(0))
        obs = solver.obstruction([[RatFunc(1)]], TruncationPolicy(extra_margin=extra))
        ranks.add(obs.rank)
    assert ranks == {1}


def test_system_local_solvability():
    # y' = (1/z) N y with N nilpotent: obstructions at 0 come from z^-1 log terms
    S = DiffSystem([[0, 1 / Z], [0, 0]])
    ok, obs = local_solvable(S, [RatFunc(0), 1 / Z], P(0))
    assert not ok
    ok, _ = local_solvable(S, [RatFunc(1), RatFunc(0)], P(0))
    assert ok
    assert [str(p) for p in system_singular_places(S)] == ["0", "inf"]


# ---- residue matrices


def test_t0_examples():
    assert t0_of_residue_matrix([[F(1, 3), 0], [0, F(1, 3)]]) == 0
    assert t0_of_residue_matrix([[0, 0], [0, F(1, 2)]]) == 1
    assert t0_of_residue_matrix([[0, 1], [0, 0]]) == 1


def test_t0_errors():
    with pytest.raises(UnnormalizedEigenvalues):
        t0_of_residue_matrix([[1, 0], [0, 0]])
    with pytest.raises(NonRationalEigenvalues):
        t0_of_residue_matrix([[0, 1], [2, 0]])


def test_analyze_example():
    rows = analyze(parse_operator("z^5*D + 1 + (1/2)*z^4"))
    assert [str(r.place) for r in rows] == ["0", "inf"]
    assert rows[0].irregularity == 4
    assert rows[0].classification.tag == "Irregular"
