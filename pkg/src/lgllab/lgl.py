"""Closed-form dimensions of lgl for the classes with known formulas.

Rank one operators D - f split into three cases by the least m >= 1 with
m*f a logarithmic derivative. Nilpotent systems D - f*N and Fuchsian
connections on the projective line have formulas of their own. Positive
genus is supported only as formula evaluation from user-supplied counts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

from . import linalg
from .errors import ExactForm, InvalidCombination
from .local import classify_rank1_place, t0_of_residue_matrix
from .ratcore import INF, Place, RatFunc, linear_factors, partial_fractions, residue, to_rational

UNKNOWN = "unknown"


@dataclass(frozen=True)
class Rank1Case:
    tag: str  # "Trivial" | "Gm" | "Cm"
    m: Optional[int] = None

    def __str__(self):
        return f"Cm({self.m})" if self.tag == "Cm" else self.tag


@dataclass
class LglReport:
    dimension: Union[int, str]
    case: str
    S: list
    breakdown: dict
    hypothesis_flags: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    evaluator_only: bool = False

    def S_strings(self) -> list:
        return [str(p) for p in self.S]


def _places_of(f: RatFunc) -> list:
    """Finite poles of f, then infinity."""
    pts = sorted(linear_factors(f.den))
    return [Place.finite(p) for p in pts] + [INF]


def classify_rank1(f) -> Rank1Case:
    """Least m >= 1 with m*f in dLog(Q(z)), or Gm when there is none."""
    f = f if isinstance(f, RatFunc) else RatFunc(to_rational(f))
    pf = partial_fractions(f)
    if pf.polynomial_part or any(order > 1 for _, order, _ in pf.terms):
        return Rank1Case("Gm")
    m = 1
    for _, _, c in pf.terms:
        m = m * c.denominator // math.gcd(m, c.denominator)
    return Rank1Case("Trivial") if m == 1 else Rank1Case("Cm", m)


def lgl_genus_formula(
    case: str,
    g: int,
    S_count: Optional[int] = None,
    irr_sum: int = 0,
    n: Optional[int] = None,
    m: Optional[int] = None,
    r: Optional[int] = None,
    t0_sum: int = 0,
) -> int:
    """Evaluate a dimension formula from counts alone.

    Cases: "Trivial" (2g), "Gm" (2g - 2 + #S + sum irr), "Cm" (2g - 2 + #S),
    "Ga" (2g + (n - 1)(2g - 2 + #S)) and "Fuchsian" ((r - 2)m - sum t0, on
    the projective line only).
    """
    if g < 0:
        raise InvalidCombination("genus must be nonnegative")
    if case == "Trivial":
        out = 2 * g
    elif case in ("Gm", "Cm"):
        if S_count is None:
            raise InvalidCombination(f"{case} needs #S")
        if case == "Cm" and irr_sum:
            raise InvalidCombination("Cm case has no irregular points")
        out = 2 * g - 2 + S_count + irr_sum
    elif case == "Ga":
        if S_count is None or n is None or n < 2:
            raise InvalidCombination("Ga needs #S and n >= 2")
        if g == 0 and S_count < 2:
            raise InvalidCombination("a non-exact form has at least two places with nonzero residue")
        out = 2 * g + (n - 1) * (2 * g - 2 + S_count)
    elif case == "Fuchsian":
        if g != 0:
            raise InvalidCombination("the Fuchsian formula is stated on the projective line")
        if m is None or r is None:
            raise InvalidCombination("Fuchsian needs m and r")
        out = (r - 2) * m - t0_sum
    else:
        raise InvalidCombination(f"unknown case {case!r}")
    if out < 0:
        raise InvalidCombination(f"arguments give a negative dimension ({out})")
    return out


def lgl_rank1(f, genus: int = 0) -> LglReport:
    """dim lgl(D - f).

    The singular set S and the irregularities come from f on the projective
    line. With genus > 0 these counts are plugged into the formula and the
    report is marked as an evaluation only.
    """
    f = f if isinstance(f, RatFunc) else RatFunc(to_rational(f))
    case = classify_rank1(f)
    S, irr = [], {}
    for p in _places_of(f):
        c = classify_rank1_place(f, p)
        if c.tag != "Regular":
            S.append(p)
        if c.tag == "Irregular":
            irr[str(p)] = c.irr
    irr_sum = sum(irr.values())
    dim = lgl_genus_formula(case.tag, genus, len(S), irr_sum if case.tag == "Gm" else 0)
    breakdown = {"genus_term": 2 * genus, "#S": len(S), "irr": irr, "sum_irr": irr_sum}
    if case.tag != "Trivial":
        breakdown["constant"] = -2
    if case.tag == "Cm":
        breakdown["m"] = case.m
    flags = [f"case={case}"]
    rep = LglReport(dim, str(case), S, breakdown, flags, evaluator_only=genus > 0)
    if genus > 0:
        rep.hypothesis_flags.append("evaluator-only")
    return rep


def form_residues(f: RatFunc) -> dict:
    """Nonzero residues of f dz, keyed by Place."""
    out = {}
    for p in _places_of(f):
        r = residue(f, p)
        if r:
            out[p] = r
    return out


def lgl_ga_nilpotent(f, n: int, genus: int = 0) -> LglReport:
    """dim lgl(D - f N) for N one nilpotent Jordan block of size n >= 2."""
    if n < 2:
        raise InvalidCombination("n must be at least 2")
    f = f if isinstance(f, RatFunc) else RatFunc(to_rational(f))
    res = form_residues(f)
    if not res and genus == 0:
        raise ExactForm("f dz has no residues, so it is exact; use the trivial case")
    S = sorted(res, key=lambda p: p.sort_key())
    dim = lgl_genus_formula("Ga", genus, len(S), n=n)
    if n == 2:
        assert dim == 4 * genus - 2 + len(S)
    rep = LglReport(
        dim,
        "Ga",
        S,
        {"genus_term": 2 * genus, "n": n, "#S": len(S), "residues": {str(p): str(r) for p, r in res.items()}},
        [f"n={n}"],
        evaluator_only=genus > 0,
    )
    if genus > 0:
        rep.hypothesis_flags.append("evaluator-only")
    return rep


# --------------------------------------------------------------------------
# Fuchsian connections


@dataclass
class FuchsianInput:
    """Normalized local residue data A_P (eigenvalues in [0, 1)) at r points."""

    rank: int
    points: list
    matrices: list

    def __post_init__(self):
        self.points = [p if isinstance(p, Place) else Place.finite(p) for p in self.points]
        self.matrices = [linalg.as_matrix(A) for A in self.matrices]
        if len(self.points) != len(self.matrices) or not self.points:
            raise InvalidCombination("need one matrix per point and at least one point")
        if len(set(self.points)) != len(self.points):
            raise InvalidCombination("points must be distinct")
        for A in self.matrices:
            if len(A) != self.rank or any(len(row) != self.rank for row in A):
                raise InvalidCombination(f"matrices must be {self.rank}x{self.rank}")


def lgl_fuchsian(data: FuchsianInput) -> LglReport:
    m, r = data.rank, len(data.points)
    t0 = [t0_of_residue_matrix(A) for A in data.matrices]
    chi = m * (2 - r) + sum(t0)
    warnings = []
    total = [[sum(A[i][j] for A in data.matrices) for j in range(m)] for i in range(m)]
    if not linalg.is_zero(total):
        warnings.append("sum of the given matrices is not zero")
    trace = sum(total[i][i] for i in range(m))
    if trace.denominator != 1:
        warnings.append("sum of traces is not an integer; no connection has this local data")
    breakdown = {
        "m": m,
        "r": r,
        "t0": {str(p): t for p, t in zip(data.points, t0)},
        "sum_t0": sum(t0),
        "chi": chi,
    }
    flags = []
    if 0 in t0:
        dim = (r - 2) * m - sum(t0)
        assert dim == -chi
        flags.append("some t0 is zero")
    else:
        dim = UNKNOWN
        flags.append("no t0 is zero: H^0 and H^2 need not vanish")
        breakdown["H2_bound"] = f"dim H^2 < {m}"
    return LglReport(dim, "Fuchsian", list(data.points), breakdown, flags, warnings)


def fuchsian_system(data: FuchsianInput) -> list:
    """A matrix A(z) whose system y' = A y has the given normalized local data.

    Uses A(z) = -sum_finite A_p / (z - p). Without infinity among the points
    the finite matrices must sum to zero. With infinity, the residue there is
    -sum_finite A_p. It must differ from the given A_inf by an integer
    multiple of the identity, which a gauge change by a power of z absorbs.
    """
    m = data.rank
    z = RatFunc.z()
    A = [[RatFunc(0)] * m for _ in range(m)]
    raw = linalg.zeros(m, m)
    a_inf = None
    for p, M in zip(data.points, data.matrices):
        if p.is_infinite:
            a_inf = M
            continue
        for i in range(m):
            for j in range(m):
                if M[i][j]:
                    A[i][j] = A[i][j] - RatFunc(M[i][j]) / (z - p.point)
                raw[i][j] -= M[i][j]
    if a_inf is None:
        if not linalg.is_zero(raw):
            raise InvalidCombination("finite residue matrices must sum to zero when infinity is regular")
        return A
    diff = linalg.sub(a_inf, raw)
    k = diff[0][0]
    if k.denominator != 1 or diff != linalg.scale(linalg.identity(m), k):
        raise InvalidCombination("A_inf is not an integer shift of minus the sum of the finite matrices")
    return A
