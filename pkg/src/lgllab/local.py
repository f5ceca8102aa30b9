"""Per-place analysis of operators and systems over Q(z).

The workhorse is :class:`LocalSolver`. It takes a polynomial matrix operator
T = sum_i C_i(z) D^i and a place, and works with exact local expansions. At a
finite place D^i t^k = k(k-1)...(k-i+1) t^(k-i). At infinity (t = 1/z) it is
(-1)^i k(k+1)...(k+i-1) t^(k+i). The lowest stratum of T(t^k e) gives the
matrix M0(k), whose determinant is the indicial polynomial. When det M0 is
not identically zero, a finite window of coefficients decides formal
solvability exactly. Otherwise the window is grown until it stabilizes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import linalg
from .diffop import DiffOp, DiffSystem, MatrixOperator, clear_denominators, clearing_factor
from .errors import (
    NonRationalEigenvalues,
    NonSplitLeadingCoefficient,
    StabilizationFailure,
    UnnormalizedEigenvalues,
)
from .ratcore import (
    INF,
    LaurentSeries,
    Place,
    Poly,
    RatFunc,
    integer_roots,
    laurent_expand,
    linear_factors,
    order_at,
    rational_roots,
    residue,
)

ZERO = Fraction(0)


def _falling(k, i: int):
    out = 1
    for j in range(i):
        out *= k - j
    return out


def _rising(k, i: int):
    out = 1
    for j in range(i):
        out *= k + j
    return out


def _lam_poly(i: int, infinite: bool) -> Poly:
    """lambda_i(s) with D^i t^s = lambda_i(s) t^(s -/+ i)."""
    out = Poly.const(1)
    for j in range(i):
        out = out * Poly((j if infinite else -j, 1))
    if infinite and i % 2:
        out = -out
    return out


# --------------------------------------------------------------------------
# Solver


@dataclass(frozen=True)
class TruncationPolicy:
    """Window control for formal solvability.

    ``extra_margin`` is added to the base margin. ``max_rounds`` bounds how
    often a degenerate window may be doubled while waiting for two consecutive
    windows to agree.
    """

    extra_margin: int = 0
    max_rounds: int = 5


DEFAULT_POLICY = TruncationPolicy()


@dataclass
class Obstruction:
    """Linear conditions on a right-hand side's local coefficients.

    ``functionals[j]`` pairs with ``rhs_basis_labels`` (exponent, component);
    a right-hand side is locally solvable iff every functional vanishes on it.
    ``values`` holds the functionals evaluated on the inputs that were tested.
    """

    place: Place
    functionals: list
    rhs_basis_labels: list
    values: list = field(default_factory=list)
    window: tuple = ()
    exact: bool = True

    @property
    def rank(self) -> int:
        return len(self.functionals)


class LocalSolver:
    """Formal solvability of T y = g in Q((t))^n at one place."""

    def __init__(self, op: MatrixOperator, place: Place):
        self.op = op
        self.place = place
        self._cache = {}
        self.n = op.n
        self.order = op.order
        self.eps = 1 if place.is_infinite else -1
        self.terms = op.local_terms(place)
        mu = math.inf
        for i, C in self.terms:
            for row in C:
                for loc in row:
                    if loc:
                        mu = min(mu, min(loc) + self.eps * i)
        if mu == math.inf:
            raise ValueError("zero operator")
        self.mu = int(mu)
        M0 = [[Poly() for _ in range(self.n)] for _ in range(self.n)]
        for i, C in self.terms:
            lam = _lam_poly(i, place.is_infinite)
            e = self.mu - self.eps * i
            for r in range(self.n):
                for c in range(self.n):
                    coeff = C[r][c].get(e)
                    if coeff:
                        M0[r][c] = M0[r][c] + lam * coeff
        self.M0 = M0
        self.det0 = linalg.poly_matrix_det(M0)
        self.degenerate = self.det0.is_zero()
        self.int_roots = [] if self.degenerate else integer_roots(self.det0)
        self.max_pole = max(
            (max(0, -min(loc)) for _, C in self.terms for row in C for loc in row if loc), default=0
        )

    def image_of_monomial(self, k: int, c: int) -> dict:
        """T(t^k e_c) as {(exponent, component): coefficient}."""
        out = {}
        for i, C in self.terms:
            if self.place.is_infinite:
                lam = (-1) ** i * _rising(k, i)
            else:
                lam = _falling(k, i)
            if not lam:
                continue
            for r in range(self.n):
                for e, coeff in C[r][c].items():
                    key = (e + k + self.eps * i, r)
                    out[key] = out.get(key, ZERO) + lam * coeff
        return {key: v for key, v in out.items() if v}

    def base_margin(self) -> int:
        nonneg = [r for r in self.int_roots if r >= 0]
        return (max(nonneg) if nonneg else 0) + self.order + self.max_pole + 4

    def window(self, rhs_valuation: int, margin: int):
        """Unknown exponents [k_lo, k_hi] for right-hand sides of the given valuation."""
        if self.degenerate:
            k_lo = rhs_valuation - self.mu - margin
            return k_lo, rhs_valuation - self.mu + margin
        lows = [rhs_valuation - self.mu] + self.int_roots[:1]
        k_lo = min(lows)
        k_hi = max(self.int_roots[-1:] + [k_lo]) + margin
        return k_lo, k_hi

    def functionals(self, k_lo: int, k_hi: int):
        """Left null vectors of the window matrix, with their row labels."""
        key = (k_lo, k_hi)
        if key not in self._cache:
            self._cache[key] = self._functionals(k_lo, k_hi)
        return self._cache[key]

    def _functionals(self, k_lo: int, k_hi: int):
        cols = [(k, c) for k in range(k_lo, k_hi + 1) for c in range(self.n)]
        labels = [(e, r) for e in range(k_lo + self.mu, k_hi + self.mu + 1) for r in range(self.n)]
        index = {lab: j for j, lab in enumerate(labels)}
        E = [[ZERO] * len(cols) for _ in labels]
        for j, (k, c) in enumerate(cols):
            for key, v in self.image_of_monomial(k, c).items():
                row = index.get(key)
                if row is not None:
                    E[row][j] = v
        return linalg.left_nullspace(E, len(cols)), labels

    def _rhs_coeffs(self, g, labels, top: int) -> list:
        exps = {}
        for r, comp in enumerate(g):
            if not comp:
                continue
            v = order_at(comp, self.place)
            if v > top:
                continue
            s = laurent_expand(comp, self.place, top - v + 1)
            for k, c in s.to_dict().items():
                exps[(k, r)] = c
        return [exps.get(lab, ZERO) for lab in labels]

    def _evaluate(self, funcs, labels, gs, top):
        vecs = [self._rhs_coeffs(g, labels, top) for g in gs]
        return [[sum((w[j] * v[j] for j in range(len(w)) if w[j] and v[j]), ZERO) for v in vecs] for w in funcs]

    def rhs_valuation(self, gs) -> int:
        vals = [order_at(comp, self.place) for g in gs for comp in g if comp]
        return min(vals) if vals else 0

    def obstruction(self, gs: Sequence, policy: TruncationPolicy = DEFAULT_POLICY) -> Obstruction:
        """Obstruction functionals and their values on each right-hand side in ``gs``.

        Each element of ``gs`` is a length-n sequence of RatFunc. The result's
        ``values[j][m]`` is functional j applied to gs[m].
        """
        gs = [[c if isinstance(c, RatFunc) else RatFunc(c) for c in g] for g in gs]
        v = self.rhs_valuation(gs)
        margin = self.base_margin() + policy.extra_margin
        prev = None
        for _ in range(max(2, policy.max_rounds)):
            k_lo, k_hi = self.window(v, margin)
            funcs, labels = self.functionals(k_lo, k_hi)
            top = k_hi + self.mu
            values = self._evaluate(funcs, labels, gs, top)
            rank = len(funcs)
            vrows = linalg.rref(values, len(gs))[0] if values and gs else []
            current = Obstruction(self.place, funcs, labels, values, (k_lo, k_hi), not self.degenerate)
            if prev is not None:
                if prev[0] == rank and prev[1] == vrows:
                    return current
                if not self.degenerate:
                    raise StabilizationFailure(
                        f"obstruction rank at {self.place} changed from {prev[0]} to {rank}"
                    )
            prev = (rank, vrows)
            margin *= 2
        raise StabilizationFailure(f"obstructions at {self.place} did not stabilize")


# --------------------------------------------------------------------------
# Operators: conversions


def _as_matrix_operator(L):
    """(MatrixOperator, multiplier u) with T = u * L on right-hand sides."""
    if isinstance(L, DiffSystem):
        d, _ = L.cleared()
        return MatrixOperator.from_system(L), RatFunc(d)
    u = clearing_factor(L)
    return MatrixOperator.from_diffop(L.scale(u)), u


def _as_vector(g, n: int) -> list:
    if isinstance(g, (list, tuple)):
        out = [c if isinstance(c, RatFunc) else RatFunc(c) for c in g]
    else:
        out = [g if isinstance(g, RatFunc) else RatFunc(g)]
    if len(out) != n:
        raise ValueError(f"right-hand side has {len(out)} components, expected {n}")
    return out


def local_solvable(L, g, place: Place, policy: TruncationPolicy = DEFAULT_POLICY):
    """Decide whether L(y) = g has a solution y in Q((t)) (or Q((t))^n) at the place.

    Returns (solvable, Obstruction); the obstruction's ``values`` column holds
    the functionals evaluated on g.
    """
    T, u = _as_matrix_operator(L)
    vec = [u * c for c in _as_vector(g, T.n)]
    obs = LocalSolver(T, place).obstruction([vec], policy)
    ok = all(row[0] == 0 for row in obs.values)
    return ok, obs


# --------------------------------------------------------------------------
# Scalar invariants


def _reciprocal(f: RatFunc) -> RatFunc:
    """f(1/t) as a rational function of t (returned in the variable z)."""
    n, d = f.num, f.den
    N = max(n.degree, d.degree, 0)
    return RatFunc(n.reverse(N), d.reverse(N))


def _ordinary_at_infinity(L: DiffOp) -> bool:
    if L.order == 0:
        return True
    Dt = DiffOp((0, -RatFunc(Poly((0, 0, 1)))))  # D = -t^2 d/dt
    Lt = DiffOp()
    for i, a in enumerate(L.coeffs):
        if a:
            Lt = Lt + DiffOp((_reciprocal(a),)) * Dt ** i
    lead = Lt.leading
    zero = Place.finite(0)
    return all(order_at(c / lead, zero) >= 0 for c in Lt.coeffs)


def singular_places(L: DiffOp) -> list:
    """Roots of the leading coefficient, plus infinity when it is not ordinary.

    L is cleared first; the result is sorted with infinity last.
    """
    if L.order < 1:
        return []
    Lc = clear_denominators(L)
    roots = linear_factors(Lc.leading.num, error=NonSplitLeadingCoefficient)
    out = sorted((Place.finite(r) for r in roots), key=Place.sort_key)
    if not _ordinary_at_infinity(Lc):
        out.append(INF)
    return out


def system_singular_places(S: DiffSystem) -> list:
    d, _ = S.cleared()
    out = [Place.finite(r) for r in linear_factors(d)]
    out.sort(key=lambda p: p.sort_key())
    if any(x and order_at(x, INF) < 2 for row in S.A for x in row):
        out.append(INF)
    return out


def delta_orders(L: DiffOp, place: Place) -> list:
    """ord_t of each delta-form coefficient b_0..b_n (math.inf for zero)."""
    T = MatrixOperator.from_diffop(clear_denominators(L))
    infinite = place.is_infinite
    b = [dict() for _ in range(L.order + 1)]
    for i, C in T.local_terms(place):
        shift = i if infinite else -i
        lam = _lam_poly(i, infinite)
        for e, c in C[0][0].items():
            for j, pc in enumerate(lam.coeffs):
                if pc:
                    b[j][e + shift] = b[j].get(e + shift, ZERO) + c * pc
    out = []
    for bj in b:
        nz = [e for e, c in bj.items() if c]
        out.append(min(nz) if nz else math.inf)
    return out


def irregularity(L: DiffOp, place: Place) -> int:
    """ord b_n - min_i ord b_i for the delta-form, floored at 0."""
    if L.order < 1:
        return 0
    ords = delta_orders(L, place)
    return max(0, int(ords[-1] - min(ords)))


def indicial_polynomial(L: DiffOp, place: Place) -> Poly:
    """Monic polynomial in s read from the lowest stratum of L applied to t^s."""
    T = MatrixOperator.from_diffop(clear_denominators(L))
    return LocalSolver(T, place).det0.monic()


# --------------------------------------------------------------------------
# Rank one


@dataclass(frozen=True)
class PlaceClassification:
    tag: str  # "Regular" | "RegularSingular" | "Irregular"
    residue: Optional[Fraction] = None
    irr: int = 0

    def __str__(self):
        if self.tag == "RegularSingular":
            return f"RegularSingular({self.residue})"
        if self.tag == "Irregular":
            return f"Irregular({self.irr})"
        return "Regular"


def form_pole_order(f: RatFunc, place: Place) -> int:
    """Pole order of the differential f dz at the place (0 if holomorphic)."""
    if not f:
        return 0
    v = order_at(f, place)
    if place.is_infinite:
        v -= 2  # dz = -t^-2 dt
    return max(0, -v)


def classify_rank1_place(f: RatFunc, place: Place) -> PlaceClassification:
    """Local type of D - f from the pole order and residue of f dz."""
    f = f if isinstance(f, RatFunc) else RatFunc(f)
    if not place.is_infinite:
        linear_factors(f.den)
    k = form_pole_order(f, place)
    if k >= 2:
        return PlaceClassification("Irregular", irr=k - 1)
    res = residue(f, place)
    if k == 1 and res.denominator != 1:
        return PlaceClassification("RegularSingular", residue=res)
    return PlaceClassification("Regular", residue=res)


def rank1_residue_criterion(f: RatFunc, g: RatFunc, place: Place) -> bool:
    """At a regular place of D - f: is Res(g / y0 dz) zero for the local solution y0?"""
    f = f if isinstance(f, RatFunc) else RatFunc(f)
    g = g if isinstance(g, RatFunc) else RatFunc(g)
    cls = classify_rank1_place(f, place)
    if cls.tag != "Regular":
        raise ValueError(f"{place} is not a regular place of D - f")
    if not g:
        return True
    n = int(cls.residue)
    # G = g dz/dt, F = f dz/dt, both as series in t
    def as_form(h: RatFunc, prec: int) -> LaurentSeries:
        s = laurent_expand(h, place, prec)
        return -(s.shift(-2)) if place.is_infinite else s

    vg = order_at(g, place) - (2 if place.is_infinite else 0)
    if n - 1 < vg:
        return True
    prec = n - vg  # coefficients of t^vg .. t^(n-1) are needed
    F = as_form(f, prec + 3) if f else LaurentSeries.zero(place, prec + 3)
    # F - n/t is holomorphic; y0 = t^n exp(int(F - n/t))
    holo = F - LaurentSeries.from_dict(place, {-1: Fraction(n)}, F.abs_precision)
    X = holo.integral().truncate(prec).exp()
    G = as_form(g, prec)
    quotient = G * X.inverse()
    return quotient.coefficient(n - 1) == 0


# --------------------------------------------------------------------------
# Residue matrices


def eigenvalues(A) -> dict:
    """Rational eigenvalues with algebraic multiplicity; raises if the spectrum is not rational."""
    A = linalg.as_matrix(A)
    cp = linalg.charpoly(A)
    roots = rational_roots(cp)
    if sum(roots.values()) != len(A):
        raise NonRationalEigenvalues("characteristic polynomial does not split over Q")
    return roots


def t0_of_residue_matrix(A) -> int:
    """Nullity of a normalized residue matrix (eigenvalues in [0, 1))."""
    A = linalg.as_matrix(A)
    for lam in eigenvalues(A):
        if not 0 <= lam < 1:
            raise UnnormalizedEigenvalues(f"eigenvalue {lam} outside [0, 1)")
    return linalg.nullity(A)


# --------------------------------------------------------------------------
# Summary


@dataclass
class LocalAnalysis:
    place: Place
    irregularity: int
    indicial: Poly
    integer_indicial_roots: list
    classification: Optional[PlaceClassification] = None


def analyze(L: DiffOp) -> list:
    """LocalAnalysis for every singular place of L (infinity last)."""
    out = []
    f = None
    if L.order == 1:
        f = -L.coeff(0) / L.leading
    for p in singular_places(L):
        ind = indicial_polynomial(L, p)
        out.append(
            LocalAnalysis(
                p,
                irregularity(L, p),
                ind,
                integer_roots(ind),
                classify_rank1_place(f, p) if f is not None else None,
            )
        )
    return out
