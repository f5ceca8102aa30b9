"""Brute-force lgl: polynomial cokernel plus per-place formal obstructions.

For a cleared operator T on Q[z]^n, the cokernel Q[z]^n / T(Q[z]^n) is
finite dimensional, with a monomial basis read off from a row echelon form of
the images T(z^m e_c). A class is in lgl when it is formally solvable at every
place (tested at the roots of the leading coefficient and at infinity) and is
not T(y) for a rational y.

Such a y has poles only where the leading coefficient vanishes, and T maps
its principal part to a polynomial. These images span the correction
subspace J.

So dim lgl = dim ker(obstruction map on the cokernel) - dim J.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import linalg
from .diffop import DiffOp, DiffSystem, MatrixOperator, clearing_factor
from .errors import StabilizationFailure
from .local import DEFAULT_POLICY, LocalSolver, TruncationPolicy, _as_vector
from .ratcore import INF, Place, Poly, RatFunc, integer_roots, linear_factors, order_at

ZERO = Fraction(0)


# --------------------------------------------------------------------------
# Polynomial cokernel


def _shift_and_symbol(T: MatrixOperator):
    """sigma = max (deg C_i - i) together with the low shift; also the degree symbol C(m)."""
    sigma = None
    low = None
    for i, C in T.terms:
        for row in C:
            for p in row:
                if p:
                    hi = p.degree - i
                    lo = p.valuation() - i
                    sigma = hi if sigma is None else max(sigma, hi)
                    low = lo if low is None else min(low, lo)
    sym = [[Poly() for _ in range(T.n)] for _ in range(T.n)]
    for i, C in T.terms:
        ff = Poly.const(1)
        for j in range(i):
            ff = ff * Poly((-j, 1))
        for r in range(T.n):
            for c in range(T.n):
                lc = C[r][c][sigma + i]
                if lc:
                    sym[r][c] = sym[r][c] + ff * lc
    return sigma, low, sym


@dataclass
class PolyCokernel:
    """Monomial basis of Q[z]^n / T(Q[z]^n).

    ``basis`` lists (degree, component) positions; ``certificate`` records the
    degree windows that were compared and the basis size found in each.
    """

    op: MatrixOperator
    basis: list
    exceptional_degrees: list
    symbol_polynomial: Poly
    sigma: int
    degenerate: bool
    certificate: list = field(default_factory=list)
    _echelon: dict = field(default_factory=dict, repr=False)
    _top: int = -1

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def basis_vectors(self) -> list:
        """Basis elements as vectors of Poly."""
        out = []
        for d, c in self.basis:
            v = [Poly()] * self.op.n
            v[c] = Poly.monomial(d)
            out.append(v)
        return out

    def _ensure(self, degree: int):
        if degree <= self._top:
            return
        M = max(degree - self.sigma, self._top - self.sigma, 0) + 2
        self._echelon, self._top = _echelon(self.op, M, self.sigma)

    def coordinates(self, h) -> list:
        """Coordinates of the class of a polynomial vector h in the basis."""
        h = [p if isinstance(p, Poly) else Poly.const(p) for p in h]
        deg = max((p.degree for p in h), default=-1)
        self._ensure(deg)
        vec = {}
        for c, p in enumerate(h):
            for d, x in enumerate(p.coeffs):
                if x:
                    vec[(d, c)] = x
        # reduce by pivot rows from the top down
        for pos in sorted(vec, reverse=True):
            x = vec.get(pos)
            if not x or pos not in self._echelon:
                continue
            for q, y in self._echelon[pos].items():
                vec[q] = vec.get(q, ZERO) - x * y
        leftover = [p for p, x in vec.items() if x and p not in set(self.basis)]
        if leftover:
            raise StabilizationFailure(f"reduction left non-basis positions {sorted(leftover)[:3]}")
        return [vec.get(b, ZERO) for b in self.basis]


def _echelon(T: MatrixOperator, M: int, sigma: int):
    """RREF of {T(z^m e_c) : m <= M} with columns in descending (degree, comp) order.

    Returns ({pivot position: row as dict}, top degree).
    """
    rows = []
    for m in range(M + 1):
        for c in range(T.n):
            v = [Poly()] * T.n
            v[c] = Poly.monomial(m)
            img = T.apply_poly(v)
            row = {}
            for r, p in enumerate(img):
                for d, x in enumerate(p.coeffs):
                    if x:
                        row[(d, r)] = x
            if row:
                rows.append(row)
    pivots = {}
    for row in rows:
        row = dict(row)
        # eliminate existing pivots
        changed = True
        while changed:
            changed = False
            for pos in sorted(row, reverse=True):
                x = row.get(pos)
                if x and pos in pivots:
                    for q, y in pivots[pos].items():
                        row[q] = row.get(q, ZERO) - x * y
                    changed = True
                    break
            row = {q: x for q, x in row.items() if x}
        if not row:
            continue
        lead = max(row)
        inv = 1 / row[lead]
        row = {q: x * inv for q, x in row.items()}
        for pos, prow in pivots.items():
            x = prow.get(lead)
            if x:
                for q, y in row.items():
                    prow[q] = prow.get(q, ZERO) - x * y
                pivots[pos] = {q: v for q, v in prow.items() if v}
        pivots[lead] = row
    return pivots, M + sigma


def _free_positions(pivots: dict, n: int, cut: int) -> list:
    return [(d, c) for d in range(cut + 1) for c in range(n) if (d, c) not in pivots]


def poly_cokernel(T, max_rounds: int = 6) -> PolyCokernel:
    """Cokernel of a polynomial operator on Q[z]^n (a DiffOp is taken as n = 1)."""
    if isinstance(T, DiffOp):
        T = MatrixOperator.from_diffop(T)
    sigma, low, sym = _shift_and_symbol(T)
    det = linalg.poly_matrix_det(sym)
    degenerate = det.is_zero()
    exc = [] if degenerate else [r for r in integer_roots(det) if r >= 0]
    span = max(sigma - low, 1)
    M = max(exc + [-1]) + T.order + span + 2
    cert = []
    if not degenerate:
        bases = []
        for k in range(3):
            Mk = M + k * span
            piv, top = _echelon(T, Mk, sigma)
            free = _free_positions(piv, T.n, top)
            cert.append({"M": Mk, "dimension": len(free)})
            bases.append(free)
        if not (bases[0] == bases[1] == bases[2]):
            raise StabilizationFailure("cokernel basis changed when the degree window grew")
        out = PolyCokernel(T, bases[0], exc, det, sigma, False, cert)
        out._echelon, out._top = piv, top
        return out
    # Degenerate symbol: grow the row window at a fixed cut until two
    # consecutive windows agree at the cut and one step above it.
    cut = M + sigma
    prev = None
    for k in range(max_rounds):
        Mk = M + (k + 1) * 2 * span
        piv, top = _echelon(T, Mk, sigma)
        free0 = _free_positions(piv, T.n, cut)
        free1 = _free_positions(piv, T.n, cut + span)
        cert.append({"M": Mk, "cut": cut, "dimension": len(free0), "dimension_above": len(free1)})
        state = (free0, len(free1))
        if prev == state and len(free0) == len(free1):
            out = PolyCokernel(T, free0, exc, det, sigma, True, cert)
            out._echelon, out._top = piv, cut
            return out
        prev = state
    raise StabilizationFailure("cokernel of a degenerate-symbol operator did not stabilize")


# --------------------------------------------------------------------------
# Oracle


@dataclass
class OracleReport:
    dimension: int
    coker_dimension: int
    coker_basis: list  # vectors of Poly
    places: list
    obstruction_ranks: dict  # Place -> rank of the obstruction map on the cokernel
    correction_rank: int  # dim J
    witnesses: list  # vectors of Poly spanning a complement of J in the solvable part
    element_obstructions: list  # per coker basis element: {Place: [values]}
    certificate: dict
    soundness_checked: bool = False

    def witness_strings(self) -> list:
        return [_vec_str(w) for w in self.witnesses]


def _vec_str(v) -> str:
    if len(v) == 1:
        return v[0].to_str()
    return "(" + ", ".join(p.to_str() for p in v) + ")"


def _leading_places(T: MatrixOperator) -> list:
    roots = linear_factors(T.leading_poly())
    out = sorted((Place.finite(r) for r in roots), key=lambda p: p.sort_key())
    return out + [INF]


def _to_ratvec(v) -> list:
    return [RatFunc(p) for p in v]


def correction_images(T: MatrixOperator, place: Place, solver: Optional[LocalSolver] = None) -> list:
    """Polynomial vectors T(P) for principal parts P at a finite place with T(P) polynomial."""
    solver = solver or LocalSolver(T, place)
    n = T.n
    if solver.degenerate:
        K = max(solver.mu, 0) + solver.base_margin()
    else:
        negs = [-r for r in solver.int_roots if r < 0]
        K = max([solver.mu, 0] + negs)
    if K <= 0:
        return []
    cols = [(k, c) for k in range(-K, 0) for c in range(n)]
    images = [solver.image_of_monomial(k, c) for k, c in cols]
    neg = sorted({key for img in images for key in img if key[0] < 0})
    if neg:
        A = [[img.get(key, ZERO) for img in images] for key in neg]
        kernel = linalg.nullspace(A, len(cols))
    else:
        kernel = linalg.identity(len(cols))
    out = []
    for vec in kernel:
        acc = {}
        for x, img in zip(vec, images):
            if x:
                for key, y in img.items():
                    acc[key] = acc.get(key, ZERO) + x * y
        acc = {key: y for key, y in acc.items() if y}
        polys = []
        for r in range(n):
            coeffs = [ZERO] * (max((e for (e, rr) in acc if rr == r), default=-1) + 1)
            for (e, rr), y in acc.items():
                if rr == r:
                    coeffs[e] = y
            polys.append(Poly(coeffs).shift(-place.point))
        out.append(polys)
    return out


def _oracle(T: MatrixOperator, policy: TruncationPolicy, check: bool = True) -> OracleReport:
    coker = poly_cokernel(T)
    N = coker.dimension
    basis = coker.basis_vectors()
    places = _leading_places(T)
    gs = [_to_ratvec(b) for b in basis]
    rows = []
    ranks = {}
    per_element = [dict() for _ in range(N)]
    local_cert = {}
    solvers = {}
    for p in places:
        solver = LocalSolver(T, p)
        solvers[p] = solver
        if N == 0:
            ranks[p] = 0
            continue
        obs = solver.obstruction(gs, policy)
        local_cert[str(p)] = {"window": list(obs.window), "exact": obs.exact, "functionals": obs.rank}
        vals = obs.values
        ranks[p] = linalg.rank(vals) if vals else 0
        rows.extend(vals)
        for j in range(N):
            per_element[j][p] = [row[j] for row in vals]
    kernel = linalg.nullspace(rows, N) if N else []
    # correction subspace J
    J = []
    for p in places:
        if p.is_infinite:
            continue
        for img in correction_images(T, p, solvers[p]):
            J.append(coker.coordinates(img))
    Jred = linalg.rref(J, N)[0] if J and N else []
    for v in Jred:
        if rows and any(linalg.matvec(rows, v)):
            raise StabilizationFailure("a globally solvable class failed a local test")
    witnesses = []
    span = [list(r) for r in Jred]
    r0 = len(span)
    for v in kernel:
        if linalg.rank(span + [v]) > r0:
            span.append(v)
            r0 += 1
            witnesses.append(v)
    dim = len(witnesses)
    wpolys = []
    for v in witnesses:
        acc = [Poly()] * T.n
        for x, b in zip(v, basis):
            if x:
                acc = [a + q * x for a, q in zip(acc, b)]
        wpolys.append(acc)
    report = OracleReport(
        dimension=dim,
        coker_dimension=N,
        coker_basis=basis,
        places=places,
        obstruction_ranks=ranks,
        correction_rank=len(Jred),
        witnesses=wpolys,
        element_obstructions=per_element,
        certificate={"cokernel": coker.certificate, "degenerate_symbol": coker.degenerate, "local": local_cert},
    )
    if check:
        _soundness(T, report, solvers, policy)
    return report


def _soundness(T, report: OracleReport, solvers: dict, policy) -> None:
    """Re-test every witness place by place with a fresh obstruction evaluation."""
    for w in report.witnesses:
        g = _to_ratvec(w)
        for p, solver in solvers.items():
            obs = solver.obstruction([g], policy)
            if any(row[0] for row in obs.values):
                raise StabilizationFailure(f"witness {_vec_str(w)} is not solvable at {p}")
    report.soundness_checked = True


def lgl_oracle(L: DiffOp, policy: TruncationPolicy = DEFAULT_POLICY) -> OracleReport:
    """dim lgl(L) for a scalar operator, by direct computation."""
    u = clearing_factor(L)
    T = MatrixOperator.from_diffop(L.scale(u))
    return _oracle(T, policy)


def lgl_oracle_system(A, policy: TruncationPolicy = DEFAULT_POLICY) -> OracleReport:
    """dim lgl for the system y' = A y, through d y' - d A y."""
    S = A if isinstance(A, DiffSystem) else DiffSystem(A)
    return _oracle(MatrixOperator.from_system(S), policy)


# --------------------------------------------------------------------------
# Membership


@dataclass
class ClassQuery:
    locally_solvable: bool
    failing_places: list
    representative: Optional[list]  # polynomial vector, when locally solvable
    coordinates: Optional[list]  # in the lgl witness basis
    globally_solvable: Optional[bool]


def lgl_class(L, g, policy: TruncationPolicy = DEFAULT_POLICY) -> ClassQuery:
    """Where does the right-hand side g sit relative to lgl(L)?

    g is first tested at every place where it has a pole or L is singular.
    If it passes everywhere, its principal parts are removed by subtracting
    T(principal part of a local solution), leaving a polynomial representative
    whose class is expressed in the oracle's witness basis.
    """
    if isinstance(L, DiffSystem):
        T = MatrixOperator.from_system(L)
        u = RatFunc(L.cleared()[0])
    else:
        u = clearing_factor(L)
        T = MatrixOperator.from_diffop(L.scale(u))
    g = [u * c for c in _as_vector(g, T.n)]
    places = set(_leading_places(T))
    for comp in g:
        if comp:
            places.update(Place.finite(r) for r in linear_factors(comp.den))
    places = sorted(places, key=lambda p: p.sort_key())
    failing = []
    solvers = {}
    for p in places:
        solvers[p] = LocalSolver(T, p)
        obs = solvers[p].obstruction([g], policy)
        if any(row[0] for row in obs.values):
            failing.append(p)
    if failing:
        return ClassQuery(False, failing, None, None, None)
    rep = list(g)
    for p in places:
        if p.is_infinite or all(not c or order_at(c, p) >= 0 for c in rep):
            continue
        P = _principal_part_of_solution(solvers[p], rep, policy)
        img = T.apply(P)
        rep = [a - b for a, b in zip(rep, img)]
    if not all(c.is_polynomial() for c in rep):
        raise StabilizationFailure("principal-part reduction left a pole")
    rep_poly = [c.num for c in rep]
    report = _oracle(T, policy, check=False)
    coker = poly_cokernel(T)
    coords = coker.coordinates(rep_poly)
    J = []
    for p in report.places:
        if not p.is_infinite:
            J.extend(coker.coordinates(img) for img in correction_images(T, p))
    W = [_coords_of(w, coker) for w in report.witnesses]
    # solve coords = sum a_i W_i + sum b_j J_j
    cols = W + J
    if not cols:
        return ClassQuery(True, [], rep_poly, [], all(x == 0 for x in coords))
    A = linalg.transpose(cols)
    sol = linalg.solve(A, coords) if A else []
    if sol is None:
        raise StabilizationFailure("locally solvable class lies outside the computed lgl span")
    a = sol[: len(W)]
    return ClassQuery(True, [], rep_poly, a, all(x == 0 for x in a))


def _coords_of(w, coker: PolyCokernel) -> list:
    return coker.coordinates(w)


def _principal_part_of_solution(solver: LocalSolver, g, policy) -> list:
    """Negative-exponent part of some local solution of T y = g, as RatFunc vector."""
    v = solver.rhs_valuation([g])
    margin = solver.base_margin() + policy.extra_margin
    k_lo, k_hi = solver.window(v, margin)
    k_hi = max(k_hi, 0)
    cols = [(k, c) for k in range(k_lo, k_hi + 1) for c in range(solver.n)]
    labels = [(e, r) for e in range(k_lo + solver.mu, k_hi + solver.mu + 1) for r in range(solver.n)]
    index = {lab: j for j, lab in enumerate(labels)}
    E = [[ZERO] * len(cols) for _ in labels]
    for j, (k, c) in enumerate(cols):
        for key, val in solver.image_of_monomial(k, c).items():
            row = index.get(key)
            if row is not None:
                E[row][j] = val
    rhs = solver._rhs_coeffs(g, labels, k_hi + solver.mu)
    x = linalg.solve(E, rhs)
    if x is None:
        raise StabilizationFailure(f"no local solution found at {solver.place}")
    t = RatFunc(Poly((-solver.place.point, 1)))
    out = [RatFunc(0)] * solver.n
    for val, (k, c) in zip(x, cols):
        if val and k < 0:
            out[c] = out[c] + RatFunc(val) * t ** k
    return out
