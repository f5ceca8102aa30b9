"""Finite-dimensional cohomology computations.

Group cohomology of G_a and of groups given by unipotent generators (one
topological generator, or a free family). Also the kernel and cokernel of z d/dz + B on
formal Laurent series, the irregularity of a formal solution-space
decomposition, and the five dimensions in Malgrange's sequence for a rank
one local module.

Cohomology in degree >= 2 vanishes in every setting handled here, so it is
never computed; :func:`higher_cohomology` returns 0 for those degrees.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import linalg
from .diffop import DiffOp, MatrixOperator
from .errors import (
    InvalidCombination,
    NotNilpotent,
    NotUnipotent,
    PrecisionTooSmall,
)
from .local import LocalSolver, classify_rank1_place, eigenvalues
from .ratcore import Place, RatFunc, to_rational


def higher_cohomology(degree: int) -> int:
    """H^i for i >= 2 is zero for G_a-modules and for the differential Galois setting."""
    if degree < 2:
        raise ValueError("only degrees >= 2 vanish identically")
    return 0


# --------------------------------------------------------------------------
# G_a and one generator


@dataclass
class NilpotentAction:
    V_dim: int
    N: list

    def __post_init__(self):
        self.N = linalg.as_matrix(self.N)
        if len(self.N) != self.V_dim or any(len(r) != self.V_dim for r in self.N):
            raise InvalidCombination(f"N must be {self.V_dim}x{self.V_dim}")
        if not linalg.is_zero(linalg.matpow(self.N, self.V_dim)):
            raise NotNilpotent("N^dim V is not zero")


def ga_cohomology(a: NilpotentAction):
    """(h0, h1) = (dim ker N, dim coker N)."""
    h0 = linalg.nullity(a.N)
    h1 = linalg.corank(a.N)
    assert h0 == h1
    return h0, h1


def matrix_exp_nilpotent(N) -> list:
    N = linalg.as_matrix(N)
    n = len(N)
    out = linalg.identity(n)
    term = linalg.identity(n)
    for k in range(1, n + 1):
        term = linalg.scale(linalg.matmul(term, N), Fraction(1, k))
        out = linalg.add(out, term)
    return out


def exp_log_check(a: NilpotentAction) -> bool:
    """coker(exp(N) - 1) and coker(N) have the same dimension."""
    E = linalg.shift_identity(matrix_exp_nilpotent(a.N), -1)
    return linalg.corank(E) == linalg.corank(a.N)


def inverse(A) -> list:
    A = linalg.as_matrix(A)
    n = len(A)
    aug = [row + e for row, e in zip(A, linalg.identity(n))]
    red, piv = linalg.rref_partial(aug, n)
    if piv != list(range(n)):
        raise InvalidCombination("matrix is singular")
    return [row[n:] for row in red]


@dataclass
class JordanDecomposition:
    semisimple: list
    nilpotent: list  # A = S + Nil
    unipotent: Optional[list]  # A = S * U, when A is invertible


def jordan_decomposition(A) -> JordanDecomposition:
    """Additive and multiplicative Jordan decomposition over Q (rational spectrum)."""
    A = linalg.as_matrix(A)
    n = len(A)
    spectrum = eigenvalues(A)
    cols = []
    diag = []
    for lam, mult in sorted(spectrum.items()):
        Mk = linalg.matpow(linalg.shift_identity(A, -lam), mult)
        basis = linalg.nullspace(Mk, n)
        cols.extend(basis)
        diag.extend([lam] * len(basis))
    P = linalg.transpose(cols)
    Pinv = inverse(P)
    D = [[diag[i] if i == j else Fraction(0) for j in range(n)] for i in range(n)]
    S = linalg.matmul(linalg.matmul(P, D), Pinv)
    Nil = linalg.sub(A, S)
    U = None
    if all(lam != 0 for lam in spectrum):
        U = linalg.matmul(inverse(S), A)
    return JordanDecomposition(S, Nil, U)


def cyclic_generator_h1_parts(A):
    """(corank(A - 1), corank of A_u - 1 on ker(A_ss - 1))."""
    A = linalg.as_matrix(A)
    n = len(A)
    if linalg.det(A) == 0:
        raise InvalidCombination("A must be invertible")
    jd = jordan_decomposition(A)
    direct = linalg.corank(linalg.shift_identity(A, -1))
    W = linalg.nullspace(linalg.shift_identity(jd.semisimple, -1), n)
    if not W:
        return direct, 0
    Wm = linalg.transpose(W)  # columns span W
    image = linalg.matmul(linalg.shift_identity(jd.unipotent, -1), Wm)
    return direct, len(W) - linalg.rank(linalg.transpose(image))


def cyclic_generator_h1(A) -> int:
    """dim H^1 of a group topologically generated by one element acting by A."""
    direct, via_u = cyclic_generator_h1_parts(A)
    assert direct == via_u, (direct, via_u)
    return direct


# --------------------------------------------------------------------------
# Free unipotent generators


@dataclass
class GeneratorFamily:
    V_dim: int
    generators: dict

    def __post_init__(self):
        self.generators = {k: linalg.as_matrix(v) for k, v in self.generators.items()}
        for label, R in self.generators.items():
            if len(R) != self.V_dim or any(len(r) != self.V_dim for r in R):
                raise InvalidCombination(f"generator {label!r} has the wrong size")
            Nm = linalg.shift_identity(R, -1)
            if not linalg.is_zero(linalg.matpow(Nm, self.V_dim)):
                raise NotUnipotent(f"generator {label!r} is not unipotent")


def free_unipotent_cohomology(fam: GeneratorFamily):
    """Cohomology of V -> V^S, v -> (rho(s) v - v)_s."""
    V = fam.V_dim
    rows = []
    for R in fam.generators.values():
        rows.extend(linalg.shift_identity(R, -1))
    r = linalg.rank(rows) if rows else 0
    h0 = V - r
    h1 = len(fam.generators) * V - r
    assert h1 - h0 == (len(fam.generators) - 1) * V
    return h0, h1


# --------------------------------------------------------------------------
# z d/dz + B on formal Laurent series


def constant_system_dims(B, precision: int):
    """(dim ker, dim coker) of y -> z y' + B y on Q((z))^n.

    The kernel comes from the eigenvalues: sum over integers k of
    nullity(k + B). The cokernel is computed separately by row reducing the
    map on coefficients of z^k for |k| <= precision.
    """
    B = linalg.as_matrix(B)
    n = len(B)
    spectrum = eigenvalues(B)
    ints = [int(-lam) for lam in spectrum if lam.denominator == 1]
    bound = max((abs(k) for k in ints), default=0) + 1
    if precision <= bound:
        raise PrecisionTooSmall(f"precision must exceed {bound}")
    ker = sum(linalg.nullity(linalg.shift_identity(B, k)) for k in ints)
    size = n * (2 * precision + 1)
    big = linalg.zeros(size, size)
    for idx, k in enumerate(range(-precision, precision + 1)):
        blk = linalg.shift_identity(B, k)
        for i in range(n):
            for j in range(n):
                big[idx * n + i][idx * n + j] = blk[i][j]
    coker = linalg.corank(big)
    return ker, coker


# --------------------------------------------------------------------------
# Formal irregularity and the rank one Malgrange sequence


@dataclass
class SolutionSpaceData:
    blocks: list  # of (q_degree, dim)
    gamma_u_log: Optional[list] = None

    def __post_init__(self):
        self.blocks = [tuple(b) for b in self.blocks]
        for k, d in self.blocks:
            if k < 0 or d < 1:
                raise InvalidCombination("q_degree must be >= 0 and dim >= 1")
        if self.gamma_u_log is not None:
            self.gamma_u_log = linalg.as_matrix(self.gamma_u_log)
            w = sum(d for k, d in self.blocks if k == 0)
            if len(self.gamma_u_log) != w:
                raise InvalidCombination("gamma_u_log must act on the q = 0 block")
            if w and not linalg.is_zero(linalg.matpow(self.gamma_u_log, w)):
                raise NotNilpotent("gamma_u_log must be nilpotent")


def formal_irregularity(data: SolutionSpaceData) -> int:
    return sum(k * d for k, d in data.blocks)


@dataclass
class MalgrangeRecord:
    place: Place
    kind: str
    ker_analytic: int
    ker_formal: int
    irr: int
    coker_analytic: int
    coker_formal: int

    @property
    def dims(self):
        return (self.ker_analytic, self.ker_formal, self.irr, self.coker_analytic, self.coker_formal)

    @property
    def alternating_sum(self) -> int:
        a, b, c, d, e = self.dims
        return a - b + c - d + e

    @property
    def zero_sum(self) -> bool:
        return self.alternating_sum == 0


def malgrange_check(f, place: Place) -> MalgrangeRecord:
    """Five dimensions of the local sequence for D - f at the place.

    Formal kernel and cokernel are computed with the local solver. The
    analytic values follow the rank one table: analytic solutions are the
    formal ones, and an irregular point of irregularity d adds d to the
    analytic cokernel.
    """
    f = f if isinstance(f, RatFunc) else RatFunc(to_rational(f))
    cls = classify_rank1_place(f, place)
    T = MatrixOperator.from_diffop(DiffOp((-f, 1)).scale(RatFunc(f.den)))
    solver = LocalSolver(T, place)
    k_lo, k_hi = solver.window(0, solver.base_margin())
    funcs, labels = solver.functionals(k_lo, k_hi)
    coker_formal = len(funcs)
    # columns minus rank of the square window matrix = rows minus rank
    ker_formal = coker_formal
    irr = cls.irr if cls.tag == "Irregular" else 0
    expected = {"Regular": 1, "RegularSingular": 0, "Irregular": 0}[cls.tag]
    if (ker_formal, coker_formal) != (expected, expected):
        raise AssertionError(f"formal dimensions {ker_formal, coker_formal} disagree with the {cls.tag} case")
    rec = MalgrangeRecord(place, str(cls), ker_formal, ker_formal, irr, coker_formal + irr, coker_formal)
    assert rec.zero_sum
    return rec
