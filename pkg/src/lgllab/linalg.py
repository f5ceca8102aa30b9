"""Exact linear algebra over Q on plain lists of Fractions.

Matrices are lists of rows. All routines are Gaussian elimination variants;
nothing here is clever, but everything is exact.
"""
from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Sequence

from .ratcore import Poly, to_rational

Matrix = List[List[Fraction]]

ZERO = Fraction(0)
ONE = Fraction(1)


def as_matrix(rows) -> Matrix:
    return [[to_rational(x) for x in row] for row in rows]


def zeros(m: int, n: int) -> Matrix:
    return [[ZERO] * n for _ in range(m)]


def identity(n: int) -> Matrix:
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a)] if a else []


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return [[sum((x * y for x, y in zip(row, col) if x and y), ZERO) for col in bt] for row in a]


def matvec(a: Matrix, v: Sequence[Fraction]) -> list:
    return [sum((x * y for x, y in zip(row, v) if x and y), ZERO) for row in a]


def add(a: Matrix, b: Matrix) -> Matrix:
    return [[x + y for x, y in zip(r, s)] for r, s in zip(a, b)]


def sub(a: Matrix, b: Matrix) -> Matrix:
    return [[x - y for x, y in zip(r, s)] for r, s in zip(a, b)]


def scale(a: Matrix, c) -> Matrix:
    c = to_rational(c)
    return [[x * c for x in r] for r in a]


def shift_identity(a: Matrix, c) -> Matrix:
    """a + c*I."""
    c = to_rational(c)
    return [[x + c if i == j else x for j, x in enumerate(r)] for i, r in enumerate(a)]


def matpow(a: Matrix, k: int) -> Matrix:
    out = identity(len(a))
    for _ in range(k):
        out = matmul(out, a)
    return out


def is_zero(a: Matrix) -> bool:
    return all(x == 0 for r in a for x in r)


def rref(rows: Matrix, ncols: Optional[int] = None):
    """Reduced row echelon form. Returns (nonzero rows, pivot columns)."""
    a = [list(r) for r in rows]
    if ncols is None:
        ncols = len(a[0]) if a else 0
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        piv = a[r]
        inv = 1 / piv[c]
        if inv != 1:
            for j in range(c, ncols):
                if piv[j]:
                    piv[j] *= inv
        nz = [j for j in range(c, ncols) if piv[j]]
        for i in range(len(a)):
            if i != r:
                row = a[i]
                f = row[c]
                if f:
                    for j in nz:
                        row[j] -= f * piv[j]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return a[:r], pivots


def rank(rows: Matrix) -> int:
    if not rows:
        return 0
    return len(rref(rows)[1])


def nullspace(rows: Matrix, ncols: int) -> Matrix:
    """Basis of {x : A x = 0}."""
    if not rows:
        return identity(ncols)
    red, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [ZERO] * ncols
        v[f] = ONE
        for row, pc in zip(red, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis


def left_nullspace(rows: Matrix, ncols: Optional[int] = None) -> Matrix:
    """Basis of {w : w A = 0}."""
    if not rows:
        return []
    if ncols is None:
        ncols = len(rows[0])
    cols = [dict() for _ in range(ncols)]
    for i, r in enumerate(rows):
        for j, x in enumerate(r):
            if x:
                cols[j][i] = x
    return sparse_nullspace(cols, len(rows))


def sparse_nullspace(rows, ncols: int) -> Matrix:
    """Nullspace basis for a matrix given as a list of {column: value} rows.

    Forward elimination keeps rows sparse; banded matrices stay cheap.
    """
    pivots = {}
    for row in rows:
        row = {j: x for j, x in row.items() if x}
        while row:
            lead = min(row)
            prow = pivots.get(lead)
            if prow is None:
                inv = 1 / row[lead]
                pivots[lead] = {j: x * inv for j, x in row.items()}
                break
            f = row[lead]
            for j, y in prow.items():
                v = row.get(j, ZERO) - f * y
                if v:
                    row[j] = v
                else:
                    row.pop(j, None)
    order = sorted(pivots, reverse=True)
    basis = []
    for free in range(ncols):
        if free in pivots:
            continue
        v = {free: ONE}
        for pc in order:
            if pc > free:
                continue
            acc = ZERO
            for j, y in pivots[pc].items():
                if j != pc and j in v:
                    acc += y * v[j]
            if acc:
                v[pc] = -acc
        basis.append([v.get(j, ZERO) for j in range(ncols)])
    return basis


def rref_partial(rows: Matrix, ncols: int):
    """Eliminate only in the first ``ncols`` columns, keeping all rows."""
    a = [list(r) for r in rows]
    width = len(a[0]) if a else 0
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        piv = a[r]
        inv = 1 / piv[c]
        nz = [j for j in range(c, width) if piv[j]]
        for j in nz:
            piv[j] *= inv
        for i in range(len(a)):
            if i != r:
                row = a[i]
                f = row[c]
                if f:
                    for j in nz:
                        row[j] -= f * piv[j]
        pivots.append(c)
        r += 1
    return a, pivots


def solve(rows: Matrix, rhs: Sequence[Fraction]) -> Optional[list]:
    """One solution of A x = b, or None if inconsistent."""
    ncols = len(rows[0]) if rows else 0
    aug = [list(r) + [to_rational(b)] for r, b in zip(rows, rhs)]
    red, pivots = rref(aug, ncols + 1)
    if ncols in pivots:
        return None
    x = [ZERO] * ncols
    for row, pc in zip(red, pivots):
        x[pc] = row[ncols]
    return x


def nullity(a: Matrix) -> int:
    return len(a[0]) - rank(a) if a else 0


def corank(a: Matrix) -> int:
    return len(a) - rank(a)


def det(a: Matrix) -> Fraction:
    n = len(a)
    m = [list(r) for r in a]
    out = ONE
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c] != 0), None)
        if p is None:
            return ZERO
        if p != c:
            m[c], m[p] = m[p], m[c]
            out = -out
        piv = m[c][c]
        out *= piv
        for i in range(c + 1, n):
            f = m[i][c] / piv
            if f:
                for j in range(c, n):
                    m[i][j] -= f * m[c][j]
    return out


def interpolate(xs: Sequence[Fraction], ys: Sequence[Fraction]) -> Poly:
    """Lagrange interpolation through the given points."""
    out = Poly()
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        if not yi:
            continue
        term = Poly.const(yi)
        denom = ONE
        for j, xj in enumerate(xs):
            if j != i:
                term = term * Poly((-xj, 1))
                denom *= xi - xj
        out = out + term * (1 / denom)
    return out


def poly_matrix_det(entries) -> Poly:
    """Determinant of a square matrix of Polys, by evaluation and interpolation."""
    n = len(entries)
    if n == 0:
        return Poly.const(1)
    bound = sum(max((p.degree for p in row), default=0) for row in entries)
    bound = max(bound, 0)
    xs = [Fraction(k) for k in range(bound + 1)]
    ys = [det([[p(x) for p in row] for row in entries]) for x in xs]
    return interpolate(xs, ys)


def charpoly(a: Matrix) -> Poly:
    """det(s I - A) as a polynomial in s."""
    n = len(a)
    entries = [
        [Poly((-a[i][j], 1)) if i == j else Poly.const(-a[i][j]) for j in range(n)] for i in range(n)
    ]
    return poly_matrix_det(entries)
