"""Differential operators over Q(z) with D = d/dz, and first-order systems D - A.

Also home to the operator grammar and to local delta-form rewriting
(delta = t d/dt).

Operators are kept in normal form sum_i a_i(z) D^i (coefficients to the left),
so equality is structural. Products use the commutation rule D a = a D + a'.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Tuple

from .errors import DivisionByZeroPolynomial, InsufficientPrecision, ParseError
from .ratcore import (
    LaurentSeries,
    Place,
    Poly,
    RatFunc,
    laurent_expand,
    poly_local,
    to_rational,
)


def _binom(n: int, k: int) -> int:
    return math.comb(n, k)


class DiffOp:
    """sum_i coeffs[i] * D^i with coeffs in Q(z); the zero operator has no coeffs."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence = ()):
        cs = [c if isinstance(c, RatFunc) else RatFunc(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs: Tuple[RatFunc, ...] = tuple(cs)

    @classmethod
    def D(cls) -> "DiffOp":
        return cls((0, 1))

    @classmethod
    def z(cls) -> "DiffOp":
        return cls((RatFunc.z(),))

    @classmethod
    def const(cls, c) -> "DiffOp":
        return cls((RatFunc(to_rational(c)),))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> RatFunc:
        return self.coeffs[-1]

    def coeff(self, i: int) -> RatFunc:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else RatFunc(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_polynomial(self) -> bool:
        return all(c.is_polynomial() for c in self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    @staticmethod
    def _coerce(x):
        if isinstance(x, DiffOp):
            return x
        if isinstance(x, (int, Fraction, Poly, RatFunc)):
            return DiffOp((x,))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        return DiffOp([self.coeff(i) + other.coeff(i) for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return DiffOp([-c for c in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return DiffOp()
        out = [RatFunc(0)] * (self.order + other.order + 1)
        for j, b in enumerate(other.coeffs):
            if not b:
                continue
            derivs = [b]
            for _ in range(self.order):
                derivs.append(derivs[-1].derivative())
            for i, a in enumerate(self.coeffs):
                if not a:
                    continue
                # a D^i b D^j = a sum_k C(i,k) b^(k) D^(i-k+j)
                for k in range(i + 1):
                    if derivs[k]:
                        out[i - k + j] = out[i - k + j] + a * derivs[k] * _binom(i, k)
        return DiffOp(out)

    def __rmul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self

    def __pow__(self, k: int):
        out = DiffOp.const(1)
        for _ in range(k):
            out = out * self
        return out

    def scale(self, u: RatFunc) -> "DiffOp":
        """Left multiplication by the function u."""
        return DiffOp([u * c for c in self.coeffs])

    def __call__(self, f):
        return apply(self, f)

    def __str__(self):
        return format_operator(self)

    def __repr__(self):
        return f"DiffOp({self})"


def _coeff_str(c: RatFunc) -> str:
    s = str(c)
    if c.is_polynomial() and sum(1 for x in c.num.coeffs if x) == 1:
        return s
    return f"({s})"


def format_operator(L: DiffOp) -> str:
    """Render in the operator grammar; parse_operator inverts this."""
    if L.is_zero():
        return "0"
    terms = []
    for i in range(L.order, -1, -1):
        c = L.coeffs[i]
        if not c:
            continue
        sign = ""
        if c.num.lc < 0:
            sign, c = "-", -c
        if i == 0:
            terms.append(sign + _coeff_str(c))
            continue
        dpart = "D" if i == 1 else f"D^{i}"
        if c == RatFunc(1):
            terms.append(sign + dpart)
        else:
            terms.append(f"{sign}{_coeff_str(c)}*{dpart}")
    out = terms[0]
    for t in terms[1:]:
        out += f" - {t[1:]}" if t.startswith("-") else f" + {t}"
    return out


# --------------------------------------------------------------------------
# Parser

_TOKEN = re.compile(r"\s*(?:(\d+)|(.))")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # only trailing whitespace left
            break
        start = m.start(1) if m.group(1) is not None else m.start(2)
        if m.group(1) is not None:
            tokens.append(("int", int(m.group(1)), start))
        else:
            ch = m.group(2)
            if ch.isspace():
                pos = m.end()
                continue
            if ch not in "Dz+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", start)
            tokens.append((ch, ch, start))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    """Recursive descent over the operator grammar.

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := '-' factor | base ('^' uint)?
    base   := 'D' | 'z' | uint | '(' expr ')'

    Division is only allowed by order-0 operators (rational functions).
    """

    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None):
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            expected = "integer" if kind == "int" else repr(kind)
            found = "end of input" if tok[0] == "end" else repr(tok[1])
            raise ParseError(f"expected {expected}, found {found}", tok[2])
        self.i += 1
        return tok

    def parse(self) -> DiffOp:
        if self.peek()[0] == "end":
            raise ParseError("empty operator", 0)
        out = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected {tok[1]!r}", tok[2])
        return out

    def expr(self) -> DiffOp:
        out = self.term()
        while self.peek()[0] in "+-":
            op = self.take()[0]
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self) -> DiffOp:
        out = self.factor()
        while self.peek()[0] in ("*", "/"):
            op, _, pos = self.take()
            rhs = self.factor()
            if op == "*":
                out = out * rhs
            else:
                if rhs.order > 0:
                    raise ParseError("division by an operator of positive order", pos)
                if rhs.is_zero():
                    raise DivisionByZeroPolynomial(f"division by zero at position {pos}")
                out = out * DiffOp((rhs.coeffs[0].inverse(),))
        return out

    def factor(self) -> DiffOp:
        if self.peek()[0] == "-":
            self.take()
            return -self.factor()
        base = self.base()
        if self.peek()[0] == "^":
            self.take()
            k = self.take("int")[1]
            base = base ** k
        return base

    def base(self) -> DiffOp:
        kind, val, pos = self.peek()
        if kind == "D":
            self.take()
            return DiffOp.D()
        if kind == "z":
            self.take()
            return DiffOp.z()
        if kind == "int":
            self.take()
            return DiffOp.const(val)
        if kind == "(":
            self.take()
            out = self.expr()
            self.take(")")
            return out
        found = "end of input" if kind == "end" else repr(val)
        raise ParseError(f"unexpected {found}", pos)


def parse_operator(text: str) -> DiffOp:
    """Parse an operator expression such as ``"z^5*D + 1 + (1/2)*z^4"``."""
    return _Parser(text).parse()


def parse_ratfunc(text: str) -> RatFunc:
    """Parse an order-0 expression (a rational function of z)."""
    L = parse_operator(text)
    if L.order > 0:
        raise ParseError("expected a rational function, got an operator involving D", 0)
    return L.coeff(0)


# --------------------------------------------------------------------------
# Global action


def apply(L: DiffOp, f) -> RatFunc:
    f = f if isinstance(f, RatFunc) else RatFunc(f)
    out = RatFunc(0)
    d = f
    for i, a in enumerate(L.coeffs):
        if i:
            d = d.derivative()
        if a:
            out = out + a * d
    return out


def clearing_factor(L: DiffOp) -> RatFunc:
    """The u with clear_denominators(L) == u * L."""
    if L.is_zero():
        return RatFunc(1)
    den = Poly.const(1)
    for c in L.coeffs:
        den = den * c.den.exact_div(Poly.gcd(den, c.den))
    polys = [(c * RatFunc(den)).num for c in L.coeffs]
    g = Poly()
    for p in polys:
        g = Poly.gcd(g, p)
    prim = [p.exact_div(g) for p in polys]
    # integer content and sign, read off the rescaled coefficient list
    lcm = 1
    for p in prim:
        lcm = lcm * p.denominator_lcm() // math.gcd(lcm, p.denominator_lcm())
    content = 0
    for p in prim:
        for c in p.coeffs:
            content = math.gcd(content, (c * lcm).numerator)
    scalar = Fraction(lcm, content)
    if prim[-1].lc * scalar < 0:
        scalar = -scalar
    return RatFunc(den * scalar, g)


def clear_denominators(L: DiffOp) -> DiffOp:
    """u*L with polynomial, integer-primitive coefficients of gcd 1."""
    return L.scale(clearing_factor(L))


def adjoint(L: DiffOp) -> DiffOp:
    """Formal adjoint sum_i (-1)^i D^i a_i."""
    out = DiffOp()
    Dk = DiffOp.const(1)
    for i, a in enumerate(L.coeffs):
        if i:
            Dk = Dk * DiffOp.D()
        term = Dk * DiffOp((a,))
        out = out + (term if i % 2 == 0 else -term)
    return out


# --------------------------------------------------------------------------
# Systems


class DiffSystem:
    """The first-order system y' = A y + g, i.e. the operator D - A on Q(z)^n."""

    __slots__ = ("A",)

    def __init__(self, A):
        rows = tuple(tuple(x if isinstance(x, RatFunc) else RatFunc(to_rational(x)) for x in row) for row in A)
        if not rows or any(len(r) != len(rows) for r in rows):
            raise ValueError("system matrix must be square and nonempty")
        self.A = rows

    @property
    def n(self) -> int:
        return len(self.A)

    def apply(self, y) -> list:
        y = [v if isinstance(v, RatFunc) else RatFunc(v) for v in y]
        return [
            y[i].derivative() - sum((self.A[i][j] * y[j] for j in range(self.n)), RatFunc(0))
            for i in range(self.n)
        ]

    def cleared(self):
        """(d, B) with polynomial d (monic) and B = d*A, so d*(D - A) = d D - B."""
        d = Poly.const(1)
        for row in self.A:
            for x in row:
                d = d * x.den.exact_div(Poly.gcd(d, x.den))
        B = tuple(tuple((x * RatFunc(d)).num for x in row) for row in self.A)
        return d, B

    def __repr__(self):
        return f"DiffSystem({[[str(x) for x in r] for r in self.A]})"


def companion(L: DiffOp) -> DiffSystem:
    """First-order reduction y = (u, u', ..., u^(n-1)) of L(u) = h."""
    n = L.order
    if n < 1:
        raise ValueError("companion system needs an operator of order >= 1")
    A = [[RatFunc(0)] * n for _ in range(n)]
    for i in range(n - 1):
        A[i][i + 1] = RatFunc(1)
    for j in range(n):
        A[n - 1][j] = -L.coeffs[j] / L.leading
    return DiffSystem(A)


@dataclass(frozen=True)
class MatrixOperator:
    """T = sum_i C_i(z) D^i acting on Q(z)^n, with polynomial matrices C_i.

    Common representation of a cleared scalar operator (n = 1) and a cleared
    system d D - B, consumed by the local solver and the oracle.
    """

    n: int
    terms: tuple  # of (derivative order i, n x n tuple of Poly)

    @classmethod
    def from_diffop(cls, L: DiffOp) -> "MatrixOperator":
        if not L.is_polynomial():
            raise ValueError("clear denominators first")
        return cls(1, tuple((i, ((c.num,),)) for i, c in enumerate(L.coeffs) if c))

    @classmethod
    def from_system(cls, S: DiffSystem) -> "MatrixOperator":
        d, B = S.cleared()
        n = S.n
        dI = tuple(tuple(d if i == j else Poly() for j in range(n)) for i in range(n))
        negB = tuple(tuple(-B[i][j] for j in range(n)) for i in range(n))
        terms = [(1, dI)]
        if any(p for row in negB for p in row):
            terms.append((0, negB))
        return cls(n, tuple(terms))

    @property
    def order(self) -> int:
        return max(i for i, _ in self.terms)

    def leading_poly(self) -> Poly:
        """Product of the diagonal entries of the top-order coefficient (its det for
        diagonal leading terms, which is the only case constructed here)."""
        top = dict(self.terms)[self.order]
        out = Poly.const(1)
        for i in range(self.n):
            out = out * top[i][i]
        return out

    def apply(self, y) -> list:
        y = [v if isinstance(v, RatFunc) else RatFunc(v) for v in y]
        derivs = [y]
        for _ in range(self.order):
            derivs.append([v.derivative() for v in derivs[-1]])
        out = [RatFunc(0)] * self.n
        for i, C in self.terms:
            for r in range(self.n):
                for c in range(self.n):
                    if C[r][c] and derivs[i][c]:
                        out[r] = out[r] + RatFunc(C[r][c]) * derivs[i][c]
        return out

    def apply_poly(self, y) -> list:
        derivs = [list(y)]
        for _ in range(self.order):
            derivs.append([v.derivative() for v in derivs[-1]])
        out = [Poly()] * self.n
        for i, C in self.terms:
            for r in range(self.n):
                for c in range(self.n):
                    if C[r][c] and derivs[i][c]:
                        out[r] = out[r] + C[r][c] * derivs[i][c]
        return out

    def local_terms(self, place: Place) -> tuple:
        """Each C_i as an n x n matrix of exact Laurent polynomials {exponent: coeff}."""
        return tuple(
            (i, tuple(tuple(poly_local(p, place) for p in row) for row in C)) for i, C in self.terms
        )


# --------------------------------------------------------------------------
# Local forms and the action on series


def _falling_poly(i: int, sign: int) -> Poly:
    """prod_{k<i} (s - sign*k) as a polynomial in s."""
    out = Poly.const(1)
    for k in range(i):
        out = out * Poly((-sign * k, 1))
    return out


def derivative_delta_form(i: int, place: Place):
    """D^i = factor * t^shift * P(delta): returns (factor, shift, P)."""
    if place.is_infinite:
        # D = -t delta and delta t = t (delta + 1)
        return (-1) ** i, i, _falling_poly(i, -1)
    return 1, -i, _falling_poly(i, 1)


@dataclass(frozen=True)
class LocalDeltaOp:
    """sum_j coeffs[j] * delta^j with delta = t d/dt, coefficients as series in t."""

    place: Place
    coeffs: tuple  # LaurentSeries b_0..b_n

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def orders(self) -> list:
        return [None if b.is_zero() else b.valuation for b in self.coeffs]

    def apply(self, y: LaurentSeries) -> LaurentSeries:
        out = None
        d = y
        for j, b in enumerate(self.coeffs):
            if j:
                d = d.d_dt().shift(1)
            term = b * d
            out = term if out is None else out + term
        return out


def to_local_delta_form(L: DiffOp, place: Place, precision: int) -> LocalDeltaOp:
    """Rewrite L at the place as sum_j b_j(t) delta^j.

    At a finite place D = t^-1 delta; at infinity D = -t delta.
    """
    if precision < L.order + 1:
        raise InsufficientPrecision(f"precision {precision} below order + 1 = {L.order + 1}")
    terms = {}
    for i, a in enumerate(L.coeffs):
        if not a:
            continue
        factor, shift, P = derivative_delta_form(i, place)
        series = laurent_expand(a, place, precision).shift(shift).scale(factor)
        for j, c in enumerate(P.coeffs):
            if c:
                s = series.scale(c)
                terms[j] = s if j not in terms else terms[j] + s
    # each b_j keeps its own precision; an exactly absent one is zero far out
    top = max(s.abs_precision for s in terms.values()) if terms else precision
    coeffs = [terms.get(j, LaurentSeries.zero(place, top)) for j in range(L.order + 1)]
    return LocalDeltaOp(place, tuple(coeffs))


def apply_series(L, y):
    """Action of a DiffOp on a LaurentSeries, or of a DiffSystem on a list of them.

    Precision is tracked through the truncated arithmetic: a coefficient with a
    pole of order k at the place costs k digits, each derivative one more at a
    finite place.
    """
    if isinstance(L, DiffSystem):
        return _apply_series_system(L, list(y))
    place = y.place
    if L.is_zero():
        return LaurentSeries.zero(place, y.abs_precision)
    prec = max(y.precision, 1)
    out = None
    d = y
    for i, a in enumerate(L.coeffs):
        if i:
            d = d.d_dz()
        if not a:
            continue
        term = laurent_expand(a, place, prec) * d
        out = term if out is None else out + term
    if out is None:
        return LaurentSeries.zero(place, y.abs_precision)
    if not y.is_zero() and out.is_zero() and out.abs_precision <= y.valuation - L.order:
        raise InsufficientPrecision("every known coefficient was consumed by the operator")
    return out


def _apply_series_system(S: DiffSystem, y: list) -> list:
    if len(y) != S.n:
        raise ValueError("vector length does not match the system")
    place = y[0].place
    prec = max(max(v.precision for v in y), 1)
    out = []
    for i in range(S.n):
        acc = y[i].d_dz()
        for j in range(S.n):
            a = S.A[i][j]
            if a:
                acc = acc - laurent_expand(a, place, prec) * y[j]
        out.append(acc)
    return out
