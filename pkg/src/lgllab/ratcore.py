"""Exact arithmetic over Q: polynomials, rational functions, places of P^1,
truncated Laurent expansions, partial fractions and residues.

Everything is backed by :class:`fractions.Fraction`; there is no floating point
anywhere. Factorisation over Q (used only to split denominators into linear
factors) is delegated to sympy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence, Union

from .errors import DivisionByZeroPolynomial, InsufficientPrecision, NonSplitDenominator

Rational = Fraction
Number = Union[int, Fraction]

ZERO = Fraction(0)
ONE = Fraction(1)


def to_rational(x) -> Fraction:
    """Exact conversion; floats are refused since they would silently round."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if not s or any(ch in s for ch in ".eE"):
            raise ValueError(f"not an exact rational: {x!r}")
        return Fraction(s)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def _fmt_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


# --------------------------------------------------------------------------
# Polynomials


class Poly:
    """Dense univariate polynomial over Q, coefficients in ascending degree."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Number] = ()):
        cs = [c if isinstance(c, Fraction) else to_rational(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def const(cls, c: Number) -> "Poly":
        return cls((c,))

    @classmethod
    def z(cls) -> "Poly":
        return cls((0, 1))

    @classmethod
    def monomial(cls, k: int, c: Number = 1) -> "Poly":
        return cls([0] * k + [c])

    @classmethod
    def from_roots(cls, roots: Iterable[Number]) -> "Poly":
        p = cls.const(1)
        for r in roots:
            p = p * cls((-to_rational(r), 1))
        return p

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else ZERO

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, k: int) -> Fraction:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return ZERO

    def valuation(self) -> Optional[int]:
        """Order of vanishing at 0 (None for the zero polynomial)."""
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        return None

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(("Poly", self.coeffs))

    @staticmethod
    def _coerce(x) -> "Poly":
        if isinstance(x, Poly):
            return x
        if isinstance(x, (int, Fraction)):
            return Poly.const(x)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return Poly([x + (b[i] if i < len(b) else 0) for i, x in enumerate(a)])

    __radd__ = __add__

    def __neg__(self):
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Poly([c * other for c in self.coeffs])
        if not isinstance(other, Poly):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly()
        out = [ZERO] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[i + j] += x * y
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        out, base = Poly.const(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __divmod__(self, other):
        other = self._coerce(other)
        if not other:
            raise DivisionByZeroPolynomial("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        lc = other.lc
        if len(rem) <= dq:
            return Poly(), Poly(rem)
        quo = [ZERO] * (len(rem) - dq)
        for k in range(len(rem) - 1, dq - 1, -1):
            c = rem[k]
            if c:
                q = c if lc == 1 else c / lc
                quo[k - dq] = q
                for i, oc in enumerate(other.coeffs):
                    rem[k - dq + i] -= q * oc
        return Poly(quo), Poly(rem[:dq])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other) -> "Poly":
        q, r = divmod(self, other)
        if r:
            raise ArithmeticError("inexact polynomial division")
        return q

    def monic(self) -> "Poly":
        if not self:
            return self
        return self if self.lc == 1 else self * (1 / self.lc)

    def derivative(self) -> "Poly":
        return Poly([k * c for k, c in enumerate(self.coeffs)][1:])

    def __call__(self, x):
        acc = ZERO if isinstance(x, (int, Fraction)) else 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def shift(self, c: Number) -> "Poly":
        """The polynomial p(t + c), as a polynomial in t (Taylor shift)."""
        c = to_rational(c)
        if c == 0 or len(self.coeffs) <= 1:
            return self
        out = [ZERO] * len(self.coeffs)
        # Horner in the shifted variable
        for a in reversed(self.coeffs):
            for i in range(len(out) - 1, 0, -1):
                out[i] = out[i] * c + out[i - 1]
            out[0] = out[0] * c + a
        return Poly(out)

    def reverse(self, n: Optional[int] = None) -> "Poly":
        """t^n p(1/t); n defaults to the degree."""
        if n is None:
            n = self.degree
        if n < self.degree:
            raise ValueError("reversal degree below polynomial degree")
        cs = list(self.coeffs) + [ZERO] * (n + 1 - len(self.coeffs))
        return Poly(reversed(cs))

    def denominator_lcm(self) -> int:
        out = 1
        for c in self.coeffs:
            out = _lcm(out, c.denominator)
        return out

    def primitive(self) -> "Poly":
        """Integer-coefficient primitive part with positive leading coefficient."""
        if not self:
            return self
        scaled = self * self.denominator_lcm()
        g = 0
        for c in scaled.coeffs:
            g = math.gcd(g, c.numerator)
        if scaled.lc < 0:
            g = -g
        return scaled * Fraction(1, g)

    @staticmethod
    def gcd(a: "Poly", b: "Poly") -> "Poly":
        """Monic gcd (zero if both are zero)."""
        if not b:
            return a.monic()
        a, b = a.monic(), b.monic()
        while b:
            if b.degree == 0:
                return Poly.const(1)
            r = a % b
            a, b = b, (r.monic() if r else r)
        return a

    def to_str(self, var: str = "z") -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if not c:
                continue
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if k == 0:
                body = _fmt_rational(a)
            else:
                mono = var if k == 1 else f"{var}^{k}"
                body = mono if a == 1 else f"{_fmt_rational(a)}*{mono}"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"Poly({self.to_str()})"


Z = Poly.z()


# --------------------------------------------------------------------------
# Factorisation over Q (sympy-backed)


@lru_cache(maxsize=4096)
def _factor_over_q(coeffs: tuple) -> tuple:
    import sympy

    x = sympy.Symbol("x")
    sp = sympy.Poly(
        [sympy.Rational(c.numerator, c.denominator) for c in reversed(coeffs)], x, domain="QQ"
    )
    _, factors = sp.factor_list()
    out = []
    for fac, mult in factors:
        cs = tuple(Fraction(int(c.p), int(c.q)) for c in reversed(fac.all_coeffs()))
        out.append((cs, int(mult)))
    return tuple(out)


def factor_over_q(p: Poly) -> list:
    """Irreducible factors of p over Q as (Poly, multiplicity); constants dropped."""
    if p.degree < 1:
        return []
    return [(Poly(cs), m) for cs, m in _factor_over_q(p.coeffs)]


def rational_roots(p: Poly) -> dict:
    """Map root -> multiplicity over Q; non-linear irreducible factors are ignored."""
    roots = {}
    for fac, m in factor_over_q(p):
        if fac.degree == 1:
            roots[-fac.coeffs[0] / fac.coeffs[1]] = m
    return roots


def linear_factors(p: Poly, error=NonSplitDenominator) -> dict:
    """Like :func:`rational_roots` but raises if p does not split over Q."""
    roots = {}
    for fac, m in factor_over_q(p):
        if fac.degree != 1:
            raise error(f"irreducible factor {fac} of degree {fac.degree} does not split over Q")
        roots[-fac.coeffs[0] / fac.coeffs[1]] = m
    return roots


def integer_roots(p: Poly) -> list:
    return sorted(int(r) for r in rational_roots(p) if r.denominator == 1)


# --------------------------------------------------------------------------
# Rational functions


class RatFunc:
    """Element of Q(z): num/den with gcd 1 and den monic."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = num if isinstance(num, Poly) else Poly.const(num)
        if den is None:
            den = Poly.const(1)
        elif not isinstance(den, Poly):
            den = Poly.const(den)
        if not den:
            raise DivisionByZeroPolynomial("rational function with zero denominator")
        if not num:
            self.num, self.den = Poly(), Poly.const(1)
            return
        if den.degree > 0:
            g = Poly.gcd(num, den)
            if g.degree > 0:
                num, den = num.exact_div(g), den.exact_div(g)
        lc = den.lc
        self.num, self.den = num * (1 / lc), den * (1 / lc)

    @classmethod
    def _reduced(cls, num: Poly, den: Poly) -> "RatFunc":
        """Build from a pair already known to be coprime."""
        out = cls.__new__(cls)
        if not num:
            out.num, out.den = Poly(), Poly.const(1)
            return out
        lc = den.lc
        if lc != 1:
            num, den = num * (1 / lc), den * (1 / lc)
        out.num, out.den = num, den
        return out

    @classmethod
    def z(cls) -> "RatFunc":
        return cls(Poly.z())

    @staticmethod
    def _coerce(x):
        if isinstance(x, RatFunc):
            return x
        if isinstance(x, (Poly, int, Fraction)):
            return RatFunc(x)
        return NotImplemented

    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def is_constant(self) -> bool:
        return self.den.degree == 0 and self.num.degree <= 0

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash(("RatFunc", self.num.coeffs, self.den.coeffs))

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        if self.den.degree == 0:
            return RatFunc._reduced(self.num * other.den + other.num, other.den)
        if other.den.degree == 0:
            return RatFunc._reduced(self.num + other.num * self.den, self.den)
        g = Poly.gcd(self.den, other.den)
        a, b = self.den.exact_div(g), other.den.exact_div(g)
        return RatFunc(self.num * b + other.num * a, self.den * b)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc._reduced(-self.num, self.den)

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
        if self.den.degree == 0 and other.den.degree == 0:
            return RatFunc._reduced(self.num * other.num, self.den * other.den)
        g1 = Poly.gcd(self.num, other.den)
        g2 = Poly.gcd(other.num, self.den)
        n1, d2 = (self.num.exact_div(g1), other.den.exact_div(g1)) if g1.degree > 0 else (self.num, other.den)
        n2, d1 = (other.num.exact_div(g2), self.den.exact_div(g2)) if g2.degree > 0 else (other.num, self.den)
        return RatFunc._reduced(n1 * n2, d1 * d2)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if not self.num:
            raise DivisionByZeroPolynomial("division by the zero rational function")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return RatFunc(self.num ** k, self.den ** k)

    def derivative(self) -> "RatFunc":
        if self.den.degree == 0:
            return RatFunc(self.num.derivative(), self.den)
        return RatFunc(
            self.num.derivative() * self.den - self.num * self.den.derivative(), self.den * self.den
        )

    def __call__(self, x):
        d = self.den(x)
        if d == 0:
            raise ZeroDivisionError(f"pole at {x}")
        return self.num(x) / d

    def __str__(self):
        if self.den.degree == 0:
            return str(self.num)
        n, d = str(self.num), str(self.den)
        if sum(1 for c in self.num.coeffs if c) > 1 or self.num.lc < 0 or "/" in n:
            n = f"({n})"
        if sum(1 for c in self.den.coeffs if c) > 1:
            d = f"({d})"
        return f"{n}/{d}"

    def __repr__(self):
        return f"RatFunc({self})"


# --------------------------------------------------------------------------
# Places


@dataclass(frozen=True)
class Place:
    """A Q-rational point of P^1. ``point is None`` means infinity.

    The local parameter is t = z - c at a finite place and t = 1/z at infinity.
    """

    point: Optional[Fraction] = None

    @classmethod
    def finite(cls, c: Number) -> "Place":
        return cls(to_rational(c))

    @classmethod
    def infinity(cls) -> "Place":
        return cls(None)

    @property
    def is_infinite(self) -> bool:
        return self.point is None

    def sort_key(self):
        return (1, ZERO) if self.point is None else (0, self.point)

    def __str__(self):
        return "inf" if self.point is None else _fmt_rational(self.point)

    def __repr__(self):
        return f"Place({self})"


INF = Place.infinity()


def parse_place(text: str) -> Place:
    s = str(text).strip().lower()
    if s in ("inf", "infinity", "oo"):
        return INF
    return Place.finite(to_rational(s))


def poly_local(p: Poly, place: Place) -> dict:
    """Exact local expansion of a polynomial: {exponent of t: coefficient}."""
    if place.is_infinite:
        return {-k: c for k, c in enumerate(p.coeffs) if c}
    return {k: c for k, c in enumerate(p.shift(place.point).coeffs) if c}


def poly_order_at(p: Poly, place: Place):
    if not p:
        return math.inf
    if place.is_infinite:
        return -p.degree
    return p.shift(place.point).valuation()


def order_at(f: RatFunc, place: Place):
    """Valuation of f at the place; ``math.inf`` for f = 0. Negative means pole."""
    if not f:
        return math.inf
    return poly_order_at(f.num, place) - poly_order_at(f.den, place)


def _local_parts(f: RatFunc, place: Place):
    """Write f = t^e * N(t)/D(t) with N(0), D(0) nonzero."""
    if place.is_infinite:
        return f.den.degree - f.num.degree, f.num.reverse(), f.den.reverse()
    n = f.num.shift(place.point)
    d = f.den.shift(place.point)
    vn, vd = n.valuation(), d.valuation()
    return vn - vd, Poly(n.coeffs[vn:]), Poly(d.coeffs[vd:])


def _series_div(n: Poly, d: Poly, count: int) -> list:
    """First ``count`` power-series coefficients of n/d (d(0) != 0)."""
    d0 = d.coeffs[0]
    out = []
    for k in range(count):
        acc = n[k]
        for i in range(1, min(k, d.degree) + 1):
            acc -= d.coeffs[i] * out[k - i]
        out.append(acc / d0)
    return out


# --------------------------------------------------------------------------
# Truncated Laurent series


class LaurentSeries:
    """Truncated Laurent series sum_{k >= valuation} c_k t^k + O(t^abs_precision).

    ``coeffs[0]`` is nonzero unless the series is zero to known precision, in
    which case ``coeffs`` is empty and ``valuation == abs_precision``.
    """

    __slots__ = ("place", "valuation", "coeffs")

    def __init__(self, place: Place, valuation: int, coeffs: Sequence[Number]):
        cs = [c if isinstance(c, Fraction) else to_rational(c) for c in coeffs]
        i = 0
        while i < len(cs) and cs[i] == 0:
            i += 1
        self.place = place
        self.valuation = valuation + i
        self.coeffs = tuple(cs[i:])

    @classmethod
    def zero(cls, place: Place, abs_precision: int) -> "LaurentSeries":
        return cls(place, abs_precision, ())

    @classmethod
    def from_dict(cls, place: Place, terms: dict, abs_precision: int) -> "LaurentSeries":
        lo = min((k for k, c in terms.items() if c), default=abs_precision)
        lo = min(lo, abs_precision)
        return cls(place, lo, [terms.get(k, ZERO) for k in range(lo, abs_precision)])

    @property
    def precision(self) -> int:
        return len(self.coeffs)

    @property
    def abs_precision(self) -> int:
        return self.valuation + len(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, k: int) -> Fraction:
        if k >= self.abs_precision:
            raise InsufficientPrecision(f"coefficient of t^{k} not known (O(t^{self.abs_precision}))")
        if k < self.valuation:
            return ZERO
        return self.coeffs[k - self.valuation]

    def to_dict(self) -> dict:
        return {self.valuation + i: c for i, c in enumerate(self.coeffs) if c}

    def truncate(self, abs_precision: int) -> "LaurentSeries":
        if abs_precision > self.abs_precision:
            raise InsufficientPrecision("cannot extend a truncated series")
        n = max(0, abs_precision - self.valuation)
        if n == 0:
            return LaurentSeries.zero(self.place, abs_precision)
        return LaurentSeries(self.place, self.valuation, self.coeffs[:n])

    def _check(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        if other.place != self.place:
            raise ValueError("series at different places")
        return other

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        top = min(self.abs_precision, other.abs_precision)
        lo = min(self.valuation, other.valuation, top)
        cs = [ZERO] * (top - lo)
        for s in (self, other):
            for i, c in enumerate(s.coeffs):
                k = s.valuation + i
                if k < top:
                    cs[k - lo] += c
        return LaurentSeries(self.place, lo, cs)

    def __neg__(self):
        return LaurentSeries(self.place, self.valuation, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: Number) -> "LaurentSeries":
        c = to_rational(c)
        if c == 0:
            return LaurentSeries.zero(self.place, self.abs_precision)
        return LaurentSeries(self.place, self.valuation, [x * c for x in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if self._check(other) is NotImplemented:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            top = min(self.valuation + other.abs_precision, other.valuation + self.abs_precision)
            return LaurentSeries.zero(self.place, top)
        n = min(self.precision, other.precision)
        a, b = self.coeffs, other.coeffs
        cs = [sum((a[i] * b[k - i] for i in range(k + 1)), ZERO) for k in range(n)]
        return LaurentSeries(self.place, self.valuation + other.valuation, cs)

    __rmul__ = __mul__

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by t^k."""
        return LaurentSeries(self.place, self.valuation + k, self.coeffs)

    def inverse(self) -> "LaurentSeries":
        if self.is_zero():
            raise ZeroDivisionError("inverse of a series that is zero to known precision")
        out = _series_div(Poly.const(1), Poly(self.coeffs), self.precision)
        return LaurentSeries(self.place, -self.valuation, out)

    def d_dt(self) -> "LaurentSeries":
        top = self.abs_precision - 1
        terms = {self.valuation + i - 1: (self.valuation + i) * c for i, c in enumerate(self.coeffs)}
        return LaurentSeries.from_dict(self.place, terms, top)

    def d_dz(self) -> "LaurentSeries":
        """Derivative with respect to z: d/dt at a finite place, -t^2 d/dt at infinity."""
        if self.place.is_infinite:
            return -(self.d_dt().shift(2))
        return self.d_dt()

    def integral(self) -> "LaurentSeries":
        """Antiderivative in t with zero constant term; needs no t^-1 term."""
        if self.valuation <= -1 < self.abs_precision and self.coefficient(-1) != 0:
            raise ValueError("series has a t^-1 term; no Laurent antiderivative")
        terms = {k + 1: c / (k + 1) for k, c in self.to_dict().items()}
        return LaurentSeries.from_dict(self.place, terms, self.abs_precision + 1)

    def exp(self) -> "LaurentSeries":
        """exp(h) for h with positive valuation."""
        if not self.is_zero() and self.valuation < 1:
            raise ValueError("exp needs a series with positive valuation")
        n = self.abs_precision
        h = [self.coefficient(k) if k >= self.valuation else ZERO for k in range(n)]
        # e' = h' e, solved coefficientwise
        e = [ONE] + [ZERO] * (n - 1)
        for k in range(1, n):
            e[k] = sum((j * h[j] * e[k - j] for j in range(1, k + 1)), ZERO) / k
        return LaurentSeries(self.place, 0, e)

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return (self.place, self.valuation, self.coeffs) == (other.place, other.valuation, other.coeffs)

    def __repr__(self):
        terms = " + ".join(f"{_fmt_rational(c)}*t^{self.valuation + i}" for i, c in enumerate(self.coeffs) if c)
        return f"LaurentSeries[{self.place}]({terms or '0'} + O(t^{self.abs_precision}))"


def laurent_expand(f: RatFunc, place: Place, precision: int) -> LaurentSeries:
    """Expansion of f at the place with ``precision`` exact coefficients."""
    if precision < 1:
        raise ValueError("precision must be positive")
    if not f:
        return LaurentSeries.zero(place, precision)
    e, n, d = _local_parts(f, place)
    return LaurentSeries(place, e, _series_div(n, d, precision))


# --------------------------------------------------------------------------
# Partial fractions and residues


@dataclass(frozen=True)
class PartialFraction:
    polynomial_part: Poly
    terms: frozenset  # of (pole, order, coefficient)

    def reassemble(self) -> RatFunc:
        out = RatFunc(self.polynomial_part)
        for pole, order, coeff in self.terms:
            out = out + RatFunc(Poly.const(coeff), Poly((-pole, 1)) ** order)
        return out

    def sorted_terms(self) -> list:
        return sorted(self.terms)


def poles(f: RatFunc) -> dict:
    """Finite poles {Place: order}; raises NonSplitDenominator if needed."""
    return {Place.finite(r): m for r, m in linear_factors(f.den).items()}


def partial_fractions(f: RatFunc) -> PartialFraction:
    polypart, _ = divmod(f.num, f.den)
    terms = set()
    for place, m in poles(f).items():
        s = laurent_expand(f, place, m)
        for k in range(-m, 0):
            c = s.coefficient(k)
            if c:
                terms.add((place.point, -k, c))
    return PartialFraction(polypart, frozenset(terms))


def residue(f: RatFunc, place: Place) -> Fraction:
    """Residue of the differential form f dz at the place."""
    if not f:
        return ZERO
    if place.is_infinite:
        # f dz = -f(1/t) t^-2 dt, so the residue is minus the t^1 coefficient of f
        if order_at(f, place) > 1:
            return ZERO
        return -laurent_expand(f, place, 2 - order_at(f, place)).coefficient(1)
    v = order_at(f, place)
    if v >= 0:
        return ZERO
    return laurent_expand(f, place, -v).coefficient(-1)


def singular_support(f: RatFunc) -> list:
    """Finite poles of f followed by infinity, sorted."""
    return sorted(poles(f), key=Place.sort_key) + [INF]
