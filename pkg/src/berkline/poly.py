"""Exact univariate polynomials over Q, Newton polygons and Gauss norms."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Sequence

from .errors import ConstantPolynomial, NotSplit, ZeroPolynomial
from .valuation import INF, ExtRational, ValuedContext, ext, format_ext, parse_ext, rational


def _trim(coeffs):
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


@dataclass(frozen=True)
class Poly:
    """a_0 + a_1 T + ... + a_d T^d with exact rational coefficients.

    The zero polynomial is the empty coefficient tuple.
    """

    coeffs: tuple
    ctx: ValuedContext

    def __init__(self, coeffs: Iterable, ctx: ValuedContext):
        object.__setattr__(self, "coeffs", _trim(rational(c) for c in coeffs))
        object.__setattr__(self, "ctx", ctx)

    @classmethod
    def from_roots(cls, roots: Iterable, ctx: ValuedContext, lead=1) -> "Poly":
        f = cls([lead], ctx)
        for r in roots:
            f = f * cls([-rational(r), 1], ctx)
        return f

    @classmethod
    def monomial(cls, n: int, ctx: ValuedContext, c=1) -> "Poly":
        return cls([0] * n + [c], ctx)

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lead(self) -> Fraction:
        if not self.coeffs:
            raise ZeroPolynomial("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def _check(self, other):
        if not isinstance(other, Poly):
            other = Poly([other], self.ctx)
        if other.ctx != self.ctx:
            raise ValueError("polynomials over different valued contexts")
        return other

    def __add__(self, other):
        other = self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly([self.coeff(i) + other.coeff(i) for i in range(n)], self.ctx)

    __radd__ = __add__

    def __neg__(self):
        return Poly([-c for c in self.coeffs], self.ctx)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        if self.is_zero() or other.is_zero():
            return Poly([], self.ctx)
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(out, self.ctx)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = Poly([1], self.ctx)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __call__(self, x):
        """Evaluate at a rational (Horner) or compose with another Poly."""
        if isinstance(x, Poly):
            return self.compose(x)
        x = rational(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def compose(self, inner: "Poly") -> "Poly":
        """self(inner(T))."""
        inner = self._check(inner)
        acc = Poly([], self.ctx)
        for c in reversed(self.coeffs):
            acc = acc * inner + c
        return acc

    def divmod(self, other: "Poly"):
        other = self._check(other)
        if other.is_zero():
            raise ZeroPolynomial("division by the zero polynomial")
        rem = list(self.coeffs)
        dq = other.degree
        quo = [Fraction(0)] * max(0, len(rem) - dq)
        for k in range(len(rem) - 1, dq - 1, -1):
            c = rem[k] / other.lead
            quo[k - dq] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    rem[k - dq + j] -= c * b
        return Poly(quo, self.ctx), Poly(rem[:dq], self.ctx)

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("T" if i == 1 else f"T^{i}")
            if mono and c == 1:
                s = mono
            elif mono and c == -1:
                s = "-" + mono
            else:
                cs = str(c) if c.denominator == 1 else f"({c})"
                s = cs + ("*" + mono if mono else "")
            terms.append(s)
        return " + ".join(terms).replace("+ -", "- ")

    def to_json(self) -> list:
        return [format_ext(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data: Sequence, ctx: ValuedContext) -> "Poly":
        return cls([parse_ext(c) for c in data], ctx)


@dataclass(frozen=True)
class NewtonPolygon:
    """Root valuations of a polynomial as read off its Newton polygon.

    ``segments`` lists (root valuation, multiplicity) with strictly decreasing
    valuations; ``ord0`` is the multiplicity of the root 0 (valuation +inf).
    """

    segments: tuple
    ord0: int

    @property
    def degree(self) -> int:
        return self.ord0 + sum(m for _, m in self.segments)

    def valuations(self) -> list:
        """Flat multiset of root valuations, +inf first, decreasing."""
        out = [INF] * self.ord0
        for v, m in self.segments:
            out.extend([v] * m)
        return out

    def count_at_least(self, t: ExtRational) -> int:
        """Number of roots (with multiplicity) whose valuation is >= t."""
        return self.ord0 + sum(m for v, m in self.segments if v >= t)


def _check_nonconstant(f: Poly):
    if f.is_zero():
        raise ZeroPolynomial("zero polynomial")
    if f.degree < 1:
        raise ConstantPolynomial("constant polynomial has no roots")


def newton_polygon(f: Poly) -> NewtonPolygon:
    _check_nonconstant(f)
    ctx = f.ctx
    ord0 = next(i for i, c in enumerate(f.coeffs) if c != 0)
    pts = [(i, ctx.val(c)) for i, c in enumerate(f.coeffs) if c != 0]
    # lower convex hull, left to right (monotone chain)
    hull = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point if it lies on or above the chord
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    segments = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        slope = Fraction(y2 - y1) / (x2 - x1)
        segments.append((-slope, x2 - x1))
    return NewtonPolygon(tuple(segments), ord0)


def shift(f: Poly, a) -> Poly:
    """Taylor shift: the polynomial f(T + a)."""
    a = rational(a)
    n = len(f.coeffs)
    out = [Fraction(0)] * n
    for i, c in enumerate(f.coeffs):
        if c == 0:
            continue
        apow = Fraction(1)
        # c (T + a)^i = sum_k c C(i,k) a^(i-k) T^k
        for k in range(i, -1, -1):
            out[k] += c * comb(i, k) * apow
            apow *= a
    return Poly(out, f.ctx)


def gauss_norm_val(f: Poly, a, t) -> ExtRational:
    """val |f| at the point zeta_{a,t}: min_i (val c_i + i t) for f(T+a) = sum c_i T^i."""
    if f.is_zero():
        raise ZeroPolynomial("zero polynomial")
    t = ext(t)
    if t is INF:
        return f.ctx.val(f(a))
    g = shift(f, a)
    ctx = f.ctx
    return min(ctx.val(c) + i * t for i, c in enumerate(g.coeffs) if c != 0)


def derivative(f: Poly) -> Poly:
    return Poly([i * c for i, c in enumerate(f.coeffs)][1:], f.ctx)


@lru_cache(maxsize=4096)
def _rational_roots(coeffs: tuple) -> tuple:
    import sympy

    T = sympy.Symbol("T")
    expr = sympy.Poly(list(reversed([sympy.Rational(c.numerator, c.denominator) for c in coeffs])), T, domain="QQ")
    _, factors = expr.factor_list()
    roots = []
    remainder = 0
    for fac, mult in factors:
        if fac.degree() == 1:
            a1, a0 = fac.all_coeffs()
            r = -sympy.Rational(a0) / sympy.Rational(a1)
            roots.append((Fraction(int(r.p), int(r.q)), int(mult)))
        else:
            remainder += fac.degree() * int(mult)
    roots.sort()
    return tuple(roots), remainder


@dataclass(frozen=True)
class SplitRoots:
    roots: tuple  # ((root, multiplicity), ...) sorted by root
    remainder_degree: int

    @property
    def splits(self) -> bool:
        return self.remainder_degree == 0

    def as_dict(self) -> dict:
        return dict(self.roots)


def split_roots(f: Poly) -> SplitRoots:
    """Rational roots of f with multiplicities, plus the degree of the non-split cofactor."""
    if f.is_zero():
        raise ZeroPolynomial("zero polynomial")
    if f.degree == 0:
        return SplitRoots((), 0)
    roots, rem = _rational_roots(f.coeffs)
    return SplitRoots(roots, rem)


def require_split(f: Poly, what: str = "polynomial") -> dict:
    """Roots of f as {root: multiplicity}; raises NotSplit unless f splits over Q."""
    sr = split_roots(f)
    if not sr.splits:
        raise NotSplit(f"{what} {f} does not split over Q (non-split degree {sr.remainder_degree})",
                       sr.remainder_degree)
    return sr.as_dict()
