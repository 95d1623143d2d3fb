"""Exact p-adic valuations on Q and the extended value group Q u {+inf}.

Finite elements of the value group are plain :class:`fractions.Fraction`
instances; ``INF`` is the single extra element.  Python's ``min``/``max``/
``sorted`` work on mixtures of the two because ``Fraction`` defers
comparisons with unknown types.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from numbers import Rational
from typing import Union

from .errors import DomainError


@total_ordering
class _Infinity:
    """The element +inf of the value group.  Use the module constant ``INF``."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())

    def __hash__(self):
        return hash("berkline.INF")

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        if other is self or isinstance(other, Rational):
            return False
        return NotImplemented

    def __gt__(self, other):
        if other is self:
            return False
        if isinstance(other, Rational):
            return True
        return NotImplemented

    def __add__(self, other):
        if other is self or isinstance(other, Rational):
            return self
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if other is self:
            raise DomainError("inf - inf is undefined")
        if isinstance(other, Rational):
            return self
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, Rational):
            raise DomainError("finite - inf leaves the value group")
        return NotImplemented

    def __mul__(self, other):
        if other is self:
            return self
        if isinstance(other, Rational):
            if other > 0:
                return self
            raise DomainError(f"inf * {other} is undefined in the value group")
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Rational) and other > 0:
            return self
        raise DomainError(f"inf / {other} is undefined in the value group")

    def __neg__(self):
        raise DomainError("-inf is not in the value group")


INF = _Infinity()

ExtRational = Union[Fraction, _Infinity]


def is_inf(x) -> bool:
    return x is INF


def ext(x) -> ExtRational:
    """Coerce ints, Fractions, strings (``"3/2"``, ``"inf"``) or ``INF``."""
    if x is INF:
        return INF
    if isinstance(x, str):
        s = x.strip()
        if s.lower() in ("inf", "+inf", "infinity", "oo"):
            return INF
        return Fraction(s)
    if isinstance(x, bool):
        raise TypeError("booleans are not value-group elements")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, Rational):
        return Fraction(x.numerator, x.denominator)
    raise TypeError(f"cannot coerce {x!r} to an exact value (floats are not accepted)")


def rational(x) -> Fraction:
    """Coerce to a finite exact rational; rejects ``INF`` and floats."""
    v = ext(x)
    if v is INF:
        raise DomainError("expected a finite rational")
    return v


def format_ext(x) -> str:
    """Wire encoding: ``"num/den"`` for finite values, ``"inf"`` for +inf."""
    if x is INF:
        return "inf"
    q = Fraction(x)
    return f"{q.numerator}/{q.denominator}"


def parse_ext(s) -> ExtRational:
    if isinstance(s, (int, Fraction)) and not isinstance(s, bool):
        return Fraction(s)
    if not isinstance(s, str):
        raise TypeError(f"expected a 'num/den' or 'inf' string, got {s!r}")
    return ext(s)


def _vp_int(n: int, p: int) -> int:
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


@dataclass(frozen=True)
class ValuedContext:
    """The field Q with the p-adic valuation, normalized so that val(p) = 1."""

    p: int

    def __post_init__(self):
        if isinstance(self.p, bool) or not isinstance(self.p, int):
            raise TypeError("p must be an int")
        if not is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")

    def val(self, q) -> ExtRational:
        q = rational(q)
        if q == 0:
            return INF
        return Fraction(_vp_int(q.numerator, self.p) - _vp_int(q.denominator, self.p))

    def unit_part(self, q) -> Fraction:
        """q / p^val(q); undefined for 0."""
        q = rational(q)
        v = self.val(q)
        if v is INF:
            raise DomainError("0 has no unit part")
        return q / Fraction(self.p) ** int(v)

    def truncate(self, a, n: int) -> Fraction:
        """Canonical representative of the residue class a + p^n Z_p.

        Returns the unique r in p^(-e) Z with 0 <= r < p^n and val(a - r) >= n,
        where e = max(0, -val(a)).  Used to give balls a canonical center.
        """
        a = rational(a)
        p = self.p
        if a == 0:
            return Fraction(0)
        v = int(self.val(a))
        if v >= n:
            return Fraction(0)
        e = max(0, -v)
        scaled = a * p**e  # p-integral
        num, den = scaled.numerator, scaled.denominator
        modulus = p ** (n + e)
        r = (num * pow(den, -1, modulus)) % modulus
        return Fraction(r, p**e)


def val(ctx: ValuedContext, q) -> ExtRational:
    """p-adic valuation of an exact rational; +inf for zero."""
    return ctx.val(q)
