"""Seeded generators for the test and verification corpora.

Polynomials are built from split linear factors, optionally composed, so
fibers and critical points can be enumerated exactly.  The radial corpus
only keeps maps whose admissible divisor has split preimages.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import BerklineError, NotSplit
from .poly import Poly, split_roots
from .profile import admissible_divisor, critical_points, skeleton_map
from .valuation import ValuedContext

PRIMES = (2, 3, 5, 7)


def random_rational(rng: random.Random, p: int, lo: int = -2, hi: int = 3) -> Fraction:
    """p^k * u with a small unit-ish u, so valuations of differences vary."""
    u = Fraction(rng.randint(-3 * p, 3 * p) or 1, rng.choice((1, 1, 1, 2, 3)))
    return u * Fraction(p) ** rng.randint(lo, hi)


def random_split_poly(rng: random.Random, ctx: ValuedContext, degree: int) -> Poly:
    roots = [random_rational(rng, ctx.p) for _ in range(degree)]
    if rng.random() < 0.3 and degree >= 2:
        roots[1] = roots[0]  # force a repeated root now and then
    lead = Fraction(ctx.p) ** rng.randint(-1, 1) * rng.choice((1, 1, -1, 2))
    return Poly.from_roots(roots, ctx, lead=lead)


@dataclass(frozen=True)
class CorpusMap:
    f: Poly
    label: str
    divisor: Optional[tuple] = None  # admissible divisor when one with split preimages is known
    inadmissible: tuple = ()  # divisors used as negative controls

    @property
    def ctx(self) -> ValuedContext:
        return self.f.ctx


def oracle_corpus(size: int = 120, seed: int = 0) -> list:
    """Products of linear factors and their compositions, degrees 2 to 8, all four small primes."""
    rng = random.Random(seed)
    out = []
    for i in range(size):
        ctx = ValuedContext(PRIMES[i % len(PRIMES)])
        if i % 5 == 4:
            g = random_split_poly(rng, ctx, rng.randint(2, 4))
            h = random_split_poly(rng, ctx, 2)
            f = g.compose(h)
            label = f"compose-{i}"
        else:
            f = random_split_poly(rng, ctx, 2 + i % 7)
            label = f"product-{i}"
        out.append(CorpusMap(f, label))
    return out


def sample_points(rng: random.Random, f: Poly, count: int) -> list:
    """Random rational points, some of them at or near roots so the profiles have breakpoints."""
    roots = [r for r, _ in split_roots(f).roots]
    pts = []
    for _ in range(count):
        if roots and rng.random() < 0.5:
            r = rng.choice(roots)
            pts.append(r + (0 if rng.random() < 0.2 else random_rational(rng, f.ctx.p, 0, 4)))
        else:
            pts.append(random_rational(rng, f.ctx.p))
    return pts


def composed_pairs(count: int = 120, seed: int = 0) -> list:
    """(f, g) with random split f, g of degrees 1-4; g o f is the composed map."""
    rng = random.Random(seed)
    out = []
    for i in range(count):
        ctx = ValuedContext(PRIMES[i % len(PRIMES)])
        f = random_split_poly(rng, ctx, rng.randint(1, 4))
        g = random_split_poly(rng, ctx, rng.randint(1, 3))
        out.append((f, g))
    return out


def _usable(f: Poly, D) -> bool:
    try:
        skeleton_map(f, D)
    except (NotSplit, BerklineError):
        return False
    return True


def _negative_controls(f: Poly, D) -> tuple:
    """Drop one branch value at a time from D; keep the drops that leave a divisor."""
    branch = {f(c) for c in critical_points(f)}
    out = []
    for d in D:
        if d.center is not None and d.center in branch:
            rest = tuple(e for e in D if e != d)
            if any(e.center is not None for e in rest):
                out.append(rest)
    return tuple(out)


def _unit(rng, p):
    return Fraction(rng.choice([k for k in range(1, 2 * p) if k % p]))


def radial_corpus(seed: int = 0, size: int = 24) -> list:
    """Maps with admissible divisors whose preimages split.

    Families: c(T-a)^2 + b with a seed divisor point having a rational
    square root, c(T-a)^n + b, and cubics with rational critical points
    (the third root of each critical fiber is then rational too).
    """
    rng = random.Random(seed)
    out = []
    attempts = 0
    while len(out) < size and attempts < 50 * size:
        attempts += 1
        kind = len(out) % 3
        ctx = ValuedContext(PRIMES[(len(out) // 3) % len(PRIMES)])
        p = ctx.p
        a, b = random_rational(rng, p, 0, 2), random_rational(rng, p, 0, 3)
        c = _unit(rng, p) * Fraction(p) ** rng.randint(-1, 1)
        seed_div = ()
        if kind == 0:
            f = Poly.from_roots([a, a], ctx, lead=c) + Poly([b], ctx)
            w = random_rational(rng, p, 0, 2)
            seed_div = (b + c * w * w,)
            label = "quadratic"
        elif kind == 1:
            n = rng.randint(3, 8)
            f = Poly.from_roots([a] * n, ctx, lead=c) + Poly([b], ctx)
            label = f"power-{n}"
        else:
            c1, c2 = a, a + random_rational(rng, p, 0, 2)
            df = Poly.from_roots([c1, c2], ctx, lead=3 * c)
            coeffs = [b] + [q / (i + 1) for i, q in enumerate(df.coeffs)]
            f = Poly(coeffs, ctx)
            label = "cubic"
        try:
            D = admissible_divisor(f, seed_div)
        except NotSplit:
            continue
        if not _usable(f, D):
            continue
        out.append(CorpusMap(f, f"{label}-{len(out)}", D, _negative_controls(f, D)))
    return out
