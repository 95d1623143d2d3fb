"""Independent reference computations used to cross-check the package.

Nothing here imports the package's valuation or Newton-polygon code: p-adic
valuations are counted by trial division, Taylor shifts use the binomial
theorem, rational roots come from sympy, and profile values come either from
Gauss norms or from known roots.
"""

from fractions import Fraction
from math import comb

import sympy

INF = float("inf")  # only used as a marker inside the oracles, never compared with package values

_T = sympy.Symbol("T")


def vp(q, p):
    """Valuation of a nonzero rational by repeated division; None for zero."""
    q = Fraction(q)
    if q == 0:
        return None
    v = 0
    n, d = q.numerator, q.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def taylor_coeffs(coeffs, x):
    """Coefficients of f(T + x) - f(x), constant term first, by the binomial theorem."""
    c = [Fraction(v) for v in coeffs]
    x = Fraction(x)
    out = [sum(c[i] * comb(i, k) * x ** (i - k) for i in range(k, len(c))) for k in range(len(c))]
    out[0] = Fraction(0)
    return out


def gauss_profile_value(coeffs, x, t, p):
    """min_i (val c_i + i t) for f(T + x) - f(x); the valuation of the image radius of zeta_{x,t}."""
    g = taylor_coeffs(coeffs, x)
    return min(vp(c, p) + i * Fraction(t) for i, c in enumerate(g) if c != 0)


def factored_profile_value(lead, fiber_roots, x, t, p):
    """val(lead) + sum over the fiber of min(t, val(z - x)), the fiber given with multiplicity."""
    total = Fraction(vp(lead, p))
    for z in fiber_roots:
        w = vp(Fraction(z) - Fraction(x), p)
        total += Fraction(t) if w is None else min(Fraction(t), Fraction(w))
    return total


def expand_roots(roots, lead=1):
    """Coefficient list (constant first) of lead * prod (T - r)."""
    coeffs = [Fraction(lead)]
    for r in roots:
        r = Fraction(r)
        nxt = [Fraction(0)] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            nxt[i + 1] += c
            nxt[i] -= r * c
        coeffs = nxt
    return coeffs


def brute_local_degree(fiber_roots, x, t, p):
    """Number of fiber points z (with multiplicity) with val(z - x) >= t."""
    n = 0
    for z in fiber_roots:
        w = vp(Fraction(z) - Fraction(x), p)
        if w is None or w >= t:
            n += 1
    return n


def ball_distance(a, s, b, t, p):
    """Tree distance between zeta_{a,s} and zeta_{b,t}: both climb to the smallest common ball."""
    w = vp(Fraction(a) - Fraction(b), p)
    m = min(s, t) if w is None else min(s, t, w)
    return (Fraction(s) - m) + (Fraction(t) - m)


def newton_oracle(coeffs, p):
    """(ord0, [(valuation, multiplicity)]) by brute-force lower hull: a chord is kept iff no point lies below it."""
    pts = [(i, vp(c, p)) for i, c in enumerate(map(Fraction, coeffs)) if c != 0]
    ord0 = pts[0][0]
    segs, i = [], 0
    while i < len(pts) - 1:
        # from the current vertex take the chord of least slope, the farthest one on ties
        best = None
        for j in range(i + 1, len(pts)):
            slope = Fraction(pts[j][1] - pts[i][1], pts[j][0] - pts[i][0])
            if best is None or slope <= best[0]:
                best = (slope, j)
        slope, j = best
        segs.append((-slope, pts[j][0] - pts[i][0]))
        i = j
    return ord0, segs


def profile_envelope(coeffs, x, p):
    """Profile tuple [(t_i, d_i, alpha_i)] of t -> min_i (val c_i + i t) for f(T + x) - f(x).

    Built from the lines themselves: candidate breakpoints are all pairwise
    intersections, and the active line on each interval is found at a test point.
    """
    lines = [(i, vp(c, p)) for i, c in enumerate(taylor_coeffs(coeffs, x)) if c != 0]
    cuts = sorted({Fraction(v2 - v1, i1 - i2) for i1, v1 in lines for i2, v2 in lines if i1 != i2}, reverse=True)

    def active(t):
        return min(lines, key=lambda line: (line[1] + line[0] * t, line[0]))

    out = []
    probes = [(cuts[0] + 1) if cuts else Fraction(0)]
    probes += [c - 1 if k == len(cuts) - 1 else (c + cuts[k + 1]) / 2 for k, c in enumerate(cuts)]
    uppers = [INF] + cuts
    for upper, t in zip(uppers, probes):
        d, a = active(t)
        if out and out[-1][1] == d:
            continue
        out.append((upper, d, Fraction(a)))
    return out


def branch_by_enumeration(lead, fiber_roots, x, p, freeze):
    """Backward-branching entries [(s, e, beta)] from an explicit fiber (with multiplicity).

    A fiber point z at distance w = val(z - x) joins the path of x at the image
    time of zeta_{x,w}; entries with time below ``freeze`` are dropped.
    """
    x = Fraction(x)
    mult = sum(1 for z in fiber_roots if Fraction(z) == x)
    others = [vp(Fraction(z) - x, p) for z in fiber_roots if Fraction(z) != x]
    out = [(INF, mult, Fraction(0))]
    for w in sorted(set(others), reverse=True):
        s = factored_profile_value(lead, fiber_roots, x, w, p)
        if freeze is not INF and s >= freeze:
            inside = [v for v in others if v >= w]
            out.append((s, mult + len(inside), Fraction(sum(inside))))
    return out


def rational_roots(coeffs):
    """{root: multiplicity} over Q, via sympy factorisation."""
    f = sum(sympy.Rational(Fraction(c).numerator, Fraction(c).denominator) * _T**i for i, c in enumerate(coeffs))
    return {Fraction(int(r.p), int(r.q)): k for r, k in sympy.roots(sympy.Poly(f, _T), filter="Q").items()}


def critical_values(coeffs):
    """Values of f at its rational critical points."""
    f = sum(sympy.Rational(Fraction(c).numerator, Fraction(c).denominator) * _T**i for i, c in enumerate(coeffs))
    crit = sympy.roots(sympy.Poly(sympy.diff(f, _T), _T), filter="Q")
    return {Fraction(int(v.p), int(v.q)) for v in (f.subs(_T, c) for c in crit)}
