"""Profile functions, backward-branching tuples, lifted homotopies and skeleton maps.

Profiles are kept in raw coordinates: ``T(t)`` is the valuative radius of the
image ball f(zeta_{x,t}) = zeta_{f(x), T(t)}, for every t in Q u {+inf}.  The
normalized form (distances measured from the skeleton) is obtained with
:func:`normalize_profile`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .berkovich import BerkPoint, Skeleton, convex_hull, make_divisor, m_D
from .errors import (
    ClippedTuple,
    DirectionOutsideBall,
    InadmissibleDivisor,
    InvalidProfile,
    NonConstantEdgeSlope,
    NonIntegerSlope,
    ZeroPolynomial,
)
from .plmap import PLMap
from .poly import Poly, derivative, newton_polygon, require_split, shift
from .valuation import INF, ExtRational, ext, format_ext, parse_ext, rational


@dataclass(frozen=True)
class ProfileTuple:
    """((t_0 = inf, d_0, a_0), ..., (t_m, d_m, a_m)); on (t_{i+1}, t_i] the profile is d_i t + a_i."""

    entries: tuple

    def __post_init__(self):
        entries = tuple((ext(t), int(d), Fraction(a)) for t, d, a in self.entries)
        object.__setattr__(self, "entries", entries)
        if not entries or entries[0][0] is not INF:
            raise InvalidProfile("profile must start with t_0 = inf")
        for t, d, _ in entries:
            if d < 1:
                raise InvalidProfile("slopes must be positive integers")
        for (t0, d0, a0), (t1, d1, a1) in zip(entries, entries[1:]):
            if not t1 < t0:
                raise InvalidProfile("breakpoints must strictly decrease")
            if not d1 > d0:
                raise InvalidProfile("slopes must strictly increase toward the skeleton")
            if d1 * t1 + a1 != d0 * t1 + a0:
                raise InvalidProfile(f"profile discontinuous at t = {t1}")

    @property
    def m(self) -> int:
        return len(self.entries) - 1

    @property
    def breakpoints(self) -> list:
        return [t for t, _, _ in self.entries[1:]]

    def segment_index(self, t) -> int:
        i = 0
        while i + 1 < len(self.entries) and t <= self.entries[i + 1][0]:
            i += 1
        return i

    def __call__(self, t) -> ExtRational:
        t = ext(t)
        if t is INF:
            return INF
        _, d, a = self.entries[self.segment_index(t)]
        return d * t + a

    def slope_at(self, t) -> int:
        """Slope d_i of the segment (t_{i+1}, t_i] containing t (d_0 at t = inf)."""
        t = ext(t)
        if t is INF:
            return self.entries[0][1]
        return self.entries[self.segment_index(t)][1]

    def to_plmap(self) -> PLMap:
        return PLMap(tuple((t, Fraction(d), a) for t, d, a in self.entries))

    @classmethod
    def from_plmap(cls, phi: PLMap) -> "ProfileTuple":
        entries = []
        for b, k, c in phi.pieces:
            if Fraction(k).denominator != 1:
                raise NonIntegerSlope(f"slope {k} on the piece ending at {b} is not an integer")
            entries.append((b, int(k), c))
        return cls(tuple(entries))

    def to_json(self) -> list:
        return [[format_ext(t), d, format_ext(a)] for t, d, a in self.entries]

    @classmethod
    def from_json(cls, data) -> "ProfileTuple":
        return cls(tuple((parse_ext(t), int(d), parse_ext(a)) for t, d, a in data))

    def __repr__(self):
        return "(" + ",".join(f"({'inf' if t is INF else t},{d},{a})" for t, d, a in self.entries) + ")"


@dataclass(frozen=True)
class BranchTuple:
    """Backward-branching data ((s_0 = inf, e_0, b_0), ...) plus the freeze time.

    On (s_{j+1}, s_j] the branching index is (e_j, b_j).  ``clipped`` records
    whether merge events below the freeze time were discarded.
    """

    entries: tuple
    freeze: ExtRational
    clipped: bool = False

    def __post_init__(self):
        entries = tuple((ext(s), int(e), Fraction(b)) for s, e, b in self.entries)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "freeze", ext(self.freeze))
        if not entries or entries[0][0] is not INF:
            raise InvalidProfile("branch tuple must start with s_0 = inf")
        for (s0, e0, _), (s1, e1, _) in zip(entries, entries[1:]):
            if not s1 < s0 or not e1 > e0:
                raise InvalidProfile("merge times must decrease and branch counts increase")
        if any(s < self.freeze for s, _, _ in entries):
            raise InvalidProfile("merge time below the freeze time")

    @property
    def n(self) -> int:
        return len(self.entries) - 1

    def at(self, s):
        """(e, beta) at homotopy time s, with s >= freeze."""
        s = ext(s)
        i = 0
        while i + 1 < len(self.entries) and s <= self.entries[i + 1][0]:
            i += 1
        return self.entries[i][1], self.entries[i][2]

    def to_json(self) -> dict:
        return {
            "entries": [[format_ext(s), e, format_ext(b)] for s, e, b in self.entries],
            "freeze": format_ext(self.freeze),
            "clipped": self.clipped,
        }

    @classmethod
    def from_json(cls, data) -> "BranchTuple":
        return cls(tuple((parse_ext(s), int(e), parse_ext(b)) for s, e, b in data["entries"]),
                   parse_ext(data["freeze"]), bool(data.get("clipped", False)))


def _centered(f: Poly, x) -> Poly:
    """g(T) = f(T + x) - f(x)."""
    x = rational(x)
    return shift(f, x) - f(x)


def profile_at(f: Poly, x) -> ProfileTuple:
    """Raw profile of f at the rigid point x, read off the Newton polygon of f(T+x) - f(x)."""
    if f.is_zero():
        raise ZeroPolynomial("zero polynomial")
    g = _centered(f, x)
    ctx = f.ctx
    lam = ctx.val(g.lead)
    np_ = newton_polygon(g)
    d = np_.ord0
    below = sum(v * mult for v, mult in np_.segments)  # every finite root valuation
    entries = [(INF, d, lam + below)]
    for v, mult in np_.segments:
        d += mult
        below -= v * mult
        entries.append((v, d, lam + below))
    return ProfileTuple(tuple(entries))


def eval_profile(T: ProfileTuple, t) -> ExtRational:
    return T(t)


def invert_profile(T: ProfileTuple) -> PLMap:
    return T.to_plmap().inverse()


def quotient_profile(T_gf: ProfileTuple, T_g: ProfileTuple) -> ProfileTuple:
    """Recover T^f from T^{g o f} at x and T^g at f(x): (T^g)^{-1} o T^{g o f}."""
    return ProfileTuple.from_plmap(invert_profile(T_g).compose(T_gf.to_plmap()))


def normalize_profile(T: ProfileTuple, m) -> ProfileTuple:
    """Profile re-expressed in distance-from-skeleton coordinates.

    m is the valuative radius of the retraction of x.  The result describes
    t' -> T(t' + m) - T(m) on (0, inf], so its last intercept is 0.
    """
    m = rational(m)
    base = T(m)
    out = []
    for t, d, a in T.entries:
        if not t > m:
            break
        out.append((INF if t is INF else t - m, d, a + d * m - base))
    return ProfileTuple(tuple(out))


def profile_to_branch(T: ProfileTuple, freeze) -> BranchTuple:
    freeze = ext(freeze)
    a0 = T.entries[0][2]
    kept, clipped = [], False
    for t, d, a in T.entries:
        s = T(t)
        if s >= freeze:
            kept.append((s, d, a0 - a))
        else:
            clipped = True
    return BranchTuple(tuple(kept), freeze, clipped)


def branch_to_profile(S: BranchTuple, lead_val=0) -> ProfileTuple:
    """Inverse of :func:`profile_to_branch` on unclipped tuples.

    Breakpoints are recovered as t_j = (b_j - b_{j-1}) / (e_j - e_{j-1}); with
    no breakpoints the intercept is not recoverable from S and ``lead_val``
    (the valuation of the leading coefficient, 0 for monic maps) is used.
    """
    if S.clipped:
        raise ClippedTuple("branch tuple lost merge events below its freeze time")
    if S.n == 0:
        return ProfileTuple(((INF, S.entries[0][1], Fraction(lead_val)),))
    ts = [INF]
    for (_, e0, b0), (_, e1, b1) in zip(S.entries, S.entries[1:]):
        ts.append((b1 - b0) / (e1 - e0))
    alphas = [s - e * t for (s, e, _), t in zip(S.entries[1:], ts[1:])]
    a0 = alphas[0] + S.entries[1][2]
    entries = [(INF, S.entries[0][1], a0)]
    for (_, e, b), t, a in zip(S.entries[1:], ts[1:], alphas):
        if a0 - b != a:
            raise InvalidProfile("branch tuple is not the image of a profile")
        entries.append((t, e, a))
    return ProfileTuple(tuple(entries))


# -- divisors ----------------------------------------------------------------


def critical_points(f: Poly) -> dict:
    """Rational critical points {c: order of vanishing of f'}; NotSplit if f' does not split."""
    df = derivative(f)
    if df.degree < 1:
        return {}
    return require_split(df, "derivative")


def admissible_divisor(f: Poly, seed: Iterable = ()) -> tuple:
    """seed u {inf} u critical values u f(seed)."""
    ctx = f.ctx
    seed = make_divisor(ctx, seed)
    pts = list(seed) + [BerkPoint.infinity(ctx)]
    for c in critical_points(f):
        pts.append(BerkPoint.rigid(ctx, f(c)))
    for d in seed:
        if not d.is_infinity:
            pts.append(BerkPoint.rigid(ctx, f(d.center)))
    return make_divisor(ctx, pts)


def check_admissible(f: Poly, D) -> None:
    D = make_divisor(f.ctx, D)
    if not any(d.is_infinity for d in D):
        raise InadmissibleDivisor("divisor must contain infinity")
    missing = [f(c) for c in critical_points(f) if BerkPoint.rigid(f.ctx, f(c)) not in D]
    if missing:
        shown = ", ".join(format_ext(v) for v in sorted(set(missing)))
        raise InadmissibleDivisor(f"divisor misses branch values {shown}")


# -- branching and lifts -------------------------------------------------------


def backward_branching_direct(f: Poly, x, D, check: bool = True) -> BranchTuple:
    """Backward-branching tuple of x by enumerating the fiber f^{-1}(f(x)).

    Each fiber point z follows the unique lift of the cut-off homotopy
    through the ball around z mapping onto zeta_{f(x), s}; z joins x's path
    at the time s where that ball first contains x.  Counts and valuation
    sums are taken with multiplicity, z = x contributing to the count only.
    """
    ctx = f.ctx
    D = make_divisor(ctx, D)
    if check:
        check_admissible(f, D)
    x = rational(x)
    y = f(x)
    fiber = require_split(f - y, "fiber polynomial")
    lam = ctx.val(f.lead)
    mult_x = fiber[x]
    others = {z: (ctx.val(z - x), k) for z, k in fiber.items() if z != x}
    levels = sorted({v for v, _ in others.values()}, reverse=True)
    freeze = m_D(D, y)

    def merge_time(v):
        return lam + mult_x * v + sum(k * min(v, w) for w, k in others.values())

    entries = [(INF, mult_x, Fraction(0))]
    clipped = False
    for v in levels:
        s = merge_time(v)
        if s < freeze:
            clipped = True
            continue
        inside = [(w, k) for w, k in others.values() if w >= v]
        entries.append((s, mult_x + sum(k for _, k in inside), sum(w * k for w, k in inside)))
    return BranchTuple(tuple(entries), freeze, clipped)


def lift_path(f: Poly, x, D, tau) -> BerkPoint:
    """Point at time tau of the lift through x of the cut-off homotopy on the target."""
    ctx = f.ctx
    D = make_divisor(ctx, D)
    x = rational(x)
    s = max(ext(tau), m_D(D, f(x)))
    if s is INF:
        return BerkPoint.rigid(ctx, x)
    u = invert_profile(profile_at(f, x))(s)
    return BerkPoint(ctx, x, u)


def image_point(f: Poly, x: BerkPoint) -> BerkPoint:
    """f(zeta_{a,t}) = zeta_{f(a), T_a(t)}."""
    if x.is_infinity:
        return x
    if x.is_rigid:
        return BerkPoint.rigid(f.ctx, f(x.center))
    return BerkPoint(f.ctx, f(x.center), profile_at(f, x.center)(x.radius))


def local_degree(f: Poly, x: BerkPoint) -> int:
    """Number of roots of f(T) - f(a) in the ball of x = zeta_{a,t}, with multiplicity."""
    if x.is_infinity:
        return f.degree
    return profile_at(f, x.center).slope_at(x.radius)


def directional_slope(f: Poly, point: BerkPoint, c) -> int:
    """Outgoing slope of val(f - f(a)) at zeta_{a,t} along the branch toward c."""
    ctx = f.ctx
    a, t = point.center, point.radius
    c = rational(c)
    if point.is_rigid or ctx.val(c - a) < t:
        raise DirectionOutsideBall(f"{c} is not in the closed ball of {point!r}")
    roots = require_split(_centered(f, a), "local polynomial")
    return sum(k for r, k in roots.items() if ctx.val(r - (c - a)) > t)


def slope_toward_infinity(f: Poly, point: BerkPoint) -> int:
    """Outgoing slope of val(f - f(a)) at zeta_{a,t} toward infinity, from coefficients only."""
    ctx = f.ctx
    g = _centered(f, point.center)
    t = point.radius
    terms = [(ctx.val(c) + i * t, i) for i, c in enumerate(g.coeffs) if c != 0]
    low = min(v for v, _ in terms)
    # moving toward infinity decreases t, where the largest active index dominates
    return -max(i for v, i in terms if v == low)


def root_directions(f: Poly, point: BerkPoint) -> list:
    """One center per residue direction at zeta_{a,t} that contains a root of f(T) - f(a)."""
    ctx = f.ctx
    a, t = point.center, point.radius
    roots = require_split(_centered(f, a), "local polynomial")
    reps = []
    for r in sorted(roots):
        if ctx.val(r) < t:
            continue
        if all(ctx.val(r - q) <= t for q in reps):
            reps.append(r)
    return [a + r for r in reps]


# -- skeleton maps ---------------------------------------------------------------


def _interior_probe(lower, upper):
    if lower is None:
        return (upper - 1) if upper is not INF else Fraction(0)
    if upper is INF:
        return lower + 1
    return (lower + upper) / 2


@dataclass
class SkeletonMap:
    """f restricted to Sigma' = hull(f^{-1}(D)) -> Sigma = hull(D)."""

    f: Poly
    source: Skeleton
    target: Skeleton
    vertex_map: dict  # source vertex index -> image BerkPoint
    edge_slopes: dict  # source edge index -> integer slope
    edge_centers: dict = field(default_factory=dict)  # source edge index -> rational center

    def image(self, x: BerkPoint) -> BerkPoint:
        return image_point(self.f, x)

    def preimages(self, q: BerkPoint) -> list:
        """Points of the source skeleton mapping to the type II point q."""
        found = set()
        cands = [(i, v) for i, v in enumerate(self.source.vertices)]
        for i, v in cands:
            if image_point(self.f, v) == q:
                found.add(v)
        for k, (c, par, _) in enumerate(self.source.edges):
            center, lower, upper = self.source.edge_interval(k)
            center = self.edge_centers.get(k, center)
            T = profile_at(self.f, center)
            t = invert_profile(T)(q.radius)
            if (lower is None or t > lower) and t < upper:
                cand = BerkPoint(self.f.ctx, center, t)
                if image_point(self.f, cand) == q:
                    found.add(cand)
        return sorted(found, key=BerkPoint.sort_key)

    def edge_label(self, k: int) -> str:
        return f"slope {self.edge_slopes[k]}"


def preimage_divisor(f: Poly, D) -> tuple:
    ctx = f.ctx
    pts = [BerkPoint.infinity(ctx)]
    for d in make_divisor(ctx, D):
        if d.is_infinity:
            continue
        for z in require_split(f - d.center, f"fiber over {d.center}"):
            pts.append(BerkPoint.rigid(ctx, z))
    return make_divisor(ctx, pts)


def _vertex_center(sk: Skeleton, v: BerkPoint) -> Fraction:
    """A rational center for v, preferring a divisor point inside v's ball."""
    for d in sk.divisor:
        if not d.is_infinity and v.contains(d):
            return d.center
    return v.center


def skeleton_map(f: Poly, D, check: bool = True) -> SkeletonMap:
    ctx = f.ctx
    if f.degree < 1:
        raise ValueError("skeleton maps need a nonconstant polynomial")
    D = make_divisor(ctx, D)
    if check:
        check_admissible(f, D)
    target = convex_hull(ctx, D)
    source = convex_hull(ctx, preimage_divisor(f, D))

    def scan(sk):
        extra, slopes, centers = [], {}, {}
        for k, (c, par, _) in enumerate(sk.edges):
            _, lower, upper = sk.edge_interval(k)
            center = _vertex_center(sk, sk.vertices[c])
            T = profile_at(f, center)
            inner = [t for t in T.breakpoints if (lower is None or t > lower) and t < upper]
            extra.extend(BerkPoint(ctx, center, t) for t in inner)
            slopes[k] = T.slope_at(_interior_probe(lower, upper))
            centers[k] = center
        return extra, slopes, centers

    extra, slopes, centers = scan(source)
    if extra:
        source = source.with_vertices(extra)
        extra, slopes, centers = scan(source)
        if extra:
            raise NonConstantEdgeSlope(f"edge slopes still vary after refinement: {extra}")
    vmap = {i: image_point(f, v) for i, v in enumerate(source.vertices)}
    return SkeletonMap(f, source, target, vmap, slopes, centers)
