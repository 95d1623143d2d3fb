"""Radial sets around skeleta, multiplicity loci, and the empirical radiality verifier."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .berkovich import BerkPoint, Skeleton, make_divisor
from .errors import DegreeTooLarge, NoRationalRepresentative, NotSplit
from .poly import Poly
from .profile import (
    SkeletonMap,
    backward_branching_direct,
    critical_points,
    local_degree,
    normalize_profile,
    profile_at,
    profile_to_branch,
    skeleton_map,
)
from .valuation import INF, format_ext

ABSENT = None  # fiber does not meet the set at all


def _fmt(v):
    return "absent" if v is ABSENT else format_ext(v)


@dataclass
class EdgeFunction:
    """Radius function along one skeleton edge, parametrized by valuative radius.

    ``absent`` marks an edge whose interior fibers miss the set entirely.
    Otherwise ``knots`` are (radius, value) pairs sorted by radius; values in
    between are interpolated affinely and extended constantly past the ends.
    """

    knots: tuple = ()
    absent: bool = False

    def __call__(self, t):
        if self.absent:
            return ABSENT
        if not self.knots:
            return Fraction(0)
        if t <= self.knots[0][0]:
            return self.knots[0][1]
        if t >= self.knots[-1][0]:
            return self.knots[-1][1]
        for (t0, v0), (t1, v1) in zip(self.knots, self.knots[1:]):
            if t0 <= t <= t1:
                if t == t0:
                    return v0
                if t == t1:
                    return v1
                if v0 is INF or v1 is INF:
                    return INF
                return v0 + (v1 - v0) * (t - t0) / (t1 - t0)
        raise AssertionError("unreachable")

    @classmethod
    def from_samples(cls, samples) -> "EdgeFunction":
        """Knots from (radius, value) samples, dropping interior collinear points."""
        samples = sorted(samples)
        knots = []
        for t, v in samples:
            if len(knots) >= 2:
                (t0, v0), (t1, v1) = knots[-2], knots[-1]
                if INF not in (v0, v1, v) and (v1 - v0) * (t - t1) == (v - v1) * (t1 - t0):
                    knots[-1] = (t, v)
                    continue
                if v0 is INF and v1 is INF and v is INF:
                    knots[-1] = (t, v)
                    continue
            knots.append((t, v))
        return cls(tuple(knots))

    def to_json(self):
        if self.absent:
            return "absent"
        return [[format_ext(t), _fmt(v)] for t, v in self.knots]


@dataclass
class RadialSet:
    """X = {x : r_Sigma(x) <= p_X(retraction of x)} for a radius function p_X on Sigma."""

    skeleton: Skeleton
    vertex_values: dict
    edge_values: dict
    unsampled: list = field(default_factory=list)

    @classmethod
    def constant(cls, sk: Skeleton, value) -> "RadialSet":
        value = ABSENT if value is ABSENT else (INF if value is INF else Fraction(value))
        edge = EdgeFunction(absent=True) if value is ABSENT else EdgeFunction(((Fraction(0), value),))
        return cls(sk, {i: value for i in range(len(sk.vertices))},
                   {k: edge for k in range(len(sk.edges))})

    def value_at(self, gamma: BerkPoint):
        kind, i = self.skeleton.edge_of(gamma)
        if kind == "vertex":
            return self.vertex_values[i]
        return self.edge_values[i](gamma.radius)

    def to_json(self) -> dict:
        return {
            "skeleton": self.skeleton.to_json(),
            "vertex_values": [_fmt(self.vertex_values[i]) for i in range(len(self.skeleton.vertices))],
            "edge_values": [self.edge_values[k].to_json() for k in range(len(self.skeleton.edges))],
            "unsampled": [v.label() for v in self.unsampled],
        }


def membership(R: RadialSet, x: BerkPoint) -> bool:
    gamma = R.skeleton.retract(x)
    bound = R.value_at(gamma)
    if bound is ABSENT:
        return False
    return R.skeleton.r_sigma(x) <= bound


# -- fiber sampling --------------------------------------------------------------


def _occupied_residues(sk: Skeleton, gamma: BerkPoint) -> set:
    ctx = sk.ctx
    c, t = gamma.center, int(gamma.radius)
    occ = set()
    for d in sk.finite_divisor():
        if ctx.val(d - c) >= t:
            occ.add(int(ctx.truncate((d - c) / Fraction(ctx.p) ** t, 1)))
    return occ


def free_residues(sk: Skeleton, gamma: BerkPoint) -> list:
    """Residue directions at gamma (integral radius) not occupied by the skeleton."""
    if gamma.is_rigid or gamma.radius.denominator != 1:
        raise NoRationalRepresentative(f"{gamma!r} has no rational off-skeleton direction")
    occ = _occupied_residues(sk, gamma)
    return [r for r in range(sk.ctx.p) if r not in occ]


def sample_fiber(sk: Skeleton, gamma: BerkPoint, count: int, seed: int = 0) -> list:
    """Rational points retracting onto gamma, avoiding every skeleton direction at gamma."""
    if gamma.is_rigid or not sk.contains(gamma):
        raise ValueError(f"{gamma!r} is not a type II point of the skeleton")
    free = free_residues(sk, gamma)
    if not free:
        raise NoRationalRepresentative(f"every rational direction at {gamma!r} lies in the skeleton")
    p = sk.ctx.p
    rng = random.Random(seed)
    scale = Fraction(p) ** int(gamma.radius)
    out = []
    for _ in range(count):
        r = rng.choice(free)
        x = gamma.center + scale * (r + p * rng.randint(-p**3, p**3))
        assert sk.retract(BerkPoint.rigid(sk.ctx, x)) == gamma, (x, gamma)
        out.append(x)
    return out


def fiber_representative(sk: Skeleton, gamma: BerkPoint) -> Optional[Fraction]:
    """Deterministic rational point retracting onto gamma, or None if there is none."""
    try:
        free = free_residues(sk, gamma)
    except NoRationalRepresentative:
        return None
    if not free:
        return None
    return gamma.center + Fraction(sk.ctx.p) ** int(gamma.radius) * free[-1]


# -- multiplicity loci -------------------------------------------------------------


def _edge_radii(lower, upper, window):
    if lower is None and upper is INF:
        return list(range(-window, window + 1))
    if lower is None:
        top = int(upper) if upper.denominator == 1 else int(upper // 1)
        return [r for r in range(top - window, top + 1) if r < upper]
    if upper is INF:
        low = int(lower // 1)
        return [r for r in range(low, low + window + 1) if r > lower]
    return [r for r in range(int(lower // 1), int(upper // 1) + 1) if lower < r < upper]


def _threshold(f: Poly, x, m, d):
    """p_X at a fiber through x with retraction radius m, or ABSENT."""
    T = profile_at(f, x)
    if T.slope_at(m) < d:
        return ABSENT
    j = next(i for i, (_, di, _) in enumerate(T.entries) if di >= d)
    t_star = T.entries[j][0]
    if t_star is INF:
        return INF
    return t_star - m


def mult_locus(f: Poly, D, d: int, sm: Optional[SkeletonMap] = None, window: int = 8) -> RadialSet:
    """The set of points of local degree >= d, as a radial set around hull(f^{-1}(D))."""
    if d > f.degree:
        raise DegreeTooLarge(f"d = {d} exceeds deg f = {f.degree}")
    if sm is None:
        sm = skeleton_map(f, D)
    sk = sm.source
    ctx = f.ctx
    unsampled = []

    def fiber_value(gamma):
        if local_degree(f, gamma) < d:
            return ABSENT
        x = fiber_representative(sk, gamma)
        if x is None:
            unsampled.append(gamma)
            return Fraction(0)
        return _threshold(f, x, gamma.radius, d)

    vertex_values = {}
    for i, v in enumerate(sk.vertices):
        if v.is_rigid:
            vertex_values[i] = INF if local_degree(f, v) >= d else ABSENT
        else:
            vertex_values[i] = fiber_value(v)

    edge_values = {}
    for k in range(len(sk.edges)):
        center, lower, upper = sk.edge_interval(k)
        center = sm.edge_centers.get(k, center)
        if sm.edge_slopes[k] < d:
            edge_values[k] = EdgeFunction(absent=True)
            continue
        w = window
        while True:
            samples = [(Fraction(r), fiber_value(BerkPoint(ctx, center, r)))
                       for r in _edge_radii(lower, upper, w)]
            infinite = lower is None or upper is INF
            if not infinite or w >= 64 or _stable_tail(samples, lower is None):
                break
            w *= 2
        edge_values[k] = EdgeFunction.from_samples(samples)
    return RadialSet(sk, vertex_values, edge_values, unsampled)


def _stable_tail(samples, toward_minus_infinity: bool, n: int = 4) -> bool:
    if len(samples) < n:
        return True
    tail = samples[:n] if toward_minus_infinity else samples[-n:]
    return len({v for _, v in tail}) == 1


# -- radiality verifier --------------------------------------------------------------


@dataclass
class RadialityReport:
    passed: int = 0
    failed: int = 0
    witnesses: list = field(default_factory=list)
    skipped_fibers: list = field(default_factory=list)
    seed: int = 0
    trials: int = 0
    fibers_checked: int = 0
    direct_branch_checks: int = 0

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def to_json(self) -> dict:
        return {
            "pass": self.passed,
            "fail": self.failed,
            "witnesses": self.witnesses,
            "skipped_fibers": self.skipped_fibers,
            "seed": self.seed,
            "trials": self.trials,
            "fibers_checked": self.fibers_checked,
            "direct_branch_checks": self.direct_branch_checks,
        }


def _candidate_fibers(sk: Skeleton, window: int = 3) -> tuple:
    """Type II points of the skeleton at integral radius, plus the non-integral ones skipped."""
    cands, skipped = [], []
    for v in sk.vertices:
        if v.is_rigid:
            continue
        (cands if v.radius.denominator == 1 else skipped).append(v)
    for k in range(len(sk.edges)):
        center, lower, upper = sk.edge_interval(k)
        for r in _edge_radii(lower, upper, window):
            cands.append(BerkPoint(sk.ctx, center, r))
    return sorted(set(cands), key=BerkPoint.sort_key), skipped


def _probe_points(f: Poly, sk: Skeleton) -> list:
    """Critical points off the skeleton and nearby perturbations; they expose missing branch values."""
    ctx = f.ctx
    try:
        crit = list(critical_points(f))
    except NotSplit:
        crit = []
    pts = []
    for c in crit:
        for k in range(-2, 5):
            for delta in (0, Fraction(ctx.p) ** k, 2 * Fraction(ctx.p) ** k):
                x = c + delta
                if not sk.contains(BerkPoint.rigid(ctx, x)):
                    pts.append(x)
    return pts


def verify_radiality(f: Poly, D, trials: int = 500, seed: int = 0, check: bool = True) -> RadialityReport:
    """Sample pairs of rigid points with equal retraction and compare their profile and branch data.

    With ``check=False`` the divisor may omit branch values; this is how the
    negative controls are run.
    """
    ctx = f.ctx
    D = make_divisor(ctx, D)
    sm = skeleton_map(f, D, check=check)
    sk = sm.source
    rng = random.Random(seed)
    report = RadialityReport(seed=seed, trials=trials)
    cands, skipped = _candidate_fibers(sk)
    report.skipped_fibers = [v.label() for v in skipped]

    probes = _probe_points(f, sk)
    pools = []
    for gamma in cands:
        pool = []
        try:
            pool = sample_fiber(sk, gamma, 4, seed=rng.randrange(2**31))
        except NoRationalRepresentative:
            report.skipped_fibers.append(gamma.label())
        pool += [x for x in probes if sk.retract(BerkPoint.rigid(ctx, x)) == gamma]
        pool = sorted(set(pool))
        if len(pool) >= 2:
            pools.append((gamma, pool))
    report.fibers_checked = len(pools)
    if not pools:
        return report

    cache = {}

    def data(x):
        if x not in cache:
            T = profile_at(f, x)
            freeze = sm.target.m(f(x))
            S = profile_to_branch(T, freeze)
            try:
                S_direct = backward_branching_direct(f, x, D, check=False)
            except NotSplit:
                S_direct = None
            cache[x] = (T, S, S_direct)
        return cache[x]

    seen_kinds = set()
    for _ in range(trials):
        gamma, pool = pools[rng.randrange(len(pools))]
        x, y = rng.sample(pool, 2)
        Tx, Sx, Sx_direct = data(x)
        Ty, Sy, Sy_direct = data(y)
        problems = []
        if Tx != Ty:
            problems.append("profile")
        if Sx != Sy:
            problems.append("branch")
        for S, Sd in ((Sx, Sx_direct), (Sy, Sy_direct)):
            if Sd is not None:
                report.direct_branch_checks += 1
                if Sd != S:
                    problems.append("direct-branch")
        if problems:
            report.failed += 1
            kind = (Tx, Ty) if repr(Tx) <= repr(Ty) else (Ty, Tx)
            if kind not in seen_kinds and len(report.witnesses) < 20:
                seen_kinds.add(kind)
                m = gamma.radius
                report.witnesses.append({
                    "fiber": gamma.label(),
                    "x": format_ext(x),
                    "y": format_ext(y),
                    "T_x": Tx.to_json(),
                    "T_y": Ty.to_json(),
                    "T_x_normalized": normalize_profile(Tx, m).to_json(),
                    "T_y_normalized": normalize_profile(Ty, m).to_json(),
                    "S_x": Sx.to_json(),
                    "S_y": Sy.to_json(),
                    "mismatch": problems,
                })
        else:
            report.passed += 1
    return report
