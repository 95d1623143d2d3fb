"""Type I/II points of the Berkovich line over Q_p, skeleta and retractions.

A point is either the rigid point at infinity or zeta_{a,t}: the closed ball
{x : val(x - a) >= t} with valuative radius t in Q u {+inf}.  Larger t means a
smaller ball, t = +inf is the rigid point a.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import ceil
from typing import Iterable, Optional, Sequence

from .errors import DivisorTooSmall, MissingInfinity
from .valuation import INF, ExtRational, ValuedContext, ext, format_ext, rational


@dataclass(frozen=True, eq=False)
class BerkPoint:
    ctx: ValuedContext
    center: Optional[Fraction]  # None only for the point at infinity
    radius: ExtRational

    @classmethod
    def rigid(cls, ctx: ValuedContext, a) -> "BerkPoint":
        return cls(ctx, rational(a), INF)

    @classmethod
    def ball(cls, ctx: ValuedContext, a, t) -> "BerkPoint":
        return cls(ctx, rational(a), ext(t))

    @classmethod
    def infinity(cls, ctx: ValuedContext) -> "BerkPoint":
        return cls(ctx, None, INF)

    @classmethod
    def gauss(cls, ctx: ValuedContext) -> "BerkPoint":
        return cls(ctx, Fraction(0), Fraction(0))

    @property
    def is_infinity(self) -> bool:
        return self.center is None

    @property
    def is_rigid(self) -> bool:
        """Type I point (including infinity)."""
        return self.radius is INF

    @property
    def is_type_ii(self) -> bool:
        return self.radius is not INF

    def key(self) -> tuple:
        """Canonical form: two points are equal iff their keys are equal."""
        if self.center is None:
            return (0,)
        if self.radius is INF:
            return (2, self.center)
        return (1, self.radius, self.ctx.truncate(self.center, ceil(self.radius)))

    def sort_key(self) -> tuple:
        k = self.key()
        if k[0] == 0:
            return (0, 0, 0)
        if k[0] == 2:
            return (2, 0, k[1])
        return (1, k[1], k[2])

    def __eq__(self, other):
        if not isinstance(other, BerkPoint):
            return NotImplemented
        return self.ctx == other.ctx and self.key() == other.key()

    def __hash__(self):
        return hash((self.ctx.p, self.key()))

    def __repr__(self):
        if self.center is None:
            return "inf"
        return f"zeta({self.center},{self.radius if self.radius is not INF else 'inf'})"

    def label(self) -> str:
        if self.center is None:
            return "inf"
        return f"zeta({format_ext(self.center)},{format_ext(self.radius)})"

    def to_json(self):
        if self.center is None:
            return "inf"
        return [format_ext(self.center), format_ext(self.radius)]

    def contains(self, other: "BerkPoint") -> bool:
        """Ball inclusion: the ball of ``other`` lies inside the ball of ``self``."""
        if self.center is None:
            return other.center is None
        if other.center is None:
            return False
        return other.radius >= self.radius and self.ctx.val(self.center - other.center) >= self.radius

    def meet(self, other: "BerkPoint") -> "BerkPoint":
        """Smallest ball containing both points (their join toward infinity)."""
        if self.center is None or other.center is None:
            return BerkPoint.infinity(self.ctx)
        m = min(self.radius, other.radius, self.ctx.val(self.center - other.center))
        return BerkPoint(self.ctx, self.center, m)


def path_distance(x: BerkPoint, y: BerkPoint) -> ExtRational:
    """Path-distance metric on the Berkovich tree (rigid points at infinite distance)."""
    if x == y:
        return Fraction(0)
    if x.center is None or y.center is None:
        return INF
    m = min(x.radius, y.radius, x.ctx.val(x.center - y.center))
    return (x.radius - m) + (y.radius - m)


def psi(tau, x: BerkPoint) -> BerkPoint:
    """Standard homotopy: psi(tau, zeta_{a,v}) = zeta_{a, min(tau, v)}; tau = +inf is the identity."""
    tau = ext(tau)
    if x.center is None:
        return x
    return BerkPoint(x.ctx, x.center, min(tau, x.radius))


def make_divisor(ctx: ValuedContext, items: Iterable) -> tuple:
    """Normalize divisor entries (rationals, 'inf', BerkPoints) to sorted unique rigid points."""
    pts = set()
    for it in items:
        if isinstance(it, BerkPoint):
            if not it.is_rigid:
                raise ValueError(f"divisor points must be rigid, got {it!r}")
            pts.add(it)
        elif it is INF or (isinstance(it, str) and it.strip().lower() in ("inf", "infinity", "oo")):
            pts.add(BerkPoint.infinity(ctx))
        else:
            pts.add(BerkPoint.rigid(ctx, it))
    return tuple(sorted(pts, key=BerkPoint.sort_key))


def _finite(D: Sequence[BerkPoint]) -> list:
    return [d.center for d in D if d.center is not None]


def m_D(D: Sequence[BerkPoint], a) -> ExtRational:
    """max over finite d in D of val(a - d); +inf iff a is in D."""
    fin = _finite(D)
    if not fin:
        raise DivisorTooSmall("divisor has no affine point")
    ctx = D[0].ctx
    a = rational(a)
    return max(ctx.val(a - d) for d in fin)


@dataclass
class Skeleton:
    """A finite subtree of the Berkovich line spanned by a divisor D (containing infinity).

    ``edges`` holds (child index, parent index, length) with parents toward infinity.
    Vertices may include extra degree-2 points inserted by refinement; the
    underlying subset of the line is always the convex hull of ``divisor``.
    """

    ctx: ValuedContext
    divisor: tuple
    vertices: tuple
    edges: tuple
    _index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._index = {v: i for i, v in enumerate(self.vertices)}

    # -- construction -------------------------------------------------

    @classmethod
    def from_vertices(cls, ctx, divisor, vertices) -> "Skeleton":
        verts = tuple(sorted(set(vertices), key=BerkPoint.sort_key))
        inf_pt = BerkPoint.infinity(ctx)
        edges = []
        idx = {v: i for i, v in enumerate(verts)}
        for v in verts:
            if v.is_infinity:
                continue
            parent = None
            for u in verts:
                if u.is_infinity or u.is_rigid or u == v or not u.contains(v):
                    continue
                if parent is None or u.radius > parent.radius:
                    parent = u
            if parent is None:
                parent = inf_pt
            edges.append((idx[v], idx[parent], path_distance(v, parent)))
        return cls(ctx, tuple(divisor), verts, tuple(edges))

    def with_vertices(self, extra: Iterable[BerkPoint]) -> "Skeleton":
        return Skeleton.from_vertices(self.ctx, self.divisor, list(self.vertices) + list(extra))

    # -- queries ------------------------------------------------------

    def index(self, v: BerkPoint) -> int:
        return self._index[v]

    @property
    def infinity_index(self) -> int:
        return self._index[BerkPoint.infinity(self.ctx)]

    def parent(self, i: int) -> Optional[int]:
        for c, par, _ in self.edges:
            if c == i:
                return par
        return None

    def children(self, i: int) -> list:
        return [c for c, par, _ in self.edges if par == i]

    def degree(self, i: int) -> int:
        return sum(1 for c, par, _ in self.edges if i in (c, par))

    def finite_divisor(self) -> list:
        return _finite(self.divisor)

    def m(self, a) -> ExtRational:
        return m_D(self.divisor, a)

    def contains(self, x: BerkPoint) -> bool:
        if x.center is None:
            return True
        if x.is_rigid:
            return x in self.divisor
        return x.radius <= self.m(x.center)

    def retract(self, x: BerkPoint) -> BerkPoint:
        """Nearest point of the skeleton: zeta_{a, min(t, m_D(a))}."""
        if x.center is None:
            return x
        return BerkPoint(self.ctx, x.center, min(x.radius, self.m(x.center)))

    def r_sigma(self, x: BerkPoint) -> ExtRational:
        """Distance to the skeleton, with rigid skeleton points sent to +inf."""
        if x.is_rigid and self.contains(x):
            return INF
        if self.contains(x):
            return Fraction(0)
        return path_distance(x, self.retract(x))

    def psi_D(self, tau, a) -> BerkPoint:
        """Cut-off homotopy: zeta_{a, max(tau, m_D(a))}."""
        a = rational(a)
        return BerkPoint(self.ctx, a, max(ext(tau), self.m(a)))

    def edge_of(self, gamma: BerkPoint):
        """Locate gamma on the skeleton: ('vertex', i) or ('edge', k) with k an index into edges."""
        if gamma in self._index:
            return ("vertex", self._index[gamma])
        if not self.contains(gamma):
            raise ValueError(f"{gamma!r} is not on the skeleton")
        below = [i for i, v in enumerate(self.vertices) if not v.is_infinity and gamma.contains(v)]
        top = min(below, key=lambda i: self.vertices[i].radius)
        for k, (c, _, _) in enumerate(self.edges):
            if c == top:
                return ("edge", k)
        raise AssertionError("vertex without parent edge")

    def edge_interval(self, k: int):
        """(center, lower radius, upper radius) parametrizing edge k as zeta_{center, t}.

        The edge is {zeta_{center,t} : lower < t < upper}; lower is None for the
        edge running to infinity.
        """
        c, par, _ = self.edges[k]
        child = self.vertices[c]
        parent = self.vertices[par]
        lower = None if parent.is_infinity else parent.radius
        return child.center, lower, child.radius

    def path_metric(self) -> dict:
        """Tree-path distances between all vertex pairs, summed along edges."""
        n = len(self.vertices)
        adj = {i: [] for i in range(n)}
        for c, par, length in self.edges:
            adj[c].append((par, length))
            adj[par].append((c, length))
        out = {}
        for s in range(n):
            dist = {s: Fraction(0)}
            stack = [s]
            while stack:
                u = stack.pop()
                for w, length in adj[u]:
                    if w not in dist:
                        dist[w] = dist[u] + length
                        stack.append(w)
            for t, d in dist.items():
                out[(s, t)] = d
        return out

    def is_tree(self) -> bool:
        n = len(self.vertices)
        if len(self.edges) != n - 1:
            return False
        return len({t for (s, t) in self.path_metric() if s == 0}) == n

    # -- export -------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "p": self.ctx.p,
            "divisor": [d.to_json() for d in self.divisor],
            "vertices": [v.to_json() for v in self.vertices],
            "edges": [[c, par, format_ext(length)] for c, par, length in self.edges],
        }

    def to_dot(self, name: str = "skeleton", edge_labels: Optional[dict] = None) -> str:
        lines = [f"graph {name} {{"]
        for i, v in enumerate(self.vertices):
            shape = "box" if v.is_rigid else "ellipse"
            lines.append(f'  v{i} [label="{v.label()}", shape={shape}];')
        for k, (c, par, length) in enumerate(self.edges):
            extra = ""
            if edge_labels and k in edge_labels:
                extra = f', label="{edge_labels[k]}"'
            lines.append(f'  v{c} -- v{par} [len="{format_ext(length)}"{extra}];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def convex_hull(ctx: ValuedContext, D: Iterable) -> Skeleton:
    """Smallest subtree containing the rigid points of D (which must include infinity)."""
    D = make_divisor(ctx, D)
    if len(D) < 2:
        raise DivisorTooSmall("divisor needs at least two points")
    if not any(d.is_infinity for d in D):
        raise MissingInfinity("divisor must contain the point at infinity")
    fin = _finite(D)
    if not fin:
        raise DivisorTooSmall("divisor needs an affine point")
    verts = set(D)
    for a, b in combinations(fin, 2):
        verts.add(BerkPoint(ctx, a, ctx.val(a - b)))
    return Skeleton.from_vertices(ctx, D, verts)


def retract(sk: Skeleton, x: BerkPoint) -> BerkPoint:
    return sk.retract(x)


def r_sigma(sk: Skeleton, x: BerkPoint) -> ExtRational:
    return sk.r_sigma(x)


def psi_D(sk: Skeleton, tau, a) -> BerkPoint:
    return sk.psi_D(tau, a)
