"""Empirical stratification of a one-parameter family f_s by its skeleton-map invariant.

Only finitely many rational parameters are sampled; classes are equality
classes of the invariant at those samples, not certified strata.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .berkovich import BerkPoint, Skeleton, make_divisor
from .errors import DegenerateAt, NotSplit, SchemaError
from .poly import Poly
from .profile import admissible_divisor, local_degree, normalize_profile, profile_at, skeleton_map
from .radial import fiber_representative
from .valuation import ValuedContext, format_ext, parse_ext, rational


@dataclass(frozen=True)
class FamilySpec:
    """f_s(T) = sum_i P_i(s) T^i with each P_i a rational polynomial in s."""

    ctx: ValuedContext
    coefficients: tuple  # P_i as tuples of Fractions, index = power of s
    samples: tuple
    divisor: str | tuple = "auto"  # "auto" or a fixed divisor
    seed_divisor: tuple = ()
    parameter: str = "s"

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def at(self, s) -> Poly:
        s = rational(s)
        coeffs = [sum((c * s**k for k, c in enumerate(P)), Fraction(0)) for P in self.coefficients]
        f = Poly(coeffs, self.ctx)
        if f.degree != self.degree:
            raise DegenerateAt(s, f"deg f_s = {f.degree} instead of {self.degree}")
        return f

    @classmethod
    def from_json(cls, data: dict) -> "FamilySpec":
        allowed = {"schema", "p", "parameter", "coefficients", "samples", "divisor", "seed_divisor"}
        unknown = set(data) - allowed
        if unknown:
            raise SchemaError(f"unknown family-spec fields: {sorted(unknown)}")
        ctx = ValuedContext(int(data["p"]))
        coeffs = tuple(tuple(parse_ext(c) for c in P) for P in data["coefficients"])
        div = data.get("divisor", "auto")
        if div != "auto":
            div = tuple(div)
        return cls(ctx, coeffs, tuple(parse_ext(s) for s in data["samples"]), div,
                   tuple(data.get("seed_divisor", ())), data.get("parameter", "s"))

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "p": self.ctx.p,
            "parameter": self.parameter,
            "coefficients": [[format_ext(c) for c in P] for P in self.coefficients],
            "samples": [format_ext(s) for s in self.samples],
            "divisor": self.divisor if self.divisor == "auto" else list(self.divisor),
            "seed_divisor": list(self.seed_divisor),
        }


def _divisor_for(spec: FamilySpec, f: Poly):
    if spec.divisor == "auto":
        return admissible_divisor(f, spec.seed_divisor)
    return make_divisor(spec.ctx, spec.divisor)


def _tree_code(sk: Skeleton, label, edge_label) -> list:
    """Canonical nested encoding of a skeleton rooted at infinity; ignores actual centers."""

    def code(i):
        kids = []
        for k, (c, par, _) in enumerate(sk.edges):
            if par == i:
                kids.append([edge_label(k), code(c)])
        kids.sort(key=lambda x: json.dumps(x, sort_keys=True))
        return [label(i), kids]

    return code(sk.infinity_index)


def family_invariant(spec: FamilySpec, s) -> str:
    """Canonical string encoding the skeleton map of f_s and its profile data."""
    f = spec.at(s)
    D = _divisor_for(spec, f)
    sm = skeleton_map(f, D, check=spec.divisor == "auto")
    src, tgt = sm.source, sm.target

    def point_code(v: BerkPoint):
        if v.is_infinity:
            return ["inf"]
        if v.is_rigid:
            return ["I"]
        return ["II", format_ext(v.radius)]

    def src_label(i):
        v = src.vertices[i]
        img = sm.vertex_map[i]
        lab = point_code(v) + ["->"] + point_code(img) + [local_degree(f, v)]
        if v.is_type_ii:
            x = fiber_representative(src, v)
            lab.append(None if x is None else normalize_profile(profile_at(f, x), v.radius).to_json())
        return lab

    def src_edge(k):
        return [format_ext(src.edges[k][2]), sm.edge_slopes[k]]

    def tgt_label(i):
        return point_code(tgt.vertices[i])

    def tgt_edge(k):
        return [format_ext(tgt.edges[k][2])]

    payload = {
        "degree": f.degree,
        "source": _tree_code(src, src_label, src_edge),
        "target": _tree_code(tgt, tgt_label, tgt_edge),
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


@dataclass
class FamilyReport:
    classes: list = field(default_factory=list)  # list of sorted sample lists
    invariants: list = field(default_factory=list)  # parallel to classes
    errors: list = field(default_factory=list)  # {"sample", "error", "message"}

    def to_json(self) -> dict:
        return {
            "classes": [
                {"samples": [format_ext(s) for s in cls], "representative": format_ext(cls[0]),
                 "invariant": json.loads(inv)}
                for cls, inv in zip(self.classes, self.invariants)
            ],
            "errors": self.errors,
            "note": "empirical stratification at the sampled parameters only",
        }


def family_scan(spec: FamilySpec) -> FamilyReport:
    if not spec.samples:
        raise ValueError("family scan needs at least one sample")
    groups: dict = {}
    report = FamilyReport()
    for s in sorted(set(rational(x) for x in spec.samples)):
        try:
            inv = family_invariant(spec, s)
        except (DegenerateAt, NotSplit) as exc:
            report.errors.append({"sample": format_ext(s), "error": type(exc).__name__, "message": str(exc)})
            continue
        groups.setdefault(inv, []).append(s)
    for inv, members in sorted(groups.items(), key=lambda kv: kv[1][0]):
        report.classes.append(members)
        report.invariants.append(inv)
    return report
