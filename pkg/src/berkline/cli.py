"""Command-line entry point: ``berkline newton|profile|skeleton|verify|family``.

Reports are JSON with exact "num/den" strings.  Every subcommand also
accepts ``--job FILE``, a JSON document with ``"schema": 1`` whose keys
supply the same options as the flags (flags given explicitly win).
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

import jsonschema
import sympy

from .berkovich import BerkPoint, convex_hull, m_D, make_divisor
from .corpus import radial_corpus
from .errors import BerklineError, DegenerateAt, NotSplit, SchemaError
from .family import FamilySpec, family_scan
from .poly import Poly, newton_polygon
from .profile import (
    admissible_divisor,
    backward_branching_direct,
    eval_profile,
    local_degree,
    normalize_profile,
    preimage_divisor,
    profile_at,
    profile_to_branch,
    skeleton_map,
)
from .radial import membership, mult_locus, verify_radiality
from .valuation import INF, ValuedContext, format_ext, parse_ext

SCHEMA_VERSION = 1

_RAT = {"type": ["string", "integer"]}
_POLY = {"oneOf": [{"type": "string"}, {"type": "array", "items": _RAT}]}
_DIV = {"oneOf": [{"const": "auto"}, {"type": "array", "items": _RAT}, {"type": "string"}]}

_COMMON = {"schema": {"const": SCHEMA_VERSION}, "p": {"type": "integer", "minimum": 2}, "seed": {"type": "integer"}}

JOB_SCHEMAS = {
    "newton": {"poly": _POLY},
    "profile": {"poly": _POLY, "at": _RAT, "eval": {"type": "array", "items": _RAT},
                "normalize": _RAT, "divisor": _DIV, "seed_divisor": {"type": "array", "items": _RAT}},
    "skeleton": {"poly": _POLY, "divisor": _DIV, "seed_divisor": {"type": "array", "items": _RAT}},
    "verify": {"poly": _POLY, "divisor": _DIV, "seed_divisor": {"type": "array", "items": _RAT},
               "trials": {"type": "integer", "minimum": 1}, "corpus_size": {"type": "integer", "minimum": 1},
               "negative_controls": {"type": "boolean"}, "allow_inadmissible": {"type": "boolean"}},
    "family": {"spec": {"type": "object"}},
}


def load_job(path: str, command: str) -> dict:
    with open(path) as fh:
        job = json.load(fh)
    schema = {
        "type": "object",
        "properties": {**_COMMON, "command": {"const": command}, **JOB_SCHEMAS[command]},
        "required": ["schema"],
        "additionalProperties": False,
    }
    try:
        jsonschema.validate(job, schema)
    except jsonschema.ValidationError as exc:
        raise SchemaError(f"job file {path}: {exc.message}") from None
    job.pop("schema")
    job.pop("command", None)
    return job


# -- argument decoding --------------------------------------------------------


def parse_poly(text, ctx: ValuedContext) -> Poly:
    """A JSON coefficient list (constant term first) or an expression in one variable such as "T^2 - 5*T"."""
    if isinstance(text, list):
        return Poly.from_json(text, ctx)
    text = text.strip()
    if text.startswith("["):
        return Poly.from_json(json.loads(text), ctx)
    expr = sympy.sympify(text.replace("^", "**"), rational=True)
    syms = sorted(expr.free_symbols, key=str)
    if len(syms) > 1:
        raise SchemaError(f"polynomial {text!r} has more than one variable")
    var = syms[0] if syms else sympy.Symbol("T")
    coeffs = sympy.Poly(expr, var).all_coeffs()[::-1]
    out = []
    for c in coeffs:
        if not c.is_Rational:
            raise SchemaError(f"coefficient {c} of {text!r} is not rational")
        out.append(Fraction(int(c.p), int(c.q)))
    return Poly(out, ctx)


def parse_divisor(value, f: Poly, seed_div=()):
    if value is None or value == "auto":
        return admissible_divisor(f, [parse_ext(s) for s in seed_div])
    if isinstance(value, str):
        value = [v.strip() for v in value.split(",") if v.strip()]
    return make_divisor(f.ctx, [v if v == "inf" else parse_ext(v) for v in value])


def _list_arg(value):
    if value is None or isinstance(value, list):
        return value
    return [v.strip() for v in str(value).split(",") if v.strip()]


# -- commands -------------------------------------------------------------------


def cmd_newton(args) -> tuple:
    ctx = ValuedContext(args.p)
    f = parse_poly(args.poly, ctx)
    npg = newton_polygon(f)
    report = {
        "command": "newton",
        "p": ctx.p,
        "poly": f.to_json(),
        "ord0": npg.ord0,
        "segments": [[format_ext(v), m] for v, m in npg.segments],
        "root_valuations": [format_ext(v) for v in npg.valuations()],
    }
    return report, 0, None


def cmd_profile(args) -> tuple:
    ctx = ValuedContext(args.p)
    f = parse_poly(args.poly, ctx)
    x = parse_ext(args.at)
    T = profile_at(f, x)
    report = {"command": "profile", "p": ctx.p, "poly": f.to_json(), "at": format_ext(x), "profile": T.to_json()}
    if args.eval:
        report["values"] = {format_ext(parse_ext(t)): format_ext(eval_profile(T, parse_ext(t))) for t in args.eval}
    if args.divisor is not None:
        D = parse_divisor(args.divisor, f, args.seed_divisor or ())
        m = convex_hull(ctx, preimage_divisor(f, D)).m(x)
        report["divisor"] = [d.to_json() for d in D]
        report["retraction_radius"] = format_ext(m)
        report["branch"] = profile_to_branch(T, m_D(D, f(x))).to_json()
        if args.normalize is None and m is not INF:
            report["normalized"] = normalize_profile(T, m).to_json()
    if args.normalize is not None:
        report["normalized"] = normalize_profile(T, parse_ext(args.normalize)).to_json()
    return report, 0, None


def _skeleton_report(f: Poly, D, check=True):
    sm = skeleton_map(f, D, check=check)
    src = sm.source
    report = {
        "source": src.to_json(),
        "target": sm.target.to_json(),
        "vertex_map": [[src.vertices[i].to_json(), sm.vertex_map[i].to_json()] for i in range(len(src.vertices))],
        "edge_slopes": [sm.edge_slopes[k] for k in range(len(src.edges))],
    }
    dot = (src.to_dot("source", {k: sm.edge_label(k) for k in range(len(src.edges))})
           + sm.target.to_dot("target"))
    return sm, report, dot


def cmd_skeleton(args) -> tuple:
    ctx = ValuedContext(args.p)
    f = parse_poly(args.poly, ctx)
    D = parse_divisor(args.divisor, f, args.seed_divisor or ())
    _, body, dot = _skeleton_report(f, D)
    report = {"command": "skeleton", "p": ctx.p, "poly": f.to_json(), "divisor": [d.to_json() for d in D], **body}
    return report, 0, dot


def _lemma_check(f: Poly, D, rng, samples=40) -> tuple:
    """(checked, failures): direct fiber enumeration against the profile-derived branch tuple.

    Points whose fiber does not split over Q are skipped.
    """
    checked = bad = 0
    for _ in range(samples):
        x = Fraction(rng.randint(-50, 50), rng.choice((1, 2, 3))) * Fraction(f.ctx.p) ** rng.randint(-2, 3)
        try:
            direct = backward_branching_direct(f, x, D, check=False)
        except NotSplit:
            continue
        checked += 1
        if direct != profile_to_branch(profile_at(f, x), m_D(D, f(x))):
            bad += 1
    return checked, bad


def _mult_check(f: Poly, D, rng, samples=40, check=True) -> int:
    bad = 0
    sm = skeleton_map(f, D, check=check)
    for d in range(2, f.degree + 1):
        R = mult_locus(f, D, d, sm)
        for _ in range(samples):
            a = Fraction(rng.randint(-50, 50), rng.choice((1, 2, 3))) * Fraction(f.ctx.p) ** rng.randint(-2, 3)
            t = Fraction(rng.randint(-3, 6))
            x = BerkPoint(f.ctx, a, t)
            if membership(R, x) != (local_degree(f, x) >= d):
                bad += 1
    return bad


def _verify_one(f, D, args, check=True):
    r = verify_radiality(f, D, args.trials, args.seed, check=check)
    return r.to_json()


def canonical_negative_control(p: int, trials: int, seed: int) -> dict:
    """T^2 - pT with the branch value -p^2/4 left out of the divisor."""
    ctx = ValuedContext(p)
    f = Poly([0, -p, 1], ctx)
    r = verify_radiality(f, [0, "inf"], trials, seed, check=False)
    half, two = Fraction(p, 2), Fraction(2 * p)
    sk = convex_hull(ctx, preimage_divisor(f, make_divisor(ctx, [0, "inf"])))
    same_fiber = sk.retract(BerkPoint.rigid(ctx, half)) == sk.retract(BerkPoint.rigid(ctx, two))
    T_half, T_two = profile_at(f, half), profile_at(f, two)
    return {
        "poly": f.to_json(),
        "divisor": ["0/1", "inf"],
        "report": r.to_json(),
        "pair": {"x": format_ext(half), "y": format_ext(two), "same_fiber": same_fiber,
                 "T_x": T_half.to_json(), "T_y": T_two.to_json()},
        "fired": r.failed > 0 and same_fiber and T_half != T_two,
    }


def cmd_verify(args) -> tuple:
    failures = 0
    rng = random.Random(args.seed)
    items = []
    if args.poly is not None:
        ctx = ValuedContext(args.p)
        f = parse_poly(args.poly, ctx)
        D = parse_divisor(args.divisor, f, args.seed_divisor or ())
        maps = [("poly", f, D, ())]
    else:
        maps = [(cm.label, cm.f, cm.divisor, cm.inadmissible) for cm in radial_corpus(args.seed, args.corpus_size)]
    for label, f, D, negs in maps:
        check = not (args.poly is not None and args.allow_inadmissible)
        rep = _verify_one(f, D, args, check=check)
        lemma_checked, lemma_bad = _lemma_check(f, D, rng)
        mult_bad = _mult_check(f, D, rng, check=check)
        item = {"label": label, "p": f.ctx.p, "poly": f.to_json(), "divisor": [d.to_json() for d in D],
                "radiality": rep, "lemma_checked": lemma_checked, "lemma_failures": lemma_bad, "mult_locus_failures": mult_bad}
        ok = rep["fail"] == 0 and lemma_bad == 0 and mult_bad == 0
        if args.negative_controls:
            controls = []
            for N in negs:
                nrep = _verify_one(f, N, args, check=False)
                controls.append({"divisor": [d.to_json() for d in N], "fail": nrep["fail"],
                                 "witnesses": nrep["witnesses"][:3]})
            item["negative_controls"] = controls
            if controls and not any(c["fail"] > 0 for c in controls):
                ok = False
        item["ok"] = ok
        failures += not ok
        items.append(item)
    report = {"command": "verify", "seed": args.seed, "trials": args.trials, "items": items}
    if args.negative_controls:
        neg = canonical_negative_control(5 if args.poly is None else args.p, args.trials, args.seed)
        report["canonical_negative_control"] = neg
        failures += not neg["fired"]
    report["failures"] = failures
    report["status"] = "pass" if failures == 0 else "fail"
    return report, 0 if failures == 0 else 1, None


def cmd_family(args) -> tuple:
    data = args.spec
    if isinstance(data, str):
        with open(data) as fh:
            data = json.load(fh)
    if data.get("schema") != SCHEMA_VERSION:
        raise SchemaError("family spec needs \"schema\": 1")
    spec = FamilySpec.from_json(data)
    rep = family_scan(spec)
    body = rep.to_json()
    for e in body["errors"]:
        e["severity"] = "warning" if e["error"] == DegenerateAt.__name__ else "error"
    status = 1 if any(e["severity"] == "error" for e in body["errors"]) else 0
    return {"command": "family", "spec": spec.to_json(), **body}, status, None


# -- parser ------------------------------------------------------------------------


COMMANDS = {"newton": cmd_newton, "profile": cmd_profile, "skeleton": cmd_skeleton,
            "verify": cmd_verify, "family": cmd_family}

DEFAULTS = {"p": 5, "seed": 0, "trials": 500, "corpus_size": 12, "negative_controls": False,
            "allow_inadmissible": False}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, help="residue characteristic (default 5)")
    common.add_argument("--seed", type=int, help="random seed (default 0)")
    common.add_argument("--json", metavar="OUT", help="write the JSON report to OUT instead of stdout")
    common.add_argument("--dot", metavar="OUT", help="write skeleton trees in DOT format to OUT")
    common.add_argument("--job", metavar="FILE", help="JSON job file with \"schema\": 1")

    parser = argparse.ArgumentParser(prog="berkline", description="Profile functions of polynomial maps on the Berkovich line.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("newton", parents=[common], help="Newton polygon and root valuations")
    p.add_argument("--poly")

    p = sub.add_parser("profile", parents=[common], help="profile tuple at a rational point")
    p.add_argument("--poly")
    p.add_argument("--at")
    p.add_argument("--eval", action="append", metavar="T", help="evaluate the profile at T (repeatable)")
    p.add_argument("--normalize", metavar="M", help="normalize at retraction radius M")
    p.add_argument("--divisor", help="'auto' or a comma list such as '0,-25/4,inf'")
    p.add_argument("--seed-divisor", dest="seed_divisor", type=_list_arg)

    p = sub.add_parser("skeleton", parents=[common], help="skeleton map hull(f^-1 D) -> hull(D)")
    p.add_argument("--poly")
    p.add_argument("--divisor", help="'auto' (default) or a comma list")
    p.add_argument("--seed-divisor", dest="seed_divisor", type=_list_arg)

    p = sub.add_parser("verify", parents=[common], help="radiality and invariant checks on a map or a generated corpus")
    p.add_argument("--poly", help="verify this map instead of the generated corpus")
    p.add_argument("--divisor")
    p.add_argument("--seed-divisor", dest="seed_divisor", type=_list_arg)
    p.add_argument("--trials", type=int)
    p.add_argument("--corpus-size", dest="corpus_size", type=int)
    p.add_argument("--negative-controls", dest="negative_controls", action="store_true", default=None)
    p.add_argument("--allow-inadmissible", dest="allow_inadmissible", action="store_true", default=None,
                   help="with --poly, accept a divisor missing branch values (expected to fail)")

    p = sub.add_parser("family", parents=[common], help="stratify a one-parameter family by its invariant")
    p.add_argument("--spec", metavar="FILE")
    return parser


def _resolve(args) -> argparse.Namespace:
    job = load_job(args.job, args.command) if args.job else {}
    for key, value in job.items():
        if key == "eval" or key == "seed_divisor":
            value = list(value)
        if getattr(args, key, None) is None:
            setattr(args, key, value)
    for key, value in DEFAULTS.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)
    for key in ("divisor", "at", "normalize"):
        if isinstance(getattr(args, key, None), int):
            setattr(args, key, str(getattr(args, key)))
    required = {"newton": ["poly"], "profile": ["poly", "at"], "skeleton": ["poly"], "family": ["spec"]}
    for key in required.get(args.command, []):
        if getattr(args, key, None) is None:
            raise SchemaError(f"{args.command}: missing --{key.replace('_', '-')}")
    return args


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = _resolve(args)
        report, status, dot = COMMANDS[args.command](args)
    except (BerklineError, ArithmeticError, ValueError, OSError, json.JSONDecodeError, sympy.SympifyError) as exc:
        print(f"berkline {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.dot:
        if dot is None:
            print(f"berkline {args.command}: no tree to export, --dot ignored", file=sys.stderr)
        else:
            with open(args.dot, "w") as fh:
                fh.write(dot)
    return status


if __name__ == "__main__":
    sys.exit(main())
