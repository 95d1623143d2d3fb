import json
import random
from fractions import Fraction as F

import pytest

from berkline.berkovich import BerkPoint, convex_hull, make_divisor
from berkline.errors import DegreeTooLarge, NoRationalRepresentative
from berkline.poly import Poly
from berkline.profile import local_degree, profile_at
from berkline.radial import (
    ABSENT,
    RadialSet,
    fiber_representative,
    membership,
    mult_locus,
    sample_fiber,
    verify_radiality,
)
from berkline.valuation import INF, ValuedContext

from oracles import brute_local_degree

P = 5
ctx = ValuedContext(P)
Q = F(-P * P, 4)
F_EX = Poly([0, -P, 1], ctx)
D_EX = make_divisor(ctx, [0, Q, "inf"])


def z(a, t):
    return BerkPoint.ball(ctx, a, t)


def rig(a):
    return BerkPoint.rigid(ctx, a)


def test_membership_examples():
    spine = convex_hull(ctx, [0, "inf"])
    R = RadialSet.constant(spine, 0)
    assert membership(R, BerkPoint.gauss(ctx))
    assert not membership(R, z(P, 4))
    everything = RadialSet.constant(spine, INF)
    assert membership(everything, z(P, 4)) and membership(everything, rig(3))
    nothing = RadialSet.constant(spine, ABSENT)
    assert not membership(nothing, BerkPoint.gauss(ctx))


def test_mult_locus_of_square():
    R = mult_locus(Poly([0, 0, 1], ctx), [0, "inf"], 2)
    for t in [-5, 0, F(7, 2), 30]:
        assert R.value_at(z(0, t)) == 0
    assert R.value_at(rig(0)) is INF
    assert R.value_at(BerkPoint.infinity(ctx)) is INF


def test_mult_locus_worked_example():
    R = mult_locus(F_EX, D_EX, 2)
    assert R.value_at(rig(F(P, 2))) is INF
    assert R.value_at(z(0, 1)) == 0
    assert R.value_at(BerkPoint.gauss(ctx)) == 0
    assert R.value_at(z(F(P, 2), 3)) == 0
    assert R.value_at(z(0, 3)) is ABSENT and R.value_at(z(P, 3)) is ABSENT
    assert R.value_at(rig(0)) is ABSENT
    # the oracle fixes the example: membership is local degree >= 2 at every sampled point
    rng = random.Random(0)
    for _ in range(200):
        a = F(rng.randint(-300, 300), rng.choice([1, 2])) * F(P) ** rng.randint(-1, 2)
        t = F(rng.randint(-3, 6))
        x = z(a, t)
        # local degree by brute force over the two roots of f(T) - f(a): a and p - a
        expected = brute_local_degree([a, P - a], a, t, P) >= 2
        assert membership(R, x) == expected


def test_mult_locus_d_one_and_errors():
    R = mult_locus(F_EX, D_EX, 1)
    assert all(v is INF for v in R.vertex_values.values())
    assert membership(R, z(123, 9))
    with pytest.raises(DegreeTooLarge):
        mult_locus(F_EX, D_EX, 3)


def test_mult_locus_membership_matches_local_degree_on_cubic():
    # f' = 3(T)(T - p) has rational critical points, so every critical fiber splits
    f = Poly([0, 0, F(-3 * P, 2), 1], ctx)
    D = [0, f(P), "inf"]
    rng = random.Random(4)
    for d in (2, 3):
        R = mult_locus(f, D, d)
        for _ in range(200):
            x = z(F(rng.randint(-400, 400), rng.choice([1, 2, 3])) * F(P) ** rng.randint(-2, 2), rng.randint(-3, 6))
            assert membership(R, x) == (local_degree(f, x) >= d)


def test_radial_sets_monotone_along_paths():
    R = mult_locus(F_EX, D_EX, 2)
    rng = random.Random(8)
    for _ in range(200):
        a = F(rng.randint(-300, 300)) * F(P) ** rng.randint(-1, 2)
        t = F(rng.randint(-2, 8))
        if membership(R, z(a, t)):
            m = min(t, R.skeleton.m(a))
            for s in range(int(m), int(t) + 1):
                assert membership(R, z(a, max(F(s), m)))


def test_sample_fiber_examples():
    sk = convex_hull(ctx, [0, 1, P, "inf"])
    gamma = z(0, 1)
    pts = sample_fiber(sk, gamma, 2, seed=0)
    assert len(pts) == 2
    for x in pts:
        assert ctx.val(x) == 1
        assert sk.retract(rig(x)) == gamma
        assert ctx.val(x - P) == 1  # avoids the p branch as well as the 0 branch
    spine = convex_hull(ctx, [0, "inf"])
    for x in sample_fiber(spine, BerkPoint.gauss(ctx), 3, seed=1):
        assert ctx.val(x) == 0
    assert sample_fiber(sk, gamma, 2, seed=0) == pts
    with pytest.raises(NoRationalRepresentative):
        sample_fiber(spine, z(0, F(1, 2)), 1, seed=0)
    rep = fiber_representative(sk, gamma)
    assert sk.retract(rig(rep)) == gamma


def test_verify_radiality_admissible_passes():
    report = verify_radiality(F_EX, D_EX, trials=500, seed=0)
    assert report.ok and report.passed == 500 and report.failed == 0
    assert report.fibers_checked > 0 and report.direct_branch_checks > 0
    data = report.to_json()
    assert {"pass", "fail", "witnesses", "skipped_fibers", "seed"} <= set(data)
    json.dumps(data)
    # the fiber over zeta_{0,1} contains 2p and -p with the same profile
    assert profile_at(F_EX, 2 * P) == profile_at(F_EX, -P)


def test_verify_radiality_negative_control():
    report = verify_radiality(F_EX, [0, "inf"], trials=500, seed=0, check=False)
    assert report.failed > 0 and not report.ok
    kinds = {(json.dumps(w["T_x"]), json.dumps(w["T_y"])) for w in report.witnesses}
    two = json.dumps([["inf", 2, "0/1"]])
    one = json.dumps([["inf", 1, "1/1"], ["1/1", 2, "0/1"]])
    assert (two, one) in kinds or (one, two) in kinds
    spine = convex_hull(ctx, [0, P, "inf"])
    assert spine.retract(rig(F(P, 2))) == spine.retract(rig(2 * P)) == z(0, 1)


def test_verify_radiality_identity_and_determinism():
    r = verify_radiality(Poly([0, 1], ctx), [0, 1, "inf"], trials=100, seed=3)
    assert r.ok and r.passed == 100
    a = verify_radiality(F_EX, D_EX, trials=50, seed=11).to_json()
    b = verify_radiality(F_EX, D_EX, trials=50, seed=11).to_json()
    assert a == b and a["seed"] == 11
