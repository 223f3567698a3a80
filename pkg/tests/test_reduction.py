from __future__ import annotations

import json
import math
import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from graphon_commons.bounds import (BOLLOBAS, FISHER_K3, ZERO, BoundError, BoundFunction,
                                    fisher_k3_in_s, power, rho_k3)
from graphon_commons.graphon import to_mp
from graphon_commons.reduction import (K3_TABLE, ROOT_BRACKET, Certificate, ReductionError,
                                       ReductionProblem, appendix_curve, bernoulli_ineq,
                                       cond_appendix, cond_x0, cond_x1, cond_x1prime, cond_y_low,
                                       critical_y0, critical_y1, crossover, f_gkl,
                                       holder_claim, implied_condition, interval_lower_bound,
                                       k3_family_problem, k3_k2_problem, k3_problem,
                                       lower_bound_k3_k2, margin_curves, partial_y, partial_yy,
                                       rearrange_ineq, replay_certificate, verify_reduction,
                                       worst_point)

F = Fraction


def test_f_at_origin():
    assert f_gkl(k3_problem(2, 0), 0, 0) == 2


def test_f_k1_l1_matches_expanded_form():
    p = k3_problem(1, 1)
    for x, y in [(F(1, 3), F(1, 5)), (F(-1, 2), F(0)), (F(9, 10), F(1, 2))]:
        assert f_gkl(p, x, y) == (1 + x) ** 4 + (1 - x) ** 4 - 2 * x * y


def test_f_at_x_one():
    assert f_gkl(k3_problem(3, 5), 1, 0) == 16384


def test_f_domain_errors():
    p = k3_problem(2, 1)
    with pytest.raises(ReductionError):
        f_gkl(p, F(1, 2), -1)
    with pytest.raises(ReductionError):
        f_gkl(p, F(1, 2), 100)
    with pytest.raises(ReductionError):
        f_gkl(k3_problem(2, -1), 1, 0)


def test_rho_branches():
    assert rho_k3(0) == 0
    assert rho_k3(F(-1, 2)) == 0
    assert rho_k3(F(1, 3)) == F(16, 9)
    assert fisher_k3_in_s(F(0)) == F(16, 9)
    assert rho_k3(F(1)) == F(16, 3)
    # the middle branch is continuous at both ends
    assert abs(rho_k3(mpmath.mpf("1e-20"))) < 1e-18
    assert abs(rho_k3(F(1, 3) - F(1, 10**12)) - F(16, 9)) < 1e-10


def test_rho_below_power():
    for x in np.linspace(-1, 1, 201):
        assert float(rho_k3(F(float(x)))) <= (1 + x) ** 3 + 1e-12


def test_rho_rational_on_square_points():
    # 1 - 3x = 1/4 gives an exact value
    v = rho_k3(F(1, 4))
    assert isinstance(v, Fraction)
    assert v == fisher_k3_in_s(F(1, 2))


def test_bound_function_validation():
    with pytest.raises(BoundError):
        BoundFunction("cubic")
    with pytest.raises(BoundError):
        BoundFunction("power")
    with pytest.raises(BoundError):
        power(-1)
    b = BoundFunction("piecewise_max", parts=(BOLLOBAS, ZERO))
    assert BoundFunction.from_json(json.loads(json.dumps(b.to_json()))) == b


def test_problem_rejects_rho_above_g():
    with pytest.raises(ReductionError):
        ReductionProblem(2, 0, power(1), power(3), 2)
    with pytest.raises(ReductionError):
        k3_problem(0, 1)


def test_y0_at_l0():
    p = k3_problem(2, 0)
    x = F(2, 5)
    assert critical_y0(p, x) == ((1 + x) ** 3 - (1 - x) ** 3) / 2


def test_y0_limit_at_one():
    p = k3_problem(3, 5)
    assert critical_y0(p, 1) == 8
    assert abs(to_mp(critical_y0(p, F(999999, 10**6))) - 8) < 1e-4


def test_y1_above_feasible_top():
    for k, l in [(2, 0), (2, 2), (3, 5), (3, F(13, 3))]:
        p = k3_problem(k, l)
        for x in np.linspace(0.01, 1, 40):
            x = F(float(x))
            y1 = critical_y1(p, x)
            assert to_mp(y1) >= to_mp(p.g(1 + x)) - to_mp(p.rho(1 + x)) - 1e-25


def test_y1_infinite_when_l0_at_zero():
    assert critical_y1(k3_problem(2, 1), 0) == mpmath.inf


def test_critical_points_need_k_above_one():
    with pytest.raises(ReductionError):
        critical_y0(k3_problem(1, 1), F(1, 2))


def test_partial_y_is_derivative():
    p = k3_problem(3, F(7, 3))
    for x, y in [(F(1, 5), F(1, 10)), (F(3, 4), F(1))]:
        h = mpmath.mpf("1e-12")
        fd = (to_mp(f_gkl(p, x, to_mp(y) + h)) - to_mp(f_gkl(p, x, to_mp(y) - h))) / (2 * h)
        assert abs(fd - to_mp(partial_y(p, x, y))) < 1e-6
        assert partial_yy(p, x, y) > 0


def test_cond_x0_boundary_at_zero():
    assert cond_x0(k3_problem(2, 0), 0) == 0


def test_cond_x1_large_x_for_two_triangles():
    for l in (0, 1, 2):
        p = k3_problem(2, l, BOLLOBAS)
        assert cond_x1(p, F(1, 2)) >= 0
        assert cond_x1prime(p, F(1, 2)) >= 0


def test_cond_x1_three_triangles_threshold():
    # with the linear floor the failure region ends near 0.139786, with the sharper floor near 0.1311
    p = k3_problem(3, F(13, 3))
    assert cond_x1(p, F(13, 100)) < 0
    assert cond_x1(p, F(1397, 10000)) >= 0
    bol = k3_problem(3, F(13, 3), BOLLOBAS)
    assert cond_x1(bol, F(1397, 10000)) < 0
    assert cond_x1(bol, F(14, 100)) >= 0


def test_cond_y_low_is_f_at_zero():
    p = k3_k2_problem()
    x = F(1, 4)
    assert cond_y_low(p, x) == f_gkl(p, x, 0) - p.target_c


def test_x1_star_threshold():
    p = k3_problem(2, 1, BOLLOBAS)
    x1 = (8 - math.sqrt(37)) / 9
    xs = np.linspace(0, 1, 2001)
    m = appendix_curve(p, xs, "x1_star")
    assert np.all(m[xs < x1 - 1e-6] < 0)
    assert np.all(m[xs > x1 + 1e-6] >= -1e-12)
    exact = 32 * xs / 3 - (1 + xs) ** 3 - (1 - xs) ** 3
    assert np.allclose(m[xs >= 0], np.where(xs >= 0, exact, 0), atol=1e-12)


def test_x0_star_covers_small_x():
    p = k3_problem(2, 2)
    xs = np.linspace(0, 0.49, 491)
    assert np.all(appendix_curve(p, xs, ("x0_star", 2)) >= -1e-12)
    assert crossover(p, ("x0_star", 2)) >= 0.49


def test_x0_dagger_matches_scalar():
    p = k3_family_problem(10)
    x = F(1, 5)
    scalar = cond_appendix(p, x, ("x0_dagger", 3))
    curve = appendix_curve(p, [0.2], ("x0_dagger", 3))[0]
    assert abs(float(scalar) - curve) < 1e-12


def test_appendix_preconditions():
    with pytest.raises(ReductionError):
        cond_appendix(k3_problem(2, 3), F(1, 2), ("x0_star", 2))
    with pytest.raises(ReductionError):
        cond_appendix(k3_problem(2, 1), F(1, 2), ("x0_dagger", 2))
    with pytest.raises(ReductionError):
        cond_appendix(k3_problem(2, 1), F(1, 2), "x0_star")
    assert implied_condition("x1_star") == "x1"
    assert implied_condition(("x0_dagger", 3)) == "x0"


def test_appendix_fractional_parameter():
    p = k3_problem(2, F(1, 2))
    v = cond_appendix(p, F(1, 10), ("x0_star", F(3, 2)))
    assert v > 0


def test_appendix_implications_hold():
    rng = random.Random(30)
    for _ in range(200):
        k = rng.choice([2, 3])
        l = F(rng.randint(0, 15), 3)
        p = k3_problem(k, l, BOLLOBAS)
        x = F(rng.randint(1, 999), 1000)
        if cond_appendix(p, x, "x1_star") >= 0:
            assert cond_x1(p, x) >= 0
        l0 = l + rng.randint(0, 2)
        if cond_appendix(p, x, ("x0_star", l0)) >= 0:
            assert cond_x0(p, x) >= -1e-25


def test_two_triangles_verify():
    for l in (0, 1, 2):
        cert = verify_reduction(k3_problem(2, l))
        assert cert.holds, l
        assert replay_certificate(cert)[0]


def test_three_triangle_family_and_table():
    for r in (0, 5, 13, 15):
        p = k3_family_problem(r)
        assert verify_reduction(p).holds
        assert crossover(p, "x0") >= float(K3_TABLE[r]) - 1e-9


def test_zero_floor_fails_for_two_triangles_three_edges():
    cert = verify_reduction(k3_problem(2, 3, ZERO))
    assert cert.verdict == "fails_at"
    x, y = cert.point
    assert f_gkl(cert.problem, x, y) < 2
    ok, msg = replay_certificate(cert)
    assert ok and msg.startswith("f(")


def test_zero_floor_is_inconclusive_when_it_would_hold():
    cert = verify_reduction(k3_problem(2, 0, ZERO))
    assert cert.verdict == "inconclusive"
    assert "rho(2)" in cert.note


def test_interval_strategy_holds_and_replays():
    cert = verify_reduction(k3_problem(2, 2), "interval")
    assert cert.holds
    assert cert.records[0].x_lo == 0 and cert.records[-1].x_hi == 1
    assert replay_certificate(cert)[0]


def test_interval_records_are_sound():
    p = k3_family_problem(12)
    cert = verify_reduction(p, "interval")
    assert cert.holds
    rng = random.Random(31)
    curves = {}
    for rec in cert.records:
        lo, hi = float(rec.x_lo), float(rec.x_hi)
        xs = [lo + (hi - lo) * rng.random() for _ in range(100 // len(cert.records) + 1)]
        curves = margin_curves(p, np.array(xs))
        for c in rec.condition.split(","):
            assert np.all(curves[c] > 0)


def test_interval_bound_is_below_samples():
    p = k3_problem(2, 1)
    lo, hi = F(1, 4), F(3, 10)
    bound = interval_lower_bound(p, "x1prime", lo, hi)
    xs = np.linspace(0.25, 0.3, 50)
    assert float(bound) <= margin_curves(p, xs)["x1prime"].min() + 1e-12


def test_interval_depth_cap_is_inconclusive():
    # the same problem holds once enough bisection is allowed
    assert verify_reduction(k3_problem(2, 2), "interval", max_depth=2).verdict == "inconclusive"
    assert verify_reduction(k3_problem(2, 2), "interval", max_depth=3).verdict == "holds"


def test_verify_rejects_negative_l_and_bad_strategy():
    with pytest.raises(ReductionError):
        verify_reduction(k3_problem(2, -1))
    with pytest.raises(ReductionError):
        verify_reduction(k3_problem(2, 1), "monte_carlo")


def test_certificate_json_round_trip():
    for strategy in ("grid", "interval"):
        cert = verify_reduction(k3_problem(2, 1), strategy)
        back = Certificate.from_json(json.dumps(cert.to_json()))
        assert back.verdict == cert.verdict
        assert back.problem == cert.problem
        assert replay_certificate(back)[0]
    with pytest.raises(ReductionError):
        Certificate.from_json({"strategy": "grid"})


def test_tampered_certificate_is_rejected():
    cert = verify_reduction(k3_problem(2, 1), "interval").to_json()
    cert["records"] = cert["records"][1:]
    ok, msg = replay_certificate(Certificate.from_json(cert))
    assert not ok and "cover" in msg


def test_worst_point_is_minimum():
    p = k3_problem(2, 1)
    for x in (F(1, 10), F(1, 2), F(9, 10)):
        y, v = worst_point(p, x)
        top = to_mp(p.g(1 + x)) - to_mp(p.rho(1 + x))
        for t in np.linspace(0, 1, 21):
            yy = float(t) * top
            assert to_mp(v) <= to_mp(f_gkl(p, x, yy)) + 1e-25


def test_lower_bound_k3_k2():
    bound, cert = lower_bound_k3_k2()
    assert cert.passed
    assert bound > F(121423, 10**6)
    names = {s.name for s in cert.steps}
    assert {"bracket", "linear-endpoint", "substitution", "mixed-bound"} <= names
    z0, z1 = ROOT_BRACKET
    h = lambda z: 9 * z**4 + 10 * z**3 + 24 * z**2 - 6 * z - 28
    assert h(z0) < 0 < h(z1)


def test_k3_k2_problem_verifies():
    assert verify_reduction(k3_k2_problem()).holds


def test_bernoulli():
    assert bernoulli_ineq(0, 1, 2)
    assert bernoulli_ineq(F(1, 2), F(-1, 4), F(5, 2))
    with pytest.raises(ReductionError):
        bernoulli_ineq(-1, 1, 2)


def test_holder_claim_equality_case():
    assert holder_claim(F(1, 3), F(2, 5), 2, 2)
    assert holder_claim(F(1, 3), F(2, 5), F(3, 2), 4)
    with pytest.raises(ReductionError):
        holder_claim(1, 1, 3, 2)


def test_rearrangement_random():
    rng = random.Random(32)
    for _ in range(1000):
        b, d = sorted([F(rng.randint(0, 20), 10), F(rng.randint(0, 20), 10)], reverse=True)
        s, t = sorted([F(rng.randint(0, 6)), F(rng.randint(0, 6))], reverse=True)
        a, c = F(rng.randint(0, 10), 7), F(rng.randint(0, 10), 7)
        assert rearrange_ineq(a, b, c, d, s, t)
    with pytest.raises(ReductionError):
        rearrange_ineq(1, 0, 1, 1, 1, 1)


def test_fisher_curve_vectorized():
    zs = np.linspace(0, 2, 41)
    vals = FISHER_K3(zs)
    for z, v in zip(zs, vals):
        assert abs(float(FISHER_K3(F(float(z)))) - v) < 1e-12
