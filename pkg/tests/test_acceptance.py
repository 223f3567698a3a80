"""One check per acceptance criterion, each printing a PASS/FAIL line.

Run directly (``python tests/test_acceptance.py``) for just the twelve lines,
or through pytest where they are repeated in the terminal summary.  Criteria 1
and 5 are checked literally and are expected to fail; see the README.
"""

from __future__ import annotations

import os
import random
import sys
import time
from fractions import Fraction

import mpmath
import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from oracles import ACCEPTANCE_LINES, brute_density, random_graph, random_rational_graphon  # noqa: E402

from graphon_commons import graphs  # noqa: E402
from graphon_commons.bounds import BOLLOBAS, FISHER_K3  # noqa: E402
from graphon_commons.commonality import (chromatic_strongly_common_test, odd_cycle_amgm_chain,  # noqa: E402
                                         odd_cycle_inequality, search_witness, three_block_zy,
                                         uncommon_family_bound)
from graphon_commons.graphon import (StepGraphon, complement, cycle_density, density,  # noqa: E402
                                     density_float, mono_density)
from graphon_commons.reduction import (bernoulli_ineq, cond_appendix, cond_x0, cond_x1,  # noqa: E402
                                       crossover, holder_claim, implied_condition, k3_family_problem,
                                       k3_problem, lower_bound_k3_k2, partial_y, rearrange_ineq,
                                       verify_reduction)

K2, K3, PAW = graphs.edge(), graphs.triangle(), graphs.paw()

# published lower bounds on the (x ~ 0) range for k = 3, l = r/3
PUBLISHED_X0 = [1, .99, .99, .98, .95, .91, .86, .79, .72, .64, .55, .46, .34, .19, .14, .14]


def report(n: int, ok: bool, detail: str) -> bool:
    line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[n] = line
    print(line)
    return ok


def _half_blocks():
    third = Fraction(1, 3)
    return StepGraphon(("1/2", "1/2"), ((third, 1), (1, third)))


@pytest.mark.xfail(strict=True, reason="the published exact values disagree with the partition sum")
def test_criterion_01_exact_k3_pair():
    start = time.perf_counter()
    w = _half_blocks()
    tw, tc = density(K3, w).value, density(K3, complement(w)).value
    mono = mono_density(graphs.copies(K3, 2), w).value
    fast = time.perf_counter() - start < 1
    ok = (tw == Fraction(55, 216) and tc == Fraction(1, 27) and mono == Fraction(3089, 46656)
          and mono < Fraction(65, 729) and fast)
    assert report(1, ok, f"t(K3,W)={tw} (want 55/216), t(K3,1-W)={tc} (want 1/27), "
                         f"mono={mono} (want 3089/46656) < 65/729: {mono < Fraction(65, 729)}")


def test_criterion_02_two_k3_three_k2():
    h = graphs.triangles_and_edges(2, 3)
    mono = mono_density(h, three_block_zy("0.28", "0.42")).value
    ok = abs(mono - Fraction("0.00390226")) <= Fraction("5e-8") and mono < Fraction(1, 2 ** 8)
    assert report(2, ok, f"mono={float(mono):.10f} (exact) vs 0.00390226 +- 5e-8, below 2^-8")


def test_criterion_03_k3_k2_upper():
    h = graphs.triangles_and_edges(1, 1)
    at = float(mono_density(h, three_block_zy("0.263661", "0.2177")).value)
    res = search_witness(h, "three_block_zy", budget=10**5, seed=0)
    ok = abs(at - 0.12145) <= 5e-6 and res.value <= 0.121450 and res.evaluations <= 10**5
    assert report(3, ok, f"h(0.263661,0.2177)={at:.8f}; search {res.value:.8f} "
                         f"at ({res.params[0]:.6f}, {res.params[1]:.6f}) in {res.evaluations} evals")


def test_criterion_04_paw_upper():
    val = float(mono_density(PAW, three_block_zy("0.266491", "0.2187477")).value)
    assert report(4, abs(val - 0.121415) <= 5e-6, f"h(0.266491,0.2187477)={val:.8f} vs 0.121415 +- 5e-6")


@pytest.mark.xfail(strict=True, reason="the stated parameters do not give the stated densities")
def test_criterion_05_three_paws_two_k2():
    w = three_block_zy("0.429919", "0.43222")
    h = graphs.disjoint_union([graphs.copies(PAW, 3), graphs.copies(K2, 2)])
    mono = float(mono_density(h, w).value)
    tp, tc = float(density(PAW, w).value), float(density(PAW, complement(w)).value)
    ok = (mono < 0.000121856 and mono < 2.0 ** -14
          and abs(tp - 0.0506164) <= 5e-7 and abs(tc - 0.074879) <= 5e-7)
    assert report(5, ok, f"mono={mono:.8g} (want < 0.000121856 and < 2^-14={2.0 ** -14:.4g}); "
                         f"t(P,W)={tp:.7f} (want 0.0506164), t(P,1-W)={tc:.7f} (want 0.074879)")


def test_criterion_06_k3_k2_lower():
    h = lambda z: 9 * z ** 4 + 10 * z ** 3 + 24 * z ** 2 - 6 * z - 28
    z0, z1 = Fraction("0.908638793"), Fraction("0.908638794")
    sign = h(z0) < 0 < h(z1)
    bound, cert = lower_bound_k3_k2()
    endpoint = Fraction(3 * 0 + 40, 216)  # the substituted polynomial at z = 0
    cert_end = next(s for s in cert.steps if s.name == "linear-endpoint")
    ok = sign and cert.passed and bound > Fraction("0.121423") and endpoint == Fraction(5, 27) \
        and cert_end.passed
    assert report(6, ok, f"h(z0)={float(h(z0)):.3e} h(z1)={float(h(z1)):.3e}; "
                         f"bound={float(bound):.10f} > 0.121423; endpoint 5/27; "
                         f"{sum(s.passed for s in cert.steps)}/{len(cert.steps)} steps")


def test_criterion_07_two_k3_reduction():
    verdicts = {}
    for l in (0, 1, 2):
        for strategy in ("grid", "interval"):
            verdicts[(l, strategy)] = verify_reduction(k3_problem(2, l, FISHER_K3), strategy).verdict
    ok = all(v == "holds" for v in verdicts.values())
    assert report(7, ok, ", ".join(f"l={l}/{s}: {v}" for (l, s), v in verdicts.items()))


def test_criterion_08_three_k3_table():
    rows, ok, verdicts = [], True, set()
    for r in range(16):
        p = k3_family_problem(r, BOLLOBAS)
        v = verify_reduction(p).verdict
        x0 = crossover(p, "x0")
        verdicts.add(v)
        ok &= v == "holds" and x0 >= PUBLISHED_X0[r]
        rows.append(f"{r}:{x0:.3f}>={PUBLISHED_X0[r]}")
    assert report(8, ok, f"verdicts {sorted(verdicts)}; x0 " + " ".join(rows))


def test_criterion_09_union_two_block():
    parts, ok = [], True
    for k in (1, 3, 10):
        l, p, cert = uncommon_family_bound(k)
        bc, scaled = cert.values["bracket_complement"], cert.values["scaled_t_h_w"]
        good = abs(bc - 1) <= 1e-12 and scaled < mpmath.mpf("0.9999994") ** k and cert.passed
        ok &= good
        parts.append(f"k={k} l={l} 2^e t(H,W)={mpmath.nstr(scaled, 8)}")
    assert report(9, ok, "; ".join(parts))


def test_criterion_10_odd_cycles():
    direct = all(odd_cycle_inequality(r)[0] for r in range(1, 7))
    chain = all(all(s.passed for s in odd_cycle_amgm_chain(r)) for r in range(7, 21))
    rng = random.Random(10)
    agree = 0
    for _ in range(6):
        weights, values = random_rational_graphon(rng, 3)
        w = StepGraphon(tuple(weights), tuple(tuple(r) for r in values))
        for n in (5, 7):
            agree += cycle_density(n, w).value == brute_density(graphs.cycle(n), weights, values)
    ok = direct and chain and agree == 12
    assert report(10, ok, f"odd-cycle inequality r=1..6: {direct}; chain r=7..20: {chain}; "
                          f"C5/C7 exact agreement {agree}/12")


def test_criterion_11_wheel():
    rep = chromatic_strongly_common_test(graphs.wheel5())
    ok = rep.mono_value == Fraction(1, 243) and rep.threshold == Fraction(1025, 59049) \
        and rep.mono_value < rep.threshold
    assert report(11, ok, f"{rep.mono_value} < {rep.threshold}")


def _fd_ok(p, rng) -> bool:
    x = rng.uniform(-0.95, 0.95)
    gp = float(p.g(1 + Fraction(x)))
    y = rng.uniform(0.05, 0.95) * gp
    k, l = float(p.k), float(p.l)

    def f(yy):
        return (1 + x) ** l * (gp - yy) ** k + (1 - x) ** l * (float(p.g(1 - Fraction(x))) + yy) ** k

    h = 1e-6 * max(1.0, y)
    fd = (f(y + h) - f(y - h)) / (2 * h)
    closed = float(partial_y(p, repr(x), repr(y)))
    return abs(fd - closed) / max(abs(closed), 1e-3) < 1e-6


def _implication_ok(rng) -> bool:
    kind = rng.choice(["x1_star", "x0_star", "x0_dagger"])
    x = repr(rng.uniform(0, 0.999))
    if kind == "x1_star":
        p = k3_problem(rng.choice([2, 3]), Fraction(rng.randint(0, 15), 3), rng.choice([FISHER_K3, BOLLOBAS]))
        variant = "x1_star"
    elif kind == "x0_star":
        l = Fraction(rng.randint(0, 6), 3)
        p, variant = k3_problem(rng.choice([2, 3, 4]), l), ("x0_star", l + Fraction(rng.randint(0, 3), 3))
    else:
        k = rng.choice([2, 3, 4])
        p, variant = k3_problem(k, Fraction(rng.randint(0, 9 * (k - 1)), 3)), ("x0_dagger", 3)
    if cond_appendix(p, x, variant) < 0:
        return True
    implied = cond_x1 if implied_condition(variant) == "x1" else cond_x0
    return implied(p, x) >= -1e-25


def test_criterion_12_property_suites():
    rng = random.Random(12)
    counts = {}

    mult = 0
    for _ in range(500):
        f, g = random_graph(rng, 4), random_graph(rng, 4)
        weights, values = random_rational_graphon(rng, rng.randint(1, 3))
        w = StepGraphon(tuple(weights), tuple(tuple(r) for r in values))
        mult += density(graphs.disjoint_union([f, g]), w).value == density(f, w).value * density(g, w).value
    counts["multiplicativity"] = (mult, 500)

    good = 0
    for _ in range(1000):
        weights, values = random_rational_graphon(rng, rng.randint(1, 4))
        w = StepGraphon(tuple(weights), tuple(tuple(r) for r in values))
        a = density(K2, w).value
        good += mono_density(K3, w).value >= a ** 3 + (1 - a) ** 3
    counts["goodman"] = (good, 1000)

    nprng = np.random.default_rng(12)
    base = 0
    for _ in range(1000):
        n = int(nprng.integers(1, 5))
        z = nprng.dirichlet(np.ones(n))
        A = nprng.random((n, n))
        A = (A + A.T) / 2
        t2, t3 = density_float(K2, z, A), density_float(K3, z, A)
        c2, c3 = density_float(K2, z, 1 - A), density_float(K3, z, 1 - A)
        base += all(2 ** (9 + r / 3) * (t2 ** (r / 3) * t3 ** 3 + c2 ** (r / 3) * c3 ** 3) >= 2 - 1e-12
                    for r in range(16))
    counts["base_case"] = (base, 1000)

    problems = [k3_problem(2, 0), k3_problem(2, 2), k3_family_problem(7), k3_problem(Fraction(5, 2), 1)]
    counts["d/dy"] = (sum(_fd_ok(problems[i % 4], rng) for i in range(10**4)), 10**4)

    bern = rear = hold = 0
    for _ in range(1000):
        a = rng.uniform(0, 3)
        bern += bernoulli_ineq(repr(a), repr(rng.uniform(-a, 3)), repr(rng.uniform(1.01, 6)))
        b, d = sorted((rng.uniform(0, 3), rng.uniform(0, 3)), reverse=True)
        s, t = sorted((rng.uniform(0, 5), rng.uniform(0, 5)), reverse=True)
        rear += rearrange_ineq(repr(rng.uniform(0, 3)), repr(b), repr(rng.uniform(0, 3)), repr(d),
                               repr(s), repr(t))
        s2 = rng.uniform(0.1, 4)
        hold += holder_claim(repr(rng.uniform(0, 3)), repr(rng.uniform(0, 3)), repr(s2),
                             repr(s2 + rng.uniform(0, 4)))
    counts["bernoulli"], counts["rearrange"], counts["holder"] = (bern, 1000), (rear, 1000), (hold, 1000)
    counts["appendix"] = (sum(_implication_ok(rng) for _ in range(1000)), 1000)

    ok = all(a == b for a, b in counts.values())
    assert report(12, ok, " ".join(f"{k}={a}/{b}" for k, (a, b) in counts.items()))


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_")]
    for fn in tests:
        try:
            fn()
        except AssertionError:
            pass
    sys.exit(0 if all("PASS" in line for line in ACCEPTANCE_LINES.values()) else 1)
