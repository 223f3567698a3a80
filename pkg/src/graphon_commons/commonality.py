"""Upper bounds on Ramsey multiplicity: witness graphons and searches over families.

A graph ``H`` is uncommon when some graphon gives
``t(H, W) + t(H, 1 - W) < 2 (1/2)^{e(H)}`` and not strongly common when the
sum drops below ``t(K2, W)^{e(H)} + t(K2, 1 - W)^{e(H)}``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import minimize

from . import graphs
from .graphon import (Density, StepGraphon, complement, cycle_density, density,
                      format_number, mono_density, mono_density_float, mp, parse_number,
                      to_mp)
from .graphs import Graph
from .reduction import ProofStep

DEFAULT_TOL = 1e-9
DEFAULT_BUDGET = 10**5
GRID_SIDE = 64
NM_ITERATIONS = 200
THM14_SLOPE = Fraction(19665, 10000)
THM14_BRACKET = Fraction(9999994, 10**7)

VERDICTS = ("uncommon_witness", "not_strongly_common_witness", "no_conclusion")


class FamilyError(ValueError):
    pass


# -- construction families ------------------------------------------------------

def three_block_zy(z, y) -> StepGraphon:
    """Weights ``(1-2z, z, z)``; the first block is joined to the others, which meet at density ``y``."""
    z, y = parse_number(z), parse_number(y)
    if not (0 <= 2 * z <= 1 and 0 <= y <= 1):
        raise FamilyError("need 0 <= z <= 1/2 and 0 <= y <= 1")
    return StepGraphon((1 - 2 * z, z, z), ((0, 1, 1), (1, 0, y), (1, y, 0)))


def two_block_diag_p(p) -> StepGraphon:
    """Two equal blocks, density ``p`` inside each block and 1 across."""
    p = parse_number(p)
    if not 0 <= p <= 1:
        raise FamilyError("need 0 <= p <= 1")
    half = Fraction(1, 2)
    return StepGraphon((half, half), ((p, 1), (1, p)))


def turan(k: int) -> StepGraphon:
    """The complete-graph graphon on ``k - 1`` equal blocks (needs ``k >= 2``)."""
    if k < 2:
        raise FamilyError("turan(k) needs k >= 2")
    n = k - 1
    w = Fraction(1, n)
    return StepGraphon((w,) * n, tuple(tuple(0 if i == j else 1 for j in range(n)) for i in range(n)))


def _zy_arrays(z, y):
    return np.array([1 - 2 * z, z, z]), np.array([[0.0, 1, 1], [1, 0, y], [1, y, 0]])


def _p_arrays(p):
    return np.array([0.5, 0.5]), np.array([[p, 1.0], [1.0, p]])


@dataclass(frozen=True)
class ConstructionFamily:
    kind: str
    k: int | None = None
    graphon: StepGraphon | None = None

    def __post_init__(self):
        if self.kind not in ("three_block_zy", "two_block_diag_p", "turan", "custom"):
            raise FamilyError(f"unknown family {self.kind!r}")
        if self.kind == "custom" and self.graphon is None:
            raise FamilyError("custom family needs a graphon")

    @property
    def param_names(self) -> tuple:
        return {"three_block_zy": ("z", "y"), "two_block_diag_p": ("p",)}.get(self.kind, ())

    @property
    def box(self) -> list:
        return {"three_block_zy": [(0.0, 0.5), (0.0, 1.0)],
                "two_block_diag_p": [(0.0, 1.0)]}.get(self.kind, [])

    def build(self, params) -> StepGraphon:
        if self.kind == "three_block_zy":
            return three_block_zy(*params)
        if self.kind == "two_block_diag_p":
            return two_block_diag_p(*params)
        if self.kind == "turan":
            return turan(self.k)
        return self.graphon

    def arrays(self, params):
        if self.kind == "three_block_zy":
            return _zy_arrays(*params)
        if self.kind == "two_block_diag_p":
            return _p_arrays(*params)
        return self.build(params).arrays()


# -- reports --------------------------------------------------------------------

@dataclass
class WitnessReport:
    graph: Graph
    graphon: StepGraphon
    mono_value: object
    threshold: object
    margin: object
    verdict: str
    family: str | None = None
    params: tuple | None = None
    mode: str = "rational"
    details: dict = field(default_factory=dict)

    @property
    def is_witness(self) -> bool:
        return self.verdict != "no_conclusion"

    def to_json(self) -> dict:
        out = {"graph": self.graph.to_json(), "graphon": self.graphon.to_json(),
               "family": self.family,
               "params": None if self.params is None else [format_number(parse_number(v)) for v in self.params],
               "mono_value": format_number(self.mono_value),
               "threshold": format_number(self.threshold),
               "margin": format_number(self.margin), "verdict": self.verdict, "mode": self.mode}
        for key, val in self.details.items():
            out[key] = val if isinstance(val, (str, int, float, bool, list, dict)) or val is None \
                else format_number(val)
        return out


def commonality_threshold(h: Graph) -> Fraction:
    return 2 * Fraction(1, 2) ** h.e


def _strictly_below(value: Density, bound, tol) -> bool:
    """``value < bound`` beyond rounding error and a tolerance relative to ``bound``."""
    if value.mode == "rational" and isinstance(bound, Fraction):
        return value.value < bound
    v, b = to_mp(value.value), to_mp(bound)
    return b - v > abs(b) * tol + to_mp(value.error_bound)


def check_uncommon(h: Graph, w: StepGraphon, tol: float = DEFAULT_TOL, *,
                   mode: str | None = None) -> WitnessReport:
    mono = mono_density(h, w, mode=mode)
    thr = commonality_threshold(h)
    if mono.mode == "float":
        thr = to_mp(thr)
    witness = _strictly_below(mono, thr, tol)
    return WitnessReport(h, w, mono.value, thr, thr - mono.value,
                         "uncommon_witness" if witness else "no_conclusion", mode=mono.mode,
                         details={"error_bound": mono.error_bound} if mono.mode == "float" else {})


def strong_rhs(h: Graph, w: StepGraphon, *, mode: str | None = None) -> Density:
    """``t(K2, W)^{e(H)} + t(K2, 1 - W)^{e(H)}`` with its rounding bound."""
    e = h.e
    a = density(graphs.edge(), w, mode=mode)
    b = density(graphs.edge(), complement(w), mode=mode)
    value = a.value ** e + b.value ** e
    err = 0 if a.mode == "rational" else (a.error_bound + b.error_bound) * e + abs(value) * mp.mpf(2) ** -100
    return Density(value, a.mode, err)


def check_not_strongly_common(h: Graph, w: StepGraphon, tol: float = DEFAULT_TOL, *,
                              mode: str | None = None) -> WitnessReport:
    mono = mono_density(h, w, mode=mode)
    rhs = strong_rhs(h, w, mode=mode)
    combined = Density(mono.value, mono.mode, mono.error_bound + rhs.error_bound)
    witness = _strictly_below(combined, rhs.value, tol)
    return WitnessReport(h, w, mono.value, rhs.value, rhs.value - mono.value,
                         "not_strongly_common_witness" if witness else "no_conclusion",
                         mode=mono.mode)


def chromatic_strongly_common_test(h: Graph) -> WitnessReport:
    """Compare ``(1/(k-1))^{v-m}`` with ``((k-2)/(k-1))^e + (1/(k-1))^e`` for ``k = chi(H)``.

    The left side is the monochromatic density of the Turan graphon on
    ``k - 1`` parts, where ``H`` has no homomorphic copy.
    """
    k = graphs.chromatic_number(h)
    m = len(graphs.components(h))
    if k <= 2:
        return WitnessReport(h, turan(2), Fraction(1), Fraction(1), Fraction(0), "no_conclusion",
                             family="turan", details={"chromatic_number": k, "components": m,
                                                      "note": "bipartite graphs admit no such witness"})
    q = Fraction(1, k - 1)
    lhs = q ** (h.v - m)
    rhs = (1 - q) ** h.e + q ** h.e
    w = turan(k)
    t_w = density(h, w).value
    t_c = density(h, complement(w)).value
    if t_w != 0 or t_c != lhs:
        raise AssertionError("Turan graphon densities disagree with the closed form")
    verdict = "not_strongly_common_witness" if lhs < rhs else "no_conclusion"
    return WitnessReport(h, w, lhs, rhs, rhs - lhs, verdict, family="turan", params=(k,),
                         details={"chromatic_number": k, "components": m})


# -- the two-block construction -----------------------------------------------------

@dataclass
class FamilyCertificate:
    """Numeric evidence that a two-block witness works."""

    graph: Graph
    p: object
    report: WitnessReport
    steps: list = field(default_factory=list)
    values: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.steps) and self.report.verdict == "uncommon_witness"

    def to_json(self) -> dict:
        return {"graph": self.graph.to_json(), "p": format_number(self.p), "passed": self.passed,
                "values": {k: format_number(v) for k, v in self.values.items()},
                "steps": [s.to_json() for s in self.steps], "report": self.report.to_json()}


def _p_for(exponent) -> object:
    return 1 - mp.mpf(2) ** (-1 / to_mp(exponent))


def union_bracket(alpha, p=None):
    """``2^{3+a} t(K2,W)^a t(K3,W)`` and the same for ``1 - W`` on the two-block graphon."""
    a = to_mp(alpha)
    p = _p_for(3 + a) if p is None else to_mp(p)
    w = two_block_diag_p(p)
    t2, t3 = density(graphs.edge(), w).value, density(graphs.triangle(), w).value
    c2 = density(graphs.edge(), complement(w)).value
    c3 = density(graphs.triangle(), complement(w)).value
    scale = mp.mpf(2) ** (3 + a)
    return scale * t2 ** a * t3, scale * c2 ** a * c3


def disjoint_union_witness(k: int, l: int, tol: float = DEFAULT_TOL) -> FamilyCertificate:
    """Two-block witness for ``(k K3) + (l K2)`` with ``p = 1 - 2^{-1/(3 + l/k)}``."""
    if k < 1 or l < 0:
        raise FamilyError("need k >= 1 and l >= 0")
    alpha = Fraction(l, k)
    p = _p_for(3 + alpha)
    w = two_block_diag_p(p)
    h = graphs.triangles_and_edges(k, l)
    steps = []
    t3, c3 = density(graphs.triangle(), w).value, density(graphs.triangle(), complement(w)).value
    slack = mp.mpf(2) ** -100
    steps.append(ProofStep("t(K3,W)", abs(t3 - (p ** 3 / 4 + 3 * p / 4)) < slack, "p^3/4 + 3p/4"))
    steps.append(ProofStep("t(K3,1-W)", abs(c3 - (1 - p) ** 3 / 4) < slack, "(1-p)^3/4"))
    bw, bc = union_bracket(alpha, p)
    steps.append(ProofStep("complement-bracket", abs(bc - 1) < 1e-12,
                           f"bracket for 1-W = {mp.nstr(bc, 20)}"))
    steps.append(ProofStep("bracket<1", bw < 1, f"bracket for W = {mp.nstr(bw, 12)}"))
    e = 3 * k + l
    th = density(h, w).value
    tc = density(h, complement(w)).value
    scale = mp.mpf(2) ** e
    steps.append(ProofStep("factorization", abs(th * scale - bw ** k) < 1e-20 * max(1, bw ** k)
                           and abs(tc * scale - bc ** k) < 1e-20,
                           "t(H,W) 2^e(H) = bracket^k for W and 1-W"))
    report = check_uncommon(h, w, tol)
    report.family, report.params = "two_block_diag_p", (p,)
    return FamilyCertificate(h, p, report, steps,
                             {"alpha": alpha, "bracket_w": bw, "bracket_complement": bc,
                              "scaled_t_h_w": th * scale, "scaled_t_h_complement": tc * scale})


def thm14_edge_count(k: int) -> int:
    return math.ceil(THM14_SLOPE * k)


def uncommon_family_bound(k: int, tol: float = DEFAULT_TOL):
    """``l = ceil(1.9665 k)`` together with ``p`` and a certificate that ``(k K3) + (l K2)`` is uncommon."""
    if k < 1:
        raise FamilyError("k must be at least 1")
    l = thm14_edge_count(k)
    cert = disjoint_union_witness(k, l, tol)
    limit = to_mp(THM14_BRACKET) ** k
    cert.steps.append(ProofStep("below-0.9999994^k", cert.values["scaled_t_h_w"] < limit,
                                f"2^(3k+l) t(H,W) = {mp.nstr(cert.values['scaled_t_h_w'], 12)}"))
    slope_bracket, _ = union_bracket(THM14_SLOPE)
    cert.steps.append(ProofStep("bracket-at-1.9665", slope_bracket < to_mp(THM14_BRACKET),
                                f"bracket at alpha = 1.9665 is {mp.nstr(slope_bracket, 12)}"))
    cert.values["bracket_at_slope"] = slope_bracket
    return l, cert.p, cert


def odd_cycle_inequality(r: int) -> tuple[bool, object, object]:
    """``(2-q)^{4r+1} < 1 + q^{2r+1} (2-q)^{2r}`` with ``q = 2^{-1/(4r+1)}``."""
    q = mp.mpf(2) ** (-mp.mpf(1) / (4 * r + 1))
    lhs = (2 - q) ** (4 * r + 1)
    rhs = 1 + q ** (2 * r + 1) * (2 - q) ** (2 * r)
    return lhs < rhs, lhs, rhs


def odd_cycle_amgm_chain(r: int) -> list:
    """Each link of the sufficient chain used for large ``r``."""
    q = mp.mpf(2) ** (-mp.mpf(1) / (4 * r + 1))
    B = q ** (2 * r + 1) * (2 - q) ** (2 * r)
    x = mp.mpf(1) / (4 * r + 1)
    y = mp.mpf(1) / (2 * (3 * r + 1) * (4 * r + 1))
    tiny = mp.mpf(2) ** -100
    two = mp.mpf(2)
    steps = [
        ProofStep("amgm", 1 + B > 2 * mp.sqrt(B), "1 + B > 2 sqrt(B)"),
        ProofStep("amgm-form", abs(2 * mp.sqrt(B) - two ** (mp.mpf(6 * r + 1) / (8 * r + 2)) * (2 - q) ** r) < tiny,
                  "2 sqrt(B) = 2^((6r+1)/(8r+2)) (2-q)^r"),
        ProofStep("power-comparison", two ** (mp.mpf(6 * r + 1) / (8 * r + 2)) >= (2 - q) ** (3 * r + 1),
                  "2^((6r+1)/(8r+2)) >= (2-q)^(3r+1)"),
        ProofStep("exp-form", two ** (x - y) + two ** (-x) >= 2, "2^(x-y) + 2^(-x) >= 2"),
        ProofStep("log-form", x >= y + mp.log(1 + mp.sqrt(1 - two ** (-y))) / mp.log(2),
                  "x >= y + log2(1 + sqrt(1 - 2^-y))"),
        ProofStep("final", y + mp.sqrt(1 / (mp.log(4) * (3 * r + 1) * (4 * r + 1))) < x,
                  "1/(2(3r+1)(4r+1)) + sqrt(1/(ln4 (3r+1)(4r+1))) < 1/(4r+1)"),
    ]
    return steps


def uncommon_odd_cycle_family(k: int, r: int, tol: float = DEFAULT_TOL) -> FamilyCertificate:
    """Two-block witness for ``(k C_{2r+1}) + (2rk K2)`` with ``p = 1 - 2^{-1/(4r+1)}``."""
    if k < 1 or r < 1:
        raise FamilyError("need k, r >= 1")
    n = 2 * r + 1
    p = _p_for(4 * r + 1)
    w = two_block_diag_p(p)
    wc = complement(w)
    steps = []
    cw, cc = cycle_density(n, w).value, cycle_density(n, wc).value
    slack = mp.mpf(2) ** -90
    steps.append(ProofStep("t(C,W)", abs(cw - (((p + 1) / 2) ** n + ((p - 1) / 2) ** n)) < slack,
                           "((p+1)/2)^n + ((p-1)/2)^n"))
    steps.append(ProofStep("t(C,1-W)", abs(cc - 2 * ((1 - p) / 2) ** n) < slack, "2((1-p)/2)^n"))
    t2, c2 = density(graphs.edge(), w).value, density(graphs.edge(), wc).value
    scale = mp.mpf(2) ** (4 * r + 1)
    bw, bc = scale * t2 ** (2 * r) * cw, scale * c2 ** (2 * r) * cc
    steps.append(ProofStep("complement-bracket", abs(bc - 1) < 1e-12, f"{mp.nstr(bc, 20)}"))
    ok, lhs, rhs = odd_cycle_inequality(r)
    steps.append(ProofStep("odd-cycle-inequality", ok, f"{mp.nstr(lhs, 15)} < {mp.nstr(rhs, 15)}"))
    steps.append(ProofStep("bracket<1", bw < 1, f"bracket for W = {mp.nstr(bw, 15)}"))
    h = graphs.disjoint_union([graphs.copies(graphs.cycle(n), k), graphs.copies(graphs.edge(), 2 * r * k)])
    report = _report_from_parts(h, w, (bw / scale) ** k, (bc / scale) ** k)
    report.family, report.params = "two_block_diag_p", (p,)
    return FamilyCertificate(h, p, report, steps, {"bracket_w": bw, "bracket_complement": bc})


def _report_from_parts(h: Graph, w: StepGraphon, tw, tc, tol: float = DEFAULT_TOL) -> WitnessReport:
    """Witness report from already computed densities (used where enumeration is wasteful)."""
    mono = tw + tc
    err = abs(mono) * mp.mpf(2) ** -90
    thr = to_mp(commonality_threshold(h))
    witness = _strictly_below(Density(mono, "float", err), thr, tol)
    return WitnessReport(h, w, mono, thr, thr - mono,
                         "uncommon_witness" if witness else "no_conclusion", mode="float",
                         details={"error_bound": err})


def triangle_tree_witness(t: graphs.K3Tree, tol: float = DEFAULT_TOL,
                          budget: int = 2**16) -> FamilyCertificate:
    """Two-block witness for a K3-tree glued on single vertices.

    The two-block graphon is vertex transitive, so densities multiply across
    single-vertex gluings; the realized graph is also evaluated directly when
    its enumeration fits the budget.
    """
    v3, v2 = t.v_count(3), t.v_count(2)
    if t.e_count(2) != 0:
        raise FamilyError("the gluing must not share edges")
    if v3 < 1:
        raise FamilyError("need at least one triangle")
    alpha = Fraction(v2, v3)
    p = _p_for(3 + alpha)
    w = two_block_diag_p(p)
    h = graphs.realize_k3_tree(t)
    bw, bc = union_bracket(alpha, p)
    scale = mp.mpf(2) ** h.e
    tw, tc = bw ** v3 / scale, bc ** v3 / scale
    steps = [ProofStep("bracket<1", bw < 1, f"bracket for W = {mp.nstr(bw, 12)}"),
             ProofStep("complement-bracket", abs(bc - 1) < 1e-12, mp.nstr(bc, 20))]
    if max(2 ** c.v for c in graphs.components(h)) <= budget:
        dw, dc = density(h, w).value, density(h, complement(w)).value
        steps.append(ProofStep("direct-density", abs(dw - tw) <= 1e-20 * tw and abs(dc - tc) <= 1e-20 * tc,
                               "enumerated densities match the product formula"))
    report = _report_from_parts(h, w, tw, tc, tol)
    report.family, report.params = "two_block_diag_p", (p,)
    return FamilyCertificate(h, p, report, steps, {"alpha": alpha, "bracket_w": bw})


# -- search -----------------------------------------------------------------------

def _threads() -> int:
    try:
        return max(1, int(os.environ.get("GRAPHON_COMMONS_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class SearchResult:
    report: WitnessReport
    params: tuple
    value: float
    evaluations: int
    exhausted: bool = False

    def to_json(self) -> dict:
        out = self.report.to_json()
        out.update({"search_value": self.value, "evaluations": self.evaluations,
                    "budget_exhausted": self.exhausted})
        return out


class _Counter:
    def __init__(self, budget):
        self.budget = budget
        self.used = 0

    def take(self, n=1) -> bool:
        if self.used + n > self.budget:
            return False
        self.used += n
        return True


def _objective(h: Graph, family: ConstructionFamily):
    def f(params):
        z, A = family.arrays(params)
        return mono_density_float(h, z, A)
    return f


def _batch_values(h, family, mesh):
    pairs = [family.arrays(tuple(pt)) for pt in mesh]
    if not pairs:
        return np.empty(0)
    Z = np.stack([p[0] for p in pairs])
    A = np.stack([p[1] for p in pairs])
    return mono_density_float(h, Z, A)


def _refine(f, start, box, counter, iterations):
    lo = np.array([b[0] for b in box])
    hi = np.array([b[1] for b in box])
    evals = {"n": 0}
    per_run = min(counter.budget - counter.used, iterations * (len(box) + 2) + 10)
    if per_run <= 0:
        return None

    def g(x):
        if evals["n"] >= per_run:
            return np.inf
        evals["n"] += 1
        return f(tuple(np.clip(x, lo, hi)))

    res = minimize(g, np.asarray(start, dtype=float), method="Nelder-Mead",
                   bounds=box, options={"maxiter": iterations, "xatol": 1e-10, "fatol": 1e-15})
    return float(res.fun), tuple(float(v) for v in np.clip(res.x, lo, hi)), evals["n"]


def _search_box(h, family, budget, seed, restarts):
    f = _objective(h, family)
    box = family.box
    counter = _Counter(budget)
    axes = [np.linspace(a, b, GRID_SIDE) for a, b in box]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, len(box))
    exhausted = len(mesh) > budget
    mesh = mesh[:budget]
    counter.take(len(mesh))
    vals = _batch_values(h, family, mesh)
    values = [(float(v), tuple(float(c) for c in pt)) for v, pt in zip(vals, mesh)]
    values.sort()
    rng = np.random.default_rng(seed)
    starts = [v[1] for v in values[:restarts]]
    starts += [tuple(rng.uniform(a, b) for a, b in box) for _ in range(restarts)]
    pool = ThreadPoolExecutor(max_workers=_threads())
    with pool:
        # budget is split up front so the outcome does not depend on scheduling
        share = max(0, (budget - counter.used) // max(1, len(starts)))
        jobs = [pool.submit(_refine, f, s, box, _Counter(share), NM_ITERATIONS) for s in starts]
        outcomes = [j.result() for j in jobs]
    for out in outcomes:
        if out is None:
            exhausted = True
            continue
        val, x, n = out
        counter.used += n
        values.append((val, x))
    best = min(values)
    return best, counter.used, exhausted


def search_witness(h: Graph, family="three_block_zy", budget: int = DEFAULT_BUDGET,
                   seed: int = 0, tol: float = DEFAULT_TOL, restarts: int = 4) -> SearchResult:
    """Grid scan then simplex refinement of the monochromatic density over a family."""
    if isinstance(family, str):
        family = ConstructionFamily(family)
    if family.kind == "turan":
        return _search_turan(h, family, tol)
    if family.kind == "custom":
        rep = check_uncommon(h, family.graphon, tol)
        rep.family = "custom"
        return SearchResult(rep, (), float(rep.mono_value), 1)
    (value, params), used, exhausted = _search_box(h, family, budget, seed, restarts)
    exact = tuple(parse_number(repr(v)) for v in params)
    rep = check_uncommon(h, family.build(exact), tol, mode="float")
    rep.family, rep.params = family.kind, params
    return SearchResult(rep, params, value, used, exhausted)


_PRIORITY = {"uncommon_witness": 0, "not_strongly_common_witness": 1, "no_conclusion": 2}


def _search_turan(h: Graph, family: ConstructionFamily, tol) -> SearchResult:
    ks = [family.k] if family.k else list(range(3, min(h.v, 8) + 2))
    found = []
    for k in ks:
        w = turan(k)
        for rep in (check_uncommon(h, w, tol), check_not_strongly_common(h, w, tol)):
            rep.family, rep.params = "turan", (k,)
            found.append(((_PRIORITY[rep.verdict], rep.mono_value, k), rep))
    found.sort(key=lambda t: t[0])
    best = found[0][1]
    return SearchResult(best, best.params, float(best.mono_value), len(ks))
