"""Lower bounds on Ramsey multiplicity through a two-variable minimization.

If ``H`` has ``e(H) = k e(J) + l`` and ``t(H, W) >= t(J, W)^k t(K2, W)^l``, and
``J`` is ``g``-bounded with supersaturation floor ``rho``, then
``2^{e(H)} c(H)`` is at least the minimum of

    f(x, y) = (1+x)^l (g(1+x) - y)^k + (1-x)^l (g(1-x) + y)^k

over ``-1 <= x <= 1`` and ``0 <= y <= g(1+x) - rho(1+x)``.  For ``k > 1`` the
minimum over ``y`` is at an interior critical point ``y0(x)`` or at the upper
end of the range, which yields three single-variable conditions:

* ``x0``: ``f(x, y0(x)) >= c``,
* ``x1``: ``y0(x) >= g(1+x) - rho(1+x)``,
* ``x1prime``: ``f(x, g(1+x) - rho(1+x)) >= c``.

Every ``x`` in ``[0, 1]`` needs ``x0`` or both ``x1`` and ``x1prime``.  For
``k = 1`` the function is linear in ``y`` and both endpoints are checked
instead (``y_low`` and ``x1prime``).

Margins are always ``LHS - RHS``, so a nonnegative margin means satisfied.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import sympy
from scipy.optimize import brentq

from . import interval as iv
from .bounds import BOLLOBAS, FISHER_K3, BoundFunction, fisher_k3_in_s, power
from .graphon import format_number, mp, parse_number, to_mp

MAX_DEPTH = 40
GRID_RESOLUTION = 1e-4
DERIV_PAD = 1.5
GRID_SLACK = 1e-12
REL_SLACK = mp.mpf(2) ** -100


class ReductionError(ValueError):
    pass


def _num(v):
    v = parse_number(v)
    return v


@dataclass(frozen=True)
class ReductionProblem:
    k: object
    l: object
    g: BoundFunction
    rho: BoundFunction
    target_c: object

    def __post_init__(self):
        for name in ("k", "l", "target_c"):
            object.__setattr__(self, name, _num(getattr(self, name)))
        if self.k <= 0:
            raise ReductionError("k must be positive")
        if self.target_c <= 0:
            raise ReductionError("target c must be positive")
        zs = np.linspace(0.0, 2.0, 2001)
        if np.any(self.rho(zs) > self.g(zs) * (1 + 1e-12) + 1e-12):
            raise ReductionError("rho must not exceed g on [0, 2]")

    @property
    def e(self):
        """The exponent l/(k-1) that appears in the critical points."""
        if self.k == 1:
            raise ReductionError("k = 1 has no interior critical point")
        return self.l / (self.k - 1)

    @property
    def rho_at_2_positive(self) -> bool:
        return self.rho(Fraction(2)) > 0

    def to_json(self) -> dict:
        return {"k": format_number(self.k), "l": format_number(self.l),
                "g": self.g.to_json(), "rho": self.rho.to_json(),
                "c": format_number(self.target_c)}

    @classmethod
    def from_json(cls, data) -> ReductionProblem:
        if isinstance(data, str):
            data = json.loads(data)
        try:
            return cls(data["k"], data["l"], BoundFunction.from_json(data["g"]),
                       BoundFunction.from_json(data["rho"]), data["c"])
        except (KeyError, TypeError) as exc:
            raise ReductionError(f"bad problem JSON: {exc}") from exc


def k3_problem(k, l, rho: BoundFunction = FISHER_K3, c=2) -> ReductionProblem:
    """Triangle base graph: ``g(z) = z^3`` from Goodman's theorem."""
    return ReductionProblem(k, l, power(3), rho, c)


# -- scalar evaluation --------------------------------------------------------

def _exact(*vals) -> bool:
    return all(isinstance(v, Fraction) for v in vals)


def _integral(p: ReductionProblem) -> bool:
    """Exact arithmetic is possible only with integer exponents."""
    exps = [p.k, p.l] + ([p.e] if p.k != 1 else [])
    return all(isinstance(v, Fraction) and v.denominator == 1 for v in exps)


def _lt(a, b) -> bool:
    if isinstance(a, Fraction) != isinstance(b, Fraction):
        a, b = to_mp(a), to_mp(b)
    return a < b


def _pw(base, e):
    """``base ** e`` with ``0 ** 0 = 1``; exact when both are rational and e is integral."""
    if e == 0:
        return Fraction(1) if isinstance(base, Fraction) else mp.mpf(1)
    if base < 0:
        raise ReductionError("negative base in a real power")
    if base == 0:
        return (base * 0) if e > 0 else mp.inf
    if isinstance(base, Fraction) and isinstance(e, Fraction) and e.denominator == 1:
        return base ** int(e)
    return to_mp(base) ** to_mp(e)


class _Point:
    """g(1+x), g(1-x) and rho(1+x) at one x, in a common number type."""

    def __init__(self, p: ReductionProblem, x, *others):
        x = parse_number(x)
        if not -1 <= x <= 1:
            raise ReductionError("x must lie in [-1, 1]")
        vals = [1 + x, 1 - x, p.g(1 + x), p.g(1 - x), p.rho(1 + x)]
        others = [parse_number(v) for v in others]
        if not (_exact(*vals, *others, p.k, p.l, p.target_c) and _integral(p)):
            vals = [to_mp(v) for v in vals]
        self.up, self.um, self.gp, self.gm, self.rp = vals
        self.exact = isinstance(self.up, Fraction)

    def lift(self, v):
        v = parse_number(v)
        return v if self.exact or not isinstance(v, Fraction) else to_mp(v)


def f_gkl(p: ReductionProblem, x, y):
    """The objective ``f_{g,k,l}(x, y)``."""
    q = _Point(p, x, y)
    y = q.lift(y)
    if y < 0 or y > q.gp:
        raise ReductionError("y must lie in [0, g(1+x)]")
    if p.l < 0 and abs(x) == 1:
        raise ReductionError("negative l is singular at x = +-1")
    k, l = q.lift(p.k), q.lift(p.l)
    return _pw(q.up, l) * _pw(q.gp - y, k) + _pw(q.um, l) * _pw(q.gm + y, k)


def partial_y(p: ReductionProblem, x, y):
    """Closed-form derivative of f in y."""
    q = _Point(p, x, y)
    y = q.lift(y)
    k, l = q.lift(p.k), q.lift(p.l)
    return k * (_pw(q.um, l) * _pw(q.gm + y, k - 1) - _pw(q.up, l) * _pw(q.gp - y, k - 1))


def partial_yy(p: ReductionProblem, x, y):
    q = _Point(p, x, y)
    y = q.lift(y)
    k, l = q.lift(p.k), q.lift(p.l)
    return k * (k - 1) * (_pw(q.um, l) * _pw(q.gm + y, k - 2) + _pw(q.up, l) * _pw(q.gp - y, k - 2))


def _need_k_gt_1(p):
    if p.k <= 1:
        raise ReductionError("critical points need k > 1")


def critical_y0(p: ReductionProblem, x):
    _need_k_gt_1(p)
    q = _Point(p, x)
    e = q.lift(p.e)
    a, b = _pw(q.up, e), _pw(q.um, e)
    return (a * q.gp - b * q.gm) / (a + b)


def critical_y1(p: ReductionProblem, x):
    """Second stationary point; ``inf`` when its denominator vanishes."""
    _need_k_gt_1(p)
    q = _Point(p, x)
    e = q.lift(p.e)
    a, b = _pw(q.up, e), _pw(q.um, e)
    if a == b:
        return mp.inf
    return (a * q.gp + b * q.gm) / (a - b)


def _x0_expr(P, up, um, gp, gm, k, l, e, c):
    return P(up, l) * P(um, l) * P(gp + gm, k) / P(P(up, e) + P(um, e), k - 1) - c


def _x1_expr(P, up, um, gp, gm, rp, e):
    a, b = P(up, e), P(um, e)
    return (gp * a - gm * b) / (a + b) - (gp - rp)


def _x1prime_expr(P, up, um, gp, gm, rp, k, l, c):
    return P(up, l) * P(rp, k) + P(um, l) * P(gm + gp - rp, k) - c


def _ylow_expr(P, up, um, gp, gm, k, l, c):
    return P(up, l) * P(gp, k) + P(um, l) * P(gm, k) - c


def cond_x0(p: ReductionProblem, x):
    _need_k_gt_1(p)
    q = _Point(p, x)
    L = q.lift
    return _x0_expr(_pw, q.up, q.um, q.gp, q.gm, L(p.k), L(p.l), L(p.e), L(p.target_c))


def cond_x1(p: ReductionProblem, x):
    _need_k_gt_1(p)
    q = _Point(p, x)
    return _x1_expr(_pw, q.up, q.um, q.gp, q.gm, q.rp, q.lift(p.e))


def cond_x1prime(p: ReductionProblem, x):
    q = _Point(p, x)
    L = q.lift
    return _x1prime_expr(_pw, q.up, q.um, q.gp, q.gm, q.rp, L(p.k), L(p.l), L(p.target_c))


def cond_y_low(p: ReductionProblem, x):
    """``f(x, 0) - c``, the lower endpoint used when ``k = 1``."""
    q = _Point(p, x)
    L = q.lift
    return _ylow_expr(_pw, q.up, q.um, q.gp, q.gm, L(p.k), L(p.l), L(p.target_c))


# -- appendix sufficient conditions -------------------------------------------

def _variant(variant):
    """Normalize ``"x1_star"``, ``("x0_star", l0)`` or ``("x0_dagger", m)``."""
    if isinstance(variant, str):
        if variant == "x1_star":
            return "x1_star", None
        raise ReductionError(f"variant {variant!r} needs a parameter")
    name, param = variant
    if name not in ("x0_star", "x0_dagger"):
        raise ReductionError(f"unknown appendix variant {name!r}")
    return name, parse_number(param)


def check_appendix_preconditions(p: ReductionProblem, variant):
    name, param = _variant(variant)
    if name == "x1_star":
        if p.l < 0:
            raise ReductionError("x1_star needs l >= 0")
    elif name == "x0_star":
        if p.k < 2 or p.l < 0 or param < p.l:
            raise ReductionError("x0_star needs k >= 2 and 0 <= l <= l0")
    else:
        _need_k_gt_1(p)
        if p.g.kind != "power" or p.g.exponent != param:
            raise ReductionError("x0_dagger needs g = z^m")
        if p.l < 0 or param < p.e:
            raise ReductionError("x0_dagger needs 0 <= l and m >= l/(k-1)")
    return name, param


def _appendix_expr(P, name, param, up, um, gp, gm, rp, k, l, c):
    if name == "x1_star":
        return 2 * rp - gp - gm
    if name == "x0_star":
        a, b = P(up, param), P(um, param)
        return P(gp + gm, k) - c * P(up * 0 + 2, k - 2) * (a + b) / (a * b)
    m = param
    return P((P(up, m) + P(um, m)) / 2, k - l / m) - c / (2 * P(up, l) * P(um, l))


def cond_appendix(p: ReductionProblem, x, variant):
    """Margin of a simpler sufficient condition.

    ``x1_star`` implies ``x1``; ``x0_star`` and ``x0_dagger`` imply ``x0``.
    """
    name, param = check_appendix_preconditions(p, variant)
    q = _Point(p, x)
    L = q.lift
    if name != "x1_star" and x == 1:
        return -mp.inf
    args = [q.up, q.um, q.gp, q.gm, q.rp, L(p.k), L(p.l), L(p.target_c)]
    if param is not None:
        param = L(param)
        if isinstance(param, Fraction) and param.denominator != 1:
            # fractional exponents leave the rationals
            param, args = to_mp(param), [to_mp(a) for a in args]
    return _appendix_expr(_pw, name, param, *args)


def implied_condition(variant) -> str:
    return "x1" if _variant(variant)[0] == "x1_star" else "x0"


# -- inequality helpers ---------------------------------------------------------

def _geq(lhs, rhs) -> bool:
    if _exact(lhs, rhs):
        return lhs >= rhs
    lhs, rhs = to_mp(lhs), to_mp(rhs)
    return lhs >= rhs - REL_SLACK * max(1, abs(lhs), abs(rhs))


def bernoulli_ineq(a, b, k) -> bool:
    """``(a + b)^k >= a^k + k b a^(k-1)`` for ``a >= 0``, ``a + b >= 0``, ``k > 1``."""
    a, b, k = parse_number(a), parse_number(b), parse_number(k)
    if a < 0 or a + b < 0 or k <= 1:
        raise ReductionError("need a >= 0, a + b >= 0 and k > 1")
    if not _exact(a, b, k):
        a, b, k = to_mp(a), to_mp(b), to_mp(k)
    return _geq(_pw(a + b, k), _pw(a, k) + k * b * _pw(a, k - 1))


def rearrange_ineq(a, b, c, d, s, t) -> bool:
    """``(a b^s - c d^s)(b^t + d^t) >= (a b^t - c d^t)(b^s + d^s)`` when b >= d, s >= t."""
    a, b, c, d, s, t = (parse_number(v) for v in (a, b, c, d, s, t))
    if min(a, b, c, d, s, t) < 0 or b < d or s < t:
        raise ReductionError("need all >= 0, b >= d and s >= t")
    if not _exact(a, b, c, d, s, t):
        a, b, c, d, s, t = (to_mp(v) for v in (a, b, c, d, s, t))
    lhs = (a * _pw(b, s) - c * _pw(d, s)) * (_pw(b, t) + _pw(d, t))
    rhs = (a * _pw(b, t) - c * _pw(d, t)) * (_pw(b, s) + _pw(d, s))
    return _geq(lhs, rhs)


def holder_claim(b1, b2, s, m) -> bool:
    """``(b1^s + b2^s)^m <= 2^(m-s) (b1^m + b2^m)^s`` for ``m >= s > 0``."""
    b1, b2, s, m = (parse_number(v) for v in (b1, b2, s, m))
    if b1 < 0 or b2 < 0 or s <= 0 or m < s:
        raise ReductionError("need b1, b2 >= 0 and m >= s > 0")
    if not _exact(b1, b2, s, m):
        b1, b2, s, m = (to_mp(v) for v in (b1, b2, s, m))
    two = Fraction(2) if isinstance(s, Fraction) else mp.mpf(2)
    return _geq(_pw(two, m - s) * _pw(_pw(b1, m) + _pw(b2, m), s), _pw(_pw(b1, s) + _pw(b2, s), m))


# -- vectorized margins ---------------------------------------------------------

def _np_pow(base, e):
    return np.power(base, float(e))


def margin_curves(p: ReductionProblem, xs) -> dict:
    """Double-precision margins of every applicable condition at the points ``xs``."""
    xs = np.asarray(xs, dtype=float)
    up, um = 1.0 + xs, 1.0 - xs
    gp, gm, rp = p.g(up), p.g(um), p.rho(up)
    k, l, c = float(p.k), float(p.l), float(p.target_c)
    out = {}
    with np.errstate(divide="ignore", invalid="ignore"):
        out["x1prime"] = _x1prime_expr(_np_pow, up, um, gp, gm, rp, k, l, c)
        if p.k > 1:
            e = float(p.e)
            out["x0"] = _x0_expr(_np_pow, up, um, gp, gm, k, l, e, c)
            out["x1"] = _x1_expr(_np_pow, up, um, gp, gm, rp, e)
        else:
            out["y_low"] = _ylow_expr(_np_pow, up, um, gp, gm, k, l, c)
    return out


def appendix_curve(p: ReductionProblem, xs, variant) -> np.ndarray:
    name, param = check_appendix_preconditions(p, variant)
    xs = np.asarray(xs, dtype=float)
    up, um = 1.0 + xs, 1.0 - xs
    with np.errstate(divide="ignore", invalid="ignore"):
        out = _appendix_expr(_np_pow, name, None if param is None else float(param), up, um,
                             p.g(up), p.g(um), p.rho(up), float(p.k), float(p.l),
                             float(p.target_c))
    return np.where(np.isnan(out), -np.inf, out)


def condition_groups(p: ReductionProblem) -> tuple:
    """Alternatives that each suffice at a point, in order of preference."""
    if p.k > 1:
        return (("x0",), ("x1", "x1prime"))
    return (("y_low", "x1prime"),)


# -- certificates ---------------------------------------------------------------

@dataclass(frozen=True)
class Record:
    x_lo: object
    x_hi: object
    condition: str
    margin: float | None
    strategy: str

    def to_json(self) -> dict:
        enc = lambda v: str(v) if isinstance(v, Fraction) else repr(float(v))
        return {"x_lo": enc(self.x_lo), "x_hi": enc(self.x_hi), "condition": self.condition,
                "margin": self.margin, "strategy": self.strategy}

    @classmethod
    def from_json(cls, d) -> Record:
        return cls(Fraction(d["x_lo"]), Fraction(d["x_hi"]), d["condition"],
                   None if d["margin"] is None else float(d["margin"]), d["strategy"])


@dataclass(frozen=True)
class Certificate:
    problem: ReductionProblem
    strategy: str
    verdict: str
    records: tuple = ()
    point: tuple | None = None
    resolution: float | None = None
    max_depth: int | None = None
    note: str = ""

    @property
    def holds(self) -> bool:
        return self.verdict == "holds"

    def to_json(self) -> dict:
        out = {"problem": self.problem.to_json(), "strategy": self.strategy,
               "verdict": self.verdict, "records": [r.to_json() for r in self.records]}
        if self.point is not None:
            out["point"] = [_point_str(v) for v in self.point]
        if self.resolution is not None:
            out["resolution"] = self.resolution
        if self.max_depth is not None:
            out["max_depth"] = self.max_depth
        if self.note:
            out["note"] = self.note
        return out

    @classmethod
    def from_json(cls, data) -> Certificate:
        if isinstance(data, str):
            data = json.loads(data)
        try:
            point = data.get("point")
            return cls(ReductionProblem.from_json(data["problem"]), data["strategy"],
                       data["verdict"], tuple(Record.from_json(r) for r in data["records"]),
                       tuple(parse_number(v) for v in point) if point else None,
                       data.get("resolution"), data.get("max_depth"), data.get("note", ""))
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise ReductionError(f"bad certificate JSON: {exc}") from exc


def _point_str(v) -> str:
    if isinstance(v, Fraction) and v.denominator <= 10**12:
        return str(v)
    return mp.nstr(to_mp(v), 30)


def worst_point(p: ReductionProblem, x):
    """The feasible ``y`` minimizing ``f(x, .)`` for ``0 <= x <= 1``, and the value there."""
    x = parse_number(x)
    q = _Point(p, x)
    top = q.gp - q.rp
    if p.k > 1:
        y = min(critical_y0(p, x), top)
        y = max(y, top * 0)
        return y, f_gkl(p, x, y)
    cands = [(f_gkl(p, x, y), y) for y in (top * 0, top)]
    v, y = min(cands, key=lambda t: t[0])
    return y, v


def _failure_at(p: ReductionProblem, x):
    y, v = worst_point(p, x)
    if _lt(v, p.target_c):
        return (parse_number(x), y)
    return None


def _x_breakpoints(p: ReductionProblem) -> list:
    pts = {Fraction(0), Fraction(1)}
    for b in set(p.g.breakpoints) | set(p.rho.breakpoints):
        for x in (b - 1, 1 - b):
            if 0 < x < 1:
                pts.add(x)
    return sorted(pts)


def _check_supported(p: ReductionProblem):
    if p.l < 0:
        raise ReductionError("verification is only supported for l >= 0")


def _finalize(p, strategy, verdict, records, point, **kw) -> Certificate:
    note = ""
    if verdict == "holds" and p.k > 1 and not p.rho_at_2_positive:
        verdict, note = "inconclusive", "rho(2) = 0: the single-variable reduction does not apply"
    return Certificate(p, strategy, verdict, tuple(records), point, note=note, **kw)


# grid_with_margin

def _grid_cell_pass(m, dm, h):
    """Per-cell acceptance from three anchors; ``m``/``dm`` sampled at half steps."""
    lo, mid, hi = m[0:-1:2], m[1::2], m[2::2]
    dlo, dmid, dhi = dm[0:-1:2], dm[1::2], dm[2::2]
    est = np.stack([mid - DERIV_PAD * np.abs(dmid) * h / 2,
                    lo - DERIV_PAD * np.maximum(0.0, -dlo) * h,
                    hi - DERIV_PAD * np.maximum(0.0, dhi) * h])
    est = np.where(np.isnan(est), -np.inf, est)
    return est.max(axis=0)


def _grid_estimates(p: ReductionProblem, lo: float, hi: float, resolution: float):
    n = max(1, int(math.ceil((hi - lo) / resolution - 1e-9)))
    xs = np.linspace(lo, hi, 2 * n + 1)
    h = (hi - lo) / n
    curves = margin_curves(p, xs)
    best = {}
    for name, m in curves.items():
        m = np.where(np.isnan(m), -np.inf, m)
        with np.errstate(invalid="ignore"):
            dm = np.gradient(m, xs)
        dm = np.where(np.isfinite(dm), dm, np.inf)
        best[name] = _grid_cell_pass(m, dm, h)
    return xs, best


def _grid_verify(p: ReductionProblem, resolution: float) -> Certificate:
    xs, est = _grid_estimates(p, 0.0, 1.0, resolution)
    cells = len(xs) // 2
    chosen, margins = [], []
    for i in range(cells):
        label, margin = None, -np.inf
        for group in condition_groups(p):
            m = min(est[c][i] for c in group)
            if m >= -GRID_SLACK:
                label, margin = ",".join(group), m
                break
        chosen.append(label)
        margins.append(margin)
    failures = [i for i, c in enumerate(chosen) if c is None]
    for i in failures:
        for x in (xs[2 * i + 1], xs[2 * i], xs[2 * i + 2]):
            bad = _failure_at(p, Fraction(repr(float(x))))
            if bad:
                return _finalize(p, "grid_with_margin", "fails_at", [], bad, resolution=resolution)
    records = []
    i = 0
    while i < cells:
        j = i
        while j + 1 < cells and chosen[j + 1] == chosen[i]:
            j += 1
        records.append(Record(Fraction(xs[2 * i]), Fraction(xs[2 * j + 2]),
                              chosen[i] or "none", float(min(margins[i:j + 1])),
                              "grid_with_margin"))
        i = j + 1
    verdict = "holds" if not failures else "inconclusive"
    return _finalize(p, "grid_with_margin", verdict, records, None, resolution=resolution)


# certified_interval

def _iv_inputs(p: ReductionProblem, lo: Fraction, hi: Fraction):
    X = iv.interval(lo, hi)
    up, um = 1 + X, 1 - X
    return (up, um, p.g.enclose(1 + lo, 1 + hi), p.g.enclose(1 - hi, 1 - lo),
            p.rho.enclose(1 + lo, 1 + hi))


def _iv_params(p):
    conv = iv.convert
    e = conv(p.e) if p.k > 1 else None
    return conv(p.k), conv(p.l), e, conv(p.target_c)


def _evaluate(name, P, up, um, gp, gm, rp, k, l, e, c):
    if name == "x0":
        return _x0_expr(P, up, um, gp, gm, k, l, e, c)
    if name == "x1":
        return _x1_expr(P, up, um, gp, gm, rp, e)
    if name == "x1prime":
        return _x1prime_expr(P, up, um, gp, gm, rp, k, l, c)
    if name == "y_low":
        return _ylow_expr(P, up, um, gp, gm, k, l, c)
    raise ReductionError(f"unknown condition {name!r}")


def _jpow(base, e):
    if isinstance(base, iv.Jet):
        return base ** e
    return iv.ipow(base, e)


def _jets(p: ReductionProblem, X):
    x = iv.Jet.variable(X)
    up, um = 1 + x, 1 - x
    gp, gm, rp = p.g.jet(up), p.g.jet(um), p.rho.jet(up)
    if gp is None or gm is None or rp is None:
        return None
    return up, um, gp, gm, rp


def interval_lower_bound(p: ReductionProblem, name: str, lo: Fraction, hi: Fraction):
    """Rigorous lower bound of a condition margin over ``[lo, hi]``."""
    lo, hi = Fraction(lo), Fraction(hi)
    k, l = p.k, p.l
    e = p.e if p.k > 1 else None
    c = p.target_c
    naive = _evaluate(name, iv.ipow, *_iv_inputs(p, lo, hi), k, l, e, iv.convert(c)).a
    best = naive
    if hi > lo:
        whole = _jets(p, iv.interval(lo, hi))
        anchor = _jets(p, iv.interval(lo))
        if whole is not None and anchor is not None:
            try:
                jw = _evaluate(name, _jpow, *whole, k, l, e, c)
                ja = _evaluate(name, _jpow, *anchor, k, l, e, c)
            except (ZeroDivisionError, ValueError):
                jw = ja = None
            if jw is not None:
                slope = iv.convert(0) if (name == "x0" and lo == 0) else ja.d1
                t = iv.taylor_lower_bound(ja.v, slope, jw.d2, iv.convert(hi - lo))
                if t > best:
                    best = t
    return best


def _interval_leaf(p: ReductionProblem, lo: Fraction, hi: Fraction):
    for group in condition_groups(p):
        bounds = [interval_lower_bound(p, c, lo, hi) for c in group]
        m = min(bounds)
        if m >= 0:
            return ",".join(group), float(m)
    return None, None


def _interval_verify(p: ReductionProblem, max_depth: int) -> Certificate:
    records = []
    pts = _x_breakpoints(p)
    stack = [(a, b, 0) for a, b in zip(pts[-2::-1], pts[:0:-1])]
    inconclusive = False
    while stack:
        lo, hi, depth = stack.pop()
        label, margin = _interval_leaf(p, lo, hi)
        if label is not None:
            records.append(Record(lo, hi, label, margin, "certified_interval"))
            continue
        mid = (lo + hi) / 2
        bad = _failure_at(p, mid)
        if bad:
            return _finalize(p, "certified_interval", "fails_at", [], bad, max_depth=max_depth)
        if depth >= max_depth:
            inconclusive = True
            records.append(Record(lo, hi, "none", None, "certified_interval"))
            continue
        stack.append((mid, hi, depth + 1))
        stack.append((lo, mid, depth + 1))
    verdict = "inconclusive" if inconclusive else "holds"
    return _finalize(p, "certified_interval", verdict, records, None, max_depth=max_depth)


STRATEGIES = {"grid": "grid_with_margin", "grid_with_margin": "grid_with_margin",
              "interval": "certified_interval", "certified_interval": "certified_interval"}


def verify_reduction(p: ReductionProblem, strategy: str = "grid",
                     resolution: float = GRID_RESOLUTION,
                     max_depth: int = MAX_DEPTH) -> Certificate:
    """Cover ``[0, 1]`` with pieces on which a sufficient condition holds.

    A ``holds`` verdict means the minimum of ``f`` over the constraint region
    is at least ``target_c``.
    """
    _check_supported(p)
    try:
        strategy = STRATEGIES[strategy]
    except KeyError:
        raise ReductionError(f"unknown strategy {strategy!r}") from None
    if strategy == "grid_with_margin":
        return _grid_verify(p, resolution)
    return _interval_verify(p, max_depth)


def replay_certificate(cert: Certificate) -> tuple[bool, str]:
    """Independently re-check a certificate; returns ``(ok, message)``."""
    p = cert.problem
    if cert.verdict == "fails_at":
        x, y = cert.point
        v = f_gkl(p, x, y)
        q = _Point(p, x, y)
        ok = _lt(v, p.target_c) and 0 <= q.lift(y) <= q.gp - q.rp
        return ok, f"f({_point_str(x)}, {_point_str(y)}) = {_point_str(v)} < {_point_str(p.target_c)}"
    if cert.strategy == "grid_with_margin":
        again = _grid_verify(p, cert.resolution or GRID_RESOLUTION)
        same = again.verdict == cert.verdict and len(again.records) == len(cert.records) and all(
            a.condition == b.condition and a.x_lo == b.x_lo and a.x_hi == b.x_hi
            and abs(a.margin - b.margin) <= 1e-9 * max(1.0, abs(b.margin))
            for a, b in zip(again.records, cert.records))
        return same, "grid re-run " + ("matches" if same else "differs")
    recs = sorted(cert.records, key=lambda r: r.x_lo)
    if cert.verdict == "holds":
        if not recs or recs[0].x_lo != 0 or recs[-1].x_hi != 1:
            return False, "records do not cover [0, 1]"
        for a, b in zip(recs, recs[1:]):
            if a.x_hi != b.x_lo:
                return False, f"gap at {a.x_hi}"
    for r in recs:
        if r.condition == "none":
            continue
        for c in r.condition.split(","):
            if interval_lower_bound(p, c, r.x_lo, r.x_hi) < 0:
                return False, f"{c} not certified on [{r.x_lo}, {r.x_hi}]"
    return True, f"{len(recs)} interval records re-checked"


# -- crossovers -------------------------------------------------------------------

def crossover(p: ReductionProblem, condition="x0", resolution: float = 1e-5) -> float:
    """Largest ``x0`` such that the condition holds on all of ``[0, x0]`` (sampled)."""
    xs = np.linspace(0.0, 1.0, int(round(1 / resolution)) + 1)
    if condition in ("x0", "x1", "x1prime", "y_low"):
        fn = lambda t: margin_curves(p, np.atleast_1d(t))[condition]
    else:
        fn = lambda t: appendix_curve(p, np.atleast_1d(t), condition)
    m = fn(xs)
    bad = np.nonzero(~(m >= -GRID_SLACK))[0]
    if len(bad) == 0:
        return 1.0
    i = bad[0]
    if i == 0:
        return 0.0
    a, b = xs[i - 1], xs[i]
    return float(brentq(lambda t: float(fn(t)[0]), a, b, xtol=1e-12))


def failure_region_end(p: ReductionProblem, condition="x1", resolution: float = 1e-5) -> float:
    """Smallest ``x1`` such that the condition holds on all of ``[x1, 1]`` (sampled)."""
    xs = np.linspace(0.0, 1.0, int(round(1 / resolution)) + 1)
    m = margin_curves(p, xs)[condition]
    bad = np.nonzero(~(m >= -GRID_SLACK))[0]
    if len(bad) == 0:
        return 0.0
    i = bad[-1]
    if i == len(xs) - 1:
        return 1.0
    fn = lambda t: float(margin_curves(p, np.atleast_1d(t))[condition][0])
    return float(brentq(fn, xs[i], xs[i + 1], xtol=1e-12))


# Published lower bounds for the (x ~ 0) ranges in the k = 3, l = r/3 family.
K3_TABLE = {0: Fraction(1), 1: Fraction(99, 100), 2: Fraction(99, 100), 3: Fraction(98, 100),
            4: Fraction(95, 100), 5: Fraction(91, 100), 6: Fraction(86, 100),
            7: Fraction(79, 100), 8: Fraction(72, 100), 9: Fraction(64, 100),
            10: Fraction(55, 100), 11: Fraction(46, 100), 12: Fraction(34, 100),
            13: Fraction(19, 100), 14: Fraction(14, 100), 15: Fraction(14, 100)}


def k3_family_problem(r: int, rho: BoundFunction = BOLLOBAS) -> ReductionProblem:
    if not 0 <= r <= 15:
        raise ReductionError("r must lie in 0..15")
    return k3_problem(3, Fraction(r, 3), rho, 2)


# -- the K3 + K2 lower bound ------------------------------------------------------

LOWER_BOUND_K3_K2 = Fraction(121423, 10**6)
ROOT_BRACKET = (Fraction(908638793, 10**9), Fraction(908638794, 10**9))


@dataclass
class ProofStep:
    name: str
    passed: bool
    detail: str

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class LowerBoundCertificate:
    bound: Fraction
    claimed: Fraction
    steps: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.steps) and self.bound > self.claimed

    def to_json(self) -> dict:
        return {"bound": str(self.bound), "bound_decimal": float(self.bound),
                "claimed": str(self.claimed), "passed": self.passed,
                "steps": [s.to_json() for s in self.steps]}


def lower_bound_k3_k2() -> tuple[Fraction, LowerBoundCertificate]:
    """Exact replay of the case analysis giving ``c(K3 + K2) > 0.121423``."""
    x, y, z = sympy.symbols("x y z", real=True)
    R = sympy.Rational
    steps = []

    def step(name, ok, detail):
        steps.append(ProofStep(name, bool(ok), detail))

    scaled = ((1 + x) * ((1 + x) ** 3 - y) + (1 - x) * ((1 - x) ** 3 + y)) / 16
    expr = (1 + x) ** 4 / 16 + (1 - x) ** 4 / 16 - x * y / 8
    step("objective", sympy.expand(scaled - expr) == 0,
         "f/16 = (1+x)^4/16 + (1-x)^4/16 - xy/8 with g = z^3, k = l = 1")

    lower = sympy.expand(((1 + x) ** 4 + (1 - x) ** 4) / 16 - R(1, 8))
    poly = sympy.Poly(lower, x)
    step("x<=0", all(cf >= 0 for cf in poly.coeffs()),
         f"for x <= 0 the value is at least 1/8 + {sympy.factor(lower)}")

    lin = expr.subs(y, (1 + x) ** 3 - R(16, 3) * x)
    d = sympy.diff(lin, x)
    quad = 27 * x ** 2 - 50 * x + 3
    step("linear-derivative", sympy.expand(d + quad / 24) == 0, "d/dx = -(27x^2 - 50x + 3)/24")
    # a convex quadratic is below zero on an interval iff it is at both ends
    qa, qb = quad.subs(x, R(1, 3)), quad.subs(x, 1)
    step("linear-monotone", qa < 0 and qb < 0, f"quadratic at 1/3 and 1: {qa}, {qb}")
    end = lin.subs(x, R(1, 3))
    step("linear-endpoint", end == R(5, 27), f"value at x = 1/3: {end}")

    # x = (1 - z^2)/3 turns sqrt(1 - 3x) into z
    fisher = R(4, 9) * (1 - z + 3 * x * (3 + z))
    mid = expr.subs(y, (1 + x) ** 3 - fisher).subs(x, (1 - z ** 2) / 3)
    P = 3 * z ** 6 + 4 * z ** 5 + 12 * z ** 4 - 4 * z ** 3 - 28 * z ** 2 + 40
    step("substitution", sympy.expand(mid - P / 216) == 0,
         "value = (3z^6 + 4z^5 + 12z^4 - 4z^3 - 28z^2 + 40)/216")
    h = 9 * z ** 4 + 10 * z ** 3 + 24 * z ** 2 - 6 * z - 28
    step("derivative", sympy.expand(sympy.diff(P / 216, z) - z * h / 108) == 0,
         "d/dz = z h(z)/108")
    h2 = sympy.diff(h, z, 2)
    step("convexity", sympy.expand(h2 - (R(119, 3) + (5 + 18 * z) ** 2 / 3)) == 0,
         "h'' = 119/3 + (5 + 18z)^2/3 > 0")
    step("h(0)<0", h.subs(z, 0) < 0, f"h(0) = {h.subs(z, 0)}")
    roots = sympy.Poly(h, z).count_roots(0, 1)
    step("unique-root", roots == 1, f"{roots} root(s) of h in [0, 1]")
    z0, z1 = ROOT_BRACKET
    hz0, hz1 = h.subs(z, R(z0.numerator, z0.denominator)), h.subs(z, R(z1.numerator, z1.denominator))
    step("bracket", hz0 < 0 < hz1, f"h(z0) = {float(hz0):.3e}, h(z1) = {float(hz1):.3e}")

    def P_mixed(a: Fraction, b: Fraction) -> Fraction:
        return (3 * a ** 6 + 4 * a ** 5 + 12 * a ** 4 - 4 * b ** 3 - 28 * b ** 2 + 40) / 216

    mixed = P_mixed(z0, z1)
    step("mixed-bound", mixed > LOWER_BOUND_K3_K2, f"mixed bound {float(mixed):.10f}")
    e0 = P_mixed(Fraction(0), Fraction(0))
    e1 = P_mixed(Fraction(1), Fraction(1))
    step("z-endpoints", e0 == Fraction(5, 27) and e1 == Fraction(1, 8),
         f"z = 0 gives {e0}, z = 1 gives {e1}")
    s_check = all(fisher_k3_in_s(s) == FISHER_K3(1 + (1 - s * s) / 3)
                  for s in (Fraction(0), Fraction(1, 2), Fraction(3, 5), Fraction(1)))
    step("fisher-form", s_check, "middle branch agrees with 4/9 (4 - 3s^2 - s^3)")

    bound = min(Fraction(5, 27), mixed, Fraction(1, 8))
    return bound, LowerBoundCertificate(bound, LOWER_BOUND_K3_K2, steps)


def k3_k2_problem() -> ReductionProblem:
    """The same bound phrased as a k = 1 reduction problem with c = 16 * 0.121423."""
    return k3_problem(1, 1, FISHER_K3, 16 * LOWER_BOUND_K3_K2)
