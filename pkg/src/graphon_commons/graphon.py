"""Step graphons and homomorphism densities.

A step graphon is a weight vector on ``n`` blocks plus a symmetric ``n x n``
value matrix.  Densities are evaluated with the partition-function sum over
all maps from the vertices of a graph into the blocks, one connected
component at a time.  When every input is rational the result is an exact
:class:`fractions.Fraction`; otherwise it is an ``mpmath`` float carrying
``PRECISION`` bits together with a bound on the accumulated rounding error.
"""

from __future__ import annotations

import functools
import itertools
import json
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import mpmath
import numpy as np

from .graphs import Graph, components

PRECISION = 113
DEFAULT_BUDGET = 10**9
WEIGHT_TOL = 1e-12

mp = mpmath.MPContext()
mp.prec = PRECISION


class GraphonError(ValueError):
    pass


class BudgetExceeded(GraphonError):
    """The partition-function sum would need more terms than allowed."""


class ModeMismatch(GraphonError):
    """Exact output requested from a graphon with non-rational entries."""


def parse_number(x):
    """Rationals (ints, Fractions, ``"p/q"`` strings) stay exact; anything
    else becomes a high-precision mpmath float."""
    if isinstance(x, bool):
        raise GraphonError("booleans are not graphon entries")
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        try:
            return Fraction(s)
        except ValueError:
            try:
                return mp.mpf(s)
            except (ValueError, TypeError) as exc:
                raise GraphonError(f"cannot parse number {x!r}") from exc
    if isinstance(x, float):
        # decimal literal intent: 0.28 means 28/100 to 113 bits, not the nearest double
        return mp.mpf(repr(x))
    if hasattr(x, "_mpf_") or isinstance(x, np.floating):
        return mp.mpf(x)
    raise GraphonError(f"unsupported number type {type(x).__name__}")


def format_number(x):
    if isinstance(x, Fraction):
        return str(x)
    return mpmath.nstr(x, 30, strip_zeros=False)


def to_mp(x):
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpf(x)


@dataclass(frozen=True)
class StepGraphon:
    weights: tuple
    values: tuple

    def __post_init__(self):
        w = tuple(parse_number(a) for a in self.weights)
        n = len(w)
        if n == 0:
            raise GraphonError("a step graphon needs at least one block")
        rows = tuple(tuple(parse_number(a) for a in row) for row in self.values)
        if len(rows) != n or any(len(r) != n for r in rows):
            raise GraphonError("value matrix must be n x n with n = number of weights")
        for a in w:
            if a < 0:
                raise GraphonError("weights must be nonnegative")
        total = sum(w, Fraction(0))
        if all(isinstance(a, Fraction) for a in w):
            if total != 1:
                raise GraphonError(f"weights sum to {total}, not 1")
        elif abs(total - 1) > WEIGHT_TOL:
            raise GraphonError(f"weights sum to {format_number(total)}, not 1")
        for i in range(n):
            for j in range(n):
                a = rows[i][j]
                if a < 0 or a > 1:
                    raise GraphonError("values must lie in [0, 1]")
                if rows[j][i] != a:
                    raise GraphonError("value matrix must be symmetric")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "values", rows)

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def mode(self) -> str:
        entries = itertools.chain(self.weights, *self.values)
        return "rational" if all(isinstance(a, Fraction) for a in entries) else "float"

    def as_float_mode(self) -> StepGraphon:
        return StepGraphon(tuple(to_mp(a) for a in self.weights),
                           tuple(tuple(to_mp(a) for a in r) for r in self.values))

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Double-precision copies of the weights and the value matrix."""
        z = np.array([float(a) for a in self.weights])
        A = np.array([[float(a) for a in r] for r in self.values])
        return z, A

    def to_json(self) -> dict:
        return {"weights": [format_number(a) for a in self.weights],
                "matrix": [[format_number(a) for a in r] for r in self.values]}

    @classmethod
    def from_json(cls, data: dict | str) -> StepGraphon:
        if isinstance(data, str):
            data = json.loads(data)
        try:
            return cls(tuple(data["weights"]), tuple(tuple(r) for r in data["matrix"]))
        except (KeyError, TypeError) as exc:
            raise GraphonError(f"bad graphon JSON: {exc}") from exc


def constant(c) -> StepGraphon:
    return StepGraphon((1,), ((c,),))


def complement(w: StepGraphon) -> StepGraphon:
    return StepGraphon(w.weights, tuple(tuple(1 - a for a in r) for r in w.values))


def split_block(w: StepGraphon, i: int) -> StepGraphon:
    """Refine block ``i`` into two halves with identical rows; densities are unchanged."""
    n = w.n
    half = w.weights[i] / 2
    weights = list(w.weights[:i]) + [half, half] + list(w.weights[i + 1:])
    src = list(range(i + 1)) + list(range(i, n))
    values = tuple(tuple(w.values[a][b] for b in src) for a in src)
    return StepGraphon(tuple(weights), values)


@dataclass(frozen=True)
class Density:
    value: object
    mode: str
    error_bound: object = 0

    def __float__(self):
        return float(self.value)

    def to_json(self) -> dict:
        out = {"value": format_number(self.value), "mode": self.mode}
        if self.mode == "float":
            out["error_bound"] = mpmath.nstr(self.error_bound, 5)
        return out


def _resolve_mode(w: StepGraphon, mode: str | None) -> StepGraphon:
    if mode is None:
        return w if w.mode == "rational" else w.as_float_mode()
    if mode == "rational":
        if w.mode != "rational":
            raise ModeMismatch("exact densities need a graphon with rational entries")
        return w
    if mode == "float":
        return w.as_float_mode()
    raise GraphonError(f"unknown mode {mode!r}")


def _component_sum(g: Graph, weights, values, exact: bool):
    """Partition-function sum for one component, via an odometer over block assignments."""
    n = len(weights)
    one = Fraction(1) if exact else mp.mpf(1)
    terms = []
    for f in itertools.product(range(n), repeat=g.vertex_count):
        t = one
        for b in f:
            t *= weights[b]
        if not t:
            continue
        for u, v in g.edges:
            t *= values[f[u]][f[v]]
            if not t:
                break
        terms.append(t)
    if exact:
        return sum(terms, Fraction(0))
    return mp.fsum(terms)


def density(h: Graph, w: StepGraphon, *, mode: str | None = None,
            budget: int = DEFAULT_BUDGET) -> Density:
    """Homomorphism density t(h, w), factorized over the components of ``h``."""
    w = _resolve_mode(w, mode)
    exact = w.mode == "rational"
    counts = Counter(components(h))
    terms = sum(w.n ** c.vertex_count for c in counts)
    if terms > budget:
        raise BudgetExceeded(f"{terms} assignment terms exceed the budget of {budget}")
    value = Fraction(1) if exact else mp.mpf(1)
    rel_err = 0
    for comp, mult in sorted(counts.items(), key=lambda kv: (kv[0].vertex_count, kv[0].edges)):
        s = _component_sum(comp, w.weights, w.values, exact)
        value *= s ** mult
        if not exact:
            # each term: v + e roundings; fsum adds one more; powering adds mult
            rel_err += mult * (comp.vertex_count + comp.e + 2)
    if exact:
        return Density(value, "rational", 0)
    err = value * rel_err * mp.mpf(2) ** (1 - PRECISION)
    return Density(value, "float", err)


def mono_density(h: Graph, w: StepGraphon, *, mode: str | None = None,
                 budget: int = DEFAULT_BUDGET) -> Density:
    """t(h, w) + t(h, 1 - w), an upper bound on the Ramsey multiplicity constant."""
    a = density(h, w, mode=mode, budget=budget)
    b = density(h, complement(w), mode=mode, budget=budget)
    return Density(a.value + b.value, a.mode, a.error_bound + b.error_bound)


def _matpow_trace(M, n, one, zero):
    size = len(M)

    def mul(X, Y):
        return [[sum((X[i][k] * Y[k][j] for k in range(size)), zero) for j in range(size)]
                for i in range(size)]

    result = [[one if i == j else zero for j in range(size)] for i in range(size)]
    base = M
    while n:
        if n & 1:
            result = mul(result, base)
        base = mul(base, base)
        n >>= 1
    return sum((result[i][i] for i in range(size)), zero)


def cycle_density(n: int, w: StepGraphon, *, mode: str | None = None) -> Density:
    """t(C_n, w) as the trace of the n-th power of diag(weights) @ values."""
    if n < 3:
        raise GraphonError("cycles need at least 3 vertices")
    w = _resolve_mode(w, mode)
    exact = w.mode == "rational"
    one, zero = (Fraction(1), Fraction(0)) if exact else (mp.mpf(1), mp.mpf(0))
    M = [[w.weights[i] * w.values[i][j] for j in range(w.n)] for i in range(w.n)]
    value = _matpow_trace(M, n, one, zero)
    if exact:
        return Density(value, "rational", 0)
    steps = 2 * n.bit_length() * (w.n + 1)
    return Density(value, "float", abs(value) * steps * mp.mpf(2) ** (1 - PRECISION) + mp.mpf(2) ** (-PRECISION))


def cycle_density_spectral(n: int, w: StepGraphon) -> float:
    """Double-precision t(C_n, w) from the eigenvalues of the symmetrized operator."""
    z, A = w.arrays()
    s = np.sqrt(z)
    lam = np.linalg.eigvalsh(s[:, None] * A * s[None, :])
    return float(np.sum(lam ** n))


# -- double-precision path used by searches ---------------------------------

_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


@functools.lru_cache(maxsize=256)
def _component_counts(h: Graph) -> tuple:
    return tuple(Counter(components(h)).items())


@functools.lru_cache(maxsize=256)
def _einsum_plan(g: Graph, n: int, batched: bool):
    if g.vertex_count >= len(_LETTERS):
        raise GraphonError("component too large for the einsum path")
    b = _LETTERS[-1] if batched else ""
    subs = [b + _LETTERS[v] for v in range(g.vertex_count)]
    subs += [b + _LETTERS[u] + _LETTERS[v] for u, v in g.edges]
    expr = ",".join(subs) + "->" + b
    if n ** g.vertex_count <= 4096:
        # direct summation beats path planning for tiny components
        return expr, False
    zs, As = (2, n), (2, n, n)
    shapes = [np.empty(zs if batched else n)] * g.vertex_count
    shapes += [np.empty(As if batched else (n, n))] * g.e
    return expr, np.einsum_path(expr, *shapes, optimize="greedy")[0]


def _einsum_density(g: Graph, z: np.ndarray, A: np.ndarray, batched: bool = False):
    expr, path = _einsum_plan(g, z.shape[-1], batched)
    operands = [z] * g.vertex_count + [A] * g.e
    return np.einsum(expr, *operands, optimize=path)


def density_float(h: Graph, z, A):
    """Fast double-precision t(h, W_{z,A}).

    With ``z`` of shape ``(B, n)`` and ``A`` of shape ``(B, n, n)`` a batch of
    ``B`` graphons is evaluated at once.
    """
    z = np.asarray(z, dtype=float)
    A = np.asarray(A, dtype=float)
    batched = z.ndim == 2
    out = np.ones(z.shape[0]) if batched else 1.0
    for comp, mult in _component_counts(h):
        out = out * _einsum_density(comp, z, A, batched) ** mult
    return out if batched else float(out)


def mono_density_float(h: Graph, z, A):
    A = np.asarray(A, dtype=float)
    return density_float(h, z, A) + density_float(h, z, 1.0 - A)


def edge_density(w: StepGraphon) -> Density:
    return density(Graph(2, ((0, 1),)), w)
