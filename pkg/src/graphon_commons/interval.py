"""Outward-rounded interval helpers and second-order jets over intervals.

Intervals come from :mod:`mpmath`'s interval context.  A :class:`Jet` carries
enclosures of a function's value and first two derivatives, which is what
the Taylor lower bound in :func:`taylor_lower_bound` needs.
"""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath
from mpmath.ctx_iv import MPIntervalContext

ctx = MPIntervalContext()
ctx.prec = 53

INF = ctx.inf


def interval(lo, hi=None):
    """Enclosure of the closed interval ``[lo, hi]`` (``hi`` defaults to ``lo``)."""
    if hi is None:
        hi = lo
    return ctx.mpf([_lower(lo), _upper(hi)])


def _as_iv(x):
    if isinstance(x, Fraction):
        return ctx.mpf(x.numerator) / x.denominator
    return ctx.convert(x)


def _lower(x):
    return _as_iv(x).a


def _upper(x):
    return _as_iv(x).b


def convert(x):
    return _as_iv(x)


def lo(x) -> float:
    return float(x.a)


def hi(x) -> float:
    return float(x.b)


def to_fraction(end) -> Fraction:
    """Exact rational value of a finite interval endpoint."""
    m = mpmath.mpf(end._mpi_[0])
    if not mpmath.isfinite(m):
        raise ValueError("endpoint is not finite")
    man, exp = m.man_exp
    return Fraction(man) * Fraction(2) ** exp


def hull(a, b):
    return ctx.mpf([min(a.a, b.a), max(a.b, b.b)])


def nonneg(x):
    """Clip an enclosure of a quantity known to be >= 0."""
    if x.b < 0:
        raise ValueError("enclosure of a nonnegative quantity lies below zero")
    if x.a < 0:
        return ctx.mpf([0, x.b])
    return x


def _exponent(e):
    if isinstance(e, Fraction) and e.denominator == 1:
        return int(e)
    if isinstance(e, float) and e.is_integer():
        return int(e)
    return e


def ipow(base, e):
    """``base ** e`` for a nonnegative base enclosure, with ``0 ** 0 = 1``."""
    e = _exponent(e)
    if e == 0:
        return ctx.mpf(1)
    base = nonneg(base)
    if isinstance(e, int):
        if e > 0:
            return base ** e
        if base.a == 0:
            return ctx.mpf([0, INF]) if base.b == 0 else ctx.mpf([(1 / base.b ** -e).a, INF])
        return 1 / base ** -e
    ee = _as_iv(e)
    if base.a == 0:
        if e < 0:
            return ctx.mpf([(base.b ** ee).a if base.b > 0 else 0, INF])
        if base.b == 0:
            return ctx.mpf(0)
        return ctx.mpf([0, (base.b ** ee).b])
    return base ** ee


class Jet:
    """Value, first and second derivative enclosures of a scalar function."""

    __slots__ = ("v", "d1", "d2")

    def __init__(self, v, d1=0, d2=0):
        self.v = _as_iv(v)
        self.d1 = _as_iv(d1)
        self.d2 = _as_iv(d2)

    @classmethod
    def variable(cls, x):
        return cls(x, 1, 0)

    @staticmethod
    def _lift(o):
        return o if isinstance(o, Jet) else Jet(o)

    def __add__(self, o):
        o = self._lift(o)
        return Jet(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.v, -self.d1, -self.d2)

    def __sub__(self, o):
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return self._lift(o) - self

    def __mul__(self, o):
        o = self._lift(o)
        return Jet(self.v * o.v,
                   self.d1 * o.v + self.v * o.d1,
                   self.d2 * o.v + 2 * self.d1 * o.d1 + self.v * o.d2)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = self._lift(o)
        q = self.v / o.v
        q1 = (self.d1 - q * o.d1) / o.v
        q2 = (self.d2 - 2 * q1 * o.d1 - q * o.d2) / o.v
        return Jet(q, q1, q2)

    def __rtruediv__(self, o):
        return self._lift(o) / self

    def __pow__(self, e):
        e = _exponent(e)
        if e == 0:
            return Jet(1)
        ee = e if isinstance(e, int) else _as_iv(e)
        f0 = ipow(self.v, e)
        f1 = ee * ipow(self.v, e - 1) if e != 1 else ctx.mpf(1)
        f2 = ee * (ee - 1) * ipow(self.v, e - 2) if e not in (1, 2) else ctx.mpf(2 if e == 2 else 0)
        return Jet(f0, f1 * self.d1, f2 * self.d1 * self.d1 + f1 * self.d2)


def taylor_lower_bound(value_at_a, slope_at_a, curvature, width):
    """Lower bound of ``m`` on ``[a, a + width]`` from enclosures of ``m(a)``,
    ``m'(a)`` and ``m''`` over the whole interval.

    Minimizes ``A + B h + C h^2 / 2`` over ``0 <= h <= width`` where A, B, C
    are the lower ends of the three enclosures.
    """
    ends = [_as_iv(value_at_a).a, _as_iv(slope_at_a).a, _as_iv(curvature).a]
    if any(not math.isfinite(float(t)) for t in ends):
        return -INF
    A, B, C = (ctx.mpf(t) for t in ends)
    w = _as_iv(width)
    candidates = [A, A + B * w + C * w * w / 2]
    if C > 0 and B < 0:
        vertex = -B / C
        if not vertex.a >= w.b:
            candidates.append(A - B * B / (2 * C))
    return min(c.a for c in candidates)
