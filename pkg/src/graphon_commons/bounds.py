"""Closed-form bound functions on [0, 2].

A :class:`BoundFunction` plays the role of ``g`` (a lower bound on the scaled
monochromatic density) or ``rho`` (a supersaturation floor) in the reduction.
Every shipped kind is nonnegative and non-decreasing, so an enclosure over an
interval only needs the two endpoint values.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import interval as iv
from .graphon import mp, parse_number, to_mp

KINDS = ("power", "fisher_k3", "bollobas_linear", "piecewise_max", "zero")
THIRD = Fraction(1, 3)


class BoundError(ValueError):
    pass


def _exact_sqrt(q: Fraction):
    """sqrt(q) as a Fraction when q is a rational square, else None."""
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def fisher_k3_in_s(s):
    """The middle branch written through ``s = sqrt(1 - 3x)``.

    Substituting ``x = (1 - s^2)/3`` turns the branch into the polynomial
    ``4/9 (4 - 3 s^2 - s^3)``, so rational ``s`` gives a rational value.
    """
    return Fraction(4, 9) * (4 - 3 * s * s - s * s * s) if isinstance(s, Fraction) \
        else mp.mpf(4) / 9 * (4 - 3 * s * s - s ** 3)


def rho_k3(x):
    """Triangle supersaturation floor at edge parameter ``1 + x``, for x in [-1, 1]."""
    return FISHER_K3(1 + x)


def _number(z):
    if isinstance(z, (int, Fraction)) and not isinstance(z, bool):
        return Fraction(z)
    return mp.mpf(z) if not isinstance(z, Fraction) else z


@dataclass(frozen=True)
class BoundFunction:
    kind: str
    exponent: object = None
    parts: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise BoundError(f"unknown bound kind {self.kind!r}")
        if self.kind == "power":
            if self.exponent is None:
                raise BoundError("power needs an exponent")
            e = parse_number(self.exponent)
            if e < 0:
                raise BoundError("power exponent must be nonnegative")
            object.__setattr__(self, "exponent", e)
        if self.kind == "piecewise_max":
            if not self.parts:
                raise BoundError("piecewise_max needs at least one part")
            object.__setattr__(self, "parts", tuple(self.parts))

    # -- evaluation -----------------------------------------------------------

    def __call__(self, z):
        if isinstance(z, np.ndarray):
            return self._array(z.astype(float))
        return self._scalar(_number(z))

    def _scalar(self, z):
        k = self.kind
        if k == "zero":
            return Fraction(0) if isinstance(z, Fraction) else mp.mpf(0)
        if k == "power":
            e = self.exponent
            if e == 0:
                return Fraction(1) if isinstance(z, Fraction) else mp.mpf(1)
            if isinstance(z, Fraction) and isinstance(e, Fraction) and e.denominator == 1:
                return z ** int(e)
            if z == 0:
                return mp.mpf(0)
            return to_mp(z) ** to_mp(e)
        if k == "bollobas_linear":
            v = 16 * (z - 1) / 3
            return v if v > 0 else v * 0
        if k == "fisher_k3":
            x = z - 1
            if x < 0:
                return x * 0
            if 3 * x > 1:
                return 16 * x / 3
            if isinstance(x, Fraction):
                s = _exact_sqrt(1 - 3 * x)
                if s is not None:
                    return fisher_k3_in_s(s)
                x = to_mp(x)
            s = mp.sqrt(1 - 3 * x)
            return mp.mpf(4) / 9 * (1 - s + 3 * x * (3 + s))
        vals = [p._scalar(z) for p in self.parts]
        return max(vals)

    def _array(self, z: np.ndarray) -> np.ndarray:
        k = self.kind
        if k == "zero":
            return np.zeros_like(z)
        if k == "power":
            return np.power(z, float(self.exponent))
        if k == "bollobas_linear":
            return np.maximum(0.0, 16.0 * (z - 1.0) / 3.0)
        if k == "fisher_k3":
            x = z - 1.0
            s = np.sqrt(np.clip(1.0 - 3.0 * x, 0.0, None))
            mid = 4.0 / 9.0 * (1.0 - s + 3.0 * x * (3.0 + s))
            return np.where(x < 0, 0.0, np.where(x > 1.0 / 3.0, 16.0 * x / 3.0, mid))
        return np.max(np.stack([p._array(z) for p in self.parts]), axis=0)

    # -- interval enclosures --------------------------------------------------

    def _thin(self, z: Fraction):
        """Rigorous enclosure of the value at an exact point."""
        k = self.kind
        Z = iv.convert(z)
        if k == "zero":
            return iv.convert(0)
        if k == "power":
            return iv.ipow(Z, self.exponent)
        if k == "bollobas_linear":
            return iv.convert(0) if z <= 1 else 16 * (Z - 1) / 3
        if k == "fisher_k3":
            x = z - 1
            if x < 0:
                return iv.convert(0)
            if x > THIRD:
                return 16 * iv.convert(x) / 3
            X = iv.convert(x)
            s = iv.ctx.sqrt(iv.nonneg(1 - 3 * X))
            return 4 * (1 - s + 3 * X * (3 + s)) / 9
        vals = [p._thin(z) for p in self.parts]
        return iv.ctx.mpf([max(v.a for v in vals), max(v.b for v in vals)])

    def enclose(self, lo: Fraction, hi: Fraction):
        """Enclosure of the range over ``[lo, hi]``, using monotonicity."""
        lo, hi = Fraction(lo), Fraction(hi)
        if lo > hi:
            raise BoundError("empty interval")
        a, b = self._thin(lo), self._thin(hi)
        return iv.ctx.mpf([a.a, b.b])

    def jet(self, z: iv.Jet):
        """Second-order jet of ``self(z)``, or None where the function is not smooth."""
        k = self.kind
        if k == "zero":
            return iv.Jet(0)
        if k == "power":
            if self.exponent in (0, 1) or self.exponent >= 2 or z.v.a > 0:
                return z ** self.exponent
            return None
        lo, hi = iv.to_fraction(z.v.a), iv.to_fraction(z.v.b)
        if k == "bollobas_linear":
            if lo >= 1:
                return (z - 1) * Fraction(16, 3)
            if hi <= 1:
                return iv.Jet(0)
            return None
        if k == "fisher_k3":
            if hi <= 1:
                return iv.Jet(0)
            if lo >= 1 + THIRD:
                return (z - 1) * Fraction(16, 3)
            if lo >= 1 and hi < 1 + THIRD:
                x = z - 1
                s = (1 - 3 * x) ** Fraction(1, 2)
                return (1 - s + 3 * x * (3 + s)) * Fraction(4, 9)
            return None
        return None

    @property
    def breakpoints(self) -> tuple:
        """Points of [0, 2] where the formula switches branch."""
        if self.kind == "bollobas_linear":
            return (Fraction(1),)
        if self.kind == "fisher_k3":
            return (Fraction(1), 1 + THIRD)
        if self.kind == "piecewise_max":
            return tuple(sorted({b for p in self.parts for b in p.breakpoints}))
        return ()

    # -- serialization --------------------------------------------------------

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == "power":
            out["exponent"] = str(self.exponent) if isinstance(self.exponent, Fraction) \
                else mp.nstr(self.exponent, 30)
        if self.kind == "piecewise_max":
            out["parts"] = [p.to_json() for p in self.parts]
        return out

    @classmethod
    def from_json(cls, data) -> BoundFunction:
        if isinstance(data, str):
            data = json.loads(data)
        try:
            kind = data["kind"]
            parts = tuple(cls.from_json(p) for p in data.get("parts", ()))
            return cls(kind, data.get("exponent"), parts)
        except (KeyError, TypeError) as exc:
            raise BoundError(f"bad bound-function JSON: {exc}") from exc


def power(m) -> BoundFunction:
    return BoundFunction("power", m)


FISHER_K3 = BoundFunction("fisher_k3")
BOLLOBAS = BoundFunction("bollobas_linear")
ZERO = BoundFunction("zero")
