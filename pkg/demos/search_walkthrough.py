"""Grid scan plus simplex refinement on the three-block family, step by step.

Shows the coarse landscape of t(H,W) + t(H,1-W) for H = K3 + K2 and for the
paw, then the refined optimum and an exact re-check at rounded parameters.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from graphon_commons import graphs
from graphon_commons.commonality import (ConstructionFamily, check_uncommon, search_witness,
                                         three_block_zy)
from graphon_commons.graphon import mono_density_float


def landscape(h, side=9):
    fam = ConstructionFamily("three_block_zy")
    zs = np.linspace(0.05, 0.45, side)
    ys = np.linspace(0.0, 1.0, side)
    print("      y=" + " ".join(f"{y:6.3f}" for y in ys))
    for z in zs:
        row = [mono_density_float(h, *fam.arrays((z, y))) for y in ys]
        print(f"z={z:.3f} " + " ".join(f"{v:6.3f}" for v in row))


def walk(name, h):
    print(f"\n== {name}: threshold {float(2 * Fraction(1, 2) ** h.e):.6f}")
    landscape(h)
    res = search_witness(h, seed=0)
    z, y = res.params
    print(f"refined: z={z:.6f} y={y:.6f} value={res.value:.8f} ({res.evaluations} evaluations)")
    # rational re-check at six decimals
    zq, yq = Fraction(f"{z:.6f}"), Fraction(f"{y:.6f}")
    rep = check_uncommon(h, three_block_zy(zq, yq))
    print(f"exact at ({zq}, {yq}): {float(rep.mono_value):.10f} -> {rep.verdict}")


if __name__ == "__main__":
    walk("K3 + K2", graphs.triangles_and_edges(1, 1))
    walk("paw", graphs.paw())
    walk("K3", graphs.triangle())
