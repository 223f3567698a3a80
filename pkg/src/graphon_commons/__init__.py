"""Homomorphism densities on step graphons and certified checks of graph commonality."""

from __future__ import annotations

from .bounds import BOLLOBAS, FISHER_K3, ZERO, BoundFunction, power, rho_k3
from .commonality import (ConstructionFamily, WitnessReport, check_not_strongly_common,
                          check_uncommon, chromatic_strongly_common_test, search_witness,
                          three_block_zy, turan, two_block_diag_p, uncommon_family_bound,
                          uncommon_odd_cycle_family)
from .correlation import (Verdict, check_correlated_common, check_union_with_sidorenko,
                          classify_k3_k2_union, holder_reduce, triangle_vertex_tree_uncommon)
from .graphon import (Density, StepGraphon, complement, cycle_density, density, mono_density)
from .graphs import (CorrelationRecord, Graph, K3Tree, chromatic_number, components,
                     k3_tree_correlation, make_standard, realize_k3_tree)
from .reduction import (Certificate, ReductionProblem, f_gkl, lower_bound_k3_k2,
                        replay_certificate, verify_reduction)

__version__ = "0.1.0"
