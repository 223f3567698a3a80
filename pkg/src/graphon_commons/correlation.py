"""Rule-based classification of triangle/edge unions and correlated graphs.

Every verdict names the rule that produced it and a certificate reference.
:func:`resolve_certificate` turns a reference back into a concrete run
(a reduction certificate, a witness report, ...) so verdicts can be audited.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

from . import graphs
from .commonality import (THM14_SLOPE, check_uncommon, disjoint_union_witness,
                          three_block_zy, triangle_tree_witness)
from .graphs import CorrelationRecord, Graph, K3Tree
from .reduction import k3_family_problem, k3_problem, verify_reduction

STATUSES = ("common", "uncommon", "unknown")

# explicit three-block witnesses for the small unions that the two-block rule misses
THREE_BLOCK_WITNESSES = {
    (1, 1): ("0.263661", "0.2177"),
    (2, 3): ("0.28", "0.42"),
}


class CorrelationError(ValueError):
    pass


@dataclass(frozen=True)
class HolderReduction:
    """Exponent bookkeeping that lifts the three-triangle base case to ``k >= 4``."""

    k: int
    l: Fraction
    p: Fraction
    q: Fraction
    alpha: Fraction
    r: int

    def check(self) -> None:
        if 3 * self.l / self.k + self.alpha != Fraction(self.r, 3):
            raise CorrelationError("3l/k + alpha != r/3")
        if not 0 <= self.r <= 15:
            raise CorrelationError(f"r = {self.r} outside 0..15")
        if self.alpha * self.q > 1:
            raise CorrelationError("alpha * q exceeds 1")
        if not 0 <= self.alpha < Fraction(1, 3):
            raise CorrelationError("alpha outside [0, 1/3)")

    def to_json(self) -> dict:
        return {"k": self.k, "l": str(self.l), "p": str(self.p), "q": str(self.q),
                "alpha": str(self.alpha), "r": self.r}


def holder_reduce(k: int, l) -> HolderReduction:
    if not isinstance(k, int) or k < 4:
        raise CorrelationError("the reduction needs an integer k >= 4")
    l = Fraction(l)
    if not 0 <= l <= Fraction(5 * k, 3):
        raise CorrelationError(f"l = {l} outside [0, 5k/3]")
    t = 9 * l / k
    r = math.ceil(t)
    h = HolderReduction(k, l, Fraction(k, 3), Fraction(k, k - 3), (r - t) / 3, r)
    h.check()
    return h


@dataclass
class Verdict:
    graph: Graph | None
    status: str
    rule: str
    certificate_ref: str | None = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in STATUSES:
            raise CorrelationError(f"unknown status {self.status!r}")

    def to_json(self) -> dict:
        out = {"graph": self.graph.to_json() if self.graph is not None else None,
               "status": self.status, "rule": self.rule, "certificate_ref": self.certificate_ref}
        if self.details:
            out["details"] = {k: str(v) for k, v in self.details.items()}
        return out


def _is_int(x) -> bool:
    return isinstance(x, Rational) and not isinstance(x, bool) and Fraction(x).denominator == 1


# -- rules ------------------------------------------------------------------------

def _common_rules(k, l) -> list[tuple[str, str | None]]:
    """Every rule proving that a (K3, k, l)-correlated graph is common."""
    out = []
    if not (_is_int(k) and _is_int(l)) or l < 0:
        return out
    k, l = int(k), int(l)
    if k == 2 and l <= 2:
        out.append(("reduction_k2", f"reduction:k=2,l={l}"))
    if k == 3 and l <= 5:
        out.append(("reduction_k3", f"reduction:k=3,r={3 * l}"))
    if k >= 4 and 3 * l <= 5 * k:
        r = holder_reduce(k, l).r
        out.append(("holder_from_k3", f"holder:k={k},l={l};reduction:k=3,r={r}"))
    return out


def _union_rules(k: int, l: int) -> list[tuple[str, str, str | None]]:
    """(status, rule, certificate_ref) for every rule that fires on k K3 + l K2."""
    out = [("common", rule, ref) for rule, ref in _common_rules(k, l)]
    if k == 0:
        out.append(("common", "edges_only", None))
    if k == 1 and l == 0:
        out.append(("common", "goodman", None))
    if (k, l) in THREE_BLOCK_WITNESSES:
        z, y = THREE_BLOCK_WITNESSES[(k, l)]
        out.append(("uncommon", "three_block_witness", f"three_block:k={k},l={l},z={z},y={y}"))
    if k >= 1 and l >= math.ceil(THM14_SLOPE * k):
        out.append(("uncommon", "two_block_witness", f"two_block:k={k},l={l}"))
    return out


def _pick(graph, fired) -> Verdict:
    statuses = {s for s, _, _ in fired}
    if len(statuses) > 1:
        raise CorrelationError(f"contradictory rules fired: {fired}")
    if not fired:
        return Verdict(graph, "unknown", "no_rule")
    status, rule, ref = fired[0]
    return Verdict(graph, status, rule, ref)


def classify_k3_k2_union(k: int, l: int) -> Verdict:
    """Status of ``(k K3) + (l K2)`` from the shipped rules."""
    if k < 0 or l < 0:
        raise CorrelationError("k and l must be nonnegative")
    return _pick(graphs.triangles_and_edges(k, l), _union_rules(k, l))


def rule_conflicts(k_max: int = 20, l_max: int = 40) -> list[tuple[int, int]]:
    """Pairs where both a common and an uncommon rule fire (should be empty)."""
    bad = []
    for k in range(k_max + 1):
        for l in range(l_max + 1):
            if len({s for s, _, _ in _union_rules(k, l)}) > 1:
                bad.append((k, l))
    return bad


def disjoint_edge_bounds(k: int) -> tuple[int, int]:
    """Largest l known to keep k K3 + l K2 common and smallest l known to make it uncommon."""
    if k < 1:
        raise CorrelationError("k must be at least 1")
    common = max((l for l in range(4 * k + 2) if classify_k3_k2_union(k, l).status == "common"),
                 default=None)
    uncommon = min(l for l in range(4 * k + 2) if classify_k3_k2_union(k, l).status == "uncommon")
    return common, uncommon


def _is_triangle(g: Graph) -> bool:
    return g.v == 3 and g.e == 3


def check_correlated_common(rec: CorrelationRecord) -> Verdict:
    if not _is_triangle(rec.base_graph):
        raise CorrelationError("only triangle base graphs are supported")
    fired = [("common", rule, ref) for rule, ref in _common_rules(rec.power, rec.edge_exponent)]
    v = _pick(rec.subject, fired)
    v.details = {"k": rec.power, "l": rec.edge_exponent}
    return v


def check_union_with_sidorenko(t: K3Tree, sidorenko_edge_count: int) -> Verdict:
    """The glued graph plus a disjoint Sidorenko graph with the given edge count."""
    e2, v2 = t.e_count(2), t.v_count(2)
    if e2 < v2:
        raise CorrelationError("need e2 >= v2")
    if sidorenko_edge_count < 0:
        raise CorrelationError("edge count must be nonnegative")
    k = t.v_count(3)
    l = sidorenko_edge_count - e2 + v2
    h = graphs.realize_k3_tree(t)
    fired = [("common", rule, ref) for rule, ref in _common_rules(k, l)]
    v = _pick(h, fired)
    v.details = {"k": k, "l": l, "sidorenko_edges": sidorenko_edge_count}
    return v


def triangle_vertex_tree_uncommon(t: K3Tree) -> Verdict:
    if t.e_count(2) != 0:
        raise CorrelationError("triangles may only share single vertices")
    v3, v2 = t.v_count(3), t.v_count(2)
    h = graphs.realize_k3_tree(t)
    if v3 < 1 or Fraction(v2) < THM14_SLOPE * v3:
        return Verdict(h, "unknown", "no_rule", details={"v2": v2, "v3": v3})
    cert = triangle_tree_witness(t)
    if not cert.passed:
        return Verdict(h, "unknown", "witness_failed", details={"v2": v2, "v3": v3})
    return Verdict(h, "uncommon", "two_block_witness", "tree_witness",
                   details={"v2": v2, "v3": v3, "mono": cert.report.mono_value})


# -- certificate resolution ---------------------------------------------------------

def _fields(part: str) -> dict:
    kind, _, rest = part.partition(":")
    out = {"kind": kind}
    for item in filter(None, rest.split(",")):
        key, _, val = item.partition("=")
        out[key] = val
    return out


def resolve_certificate(ref: str, strategy: str = "grid") -> tuple[bool, list]:
    """Re-run everything a certificate reference points to.

    Returns ``(ok, artifacts)`` where ``artifacts`` holds the certificates or
    reports produced along the way.
    """
    ok, artifacts = True, []
    for part in ref.split(";"):
        f = _fields(part)
        kind = f["kind"]
        if kind == "reduction":
            k = int(f["k"])
            p = k3_family_problem(int(f["r"])) if k == 3 else k3_problem(k, int(f["l"]))
            cert = verify_reduction(p, strategy)
            ok &= cert.holds
            artifacts.append(cert)
        elif kind == "holder":
            artifacts.append(holder_reduce(int(f["k"]), Fraction(f["l"])))
        elif kind == "three_block":
            h = graphs.triangles_and_edges(int(f["k"]), int(f["l"]))
            rep = check_uncommon(h, three_block_zy(f["z"], f["y"]))
            ok &= rep.verdict == "uncommon_witness"
            artifacts.append(rep)
        elif kind == "two_block":
            cert = disjoint_union_witness(int(f["k"]), int(f["l"]))
            ok &= cert.passed
            artifacts.append(cert)
        else:
            raise CorrelationError(f"unknown certificate kind {kind!r}")
    return bool(ok), artifacts
