"""Finite simple graphs, standard constructors and K3-trees.

Vertices are the integers ``0..n-1``; edges are stored as sorted pairs in
lexicographic order so that equal graphs compare (and serialize) equally.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real

CHROMATIC_CAP = 12


class GraphError(ValueError):
    """Malformed graph or tree data."""


class GraphTooLarge(GraphError):
    """Raised when an exhaustive routine is asked to work above its cap."""


@dataclass(frozen=True)
class Graph:
    vertex_count: int
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        n = self.vertex_count
        if not isinstance(n, int) or n < 0:
            raise GraphError(f"vertex_count must be a nonnegative int, got {n!r}")
        canon = set()
        for e in self.edges:
            u, v = (int(a) for a in e)
            if u == v:
                raise GraphError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge {(u, v)} out of range for {n} vertices")
            pair = (min(u, v), max(u, v))
            if pair in canon:
                raise GraphError(f"duplicate edge {pair}")
            canon.add(pair)
        object.__setattr__(self, "edges", tuple(sorted(canon)))

    @property
    def v(self) -> int:
        return self.vertex_count

    @property
    def e(self) -> int:
        return len(self.edges)

    def adjacency(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.vertex_count)]
        for u, w in self.edges:
            adj[u].add(w)
            adj[w].add(u)
        return adj

    def relabel(self, perm) -> Graph:
        """Image of the graph under the vertex map ``i -> perm[i]``."""
        return Graph(self.vertex_count, tuple((perm[u], perm[w]) for u, w in self.edges))

    def to_json(self) -> dict:
        return {"vertices": self.vertex_count, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_json(cls, data: dict | str) -> Graph:
        if isinstance(data, str):
            data = json.loads(data)
        try:
            return cls(int(data["vertices"]), tuple(tuple(e) for e in data["edges"]))
        except (KeyError, TypeError) as exc:
            raise GraphError(f"bad graph JSON: {exc}") from exc

    def __str__(self):
        return f"Graph(v={self.v}, e={self.e})"


# -- constructors -----------------------------------------------------------

def complete(n: int) -> Graph:
    _need_positive(n)
    return Graph(n, tuple(itertools.combinations(range(n), 2)))


def cycle(n: int) -> Graph:
    if n < 3:
        raise GraphError("a cycle needs at least 3 vertices")
    return Graph(n, tuple((i, (i + 1) % n) for i in range(n)))


def path(n: int) -> Graph:
    """Path on ``n`` vertices (``n - 1`` edges)."""
    _need_positive(n)
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)))


def edge() -> Graph:
    return complete(2)


def triangle() -> Graph:
    return complete(3)


def paw() -> Graph:
    """Triangle 0-1-2 with the pendant edge 0-3."""
    return Graph(4, ((0, 1), (0, 2), (1, 2), (0, 3)))


def wheel5() -> Graph:
    """5-cycle on 0..4 plus the hub 5 joined to every rim vertex."""
    rim = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, 5) for i in range(5)]
    return Graph(6, tuple(rim + spokes))


def empty(n: int) -> Graph:
    return Graph(n, ())


def disjoint_union(graphs) -> Graph:
    offset = 0
    edges = []
    for g in graphs:
        edges.extend((u + offset, w + offset) for u, w in g.edges)
        offset += g.vertex_count
    return Graph(offset, tuple(edges))


def copies(g: Graph, times: int) -> Graph:
    """``times`` disjoint copies of ``g``."""
    if times < 0:
        raise GraphError("number of copies must be nonnegative")
    return disjoint_union([g] * times)


def triangles_and_edges(k: int, l: int) -> Graph:
    """The union of ``k`` triangles and ``l`` disjoint edges."""
    return disjoint_union([copies(triangle(), k), copies(edge(), l)])


def make_standard(kind: str, n: int | None = None, parts=None) -> Graph:
    """Dispatch on a constructor name (``complete``, ``cycle``, ``path``,
    ``paw``, ``wheel5``, ``disjoint_union``)."""
    kind = kind.lower()
    if kind in ("complete", "cycle", "path"):
        if n is None:
            raise GraphError(f"{kind} needs n")
        return {"complete": complete, "cycle": cycle, "path": path}[kind](n)
    if kind == "paw":
        return paw()
    if kind == "wheel5":
        return wheel5()
    if kind == "disjoint_union":
        return disjoint_union(parts or [])
    raise GraphError(f"unknown graph kind {kind!r}")


def _need_positive(n):
    if not isinstance(n, int) or n < 1:
        raise GraphError(f"expected a positive integer, got {n!r}")


# -- structure --------------------------------------------------------------

def components(g: Graph) -> list[Graph]:
    """Connected components in order of their least vertex, each relabelled from 0."""
    adj = g.adjacency()
    seen = [False] * g.vertex_count
    out = []
    for start in range(g.vertex_count):
        if seen[start]:
            continue
        stack, verts = [start], []
        seen[start] = True
        while stack:
            u = stack.pop()
            verts.append(u)
            for w in adj[u]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        verts.sort()
        index = {u: i for i, u in enumerate(verts)}
        sub = tuple((index[u], index[w]) for u, w in g.edges if u in index)
        out.append(Graph(len(verts), sub))
    return out


def is_connected(g: Graph) -> bool:
    return g.vertex_count <= 1 or len(components(g)) == 1


def is_tree(g: Graph) -> bool:
    return g.vertex_count >= 1 and g.e == g.vertex_count - 1 and is_connected(g)


def clique_number(g: Graph) -> int:
    if g.vertex_count == 0:
        return 0
    adj = g.adjacency()
    best = 1

    def grow(clique_size, candidates):
        nonlocal best
        best = max(best, clique_size)
        cands = sorted(candidates)
        for i, u in enumerate(cands):
            if clique_size + len(cands) - i <= best:
                return
            grow(clique_size + 1, candidates.intersection(adj[u], cands[i + 1:]))

    grow(0, set(range(g.vertex_count)))
    return best


def _colourable(adj, order, k) -> bool:
    colour = {}

    def place(i):
        if i == len(order):
            return True
        u = order[i]
        used = {colour[w] for w in adj[u] if w in colour}
        # symmetry breaking: never open more than one new colour at a time
        limit = min(k, max(colour.values(), default=-1) + 2)
        for c in range(limit):
            if c not in used:
                colour[u] = c
                if place(i + 1):
                    return True
                del colour[u]
        return False

    return place(0)


def chromatic_number(g: Graph) -> int:
    """Least number of colours in a proper colouring; capped at 12 vertices.

    The empty vertex set is given chromatic number 1 by convention here, since
    callers only use the result as the number of parts of a Turán graphon.
    """
    if g.vertex_count > CHROMATIC_CAP:
        raise GraphTooLarge(f"chromatic_number is capped at {CHROMATIC_CAP} vertices")
    if g.e == 0:
        return 1
    adj = g.adjacency()
    order = sorted(range(g.vertex_count), key=lambda u: -len(adj[u]))
    k = clique_number(g)
    while not _colourable(adj, order, k):
        k += 1
    return k


def are_isomorphic(a: Graph, b: Graph, cap: int = 7) -> bool:
    """Exhaustive permutation check; only meant for tiny graphs."""
    if a.vertex_count != b.vertex_count or a.e != b.e:
        return False
    if a.vertex_count > cap:
        raise GraphTooLarge(f"isomorphism check is capped at {cap} vertices")
    target = set(b.edges)
    for perm in itertools.permutations(range(a.vertex_count)):
        if set(a.relabel(perm).edges) == target:
            return True
    return False


# -- K3-trees ---------------------------------------------------------------

_K3 = frozenset({0, 1, 2})


def _tree_key(s: int, t: int) -> tuple[int, int]:
    return (min(s, t), max(s, t))


@dataclass(frozen=True)
class K3Tree:
    """A tree whose vertices and edges carry subsets of ``{0, 1, 2}``.

    Each edge label must be a proper subset of the intersection of its two
    endpoint labels.
    """

    tree: Graph
    vertex_labels: tuple[frozenset, ...]
    edge_labels: dict = field(default_factory=dict)

    def __post_init__(self):
        if not is_tree(self.tree):
            raise GraphError("K3Tree needs a connected acyclic tree")
        labels = tuple(frozenset(int(w) for w in lab) for lab in self.vertex_labels)
        if len(labels) != self.tree.vertex_count:
            raise GraphError("one vertex label per tree vertex is required")
        for lab in labels:
            if not lab <= _K3:
                raise GraphError(f"vertex label {sorted(lab)} not a subset of {{0,1,2}}")
        edge_labels = {}
        for (s, t), lab in dict(self.edge_labels).items():
            key = _tree_key(int(s), int(t))
            if key not in self.tree.edges:
                raise GraphError(f"{key} is not a tree edge")
            edge_labels[key] = frozenset(int(w) for w in lab)
        for key in self.tree.edges:
            lab = edge_labels.setdefault(key, frozenset())
            s, t = key
            shared = labels[s] & labels[t]
            if not (lab <= shared and lab != shared):
                raise GraphError(
                    f"edge label {sorted(lab)} on {key} must be a proper subset of {sorted(shared)}")
        object.__setattr__(self, "vertex_labels", labels)
        object.__setattr__(self, "edge_labels", edge_labels)

    def v_count(self, j: int) -> int:
        """Number of tree vertices whose label has size ``j``."""
        return sum(1 for lab in self.vertex_labels if len(lab) == j)

    def e_count(self, j: int) -> int:
        """Number of tree edges whose label has size ``j``."""
        return sum(1 for lab in self.edge_labels.values() if len(lab) == j)

    @property
    def gamma(self) -> int:
        return self.e_count(2) - self.v_count(2)

    def to_json(self) -> dict:
        return {
            "tree_edges": [list(e) for e in self.tree.edges],
            "vertex_labels": {str(i): sorted(lab) for i, lab in enumerate(self.vertex_labels)},
            "edge_labels": {f"{s}-{t}": sorted(lab) for (s, t), lab in sorted(self.edge_labels.items())},
        }

    @classmethod
    def from_json(cls, data: dict | str) -> K3Tree:
        if isinstance(data, str):
            data = json.loads(data)
        try:
            vl = {int(k): v for k, v in data["vertex_labels"].items()}
            n = max(vl) + 1 if vl else 0
            tree = Graph(n, tuple(tuple(e) for e in data.get("tree_edges", [])))
            labels = tuple(vl[i] for i in range(n))
            edges = {}
            for key, lab in data.get("edge_labels", {}).items():
                s, t = key.split("-")
                edges[(int(s), int(t))] = lab
        except (KeyError, ValueError, TypeError) as exc:
            raise GraphError(f"bad K3-tree JSON: {exc}") from exc
        return cls(tree, labels, edges)


def star_k3_tree(k: int) -> K3Tree:
    """``k`` full triangles hung on a star with empty edge labels (``k`` disjoint K3)."""
    _need_positive(k)
    tree = Graph(k, tuple((0, i) for i in range(1, k)))
    return K3Tree(tree, (_K3,) * k, {})


def realize_k3_tree(t: K3Tree) -> Graph:
    """Glue one clique per tree vertex, identifying shared labels along tree edges."""
    parent = {}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for node, lab in enumerate(t.vertex_labels):
        for w in lab:
            parent[(node, w)] = (node, w)
    for (s, u), lab in t.edge_labels.items():
        for w in lab:
            parent[find((s, w))] = find((u, w))

    roots = sorted({find(a) for a in parent})
    index = {r: i for i, r in enumerate(roots)}
    edges = set()
    for node, lab in enumerate(t.vertex_labels):
        for a, b in itertools.combinations(sorted(lab), 2):
            x, y = index[find((node, a))], index[find((node, b))]
            edges.add((min(x, y), max(x, y)))
    h = Graph(len(roots), tuple(sorted(edges)))

    expected = sum(len(lab) for lab in t.vertex_labels) - sum(len(lab) for lab in t.edge_labels.values())
    if h.vertex_count != expected:
        raise GraphError("vertex identification did not follow the tree")
    return h


@dataclass(frozen=True)
class CorrelationRecord:
    """Records that ``subject`` satisfies e(H) = k e(J) + l (the density
    inequality itself is an attribute carried by the record, not checked)."""

    base_graph: Graph
    power: Real
    edge_exponent: Real
    subject: Graph

    def __post_init__(self):
        if self.power == 0:
            raise GraphError("correlation power must be nonzero")
        lhs = self.subject.e
        rhs = self.power * self.base_graph.e + self.edge_exponent
        if isinstance(rhs, (int, Fraction)):
            ok = lhs == rhs
        else:
            ok = math.isclose(lhs, float(rhs), rel_tol=0, abs_tol=1e-9)
        if not ok:
            raise GraphError(f"e(H)={lhs} but k*e(J)+l={rhs}")


def k3_tree_correlation(t: K3Tree) -> CorrelationRecord:
    h = realize_k3_tree(t)
    k = t.v_count(3)
    if h.e != 3 * k + t.v_count(2) - t.e_count(2):
        raise GraphError("edge count of the glued graph disagrees with the tree counts")
    if k == 0:
        raise GraphError("a K3-tree without full triangles has no K3 correlation record")
    return CorrelationRecord(triangle(), k, -t.gamma, h)
