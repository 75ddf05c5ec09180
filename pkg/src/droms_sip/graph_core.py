"""Finite simple graphs, Droms recognition and the recursive Droms decomposition.

A Droms graph is a finite graph with no induced 4-vertex path or 4-cycle.
Every nonempty Droms graph is either disconnected or has a central vertex,
which gives the recursive tree used by the rest of the package:

    trivial | free product of components | Z^m x (rest)
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Union


class GraphError(ValueError):
    pass


class DuplicateVertex(GraphError):
    pass


class UnknownEndpoint(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class NotDroms(GraphError):
    """The graph contains an induced P4 or C4."""

    def __init__(self, witness):
        self.witness = tuple(witness)
        super().__init__(f"graph is not Droms: induced P4/C4 on {list(self.witness)}")


class InternalDisagreement(RuntimeError):
    pass


@dataclass(frozen=True)
class SimpleGraph:
    vertices: tuple[str, ...]
    edges: frozenset[tuple[str, str]]
    _adj: dict = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        adj = {v: set() for v in self.vertices}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        object.__setattr__(self, "_adj", {v: frozenset(s) for v, s in adj.items()})

    def __len__(self):
        return len(self.vertices)

    def neighbors(self, v: str) -> frozenset[str]:
        return self._adj[v]

    def adjacent(self, u: str, v: str) -> bool:
        return v in self._adj[u]

    def sorted_edges(self) -> list[tuple[str, str]]:
        return sorted(self.edges)

    def induced(self, vs: Iterable[str]) -> "SimpleGraph":
        keep = set(vs)
        return SimpleGraph(
            tuple(v for v in self.vertices if v in keep),
            frozenset(e for e in self.edges if e[0] in keep and e[1] in keep),
        )

    def components(self) -> list[tuple[str, ...]]:
        """Connected components, each sorted, ordered by least vertex."""
        seen: set[str] = set()
        out = []
        for v in self.vertices:
            if v in seen:
                continue
            comp = []
            stack = [v]
            seen.add(v)
            while stack:
                x = stack.pop()
                comp.append(x)
                for y in self._adj[x]:
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
            out.append(tuple(sorted(comp)))
        return out

    def is_complete(self) -> bool:
        n = len(self.vertices)
        return len(self.edges) == n * (n - 1) // 2

    def central_vertices(self) -> tuple[str, ...]:
        n = len(self.vertices)
        return tuple(v for v in self.vertices if len(self._adj[v]) == n - 1)

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices), "edges": [list(e) for e in self.sorted_edges()]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    def __str__(self):
        es = " ".join(f"{a}-{b}" for a, b in self.sorted_edges())
        return f"vertices: {' '.join(self.vertices)}\nedges: {es}"


def build_graph(vertices: Iterable[str], edges: Iterable[Iterable[str]]) -> SimpleGraph:
    vs = list(vertices)
    if len(set(vs)) != len(vs):
        dup = sorted(v for v in set(vs) if vs.count(v) > 1)
        raise DuplicateVertex(f"duplicate vertex {dup[0]!r}")
    known = set(vs)
    es = set()
    for pair in edges:
        a, b = pair
        for x in (a, b):
            if x not in known:
                raise UnknownEndpoint(f"edge endpoint {x!r} is not a declared vertex")
        if a == b:
            raise SelfLoop(f"self-loop at {a!r}")
        es.add((a, b) if a < b else (b, a))
    return SimpleGraph(tuple(sorted(vs)), frozenset(es))


def parse_graph(text: str) -> SimpleGraph:
    """Parse either the two-line text format or the JSON format."""
    stripped = text.strip()
    if stripped.startswith("{"):
        data = json.loads(stripped)
        return build_graph(data.get("vertices", []), data.get("edges", []))
    vertices: list[str] = []
    edges: list[tuple[str, str]] = []
    for line in stripped.splitlines():
        line = line.strip()
        if line.startswith("vertices:"):
            vertices = line[len("vertices:"):].split()
        elif line.startswith("edges:"):
            for tok in line[len("edges:"):].split():
                parts = tok.split("-")
                if len(parts) != 2 or not all(parts):
                    raise GraphError(f"malformed edge {tok!r}")
                edges.append((parts[0], parts[1]))
        elif line:
            raise GraphError(f"unrecognised graph line {line!r}")
    return build_graph(vertices, edges)


# -- Droms recognition -------------------------------------------------------

def _is_p4_or_c4(g: SimpleGraph, quad) -> bool:
    degs = sorted(sum(1 for y in quad if y != x and g.adjacent(x, y)) for x in quad)
    return degs == [1, 1, 2, 2] or degs == [2, 2, 2, 2]


def droms_witness(g: SimpleGraph):
    """First 4-vertex set (lexicographic) inducing P4 or C4, or None."""
    for quad in itertools.combinations(g.vertices, 4):
        if _is_p4_or_c4(g, quad):
            return quad
    return None


def is_droms_recursive(g: SimpleGraph) -> bool:
    """Disconnected-or-has-central-vertex, applied recursively."""
    if not g.vertices:
        return True
    comps = g.components()
    if len(comps) > 1:
        return all(is_droms_recursive(g.induced(c)) for c in comps)
    center = g.central_vertices()
    if not center:
        return False
    return is_droms_recursive(g.induced(v for v in g.vertices if v not in center))


def is_droms(g: SimpleGraph) -> bool:
    by_scan = droms_witness(g) is None
    by_recursion = is_droms_recursive(g)
    if by_scan != by_recursion:
        raise InternalDisagreement(f"Droms tests disagree on {g.to_json()}")
    return by_scan


def _require_droms(g: SimpleGraph):
    w = droms_witness(g)
    if w is not None:
        raise NotDroms(w)


@dataclass(frozen=True)
class PrimaryDecomposition:
    center: tuple[str, ...]
    rest: SimpleGraph


def primary_decomposition(g: SimpleGraph) -> PrimaryDecomposition:
    _require_droms(g)
    center = g.central_vertices()
    return PrimaryDecomposition(center, g.induced(v for v in g.vertices if v not in center))


# -- decomposition tree ------------------------------------------------------

@dataclass(frozen=True)
class TrivialNode:
    vertices: tuple[str, ...] = ()


@dataclass(frozen=True)
class CentralExtensionNode:
    """Z^m x child, the m central vertices generating Z^m."""

    central_vertices: tuple[str, ...]
    child: "DromsTree"
    vertices: tuple[str, ...] = ()

    @property
    def m(self) -> int:
        return len(self.central_vertices)


@dataclass(frozen=True)
class FreeProductNode:
    children: tuple["DromsTree", ...]
    component_vertex_sets: tuple[tuple[str, ...], ...]
    vertices: tuple[str, ...] = ()


DromsTree = Union[TrivialNode, CentralExtensionNode, FreeProductNode]


def _tree(g: SimpleGraph) -> DromsTree:
    if not g.vertices:
        return TrivialNode()
    center = g.central_vertices()
    if center:
        rest = g.induced(v for v in g.vertices if v not in center)
        return CentralExtensionNode(center, _tree(rest), g.vertices)
    comps = g.components()
    # a connected Droms graph always has a central vertex
    assert len(comps) > 1
    return FreeProductNode(tuple(_tree(g.induced(c)) for c in comps), tuple(comps), g.vertices)


def decomposition_tree(g: SimpleGraph) -> DromsTree:
    _require_droms(g)
    return _tree(g)


def reconstruct_graph(tree: DromsTree) -> SimpleGraph:
    """Unfold a tree back into a graph (join for central layers, disjoint union for free products)."""
    if isinstance(tree, TrivialNode):
        return SimpleGraph((), frozenset())
    if isinstance(tree, FreeProductNode):
        parts = [reconstruct_graph(c) for c in tree.children]
        vs = sorted(v for p in parts for v in p.vertices)
        return SimpleGraph(tuple(vs), frozenset(e for p in parts for e in p.edges))
    inner = reconstruct_graph(tree.child)
    center = tree.central_vertices
    vs = sorted(set(center) | set(inner.vertices))
    es = set(inner.edges)
    for c in center:
        for v in vs:
            if v != c:
                es.add((c, v) if c < v else (v, c))
    return SimpleGraph(tuple(vs), frozenset(es))


def max_clique_from_tree(tree: DromsTree) -> int:
    if isinstance(tree, TrivialNode):
        return 0
    if isinstance(tree, FreeProductNode):
        return max(max_clique_from_tree(c) for c in tree.children)
    return tree.m + max_clique_from_tree(tree.child)


def tree_to_json(tree: DromsTree) -> dict:
    if isinstance(tree, TrivialNode):
        return {"node": "trivial"}
    if isinstance(tree, FreeProductNode):
        return {"node": "free_product", "children": [tree_to_json(c) for c in tree.children]}
    return {"node": "central", "m": tree.m, "central_vertices": list(tree.central_vertices),
            "child": tree_to_json(tree.child)}
