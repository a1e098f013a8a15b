"""Mixed graphs with tail/arrow/circle endpoint marks.

One representation covers DAGs (tail->arrow edges), CPDAGs (plus
tail--tail) and PAGs (circle marks).  Background knowledge constrains
demographic variables to be root causes and the outcome to be a leaf.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass

__all__ = [
    "BackgroundKnowledge",
    "Dag",
    "EndpointMark",
    "GraphConstraintError",
    "MixedGraph",
    "apply_background_knowledge",
    "connected_nonisolated",
    "emit_dot",
    "graph_from_json",
    "graph_to_json",
]


class GraphConstraintError(ValueError):
    """Raised when background knowledge cannot be satisfied."""


class EndpointMark(enum.Enum):
    TAIL = "tail"
    ARROW = "arrow"
    CIRCLE = "circle"


TAIL = EndpointMark.TAIL
ARROW = EndpointMark.ARROW
CIRCLE = EndpointMark.CIRCLE


class MixedGraph:
    """Nodes plus at most one marked edge per unordered pair."""

    def __init__(self, nodes):
        nodes = tuple(nodes)
        if len(set(nodes)) != len(nodes):
            raise ValueError("duplicate node names")
        self._nodes = nodes
        self._node_set = frozenset(nodes)
        # canonical key (a, b) with a < b; value (mark at a, mark at b)
        self._edges: dict[tuple[str, str], tuple[EndpointMark, EndpointMark]] = {}
        self._adj: dict[str, set[str]] = {n: set() for n in nodes}

    @property
    def nodes(self) -> tuple[str, ...]:
        return self._nodes

    def _check(self, node):
        if node not in self._node_set:
            raise ValueError(f"unknown node {node!r}")

    @staticmethod
    def _key(a, b):
        return (a, b) if a < b else (b, a)

    def add_edge(self, a, b, mark_a=CIRCLE, mark_b=CIRCLE):
        self._check(a)
        self._check(b)
        if a == b:
            raise ValueError(f"self loop on {a!r}")
        key = self._key(a, b)
        self._edges[key] = (mark_a, mark_b) if key == (a, b) else (mark_b, mark_a)
        self._adj[a].add(b)
        self._adj[b].add(a)

    def remove_edge(self, a, b):
        del self._edges[self._key(a, b)]
        self._adj[a].discard(b)
        self._adj[b].discard(a)

    def has_edge(self, a, b) -> bool:
        return self._key(a, b) in self._edges

    def mark_at(self, a, b) -> EndpointMark:
        """The mark at ``a``'s end of the edge between a and b."""
        key = self._key(a, b)
        marks = self._edges[key]
        return marks[0] if key == (a, b) else marks[1]

    def set_mark_at(self, a, b, mark: EndpointMark):
        key = self._key(a, b)
        ma, mb = self._edges[key]
        if key == (a, b):
            self._edges[key] = (mark, mb)
        else:
            self._edges[key] = (ma, mark)

    def is_directed(self, a, b) -> bool:
        """True iff the edge is exactly a -> b (tail at a, arrow at b)."""
        return self.has_edge(a, b) and self.mark_at(a, b) is TAIL and self.mark_at(b, a) is ARROW

    def adjacent(self, node) -> tuple[str, ...]:
        self._check(node)
        return tuple(sorted(self._adj[node]))

    def edges(self):
        """Sorted (a, b, mark_at_a, mark_at_b) with a < b."""
        return [(a, b, *self._edges[(a, b)]) for a, b in sorted(self._edges)]

    def edge_count(self) -> int:
        return len(self._edges)

    def skeleton_pairs(self):
        return sorted(self._edges)

    def copy(self) -> "MixedGraph":
        dup = MixedGraph(self._nodes)
        dup._edges = dict(self._edges)
        dup._adj = {n: set(s) for n, s in self._adj.items()}
        return dup

    def __eq__(self, other):
        return (
            isinstance(other, MixedGraph)
            and set(self._nodes) == set(other._nodes)
            and self._edges == other._edges
        )

    def __repr__(self):
        parts = []
        glyph = {TAIL: "-", ARROW: ">", CIRCLE: "o"}
        for a, b, ma, mb in self.edges():
            left = {TAIL: "-", ARROW: "<", CIRCLE: "o"}[ma]
            parts.append(f"{a} {left}-{glyph[mb]} {b}")
        return f"MixedGraph({', '.join(parts)})"


class Dag:
    """A directed acyclic graph given by parent sets; supplies the
    d-separation oracle used for discovery testing."""

    def __init__(self, nodes, edges=()):
        self.nodes = tuple(nodes)
        node_set = set(self.nodes)
        if len(node_set) != len(self.nodes):
            raise ValueError("duplicate node names")
        self.parents: dict[str, set[str]] = {n: set() for n in self.nodes}
        self.children: dict[str, set[str]] = {n: set() for n in self.nodes}
        for a, b in edges:
            if a not in node_set or b not in node_set:
                raise ValueError(f"edge ({a!r}, {b!r}) uses unknown node")
            if a == b:
                raise ValueError(f"self loop on {a!r}")
            self.parents[b].add(a)
            self.children[a].add(b)
        self.topological_order()  # raises on cycles

    def edges(self):
        return sorted((p, c) for c, ps in self.parents.items() for p in ps)

    def topological_order(self) -> list[str]:
        indeg = {n: len(self.parents[n]) for n in self.nodes}
        ready = sorted(n for n in self.nodes if indeg[n] == 0)
        order = []
        while ready:
            node = ready.pop(0)
            order.append(node)
            added = []
            for child in self.children[node]:
                indeg[child] -= 1
                if indeg[child] == 0:
                    added.append(child)
            if added:
                ready = sorted(ready + added)
        if len(order) != len(self.nodes):
            raise ValueError("graph has a directed cycle")
        return order

    def ancestors(self, node) -> set[str]:
        """Proper ancestors of ``node``."""
        seen = set()
        stack = list(self.parents[node])
        while stack:
            cur = stack.pop()
            if cur not in seen:
                seen.add(cur)
                stack.extend(self.parents[cur])
        return seen

    def d_separated(self, x: str, y: str, z=()) -> bool:
        """True iff every path between x and y is blocked given z.

        Reachability formulation: walk (node, direction) states, where
        direction is the way the trail entered the node; colliders pass only
        when they have a descendant in z, non-colliders only when outside z.
        """
        z = frozenset(z)
        for node in (x, y, *z):
            if node not in self.parents:
                raise ValueError(f"unknown node {node!r}")
        if x == y or x in z or y in z:
            raise ValueError("x, y and z must be disjoint")

        # nodes with a descendant in z (including z itself)
        anc_of_z = set(z)
        stack = [p for zn in z for p in self.parents[zn]]
        while stack:
            cur = stack.pop()
            if cur not in anc_of_z:
                anc_of_z.add(cur)
                stack.extend(self.parents[cur])

        # direction: "up" = arrived at node from a child, "down" = from a parent
        work = [(x, "up")]
        visited = set()
        while work:
            node, direction = work.pop()
            if (node, direction) in visited:
                continue
            visited.add((node, direction))
            if node == y:
                return False
            if direction == "up":
                if node not in z:
                    for parent in self.parents[node]:
                        work.append((parent, "up"))
                    for child in self.children[node]:
                        work.append((child, "down"))
            else:
                if node not in z:
                    for child in self.children[node]:
                        work.append((child, "down"))
                if node in anc_of_z:
                    for parent in self.parents[node]:
                        work.append((parent, "up"))
        return True

    def to_mixed(self) -> MixedGraph:
        g = MixedGraph(self.nodes)
        for a, b in self.edges():
            g.add_edge(a, b, TAIL, ARROW)
        return g


@dataclass(frozen=True)
class BackgroundKnowledge:
    """Required roots (causes only) and leaves (effects only)."""

    roots: frozenset = frozenset()
    leaves: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "roots", frozenset(self.roots))
        object.__setattr__(self, "leaves", frozenset(self.leaves))
        overlap = self.roots & self.leaves
        if overlap:
            raise GraphConstraintError(f"nodes {sorted(overlap)} are both root and leaf")

    def forbids_arrow_at(self, node: str, other: str) -> bool:
        """An arrowhead may not land at a root, nor at the far end of a leaf
        edge (a leaf causes nothing)."""
        return node in self.roots or other in self.leaves


def apply_background_knowledge(graph: MixedGraph, bk: BackgroundKnowledge) -> MixedGraph:
    """Force root edges to point out of roots and leaf edges into leaves.

    Root-root edges stay as discovered; an edge between two leaves is a
    constraint violation.
    """
    for node in sorted(bk.roots | bk.leaves):
        if node not in graph.nodes:
            raise GraphConstraintError(f"constrained node {node!r} not in graph")
    out = graph.copy()
    for a, b, _, _ in graph.edges():
        if a in bk.leaves and b in bk.leaves:
            raise GraphConstraintError(f"edge between leaf nodes {a!r} and {b!r}")
        for root, other in ((a, b), (b, a)):
            if root in bk.roots and other not in bk.roots:
                out.set_mark_at(root, other, TAIL)
                out.set_mark_at(other, root, ARROW)
        for leaf, other in ((a, b), (b, a)):
            if leaf in bk.leaves:
                out.set_mark_at(other, leaf, TAIL)
                out.set_mark_at(leaf, other, ARROW)
    return out


def connected_nonisolated(graph: MixedGraph, node: str) -> bool:
    """True iff the node has at least one incident edge."""
    return len(graph.adjacent(node)) > 0


_DOT_MARK = {ARROW: "normal", TAIL: "none", CIRCLE: "odot"}


def emit_dot(graph: MixedGraph, name: str = "scm") -> str:
    """Deterministic DOT text; endpoint marks map to arrowtail/arrowhead
    (arrow -> normal, tail -> none, circle -> odot)."""
    lines = [f"digraph {name} {{"]
    for node in sorted(graph.nodes):
        lines.append(f'  "{node}";')
    for a, b, mark_a, mark_b in graph.edges():
        lines.append(
            f'  "{a}" -> "{b}" [dir=both, arrowtail={_DOT_MARK[mark_a]}, arrowhead={_DOT_MARK[mark_b]}];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_to_json(graph: MixedGraph) -> str:
    payload = {
        "nodes": sorted(graph.nodes),
        "edges": [[a, b, ma.value, mb.value] for a, b, ma, mb in graph.edges()],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def graph_from_json(text: str) -> MixedGraph:
    payload = json.loads(text)
    g = MixedGraph(payload["nodes"])
    for a, b, ma, mb in payload["edges"]:
        g.add_edge(a, b, EndpointMark(ma), EndpointMark(mb))
    return g
