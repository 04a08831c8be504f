"""Immutable undirected simple graph on dense integer node ids.

Adjacency is stored twice: a global set of (i, j) pairs with i < j for O(1)
membership, and per-node neighbor sets for O(deg) iteration. Instances are
never mutated after construction, so they can be shared freely across
concurrent trial workers.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Iterator

from .errors import InvalidParameterError


def _norm_edge(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


class GraphTopology:
    """Undirected simple graph on nodes 0..n-1."""

    __slots__ = ("n", "edges", "_adj")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise InvalidParameterError(f"node count must be non-negative, got {n}")
        self.n = int(n)
        adj: list[set[int]] = [set() for _ in range(self.n)]
        norm = set()
        for i, j in edges:
            i = int(i)
            j = int(j)
            if i == j:
                raise InvalidParameterError(f"self-loop at node {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise InvalidParameterError(f"edge ({i},{j}) out of range for n={self.n}")
            e = _norm_edge(i, j)
            if e not in norm:
                norm.add(e)
                adj[i].add(j)
                adj[j].add(i)
        self.edges: frozenset[tuple[int, int]] = frozenset(norm)
        self._adj: tuple[frozenset[int], ...] = tuple(frozenset(s) for s in adj)

    # -- queries ---------------------------------------------------------

    def has_edge(self, i: int, j: int) -> bool:
        return _norm_edge(i, j) in self.edges

    def neighbors(self, i: int) -> frozenset[int]:
        return self._adj[i]

    def degree(self, i: int) -> int:
        return len(self._adj[i])

    def edge_count(self) -> int:
        return len(self.edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GraphTopology):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"GraphTopology(n={self.n}, edges={len(self.edges)})"


class DegreeHistogram(dict):
    """Map degree value -> number of nodes with that degree."""

    def total_nodes(self) -> int:
        return sum(self.values())


def intersect_graphs(g1: GraphTopology, g2: GraphTopology) -> GraphTopology:
    """Graph whose edge set is the intersection of the two edge sets."""
    if g1.n != g2.n:
        raise InvalidParameterError(
            f"node count mismatch: {g1.n} vs {g2.n}"
        )
    small, large = (g1, g2) if len(g1.edges) <= len(g2.edges) else (g2, g1)
    return GraphTopology(g1.n, (e for e in small.edges if e in large.edges))


def min_degree(g: GraphTopology) -> int:
    if g.n < 1:
        raise InvalidParameterError("min_degree requires at least one node")
    return min(len(s) for s in g._adj)


def degree_histogram(g: GraphTopology) -> DegreeHistogram:
    hist = DegreeHistogram()
    for s in g._adj:
        d = len(s)
        hist[d] = hist.get(d, 0) + 1
    return hist


def connected_components(g: GraphTopology) -> list[set[int]]:
    """Maximal mutually-reachable node sets; disjoint cover of all nodes."""
    seen = [False] * g.n
    blocks: list[set[int]] = []
    for start in range(g.n):
        if seen[start]:
            continue
        block = {start}
        seen[start] = True
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in g._adj[u]:
                if not seen[v]:
                    seen[v] = True
                    block.add(v)
                    queue.append(v)
        blocks.append(block)
    return blocks


# -- edge-list text format (CLI debug dump) ------------------------------

def dump_edge_list(g: GraphTopology) -> str:
    """Text form: header "n=<count>" then one "i j" line per edge, i < j."""
    lines = [f"n={g.n}"]
    lines.extend(f"{i} {j}" for i, j in sorted(g.edges))
    return "\n".join(lines) + "\n"


def load_edge_list(text: str) -> GraphTopology:
    it: Iterator[str] = iter(text.splitlines())
    header = next(it, "").strip()
    if not header.startswith("n="):
        raise InvalidParameterError("edge list must start with 'n=<count>' header")
    n = int(header[2:])
    edges = []
    for line in it:
        line = line.strip()
        if not line:
            continue
        i, j = line.split()
        edges.append((int(i), int(j)))
    return GraphTopology(n, edges)
