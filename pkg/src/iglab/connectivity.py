"""Exact k-connectivity and failure-resilience decisions.

A graph survives any m node failures iff it is (m+1)-connected, so the
universal quantifier over failure sets is decided exactly via vertex
connectivity (Menger) rather than by sampling. Fast paths: k=1 by
traversal, k=2 by articulation-point search; k >= 3 by the node-split
max-flow reduction with early termination at the queried threshold.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations

from .errors import InvalidParameterError, OracleRefusedError
from .graph import GraphTopology, connected_components, min_degree

_BRUTE_FORCE_NODE_CAP = 16


@dataclass
class ResilienceVerdict:
    connected: bool
    min_degree: int
    k_connected_up_to: int  # vertex connectivity kappa
    query_k: int

    @property
    def is_k_connected(self) -> bool:
        return self.k_connected_up_to >= self.query_k


def is_connected(g: GraphTopology) -> bool:
    if g.n < 1:
        raise InvalidParameterError("is_connected requires at least one node")
    return len(connected_components(g)) == 1


def min_degree_at_least(g: GraphTopology, k: int) -> bool:
    if k < 0:
        raise InvalidParameterError(f"k must be >= 0, got {k}")
    return min_degree(g) >= k


def remove_nodes(g: GraphTopology, victims) -> GraphTopology:
    """New graph on the surviving nodes, relabeled 0..n-|victims|-1 in an
    order-preserving way, keeping only edges between survivors."""
    victims = set(victims)
    if not victims <= set(range(g.n)):
        raise InvalidParameterError("victims must be a subset of node ids")
    survivors = [v for v in range(g.n) if v not in victims]
    relabel = {v: i for i, v in enumerate(survivors)}
    edges = ((relabel[i], relabel[j]) for i, j in g.edges
             if i not in victims and j not in victims)
    return GraphTopology(len(survivors), edges)


# -- articulation points (k=2 fast path) -----------------------------------

def _has_articulation_point(g: GraphTopology) -> bool:
    """Iterative Hopcroft-Tarjan cut-vertex search; assumes g connected."""
    n = g.n
    disc = [-1] * n
    low = [0] * n
    parent = [-1] * n
    timer = 0
    root = 0
    root_children = 0
    stack = [(root, iter(g.neighbors(root)))]
    disc[root] = low[root] = timer
    timer += 1
    while stack:
        u, it = stack[-1]
        advanced = False
        for v in it:
            if disc[v] == -1:
                parent[v] = u
                disc[v] = low[v] = timer
                timer += 1
                if u == root:
                    root_children += 1
                stack.append((v, iter(g.neighbors(v))))
                advanced = True
                break
            elif v != parent[u]:
                low[u] = min(low[u], disc[v])
        if not advanced:
            stack.pop()
            pu = parent[u]
            if pu != -1:
                low[pu] = min(low[pu], low[u])
                if pu != root and low[u] >= disc[pu]:
                    return True
    return root_children > 1


# -- local vertex connectivity via node-split max flow ----------------------

def _local_node_connectivity(g: GraphTopology, s: int, t: int, limit: int) -> int:
    """Number of internally vertex-disjoint s-t paths, capped at limit.

    Node-split reduction: node u becomes u_in=2u, u_out=2u+1 with a unit
    arc; each edge gives unit arcs u_out->v_in and v_out->u_in. Unit
    capacities make each BFS augmentation worth exactly one path.
    """
    if g.has_edge(s, t):
        raise InvalidParameterError("local connectivity requires non-adjacent endpoints")
    cap: dict[tuple[int, int], int] = {}
    adj: list[list[int]] = [[] for _ in range(2 * g.n)]

    def add_arc(a: int, b: int, c: int) -> None:
        if (a, b) not in cap:
            cap[(a, b)] = 0
            cap[(b, a)] = cap.get((b, a), 0)
            adj[a].append(b)
            adj[b].append(a)
        cap[(a, b)] += c

    for u in range(g.n):
        add_arc(2 * u, 2 * u + 1, 1)
    for i, j in g.edges:
        add_arc(2 * i + 1, 2 * j, 1)
        add_arc(2 * j + 1, 2 * i, 1)
    source, sink = 2 * s + 1, 2 * t
    cap[(2 * s, 2 * s + 1)] = limit  # endpoints are not internal nodes
    cap[(2 * t, 2 * t + 1)] = limit

    flow = 0
    while flow < limit:
        prev = {source: source}
        queue = deque([source])
        while queue and sink not in prev:
            u = queue.popleft()
            for v in adj[u]:
                if v not in prev and cap.get((u, v), 0) > 0:
                    prev[v] = u
                    if v == sink:
                        break
                    queue.append(v)
        if sink not in prev:
            break
        v = sink
        while v != source:
            u = prev[v]
            cap[(u, v)] -= 1
            cap[(v, u)] += 1
            v = u
        flow += 1
    return flow


def _kappa_probe_pairs(g: GraphTopology):
    """Pairs whose local connectivities attain kappa (Esfahanian-Hakimi):
    a minimum-degree node v against its non-neighbors, plus non-adjacent
    pairs among v's neighbors."""
    v = min(range(g.n), key=g.degree)
    nbrs = g.neighbors(v)
    for w in range(g.n):
        if w != v and w not in nbrs:
            yield v, w
    for x, y in combinations(sorted(nbrs), 2):
        if not g.has_edge(x, y):
            yield x, y


def vertex_connectivity(g: GraphTopology) -> int:
    """Exact vertex connectivity kappa; 0 for disconnected or single-node."""
    n = g.n
    if n <= 1:
        return 0
    if not is_connected(g):
        return 0
    if len(g.edges) == n * (n - 1) // 2:
        return n - 1
    kappa = min_degree(g)
    for s, t in _kappa_probe_pairs(g):
        kappa = min(kappa, _local_node_connectivity(g, s, t, kappa))
        if kappa == 0:
            break
    return kappa


def is_k_connected(g: GraphTopology, k: int) -> bool:
    """True iff n >= k+1 and the graph stays connected after removing any
    k-1 nodes (equivalently kappa >= k)."""
    if k < 1:
        raise InvalidParameterError(f"k must be >= 1, got {k}")
    n = g.n
    if n < k + 1:
        return False
    if k == 1:
        return is_connected(g)
    if min_degree(g) < k:
        return False
    if not is_connected(g):
        return False
    if k == 2:
        return not _has_articulation_point(g)
    for s, t in _kappa_probe_pairs(g):
        if _local_node_connectivity(g, s, t, k) < k:
            return False
    return True


def survives_node_failures(g: GraphTopology, m: int) -> bool:
    """Connected after an arbitrary set of m node failures == (m+1)-connected."""
    if m < 0:
        raise InvalidParameterError(f"m must be >= 0, got {m}")
    return is_k_connected(g, m + 1)


def assess_resilience(g: GraphTopology, k: int) -> ResilienceVerdict:
    return ResilienceVerdict(
        connected=is_connected(g) if g.n >= 1 else False,
        min_degree=min_degree(g) if g.n >= 1 else 0,
        k_connected_up_to=vertex_connectivity(g),
        query_k=k,
    )


# -- exhaustive oracle -------------------------------------------------------

def brute_force_k_connected(g: GraphTopology, k: int) -> bool:
    """Definitional check: enumerate every (k-1)-subset of nodes and verify
    each residual graph is connected (and n >= k+1). Bitmask traversal keeps
    the enumeration cheap, but the node count is capped."""
    if k < 1:
        raise InvalidParameterError(f"k must be >= 1, got {k}")
    if g.n > _BRUTE_FORCE_NODE_CAP:
        raise OracleRefusedError(
            f"brute-force oracle refuses n={g.n} > {_BRUTE_FORCE_NODE_CAP}"
        )
    n = g.n
    if n < k + 1:
        return False
    adj = [0] * n
    for i, j in g.edges:
        adj[i] |= 1 << j
        adj[j] |= 1 << i
    full = (1 << n) - 1
    for victims in combinations(range(n), k - 1):
        dead = 0
        for v in victims:
            dead |= 1 << v
        alive = full & ~dead
        start = alive & -alive
        visited = start
        frontier = start
        while frontier:
            reach = 0
            f = frontier
            while f:
                b = f & -f
                reach |= adj[b.bit_length() - 1]
                f ^= b
            frontier = reach & alive & ~visited
            visited |= frontier
        if visited != alive:
            return False
    return True
