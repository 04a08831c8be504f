"""Samplers for every random-graph family used by the model and its proof
machinery: uniform and binomial object-ring assignments, the d-overlap
graph, Erdos-Renyi layers, the full composed model, multiset edge graphs,
and the binomial-to-uniform ring coupling.

All samplers take an explicit numpy Generator. Use trial_rng() to derive
deterministic per-trial streams from a base seed so trial i is reproducible
independently of trial ordering or worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc

from .errors import DegenerateRegimeError, InfeasibleCouplingError, InvalidParameterError
from .graph import GraphTopology, intersect_graphs
from .theory import ModelParams

# Sampler cutoff between rejection sampling and per-row partial shuffles;
# both are exact-uniform, the cutoff is performance-only.
_REJECTION_DENSITY_CUTOFF = 0.1


def trial_rng(base_seed: int, *path: int) -> np.random.Generator:
    """Counter-based (Philox) stream keyed by (base_seed, path).

    Distinct paths give statistically independent streams, so concurrent
    trials never share state.
    """
    ss = np.random.SeedSequence(entropy=base_seed, spawn_key=tuple(path))
    return np.random.Generator(np.random.Philox(ss))


@dataclass
class ObjectAssignment:
    """Per-node object rings drawn from the pool {0..pool_size-1}."""

    rings: list  # list of sorted int64 arrays, one per node
    pool_size: int

    @property
    def node_count(self) -> int:
        return len(self.rings)

    def ring_sets(self) -> list[set[int]]:
        return [set(map(int, r)) for r in self.rings]


@dataclass
class HalfCountSummary:
    """Per-object node counts U_i, their halves W_i = floor(U_i/2), and Y."""

    u_counts: np.ndarray
    w_counts: np.ndarray
    y: int


def half_count_summary(assign: ObjectAssignment) -> HalfCountSummary:
    u = np.zeros(assign.pool_size, dtype=np.int64)
    for ring in assign.rings:
        u[ring] += 1
    w = u // 2
    return HalfCountSummary(u_counts=u, w_counts=w, y=int(w.sum()))


# -- ring samplers ---------------------------------------------------------

def gen_object_rings_uniform(n: int, K: int, P: int,
                             rng: np.random.Generator) -> ObjectAssignment:
    """Independent uniform K-subsets of {0..P-1}, one per node."""
    if not (1 <= K <= P):
        raise InvalidParameterError(f"need 1 <= K <= P, got K={K}, P={P}")
    if n < 0:
        raise InvalidParameterError(f"n must be non-negative, got {n}")
    if n == 0:
        return ObjectAssignment(rings=[], pool_size=P)
    if K / P <= _REJECTION_DENSITY_CUTOFF:
        # iid draws conditioned on all-distinct rows == uniform K-subset
        mat = np.sort(rng.integers(0, P, size=(n, K), dtype=np.int64), axis=1)
        while True:
            bad = np.nonzero((np.diff(mat, axis=1) == 0).any(axis=1))[0] if K > 1 else np.empty(0, int)
            if bad.size == 0:
                break
            mat[bad] = np.sort(rng.integers(0, P, size=(bad.size, K), dtype=np.int64), axis=1)
        rings = list(mat)
    else:
        # indices of the K smallest of P iid uniforms == uniform K-subset
        keys = rng.random((n, P))
        mat = np.sort(np.argpartition(keys, K - 1, axis=1)[:, :K], axis=1)
        rings = list(mat.astype(np.int64))
    return ObjectAssignment(rings=rings, pool_size=P)


def gen_object_rings_binomial(n: int, x: float, P: int,
                              rng: np.random.Generator) -> ObjectAssignment:
    """Each (node, object) membership an independent Bernoulli(x) draw."""
    if not (0.0 <= x <= 1.0):
        raise InvalidParameterError(f"x must be in [0,1], got {x}")
    if P < 1:
        raise InvalidParameterError(f"P must be >= 1, got {P}")
    mask = rng.random((n, P)) < x
    rings = [np.nonzero(mask[i])[0].astype(np.int64) for i in range(n)]
    return ObjectAssignment(rings=rings, pool_size=P)


# -- overlap graph ---------------------------------------------------------

def _pairs_from_rings(assign: ObjectAssignment, d: int) -> np.ndarray:
    """(E, 2) array of node pairs sharing >= d objects.

    Inverted-index counting: group ring memberships by object, emit all
    within-object node pairs, then threshold co-occurrence counts. Same
    graph as pairwise set intersection, much cheaper in the sparse regime.
    """
    n = assign.node_count
    lens = np.fromiter((len(r) for r in assign.rings), dtype=np.int64, count=n)
    total = int(lens.sum())
    if total == 0 or n < 2:
        return np.empty((0, 2), dtype=np.int64)
    node_ids = np.repeat(np.arange(n, dtype=np.int64), lens)
    obj_ids = np.concatenate([r for r in assign.rings if len(r)]) if total else np.empty(0, np.int64)
    order = np.argsort(obj_ids, kind="stable")
    nodes_sorted = node_ids[order]
    counts = np.bincount(obj_ids, minlength=assign.pool_size)
    starts = np.concatenate(([0], np.cumsum(counts)))
    key_parts = []
    for u in np.unique(counts[counts >= 2]):
        u = int(u)
        objs = np.nonzero(counts == u)[0]
        mat = nodes_sorted[starts[objs][:, None] + np.arange(u)[None, :]]
        iu, ju = np.triu_indices(u, 1)
        a = mat[:, iu].ravel()
        b = mat[:, ju].ravel()
        key_parts.append(np.minimum(a, b) * n + np.maximum(a, b))
    if not key_parts:
        return np.empty((0, 2), dtype=np.int64)
    keys = np.concatenate(key_parts)
    uniq, cnt = np.unique(keys, return_counts=True)
    keep = uniq[cnt >= d]
    return np.stack((keep // n, keep % n), axis=1)


def graph_from_rings(assign: ObjectAssignment, d: int) -> GraphTopology:
    """Edge (i, j) iff rings i and j share at least d objects."""
    if d < 1:
        raise InvalidParameterError(f"d must be >= 1, got {d}")
    pairs = _pairs_from_rings(assign, d)
    return GraphTopology(assign.node_count, map(tuple, pairs))


# -- Erdos-Renyi -----------------------------------------------------------

def _decode_pair_index(q: np.ndarray, n: int) -> np.ndarray:
    """Invert the lexicographic (i<j) pair index i*(2n-i-1)/2 + (j-i-1)."""
    q = q.astype(np.int64)
    c = 2 * n - 1
    i = np.floor((c - np.sqrt(c * c - 8.0 * q)) / 2.0).astype(np.int64)
    # fix float rounding at block boundaries
    off = i * (2 * n - i - 1) // 2
    too_big = off > q
    while too_big.any():
        i[too_big] -= 1
        off = i * (2 * n - i - 1) // 2
        too_big = off > q
    nxt = (i + 1) * (2 * n - i - 2) // 2
    too_small = q >= nxt
    while too_small.any():
        i[too_small] += 1
        off = i * (2 * n - i - 1) // 2
        nxt = (i + 1) * (2 * n - i - 2) // 2
        too_small = q >= nxt
    j = q - off + i + 1
    return np.stack((i, j), axis=1)


def gen_er(n: int, p: float, rng: np.random.Generator) -> GraphTopology:
    """Erdos-Renyi G(n, p): each of the C(n,2) edges present independently
    with probability p. Sampled by geometric gap skipping, O(edge count)."""
    if not (0.0 <= p <= 1.0):
        raise InvalidParameterError(f"p must be in [0,1], got {p}")
    m_pairs = n * (n - 1) // 2
    if p == 0.0 or m_pairs == 0:
        return GraphTopology(n)
    if p == 1.0:
        return GraphTopology(n, ((i, j) for i in range(n) for j in range(i + 1, n)))
    idx_parts = []
    pos = -1
    expect = p * m_pairs
    while pos < m_pairs - 1:
        batch = max(32, int(1.2 * expect) + 16)
        gaps = rng.geometric(p, size=batch)
        positions = pos + np.cumsum(gaps)
        idx_parts.append(positions[positions < m_pairs])
        pos = int(positions[-1])
        expect = p * max(0, m_pairs - 1 - pos)
    idx = np.concatenate(idx_parts)
    return GraphTopology(n, map(tuple, _decode_pair_index(idx, n)))


# -- full model ------------------------------------------------------------

def gen_model_graph(params: ModelParams, rng: np.random.Generator,
                    explicit_layers: bool = False) -> GraphTopology:
    """Sample the composed model: d-overlap graph thinned by friendship and
    link survival, i.e. distributed as G_d(n,K,P) intersected with an
    Erdos-Renyi layer at p = f*g.

    Default path thins only the overlap edges (the intersection never looks
    at other pairs). explicit_layers=True restores the literal two-layer
    construction G_d cap G(n,f) cap G(n,g) for differential testing.
    """
    assign = gen_object_rings_uniform(params.n, params.K, params.P, rng)
    if explicit_layers:
        gd = graph_from_rings(assign, params.d)
        layer_f = gen_er(params.n, params.f, rng)
        layer_g = gen_er(params.n, params.g, rng)
        return intersect_graphs(intersect_graphs(gd, layer_f), layer_g)
    pairs = _pairs_from_rings(assign, params.d)
    p = params.p
    if p < 1.0:
        pairs = pairs[rng.random(len(pairs)) < p]
    return GraphTopology(params.n, map(tuple, pairs))


# -- multiset edge graphs ----------------------------------------------------

def gen_multiset_graph(n: int, b: int, d: int,
                       rng: np.random.Generator) -> GraphTopology:
    """Draw b edges uniformly with repetition from all C(n,2) pairs; keep the
    pairs drawn at least d times (d=1 keeps every drawn pair)."""
    if b < 0:
        raise InvalidParameterError(f"b must be >= 0, got {b}")
    if d < 1:
        raise InvalidParameterError(f"d must be >= 1, got {d}")
    m_pairs = n * (n - 1) // 2
    if b == 0 or m_pairs == 0:
        return GraphTopology(n)
    draws = rng.integers(0, m_pairs, size=b, dtype=np.int64)
    uniq, cnt = np.unique(draws, return_counts=True)
    keep = uniq[cnt >= d]
    return GraphTopology(n, map(tuple, _decode_pair_index(keep, n)))


# -- coupling machinery ------------------------------------------------------

@dataclass
class CouplingThreshold:
    x: float
    admissible: bool  # K >= x*P + sqrt(3*(x*P + ln n)*ln n)


def coupling_threshold_x(K: int, P: int, n: int) -> CouplingThreshold:
    """Binomial membership probability x = (K/P)(1 - sqrt(3 ln n / K)) under
    which the binomial-ring graph is dominated by the uniform-ring graph."""
    if n < 2 or K < 1 or P < K:
        raise InvalidParameterError(f"need n >= 2 and 1 <= K <= P, got n={n}, K={K}, P={P}")
    ln_n = math.log(n)
    if K <= 3 * ln_n:
        raise InfeasibleCouplingError(
            f"coupling infeasible: K={K} <= 3 ln n = {3 * ln_n:.4f}"
        )
    x = (K / P) * (1.0 - math.sqrt(3.0 * ln_n / K))
    admissible = K >= x * P + math.sqrt(3.0 * (x * P + ln_n) * ln_n)
    return CouplingThreshold(x=x, admissible=admissible)


@dataclass
class CoupledPair:
    h: GraphTopology  # binomial-ring overlap graph
    g: GraphTopology  # uniform-ring overlap graph built on top of h's rings
    coupling_valid: bool  # every binomial ring fit inside size K
    x: float


def _top_up_ring(ring: np.ndarray, K: int, P: int,
                 rng: np.random.Generator) -> np.ndarray:
    """Grow a ring of size <= K to exactly K with uniform missing objects."""
    have = set(map(int, ring))
    while len(have) < K:
        cand = int(rng.integers(0, P))
        if cand not in have:
            have.add(cand)
    return np.array(sorted(have), dtype=np.int64)


def gen_coupled_pair(n: int, K: int, P: int, d: int,
                     rng: np.random.Generator) -> CoupledPair:
    """Joint sample of the binomial-ring graph H and a uniform-K-ring graph G
    on one probability space.

    Binomial rings are drawn at the coupling threshold x; each ring of size
    <= K is topped up to exactly K objects, so H's edges are contained in
    G's whenever no binomial ring overflowed (coupling_valid). Oversized
    rings are trimmed to a uniform K-subset and the trial is marked invalid.
    """
    thr = coupling_threshold_x(K, P, n)
    assign_b = gen_object_rings_binomial(n, thr.x, P, rng)
    h = graph_from_rings(assign_b, d)
    rings_u = []
    valid = True
    for ring in assign_b.rings:
        if len(ring) <= K:
            rings_u.append(_top_up_ring(ring, K, P, rng))
        else:
            valid = False
            rings_u.append(np.sort(rng.choice(ring, size=K, replace=False)))
    g = graph_from_rings(ObjectAssignment(rings=rings_u, pool_size=P), d)
    return CoupledPair(h=h, g=g, coupling_valid=valid, x=thr.x)


# -- Poissonization ----------------------------------------------------------

@dataclass
class PoissonizationSummary:
    edge_prob: float  # rho = P[Poisson(mu) >= d]
    mu: float
    lam: float
    mean_y: float
    mean_w: float


def poissonization_summary(n: int, P: int, x: float, d: int) -> PoissonizationSummary:
    """Edge probability of the Poissonized multiset graph.

    mean_w = n*x/2 - 1/4 + (1-2x)^n / 4 per object; the Poisson edge-count
    mean is mu = lam / C(n,2) with lam = E[Y] - E[Y]^(5/6)."""
    if not (0.0 < x < 1.0):
        raise InvalidParameterError(f"x must be in (0,1), got {x}")
    if n < 3:
        raise InvalidParameterError(f"n must be >= 3, got {n}")
    if d < 1:
        raise InvalidParameterError(f"d must be >= 1, got {d}")
    if 2 * x < 1.0:
        # exp/log1p form avoids catastrophic cancellation for small x
        pow_term = math.exp(n * math.log1p(-2.0 * x))
    else:
        pow_term = (1.0 - 2.0 * x) ** n
    mean_w = 0.5 * n * x - 0.25 + 0.25 * pow_term
    mean_y = P * mean_w
    if mean_y <= 1.0:
        raise DegenerateRegimeError(
            f"E[Y] = {mean_y:.6g} <= 1: Poissonized mean would be non-positive"
        )
    lam = mean_y - mean_y ** (5.0 / 6.0)
    mu = lam / (n * (n - 1) / 2.0)
    # upper Poisson tail P[Z >= d] via the regularized lower incomplete gamma
    rho = float(gammainc(d, mu))
    return PoissonizationSummary(edge_prob=rho, mu=mu, lam=lam,
                                 mean_y=mean_y, mean_w=mean_w)


def poissonization_edge_prob(n: int, P: int, x: float, d: int) -> float:
    return poissonization_summary(n, P, x, d).edge_prob
