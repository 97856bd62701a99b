"""Bond percolation trials and component statistics on closed tilings.

Randomness is counter based: a trial's configuration is a pure function
of (master seed, trial index, edge index), so runs reproduce exactly
for any execution order and the same seed never yields overlapping
streams across trials.

The rank identities used here avoid matrix elimination: for a graph
with kappa components, the GF(2) rank of its incidence matrix is
|V| - kappa, so union-find gives ranks in near-linear time.  The
equality with actual matrix ranks is property-tested against the gf2
module.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .gf2 import EdgeConfig

__all__ = [
    "TrialRecord",
    "Estimate",
    "sample_config",
    "count_components",
    "rank_difference_trial",
    "monte_carlo_rank_difference",
    "iter_trials",
    "expected_kappa_bruteforce",
    "expected_kappa_series",
    "trials_to_csv",
    "TRIAL_CSV_HEADER",
]

TRIAL_CSV_HEADER = ("seed,p,kappa,rank_primal,rank_dual_complement,"
                    "h1_dim,largest_component_edges")


@dataclass(frozen=True)
class TrialRecord:
    """Outcome of one percolation trial on a closed tiling."""

    seed: int
    p: float
    kappa: int
    rank_primal: int
    rank_dual_complement: int
    h1_dim: int
    largest_component_edges: int


@dataclass(frozen=True)
class Estimate:
    mean: float
    stderr: float
    trials: int


def sample_config(t, p: float, seed: int, trial: int = 0) -> EdgeConfig:
    """Open each edge independently with probability p.

    Philox keyed by seed with the trial index in the counter: the edge
    stream for (seed, trial) is fixed regardless of how many trials run
    or in which order.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0,1], got {p}")
    n_edges = len(t.edges)
    gen = np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, trial]))
    open_mask = gen.random(n_edges) < p
    packed = np.packbits(open_mask, bitorder="little")
    return EdgeConfig(n_edges, int.from_bytes(packed.tobytes(), "little"))


class _UnionFind:
    __slots__ = ("parent", "count")

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.count = n

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        self.count -= 1
        return True


def _iter_bits(bits: int) -> Iterator[int]:
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


def count_components(t, config: EdgeConfig) -> int:
    """Components of the open subgraph; isolated vertices count."""
    if config.edge_count != len(t.edges):
        raise ValueError("config size does not match tiling")
    uf = _UnionFind(t.vertex_count)
    edges = t.edges
    for e in _iter_bits(config.bits):
        uf.union(*edges[e])
    return uf.count


def _largest_component_edges(t, config: EdgeConfig) -> int:
    uf = _UnionFind(t.vertex_count)
    edges = t.edges
    open_edges = [edges[e] for e in _iter_bits(config.bits)]
    for u, v in open_edges:
        uf.union(u, v)
    per_root: dict[int, int] = {}
    for u, _ in open_edges:
        r = uf.find(u)
        per_root[r] = per_root.get(r, 0) + 1
    return max(per_root.values(), default=0)


def dual_graph_edges(t) -> list[tuple[int, int]]:
    """Edge list of the dual graph under the shared edge numbering."""
    ef: dict[int, list[int]] = {}
    for f, face in enumerate(t.faces):
        for e in face:
            ef.setdefault(e, []).append(f)
    out = []
    for e in range(len(t.edges)):
        fs = ef.get(e, [])
        if len(fs) != 2:
            raise ValueError("trial requires a closed tiling")
        out.append((fs[0], fs[1]))
    return out


def _kappa_on_edges(n_verts: int, edges: list[tuple[int, int]], bits: int) -> int:
    uf = _UnionFind(n_verts)
    for e in _iter_bits(bits):
        uf.union(*edges[e])
    return uf.count


def rank_difference_trial(t, p: float, seed: int, trial: int = 0,
                          dual_edges: list[tuple[int, int]] | None = None,
                          config: EdgeConfig | None = None) -> TrialRecord:
    """One trial: ranks of the open primal and closed dual subgraphs.

    rank_primal is |V| - kappa(open subgraph); rank_dual_complement is
    |F| - kappa(dual subgraph on closed edges); h1_dim follows from the
    rank formula |open| - |F| + 1 + rank_dual_complement - rank_primal.
    """
    if dual_edges is None:
        dual_edges = dual_graph_edges(t)
    if config is None:
        config = sample_config(t, p, seed, trial)
    n_faces = len(t.faces)
    kappa = count_components(t, config)
    rank_primal = t.vertex_count - kappa
    kappa_dual = _kappa_on_edges(n_faces, dual_edges, config.complement().bits)
    rank_dual_c = n_faces - kappa_dual
    h1 = len(config) - n_faces + 1 + rank_dual_c - rank_primal
    return TrialRecord(
        seed=seed,
        p=p,
        kappa=kappa,
        rank_primal=rank_primal,
        rank_dual_complement=rank_dual_c,
        h1_dim=h1,
        largest_component_edges=_largest_component_edges(t, config),
    )


def iter_trials(t, p: float, trials: int, seed: int) -> Iterator[TrialRecord]:
    dual_edges = dual_graph_edges(t)
    for trial in range(trials):
        yield rank_difference_trial(t, p, seed, trial, dual_edges=dual_edges)


def monte_carlo_rank_difference(t, p: float, trials: int, seed: int) -> Estimate:
    """Mean of (rank_dual_complement - rank_primal) / |E| over trials."""
    if trials < 1:
        raise ValueError("need at least one trial")
    n_edges = len(t.edges)
    vals = [
        (rec.rank_dual_complement - rec.rank_primal) / n_edges
        for rec in iter_trials(t, p, trials, seed)
    ]
    mean = math.fsum(vals) / trials
    stderr = (statistics.stdev(vals) / math.sqrt(trials)) if trials > 1 else 0.0
    return Estimate(mean=mean, stderr=stderr, trials=trials)


def trials_to_csv(records) -> str:
    lines = [TRIAL_CSV_HEADER]
    for r in records:
        lines.append(f"{r.seed},{r.p!r},{r.kappa},{r.rank_primal},"
                     f"{r.rank_dual_complement},{r.h1_dim},"
                     f"{r.largest_component_edges}")
    return "\n".join(lines) + "\n"


# -- expected component counts --------------------------------------------------


def expected_kappa_bruteforce(graph, p: float) -> float:
    """E[kappa] by summing over all 2^|E| configurations.

    graph needs .vertex_count and .edges; |E| is capped at 22.
    """
    edges = list(graph.edges)
    ne = len(edges)
    if ne > 22:
        raise ValueError(f"brute force capped at 22 edges, got {ne}")
    n = graph.vertex_count
    weights = [p ** k * (1 - p) ** (ne - k) for k in range(ne + 1)]
    terms = []
    for bits in range(1 << ne):
        kappa = _kappa_on_edges(n, edges, bits)
        terms.append(kappa * weights[bits.bit_count()])
    return math.fsum(terms)


def _connected_from_root(root: int, edges, adj) -> Iterator[tuple[int, int]]:
    """(edge_count, boundary) of connected subgraphs rooted at root.

    Yields each connected edge set whose smallest vertex is root exactly
    once; vertices below root are banned from joining, but their edges
    still count toward the boundary.
    """
    n = len(adj)
    reached = bytearray(len(edges))
    in_set = bytearray(n)
    in_set[root] = 1
    cand: list[int] = []
    for e, w in adj[root]:
        if w > root:
            reached[e] = 1
            cand.append(e)

    def explore(pos: int, hi: int, e_cnt: int,
                incident: int) -> Iterator[tuple[int, int]]:
        while pos < hi:
            e = cand[pos]
            pos += 1
            u, v = edges[e]
            w = u if not in_set[u] else (v if not in_set[v] else -1)
            cstart = len(cand)
            new_incident = incident
            if w >= 0:
                new_incident += sum(1 for _, x in adj[w] if not in_set[x])
                in_set[w] = 1
                for e2, x in adj[w]:
                    if not reached[e2] and (in_set[x] or x > root):
                        reached[e2] = 1
                        cand.append(e2)
            ec = e_cnt + 1
            yield (ec, new_incident - ec)
            yield from explore(pos, len(cand), ec, new_incident)
            for t in range(cstart, len(cand)):
                reached[cand[t]] = 0
            del cand[cstart:]
            if w >= 0:
                in_set[w] = 0

    yield from explore(0, len(cand), 0, len(adj[root]))


def expected_kappa_series(graph, p: float) -> float:
    """E[kappa] as a sum over connected subgraphs.

    Every connected subgraph C (including single vertices) contributes
    p^edges(C) * (1-p)^boundary(C): the probability that C occurs as an
    open cluster.  Equals the brute force sum exactly.
    """
    n = graph.vertex_count
    edges = list(graph.edges)
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for e, (u, v) in enumerate(edges):
        adj[u].append((e, v))
        adj[v].append((e, u))
    q = 1 - p
    terms = [q ** len(adj[v]) for v in range(n)]  # single-vertex clusters
    for root in range(n):
        for e_cnt, boundary in _connected_from_root(root, edges, adj):
            terms.append(p ** e_cnt * q ** boundary)
    return math.fsum(terms)
