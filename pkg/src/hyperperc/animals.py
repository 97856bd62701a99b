"""Rooted connected edge subgraphs ("animals") of the {m,m} tiling.

An animal is a finite nonempty-or-empty set of edges whose union with
the root vertex is connected.  Each animal is tallied by the triple

    (edges, vertices, boundary)

where boundary counts the tiling edges incident to the animal's
vertices but not contained in it.  The empty animal occupies one row,
(0, 1, m), with count 1.

The host ball for max_edges = n is grown with radius n: a connected
subgraph with e edges containing the root only reaches vertices at
graph distance <= e, and it can never contain two distinct vertices at
distance n, so the patch truncated at layer n together with per-vertex
external degrees reproduces the tallies of the infinite tiling exactly.
"""

from __future__ import annotations

import hashlib
import io
import multiprocessing
import os
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from . import _kernel
from .tiling import BallGraph, build_ball_graph
from ._patch import DEFAULT_MAX_VERTICES, ResourceLimitError

__all__ = [
    "Animal",
    "TallyTable",
    "enumerate_animals",
    "stream_animals",
    "iter_animals",
    "animal_stats",
    "host_ball",
]

CSV_HEADER = "edges,vertices,boundary,count"


# -- tally table ---------------------------------------------------------------


@dataclass
class TallyTable:
    """Counts of rooted animals, keyed by (edges, vertices, boundary)."""

    m: int
    max_edges: int
    counts: dict[tuple[int, int, int], int] = field(default_factory=dict)

    def rows(self) -> list[tuple[int, int, int, int]]:
        """Rows sorted by edges asc, then vertices desc, then boundary desc."""
        keys = sorted(self.counts, key=lambda k: (k[0], -k[1], -k[2]))
        return [(e, v, b, self.counts[(e, v, b)]) for e, v, b in keys]

    def total_animals(self) -> int:
        return sum(self.counts.values())

    def restricted(self, n: int) -> "TallyTable":
        """Sub-table of rows with at most n edges."""
        if n > self.max_edges:
            raise ValueError(f"table only goes up to {self.max_edges} edges")
        return TallyTable(
            m=self.m,
            max_edges=n,
            counts={k: c for k, c in self.counts.items() if k[0] <= n},
        )

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(CSV_HEADER + "\n")
        for e, v, b, c in self.rows():
            out.write(f"{e},{v},{b},{c}\n")
        return out.getvalue()

    def digest(self) -> str:
        return hashlib.sha256(self.to_csv().encode()).hexdigest()

    @classmethod
    def from_csv(cls, text: str) -> "TallyTable":
        lines = [ln for ln in text.strip().splitlines() if ln]
        if not lines or lines[0] != CSV_HEADER:
            raise ValueError(f"expected header {CSV_HEADER!r}")
        counts: dict[tuple[int, int, int], int] = {}
        for ln in lines[1:]:
            e, v, b, c = (int(x) for x in ln.split(","))
            key = (e, v, b)
            if key in counts:
                raise ValueError(f"duplicate row {key}")
            counts[key] = c
        empty = [k for k in counts if k[0] == 0]
        if len(empty) != 1 or empty[0][1] != 1 or counts[empty[0]] != 1:
            raise ValueError("table lacks the single empty-animal row (0,1,m):1")
        m = empty[0][2]
        return cls(m=m, max_edges=max(k[0] for k in counts), counts=counts)

    def check_consistency(self) -> None:
        """Structural sanity of every row; raises ValueError on failure."""
        for (e, v, b), c in self.counts.items():
            if c <= 0:
                raise ValueError(f"row ({e},{v},{b}) has nonpositive count")
            if not (0 <= e <= self.max_edges):
                raise ValueError(f"edge count {e} out of range")
            if not (1 <= v <= e + 1):
                raise ValueError(f"row ({e},{v},{b}): vertices exceed edges+1")
            # m*v edge slots split into 2e internal, b boundary, rest chords
            if b < 0 or b > self.m * v - 2 * e:
                raise ValueError(f"row ({e},{v},{b}): boundary out of range")
        if self.counts.get((0, 1, self.m)) != 1:
            raise ValueError("missing empty-animal row")


# -- hosts ---------------------------------------------------------------------


def host_ball(m: int, max_edges: int,
              max_vertices: int = DEFAULT_MAX_VERTICES) -> BallGraph:
    """The smallest host ball that tallies animals of max_edges exactly."""
    return build_ball_graph(m, max(1, max_edges), max_vertices=max_vertices)


# -- pure Python enumeration (reference path, also powers stream) -------------


def _iter_triples(host: BallGraph, nmax: int) -> Iterator[tuple[int, int, int, list[int]]]:
    """Yield (edges, vertices, boundary, edge_ids) for each rooted animal.

    Recursive include/exclude over candidates in discovery order; each
    animal appears exactly once.  The empty animal is yielded first.
    """
    m = host.m
    indptr, adj_edge = host.indptr, host.adj_edge
    eu, ev = host.edge_u, host.edge_v
    ext = host.external_degree
    n_edges = host.edge_count
    reached = bytearray(n_edges)
    in_set = bytearray(host.vertex_count)

    in_set[0] = 1
    cand: list[int] = []
    for t in range(indptr[0], indptr[1]):
        e = int(adj_edge[t])
        reached[e] = 1
        cand.append(e)
    incident = len(cand) + int(ext[0])
    yield (0, 1, incident, [])

    chosen: list[int] = []

    def explore(pos: int, hi: int, e_cnt: int, v_cnt: int,
                incident: int) -> Iterator[tuple[int, int, int, list[int]]]:
        while pos < hi:
            e = cand[pos]
            pos += 1
            u, v = int(eu[e]), int(ev[e])
            w = u if not in_set[u] else (v if not in_set[v] else -1)
            cstart = len(cand)
            dI = 0
            if w >= 0:
                in_set[w] = 1
                dI = int(ext[w])
                for t in range(indptr[w], indptr[w + 1]):
                    e2 = int(adj_edge[t])
                    if not reached[e2]:
                        reached[e2] = 1
                        cand.append(e2)
                dI += len(cand) - cstart
            chosen.append(e)
            ec, vc = e_cnt + 1, v_cnt + (1 if w >= 0 else 0)
            inc = incident + dI
            yield (ec, vc, inc - ec, list(chosen))
            if ec < nmax:
                yield from explore(pos, len(cand), ec, vc, inc)
            chosen.pop()
            for t in range(cstart, len(cand)):
                reached[cand[t]] = 0
            del cand[cstart:]
            if w >= 0:
                in_set[w] = 0

    if nmax >= 1:
        yield from explore(0, len(cand), 0, 1, incident)


def iter_animals(m: int, max_edges: int,
                 host: BallGraph | None = None) -> Iterator[tuple[int, int, int]]:
    """Iterate (edges, vertices, boundary) triples of all rooted animals."""
    if max_edges < 0:
        raise ValueError("max_edges must be nonnegative")
    if host is None:
        host = host_ball(m, max_edges)
    for e, v, b, _ in _iter_triples(host, max_edges):
        yield (e, v, b)


def stream_animals(m: int, max_edges: int,
                   sink: Callable[[int, int, int], None],
                   host: BallGraph | None = None) -> int:
    """Feed each animal's triple to sink; returns the number of animals."""
    n = 0
    for triple in iter_animals(m, max_edges, host=host):
        sink(*triple)
        n += 1
    return n


# -- production enumeration ----------------------------------------------------

_FORK_HOST: dict = {}


def _subtree_tally(host: BallGraph, nmax: int, first_idx: int) -> np.ndarray:
    m = host.m
    tally = np.zeros((nmax + 1, nmax + 2, m * (nmax + 1) + 1), dtype=np.int64)
    _kernel.count_subtree(
        host.indptr, host.adj_edge, host.adj_nbr,
        host.edge_u, host.edge_v, host.external_degree,
        m, nmax, first_idx, tally,
    )
    return tally


def _subtree_task(args) -> bytes:
    nmax, first_idx = args
    return _subtree_tally(_FORK_HOST["host"], nmax, first_idx).tobytes()


def enumerate_animals(m: int, max_edges: int, workers: int = 1,
                      host: BallGraph | None = None,
                      max_vertices: int = DEFAULT_MAX_VERTICES) -> TallyTable:
    """Tally all rooted animals of the {m,m} tiling with <= max_edges edges.

    The result is independent of workers; tasks split by the first
    included root edge and their integer tallies add associatively.
    """
    if m < 4:
        raise ValueError(f"m must be at least 4, got {m}")
    if max_edges < 0:
        raise ValueError("max_edges must be nonnegative")
    if host is None:
        host = host_ball(m, max_edges, max_vertices=max_vertices)
    if host.m != m or host.radius < max(1, max_edges):
        raise ValueError("host ball too small for requested max_edges")

    nmax = max_edges
    root_deg = int(host.indptr[1] - host.indptr[0])
    shape = (nmax + 1, nmax + 2, m * (nmax + 1) + 1)
    total = np.zeros(shape, dtype=np.int64)
    if nmax >= 1:
        if workers <= 1 or root_deg <= 1:
            for first_idx in range(root_deg):
                total += _subtree_tally(host, nmax, first_idx)
        else:
            # fork shares the host read-only with workers; results merge
            # in task order so the tally never depends on scheduling
            _FORK_HOST["host"] = host
            try:
                ctx = multiprocessing.get_context("fork")
                with ctx.Pool(min(workers, root_deg)) as pool:
                    parts = pool.map(
                        _subtree_task,
                        [(nmax, i) for i in range(root_deg)],
                    )
            finally:
                _FORK_HOST.clear()
            for blob in parts:
                total += np.frombuffer(blob, dtype=np.int64).reshape(shape)

    counts: dict[tuple[int, int, int], int] = {}
    root_incident = root_deg + int(host.external_degree[0])
    counts[(0, 1, root_incident)] = 1
    nz = np.argwhere(total > 0)
    for e, v, b in nz:
        counts[(int(e), int(v), int(b))] = int(total[e, v, b])
    table = TallyTable(m=m, max_edges=max_edges, counts=counts)
    table.check_consistency()
    return table


def default_workers() -> int:
    n = os.cpu_count() or 1
    return max(1, n)


# -- individual animals ---------------------------------------------------------


@dataclass(frozen=True)
class Animal:
    """A rooted animal given by its host edge ids."""

    edges: frozenset[int]


def animal_stats(animal: Animal, host: BallGraph) -> tuple[int, int, int]:
    """(edges, vertices, boundary) of an animal, validated against host.

    Raises ValueError if the animal is not a connected subgraph
    containing the root, or if it touches the host frontier in a way
    that would make the boundary count unreliable.  Frontier vertices
    (layer == radius, partial adjacency) are fine as long as the animal
    has at most `radius` edges: such an animal contains at most one of
    them, so no tiling edge missing from the host can join two animal
    vertices and the external-degree accounting is exact.
    """
    ids = sorted(animal.edges)
    if not all(0 <= e < host.edge_count for e in ids):
        raise ValueError("edge id out of range for host")
    verts: set[int] = {0}
    if ids:
        # connectivity by accretion from the root
        remaining = set(ids)
        frontier = True
        while frontier and remaining:
            frontier = False
            for e in sorted(remaining):
                u, v = int(host.edge_u[e]), int(host.edge_v[e])
                if u in verts or v in verts:
                    verts.update((u, v))
                    remaining.discard(e)
                    frontier = True
        if remaining:
            raise ValueError("animal is not connected to the root")
    frontier = [v for v in verts if not host.complete[v]]
    for v in frontier:
        if host.layer[v] < host.radius:
            raise ValueError("animal touches an incomplete inner vertex")
    if frontier and len(ids) > host.radius:
        raise ValueError(
            "animal touches the host frontier; use a host with larger radius"
        )
    edge_set = set(ids)
    boundary = 0
    for v in verts:
        boundary += int(host.external_degree[v])
        for t in range(int(host.indptr[v]), int(host.indptr[v + 1])):
            e2 = int(host.adj_edge[t])
            if e2 in edge_set:
                continue
            u2, v2 = int(host.edge_u[e2]), int(host.edge_v[e2])
            # count each boundary edge once, from its smaller endpoint in C
            other = v2 if u2 == v else u2
            if other in verts and other < v:
                continue
            boundary += 1
    return (len(ids), len(verts), boundary)
