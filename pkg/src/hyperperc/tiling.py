"""Combinatorial tilings: disk patches of {m,m}, square tori, and duals.

A Tiling is a purely combinatorial object: a vertex count, an ordered
edge list, and (when known) faces given as cyclic lists of edge ids.
Vertex v of the self-dual tiling {m,m} has degree m and every face is an
m-gon; the square torus serves as a small closed host with the same
edge/face bookkeeping.
"""

from __future__ import annotations

import json
from collections import Counter, deque
from dataclasses import dataclass, field

import numpy as np

from ._patch import (
    DEFAULT_MAX_VERTICES,
    ResourceLimitError,
    grow_patch,
    relabel_by_layer,
)

__all__ = [
    "Tiling",
    "BallGraph",
    "BallCertificate",
    "ResourceLimitError",
    "build_ball",
    "build_ball_graph",
    "build_torus",
    "dual",
    "validate",
    "to_json",
    "from_json",
]


@dataclass
class Tiling:
    """A combinatorial tiling with explicit faces.

    kind is one of "disk", "torus", "dual".  Edges are (u, v) pairs with
    u < v, in discovery order; faces are cyclic edge-id lists.  rotation
    gives, for each vertex, its incident edges in geometric order around
    the vertex (a cycle for interior vertices, a path for boundary ones).
    layer[v] is the graph distance from vertex 0 for disk patches.
    """

    kind: str
    m: int
    vertex_count: int
    edges: list[tuple[int, int]]
    faces: list[list[int]]
    rotation: list[list[int]] | None = None
    layer: list[int] | None = None
    radius: int | None = None
    k: int | None = None
    meta: dict = field(default_factory=dict)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def face_count(self) -> int:
        return len(self.faces)

    def degrees(self) -> list[int]:
        deg = [0] * self.vertex_count
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def adjacency(self) -> list[list[tuple[int, int]]]:
        """Per-vertex list of (edge id, neighbor), in edge-id order."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.vertex_count)]
        for e, (u, v) in enumerate(self.edges):
            adj[u].append((e, v))
            adj[v].append((e, u))
        return adj

    def edge_faces(self) -> list[list[int]]:
        """For each edge, the list of face ids containing it."""
        ef: list[list[int]] = [[] for _ in self.edges]
        for f, face in enumerate(self.faces):
            for e in face:
                ef[e].append(f)
        return ef


@dataclass
class BallGraph:
    """Graph skeleton of a disk patch, for large-scale enumeration.

    Faces are not materialized.  external_degree[v] counts the edges of
    the infinite tiling at v that fall outside the patch; it is zero for
    every complete (interior) vertex.
    """

    m: int
    radius: int
    vertex_count: int
    edge_u: np.ndarray
    edge_v: np.ndarray
    layer: np.ndarray
    degree: np.ndarray
    complete: np.ndarray          # bool: all m faces at v present
    external_degree: np.ndarray
    indptr: np.ndarray            # CSR over vertices
    adj_edge: np.ndarray
    adj_nbr: np.ndarray

    @property
    def edge_count(self) -> int:
        return int(self.edge_u.shape[0])

    def layer_sizes(self) -> list[int]:
        return np.bincount(self.layer).tolist()


def _csr_from_edges(n: int, eu: np.ndarray, ev: np.ndarray):
    """Adjacency in CSR form; entries at each vertex sorted by edge id."""
    m_e = eu.shape[0]
    eids = np.arange(m_e, dtype=np.int32)
    ends = np.concatenate([eu, ev])
    other = np.concatenate([ev, eu])
    both = np.concatenate([eids, eids])
    order = np.lexsort((both, ends))
    adj_edge = both[order]
    adj_nbr = other[order]
    counts = np.bincount(ends, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, adj_edge.astype(np.int32), adj_nbr.astype(np.int32)


def build_ball_graph(m: int, radius: int,
                     max_vertices: int = DEFAULT_MAX_VERTICES) -> BallGraph:
    """Grow the skeleton of a disk patch of {m,m}.

    Every vertex at graph distance < radius from the root is complete
    (degree m, all faces present); boundary vertices carry the count of
    their missing tiling edges in external_degree.
    """
    raw = grow_patch(m, radius, record_faces=False, max_vertices=max_vertices)
    # drop everything beyond layer radius: animals with at most `radius`
    # edges cannot reach it, and m - degree still counts the tiling edges
    # missing at each kept vertex
    parts = relabel_by_layer(raw, max_layer=radius)
    layer = parts["layer"]
    degree = parts["degree"]
    nfaces = parts["nfaces"]
    n = layer.shape[0]
    eu, ev = parts["edge_u"], parts["edge_v"]
    indptr, adj_edge, adj_nbr = _csr_from_edges(n, eu, ev)
    complete = (nfaces == m) & (degree == m)
    if np.any(degree > m):
        raise RuntimeError("construction bug: degree exceeds m")
    if not np.all(complete[layer < radius]):
        raise RuntimeError("construction bug: inner vertex left incomplete")
    return BallGraph(
        m=m,
        radius=radius,
        vertex_count=n,
        edge_u=eu,
        edge_v=ev,
        layer=layer,
        degree=degree,
        complete=complete,
        external_degree=(m - degree).astype(np.int32),
        indptr=indptr,
        adj_edge=adj_edge,
        adj_nbr=adj_nbr,
    )


def _rotations_from_faces(vertex_count: int, edges: list[tuple[int, int]],
                          faces: list[list[int]]) -> list[list[int]]:
    """Reconstruct per-vertex cyclic edge order from the face lists.

    At each vertex, two edges are consecutive in rotation iff some face
    contains both of them there.  Interior vertices yield a cycle,
    boundary vertices a path (the outer gap breaks the cycle).
    """
    link: list[dict[int, list[int]]] = [dict() for _ in range(vertex_count)]

    def add_pair(v: int, e1: int, e2: int) -> None:
        link[v].setdefault(e1, []).append(e2)
        link[v].setdefault(e2, []).append(e1)

    for face in faces:
        nf = len(face)
        for i in range(nf):
            e1, e2 = face[i], face[(i + 1) % nf]
            u1, v1 = edges[e1]
            shared = {u1, v1} & set(edges[e2])
            if len(shared) != 1:
                raise ValueError("face edges do not chain at a unique vertex")
            add_pair(shared.pop(), e1, e2)
    # vertices of degree 1..2 with no faces at all never appear in link;
    # give them their incident edges in id order
    incident: list[list[int]] = [[] for _ in range(vertex_count)]
    for e, (u, v) in enumerate(edges):
        incident[u].append(e)
        incident[v].append(e)

    rotation: list[list[int]] = []
    for v in range(vertex_count):
        edges_v = incident[v]
        if not edges_v:
            rotation.append([])
            continue
        lk = link[v]
        endpoints = sorted(e for e in edges_v if len(lk.get(e, ())) < 2)
        if endpoints:
            start = endpoints[0]  # boundary vertex: walk the path
        else:
            start = min(edges_v)  # interior: cycle, canonical start
        order = [start]
        prev = -1
        cur = start
        while True:
            nbrs = [e for e in lk.get(cur, ()) if e != prev]
            if not nbrs:
                break
            nbrs.sort()
            nxt = nbrs[0]
            if nxt == start:
                break
            order.append(nxt)
            prev, cur = cur, nxt
        if len(order) != len(edges_v):
            raise ValueError(f"rotation at vertex {v} does not chain")
        rotation.append(order)
    return rotation


def build_ball(m: int, radius: int,
               max_vertices: int = DEFAULT_MAX_VERTICES) -> Tiling:
    """Build a disk patch of {m,m} with faces, rotations and layers.

    Deterministic: vertices are numbered root first, then layer by layer
    in discovery order; edge ids follow discovery order.
    """
    raw = grow_patch(m, radius, record_faces=True, max_vertices=max_vertices)
    parts = relabel_by_layer(raw)
    eu, ev = parts["edge_u"], parts["edge_v"]
    edges = list(zip(eu.tolist(), ev.tolist()))
    n = parts["layer"].shape[0]
    faces = [list(face) for face in parts["faces"]]
    rotation = _rotations_from_faces(n, edges, faces)
    return Tiling(
        kind="disk",
        m=m,
        vertex_count=n,
        edges=edges,
        faces=faces,
        rotation=rotation,
        layer=parts["layer"].tolist(),
        radius=radius,
    )


def build_torus(k: int) -> Tiling:
    """Square torus with k*k vertices, 2k^2 edges and k^2 square faces.

    Vertex (i, j) has id i*k + j.  The east edge of (i, j) has id
    2*(i*k + j), the north edge 2*(i*k + j) + 1.
    """
    if k < 3:
        raise ValueError(f"torus size must be at least 3, got {k}")

    def vid(i: int, j: int) -> int:
        return (i % k) * k + (j % k)

    def east(i: int, j: int) -> int:
        return 2 * vid(i, j)

    def north(i: int, j: int) -> int:
        return 2 * vid(i, j) + 1

    edges: list[tuple[int, int]] = []
    for i in range(k):
        for j in range(k):
            u = vid(i, j)
            a, b = u, vid(i + 1, j)
            edges.append((min(a, b), max(a, b)))
            a, b = u, vid(i, j + 1)
            edges.append((min(a, b), max(a, b)))
    faces = []
    for i in range(k):
        for j in range(k):
            # square with corners (i,j), (i+1,j), (i+1,j+1), (i,j+1)
            faces.append([east(i, j), north(i + 1, j), east(i, j + 1), north(i, j)])
    rotation = []
    for i in range(k):
        for j in range(k):
            rotation.append([east(i, j), north(i, j), east(i - 1, j), north(i, j - 1)])
    return Tiling(
        kind="torus",
        m=4,
        vertex_count=k * k,
        edges=edges,
        faces=faces,
        rotation=rotation,
        k=k,
    )


def dual(t: Tiling) -> Tiling:
    """Dual tiling: faces become vertices; edge i crosses primal edge i.

    Requires a closed tiling (every edge borders exactly two faces).
    dual(dual(t)) reproduces t's edges and faces up to cyclic rotation.
    """
    ef = t.edge_faces()
    for e, fs in enumerate(ef):
        if len(fs) != 2:
            raise ValueError(
                f"dual requires a closed tiling; edge {e} lies in {len(fs)} faces"
            )
    edges = [(min(fs), max(fs)) for fs in ef]
    if t.rotation is None:
        rotation_src = _rotations_from_faces(t.vertex_count, t.edges, t.faces)
    else:
        rotation_src = t.rotation
    faces = [list(rot) for rot in rotation_src]  # dual face around primal vertex
    rotation = [list(face) for face in t.faces]  # dual rotation around primal face
    return Tiling(
        kind="dual",
        m=t.m,
        vertex_count=len(t.faces),
        edges=edges,
        faces=faces,
        rotation=rotation,
        k=t.k,
        meta={"dual_of": t.kind},
    )


# -- validation --------------------------------------------------------------


@dataclass
class BallCertificate:
    """Validation report for a tiling.

    radius is the largest r such that every vertex at distance < r from
    vertex 0 is complete (for closed tilings: max layer + 1).
    """

    radius: int
    interior_vertex_count: int
    layer_sizes: list[int]
    checks_passed: list[str]
    checks_failed: list[str]

    @property
    def ok(self) -> bool:
        return not self.checks_failed


def _bfs_layers(t: Tiling, root: int = 0) -> list[int]:
    dist = [-1] * t.vertex_count
    dist[root] = 0
    adj = t.adjacency()
    q = deque([root])
    while q:
        u = q.popleft()
        for _, w in adj[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                q.append(w)
    return dist

def _interior_girth(t: Tiling, interior: list[bool]) -> int | None:
    """Shortest cycle through interior vertices only; None if acyclic."""
    adj: list[list[int]] = [[] for _ in range(t.vertex_count)]
    for u, v in t.edges:
        if interior[u] and interior[v]:
            adj[u].append(v)
            adj[v].append(u)
    best: int | None = None
    for s in range(t.vertex_count):
        if not interior[s]:
            continue
        dist = {s: 0}
        parent = {s: -1}
        q = deque([s])
        while q:
            u = q.popleft()
            if best is not None and 2 * dist[u] >= best:
                continue
            for w in adj[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    q.append(w)
                elif parent[u] != w:
                    cyc = dist[u] + dist[w] + 1
                    if best is None or cyc < best:
                        best = cyc
    return best


def validate(t: Tiling) -> BallCertificate:
    """Run the invariant suite; failures are reported, not raised."""
    passed: list[str] = []
    failed: list[str] = []

    def check(name: str, fn) -> bool:
        try:
            ok = bool(fn())
        except Exception:
            ok = False
        (passed if ok else failed).append(name)
        return ok

    n, ne, nf = t.vertex_count, t.edge_count, t.face_count
    check("edges_simple", lambda: all(
        0 <= u < n and 0 <= v < n and u != v for u, v in t.edges
    ) and len({tuple(sorted(e)) for e in t.edges}) == ne)
    check("face_lengths", lambda: all(len(f) == t.m for f in t.faces))

    def faces_are_cycles() -> bool:
        for face in t.faces:
            seen_v = []
            for i in range(len(face)):
                e1, e2 = face[i], face[(i + 1) % len(face)]
                if not (0 <= e1 < ne):
                    return False
                shared = set(t.edges[e1]) & set(t.edges[e2])
                if len(shared) != 1:
                    return False
                seen_v.append(shared.pop())
            if len(set(seen_v)) != len(face):
                return False
        return True

    check("faces_are_cycles", faces_are_cycles)

    ef = t.edge_faces()
    closed = t.kind in ("torus", "dual")
    if closed:
        check("each_edge_in_two_faces", lambda: all(len(fs) == 2 for fs in ef))
    else:
        check("each_edge_in_le_two_faces", lambda: all(len(fs) <= 2 for fs in ef))

    def faces_share_le_one_edge() -> bool:
        pair_count = Counter()
        for fs in ef:
            if len(fs) == 2:
                pair_count[tuple(sorted(fs))] += 1
        return all(c <= 1 for c in pair_count.values())

    check("faces_share_at_most_one_edge", faces_share_le_one_edge)

    euler = n - ne + nf
    if closed:
        check("euler_torus", lambda: euler == 0)
    else:
        check("euler_disk", lambda: euler == 1)

    deg = t.degrees()
    face_at = [0] * n
    for face in t.faces:
        for i in range(len(face)):
            e1, e2 = face[i], face[(i + 1) % len(face)]
            shared = set(t.edges[e1]) & set(t.edges[e2])
            if len(shared) == 1:
                face_at[shared.pop()] += 1
    interior = [face_at[v] == t.m for v in range(n)]
    check("interior_degree", lambda: all(
        deg[v] == t.m for v in range(n) if interior[v]
    ))
    if closed:
        check("all_vertices_interior", lambda: all(interior))

    dist = _bfs_layers(t)
    check("connected", lambda: all(d >= 0 for d in dist))
    if t.layer is not None:
        check("layers_match_bfs", lambda: list(t.layer) == dist)

    def face_corners(face: list[int]) -> list[int]:
        corners = []
        for i in range(len(face)):
            shared = set(t.edges[face[i]]) & set(t.edges[face[(i + 1) % len(face)]])
            corners.extend(shared)
        return corners

    # the interior region first contains a cycle when a whole face fits in it
    has_interior_face = any(
        all(interior[v] for v in face_corners(face)) for face in t.faces
    )
    if t.kind == "disk" and t.m >= 5 and has_interior_face:
        check("interior_girth", lambda: _interior_girth(t, interior) == t.m)

    check("rotation_consistent", lambda: t.rotation is None or all(
        sorted(t.rotation[v]) == sorted(
            e for e, (a, b) in enumerate(t.edges) if v in (a, b)
        )
        for v in range(n)
    ))

    max_d = max((d for d in dist if d >= 0), default=0)
    layer_sizes = [0] * (max_d + 1)
    for d in dist:
        if d >= 0:
            layer_sizes[d] += 1
    if all(interior):
        radius = max_d + 1
    else:
        radius = min(dist[v] for v in range(n) if not interior[v])
    return BallCertificate(
        radius=radius,
        interior_vertex_count=sum(interior),
        layer_sizes=layer_sizes,
        checks_passed=passed,
        checks_failed=failed,
    )


# -- serialization ------------------------------------------------------------


def to_json(t: Tiling) -> str:
    """Canonical JSON form; identical builds give identical bytes."""
    doc = {
        "kind": t.kind,
        "m": t.m,
        "vertex_count": t.vertex_count,
        "edges": [[u, v] for u, v in t.edges],
        "faces": [list(f) for f in t.faces],
    }
    if t.radius is not None:
        doc["radius"] = t.radius
    if t.k is not None:
        doc["k"] = t.k
    if t.layer is not None:
        doc["layer"] = list(t.layer)
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def from_json(text: str) -> Tiling:
    doc = json.loads(text)
    edges = [(int(u), int(v)) for u, v in doc["edges"]]
    faces = [[int(e) for e in f] for f in doc["faces"]]
    rotation = _rotations_from_faces(int(doc["vertex_count"]), edges, faces)
    return Tiling(
        kind=doc["kind"],
        m=int(doc["m"]),
        vertex_count=int(doc["vertex_count"]),
        edges=edges,
        faces=faces,
        rotation=rotation,
        layer=[int(x) for x in doc["layer"]] if "layer" in doc else None,
        radius=doc.get("radius"),
        k=doc.get("k"),
    )
