"""Growth engine for combinatorial disk patches of the {m,m} tiling.

A patch is grown face by face around a root vertex.  The boundary of the
partial patch is kept as a doubly linked cycle of vertices; attaching one
m-gon splices a chain of new vertices into that cycle.  Vertices are
closed (saturated to m faces) one boundary layer at a time, which keeps
every vertex at graph distance < radius interior to the final patch.

The engine runs in two modes: a full mode that records faces (used to
produce Tiling objects for small radii) and a skeleton mode that records
only the graph, per-vertex layer and degree (used as the host for
subgraph enumeration, where patches run to millions of vertices).

State lives in flat typed arrays (array('i')); per-vertex Python objects
would triple the memory footprint at the sizes needed for m = 8.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass

import numpy as np

DEFAULT_MAX_VERTICES = 40_000_000


class ResourceLimitError(RuntimeError):
    """Raised when a construction would exceed its configured size budget."""


@dataclass
class RawPatch:
    """Output of the growth engine, before any relabeling.

    Vertex ids are creation order; `faces` is None in skeleton mode.
    """

    m: int
    radius: int
    layer: array
    degree: array
    nfaces: array
    edge_u: array
    edge_v: array
    faces: list[list[int]] | None


class _Grower:
    def __init__(self, m: int, record_faces: bool, max_vertices: int):
        self.m = m
        self.record_faces = record_faces
        self.max_vertices = max_vertices
        # per-vertex state
        self.layer = array("i")
        self.deg = array("i")
        self.nfaces = array("i")
        self.nxt = array("i")   # boundary successor, -1 once interior
        self.prv = array("i")   # boundary predecessor
        self.bedge = array("i")  # edge id from v to nxt[v] while on boundary
        # per-edge state
        self.edge_u = array("i")
        self.edge_v = array("i")
        self.faces: list[list[int]] | None = [] if record_faces else None
        self.bstart = 0  # some vertex currently on the boundary

    # -- low-level helpers -------------------------------------------------

    def _new_vertex(self, lay: int) -> int:
        v = len(self.layer)
        if v >= self.max_vertices:
            raise ResourceLimitError(
                f"patch for m={self.m} exceeded max_vertices={self.max_vertices}"
            )
        self.layer.append(lay)
        self.deg.append(0)
        self.nfaces.append(0)
        self.nxt.append(-1)
        self.prv.append(-1)
        self.bedge.append(-1)
        return v

    def _new_edge(self, u: int, v: int) -> int:
        e = len(self.edge_u)
        self.edge_u.append(u)
        self.edge_v.append(v)
        self.deg[u] += 1
        self.deg[v] += 1
        if self.deg[u] > self.m or self.deg[v] > self.m:
            raise RuntimeError("construction bug: vertex degree exceeded m")
        return e

    # -- face attachment ---------------------------------------------------

    def _first_face(self) -> None:
        m = self.m
        root = self._new_vertex(0)
        ring = [root]
        for i in range(1, m):
            ring.append(self._new_vertex(min(i, m - i)))
        face = []
        for i in range(m):
            u, v = ring[i], ring[(i + 1) % m]
            e = self._new_edge(u, v)
            face.append(e)
            self.nxt[u] = v
            self.prv[v] = u
            self.bedge[u] = e
            self.nfaces[u] += 1
        if self.faces is not None:
            self.faces.append(face)
        self.bstart = root

    def _add_face_at(self, v: int) -> list[int]:
        """Attach one m-gon at boundary vertex v, anchored on its prv side.

        The face reuses the run of existing boundary edges through every
        path endpoint that already has m-1 faces (for such a vertex this
        face is its last, so it cannot receive a new edge).  Returns the
        path endpoints that reached m-1 faces and now await their own
        forced closure.
        """
        m = self.m
        nfaces = self.nfaces
        nxt, prv, bedge = self.nxt, self.prv, self.bedge
        # walk backward from v through saturated vertices
        back = prv[v]
        verts = [back, v]
        while nfaces[back] == m - 1:
            back = prv[back]
            verts.insert(0, back)
            if len(verts) > m:
                raise RuntimeError("construction bug: glued path wrapped the boundary")
        # the face is v's last one exactly when it must reuse the nxt side
        if nfaces[v] == m - 1:
            fwd = nxt[v]
            verts.append(fwd)
            while nfaces[fwd] == m - 1:
                fwd = nxt[fwd]
                verts.append(fwd)
                if len(verts) > m:
                    raise RuntimeError("construction bug: glued path wrapped the boundary")
        j = len(verts) - 1  # existing edges reused by this face
        if not 1 <= j <= m - 1:
            raise RuntimeError("construction bug: glued path length out of range")
        bwd_end, fwd_end = verts[0], verts[-1]

        face = [bedge[verts[t]] for t in range(j)] if self.faces is not None else None

        # chain of k new vertices closing the m-gon, fwd_end .. bwd_end
        k = m - j - 1
        lay_f, lay_b = self.layer[fwd_end], self.layer[bwd_end]
        chain = [self._new_vertex(min(lay_f + i, lay_b + (k + 1 - i)))
                 for i in range(1, k + 1)]
        cycle = [fwd_end] + chain + [bwd_end]
        new_edges = [self._new_edge(cycle[i], cycle[i + 1]) for i in range(k + 1)]
        if face is not None:
            face.extend(new_edges)
            self.faces.append(face)

        # face counts: path vertices get one more face, chain vertices their first
        for u in verts:
            nfaces[u] += 1
        for c in chain:
            nfaces[c] = 1
        # interior path vertices leave the boundary
        for u in verts[1:-1]:
            if nfaces[u] != m:
                raise RuntimeError("construction bug: interior vertex not saturated")
            nxt[u] = prv[u] = -1
            bedge[u] = -1
        # splice the chain: boundary ran bwd_end .. fwd_end, now runs
        # bwd_end -> chain[k-1] -> ... -> chain[0] -> fwd_end
        seq = [bwd_end] + chain[::-1] + [fwd_end]
        for i in range(len(seq) - 1):
            a, b = seq[i], seq[i + 1]
            nxt[a] = b
            prv[b] = a
        for i, a in enumerate(seq[:-1]):
            # edge from a to its boundary successor, in new_edges order
            bedge[a] = new_edges[len(seq) - 2 - i]
        self.bstart = bwd_end

        forced = []
        for u in (bwd_end, fwd_end):
            if nfaces[u] == m - 1:
                forced.append(u)
        return forced

    def _close_and_cascade(self, v: int) -> None:
        m = self.m
        pending = [v]
        while pending:
            u = pending.pop()
            if self.nfaces[u] >= m or self.nxt[u] < 0:
                continue
            while self.nfaces[u] < m:
                pending.extend(self._add_face_at(u))

    def _boundary_targets(self, lay: int) -> list[int]:
        """Boundary vertices of the given layer, in canonical walk order."""
        walk = [self.bstart]
        u = self.nxt[self.bstart]
        while u != self.bstart:
            walk.append(u)
            u = self.nxt[u]
        lo = walk.index(min(walk))
        walk = walk[lo:] + walk[:lo]
        return [u for u in walk if self.layer[u] == lay]

    def grow(self, radius: int) -> RawPatch:
        self._first_face()
        self._close_and_cascade(0)
        for step in range(1, radius):
            for v in self._boundary_targets(step):
                if self.nfaces[v] < self.m:
                    self._close_and_cascade(v)
        return RawPatch(
            m=self.m,
            radius=radius,
            layer=self.layer,
            degree=self.deg,
            nfaces=self.nfaces,
            edge_u=self.edge_u,
            edge_v=self.edge_v,
            faces=self.faces,
        )


def grow_patch(m: int, radius: int, record_faces: bool,
               max_vertices: int = DEFAULT_MAX_VERTICES) -> RawPatch:
    """Grow a disk patch whose distance < radius vertices are all interior."""
    if m < 4:
        raise ValueError(f"m must be at least 4, got {m}")
    if radius < 1:
        raise ValueError(f"radius must be at least 1, got {radius}")
    return _Grower(m, record_faces, max_vertices).grow(radius)


def relabel_by_layer(raw: RawPatch, max_layer: int | None = None) -> dict:
    """Renumber vertices layer by layer (creation order within a layer).

    With max_layer set, vertices on deeper layers are dropped together
    with their incident edges; the per-vertex degree is recomputed so
    that m - degree counts every tiling edge missing from the result.
    Only valid in skeleton mode (faces reference dropped vertices).
    Edge ids keep creation (discovery) order.
    """
    layer = np.frombuffer(raw.layer, dtype=np.int32).copy()
    n = layer.shape[0]
    order = np.lexsort((np.arange(n), layer))  # order[new_id] = old_id
    eu = np.frombuffer(raw.edge_u, dtype=np.int32)
    ev = np.frombuffer(raw.edge_v, dtype=np.int32)
    if max_layer is not None:
        if raw.faces is not None:
            raise ValueError("cannot truncate a patch that records faces")
        order = order[layer[order] <= max_layer]
    n_keep = order.shape[0]
    inv = np.full(n, -1, dtype=np.int32)
    inv[order] = np.arange(n_keep, dtype=np.int32)
    eu = inv[eu]
    ev = inv[ev]
    if max_layer is not None:
        keep_e = (eu >= 0) & (ev >= 0)
        eu, ev = eu[keep_e], ev[keep_e]
        degree = np.bincount(eu, minlength=n_keep) + np.bincount(ev, minlength=n_keep)
        degree = degree.astype(np.int32)
    else:
        degree = np.frombuffer(raw.degree, dtype=np.int32)[order].copy()
    swap = eu > ev
    eu2 = np.where(swap, ev, eu)
    ev2 = np.where(swap, eu, ev)
    return {
        "layer": layer[order],
        "degree": degree,
        "nfaces": np.frombuffer(raw.nfaces, dtype=np.int32)[order].copy(),
        "edge_u": eu2.astype(np.int32),
        "edge_v": ev2.astype(np.int32),
        "faces": raw.faces,
    }
