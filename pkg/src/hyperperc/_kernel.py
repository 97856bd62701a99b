"""Counting kernel for rooted connected edge subgraphs of a host ball.

The enumeration walks a binary include/exclude tree over edge
candidates in discovery order: each subgraph is generated exactly once,
so no isomorphism rejection or hashing is needed.  An edge, once
excluded at some node of the tree, stays excluded in the whole subtree;
`reached` marks edges that are incident to the current vertex set and
are therefore either candidates or permanently excluded.

The boundary tally is maintained incrementally: when vertex w joins the
subgraph, the edges of the infinite tiling newly incident to it are its
host edges not yet reached plus its external degree (tiling edges
missing from the host patch).

The same function body is compiled with numba for production runs; the
pure Python twin in animals.py is used for small cross-checks.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency
    njit = None
    HAVE_NUMBA = False


def _count_subtree_impl(indptr, adj_edge, adj_nbr, eu, ev, ext, m, nmax,
                        first_idx, tally):
    """Count animals whose first included root candidate is cand[first_idx].

    tally[e, v, b] accumulates counts by (edges, vertices, boundary).
    """
    n_edges = eu.shape[0]
    n_verts = indptr.shape[0] - 1
    reached = np.zeros(n_edges, np.uint8)
    in_set = np.zeros(n_verts, np.uint8)
    cap = m * (nmax + 2) + 8
    cand = np.empty(cap, np.int64)

    top = 0
    for t in range(indptr[0], indptr[1]):
        e = adj_edge[t]
        reached[e] = 1
        cand[top] = e
        top += 1
    in_set[0] = 1
    incident = top + ext[0]   # tiling edges incident to the vertex set
    e_cnt = 0
    v_cnt = 1

    depth = nmax + 2
    fpos = np.empty(depth, np.int64)
    fhi = np.empty(depth, np.int64)
    fcs = np.empty(depth, np.int64)
    fw = np.empty(depth, np.int64)
    fdI = np.empty(depth, np.int64)

    # virtual root frame: exactly one pending candidate, the seed edge
    d = 0
    fpos[0] = first_idx
    fhi[0] = first_idx + 1

    while True:
        if e_cnt < nmax and fpos[d] < fhi[d]:
            # include cand[fpos[d]] and descend
            p = fpos[d]
            fpos[d] = p + 1
            e = cand[p]
            u = eu[e]
            v = ev[e]
            if in_set[u] == 0:
                w = u
            elif in_set[v] == 0:
                w = v
            else:
                w = -1
            cstart = top
            dI = 0
            if w >= 0:
                in_set[w] = 1
                dI = ext[w]
                for t in range(indptr[w], indptr[w + 1]):
                    e2 = adj_edge[t]
                    if reached[e2] == 0:
                        reached[e2] = 1
                        cand[top] = e2
                        top += 1
                dI += top - cstart
                v_cnt += 1
            e_cnt += 1
            incident += dI
            tally[e_cnt, v_cnt, incident - e_cnt] += 1
            d += 1
            fpos[d] = p + 1
            fhi[d] = top
            fcs[d] = cstart
            fw[d] = w
            fdI[d] = dI
        else:
            if d == 0:
                break
            # undo the include that created frame d
            for t in range(fcs[d], fhi[d]):
                reached[cand[t]] = 0
            top = fcs[d]
            if fw[d] >= 0:
                in_set[fw[d]] = 0
                v_cnt -= 1
            e_cnt -= 1
            incident -= fdI[d]
            d -= 1
            if d == 0:
                break


if HAVE_NUMBA:
    count_subtree = njit(cache=True, nogil=True)(_count_subtree_impl)
else:  # pragma: no cover
    count_subtree = _count_subtree_impl
