"""Brute-force graphlet oracle: enumerate connected induced subgraphs.

Deliberately slow and independent of the fast kernels -- every subset of up
to `max_size` nodes is visited, classified by degree sequence inside the
induced subgraph, and attributed to node orbits.  Guarded to 64 nodes.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from ..errors import DataError
from .core import SignedGraph

_ORACLE_MAX_NODES = 64


def brute_force_oracle(graph: SignedGraph, max_size=4, signed=False) -> np.ndarray:
    """Orbit counts by exhaustive induced-subgraph enumeration.

    ``signed=False``: unsigned orbits 0..14 (max_size 3 limits to 0..3).
    ``signed=True``: the 15 signed columns (requires max_size == 3).
    """
    n = graph.n_nodes
    if n > _ORACLE_MAX_NODES:
        raise DataError(f"oracle guarded to {_ORACLE_MAX_NODES} nodes, got {n}")
    if max_size not in (3, 4):
        raise DataError("max_size must be 3 or 4")
    if signed and max_size != 3:
        raise DataError("signed oracle covers 3-node graphlets; use max_size=3")

    # adjacency bitmasks; sign lookup per ordered pair
    adj = [0] * n
    sgn = {}
    for u, v, s in graph.edge_list():
        adj[u] |= 1 << v
        adj[v] |= 1 << u
        sgn[(u, v)] = s
        sgn[(v, u)] = s

    counts = np.zeros((n, 15), dtype=np.int64)

    # size 2: every edge
    for u, v, s in graph.edge_list():
        if signed:
            col = 0 if s > 0 else 1
            counts[u, col] += 1
            counts[v, col] += 1
        else:
            counts[u, 0] += 1
            counts[v, 0] += 1

    # size 3
    for a, b, c in combinations(range(n), 3):
        eab = bool(adj[a] & (1 << b))
        eac = bool(adj[a] & (1 << c))
        ebc = bool(adj[b] & (1 << c))
        m = eab + eac + ebc
        if m < 2:
            continue
        if m == 3:
            if signed:
                _signed_triangle(counts, sgn, a, b, c)
            else:
                counts[a, 3] += 1
                counts[b, 3] += 1
                counts[c, 3] += 1
        else:
            # path: the center is in both present edges
            if eab and eac:
                center, ends = a, (b, c)
            elif eab and ebc:
                center, ends = b, (a, c)
            else:
                center, ends = c, (a, b)
            if signed:
                s1 = sgn[(center, ends[0])]
                s2 = sgn[(center, ends[1])]
                counts[center, _o2_col(s1, s2)] += 1
                counts[ends[0], _o1_col(s1, s2)] += 1
                counts[ends[1], _o1_col(s2, s1)] += 1
            else:
                counts[center, 2] += 1
                counts[ends[0], 1] += 1
                counts[ends[1], 1] += 1

    if max_size == 3 or signed:
        return counts

    # size 4, unsigned only
    for quad in combinations(range(n), 4):
        _classify_quad(counts, adj, quad)
    return counts


def _o1_col(s_inc, s_far):
    return {(1, 1): 2, (1, -1): 3, (-1, 1): 4, (-1, -1): 5}[(s_inc, s_far)]


def _o2_col(s1, s2):
    if s1 > 0 and s2 > 0:
        return 6
    if s1 < 0 and s2 < 0:
        return 8
    return 7


def _signed_triangle(counts, sgn, a, b, c):
    for v, others in ((a, (b, c)), (b, (a, c)), (c, (a, b))):
        s1 = sgn[(v, others[0])]
        s2 = sgn[(v, others[1])]
        sopp = sgn[others]
        if s1 > 0 and s2 > 0:
            base = 9
        elif s1 < 0 and s2 < 0:
            base = 13
        else:
            base = 11
        counts[v, base + (0 if sopp > 0 else 1)] += 1


def _classify_quad(counts, adj, quad):
    deg = [0, 0, 0, 0]
    m = 0
    for i in range(4):
        for j in range(i + 1, 4):
            if adj[quad[i]] & (1 << quad[j]):
                deg[i] += 1
                deg[j] += 1
                m += 1
    if m < 3 or min(deg) == 0:
        return  # disconnected (for m == 3, a triangle plus isolate has deg 0)
    if m == 3:
        if max(deg) == 3:        # 3-star
            for i in range(4):
                counts[quad[i], 7 if deg[i] == 3 else 6] += 1
        elif max(deg) == 2:      # 4-path
            for i in range(4):
                counts[quad[i], 5 if deg[i] == 2 else 4] += 1
        # deg pattern {3,1,1,1} or {2,2,1,1}; a triangle+isolate is caught
        # by min(deg) == 0 above
    elif m == 4:
        if max(deg) == 2:        # 4-cycle
            for i in range(4):
                counts[quad[i], 8] += 1
        else:                    # tailed triangle: degrees 1,2,2,3
            for i in range(4):
                if deg[i] == 1:
                    counts[quad[i], 9] += 1
                elif deg[i] == 3:
                    counts[quad[i], 11] += 1
                else:
                    counts[quad[i], 10] += 1
    elif m == 5:                 # diamond: degrees 2,3,3,2
        for i in range(4):
            counts[quad[i], 13 if deg[i] == 3 else 12] += 1
    else:                        # 4-clique
        for i in range(4):
            counts[quad[i], 14] += 1
