"""Consensus-network analysis: centrality, communities, differential edges.

Betweenness is exact (Brandes accumulation over unweighted shortest paths,
normalized by (p-1)(p-2)/2); community detection is greedy modularity
(Louvain) on absolute edge weights with a seed-derived deterministic node
scan order; differential connectivity compares per-pair selection
frequencies between two consensus networks, optionally with a permutation
test over retained replicate adjacencies.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .resampling import SplitMix64, mix_seed


@dataclass(frozen=True)
class CentralityReport:
    names: tuple[str, ...]
    degree: np.ndarray
    strength: np.ndarray
    betweenness: np.ndarray


@dataclass(frozen=True)
class CommunityAssignment:
    names: tuple[str, ...]
    labels: np.ndarray
    modularity: float


@dataclass(frozen=True)
class DifferentialReport:
    names: tuple[str, ...]
    pairs: tuple[tuple[int, int], ...]
    dfreq: np.ndarray
    dc: np.ndarray
    pvals: np.ndarray | None


def read_weighted_graph(path):
    """Edge-list TSV with optional weight / sign columns.

    Returns (names, edges) with edges as (i, j, weight) triples; a sign
    column without weights yields weights of +/-1.
    """
    names: dict[str, int] = {}
    edges = []
    with open(path, encoding="utf-8", newline="") as fh:
        header = fh.readline().rstrip("\r\n").split("\t")
        if len(header) < 2 or header[0] != "source" or header[1] != "target":
            raise DataError(f"{path}: expected header source<TAB>target[<TAB>...]")
        w_col = header.index("weight") if "weight" in header else None
        s_col = header.index("sign") if "sign" in header else None
        seen = set()
        for lnum, line in enumerate(fh, start=2):
            row = line.rstrip("\r\n").split("\t")
            if row == [""]:
                continue
            if len(row) != len(header):
                raise DataError(f"{path}: row {lnum} has {len(row)} fields, "
                                f"expected {len(header)}")
            for name in row[:2]:
                if name not in names:
                    names[name] = len(names)
            u, v = names[row[0]], names[row[1]]
            if u == v:
                raise DataError(f"{path}: self loop at row {lnum}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise DataError(f"{path}: duplicate edge at row {lnum}")
            seen.add(key)
            if w_col is not None:
                weight = float(row[w_col])
            elif s_col is not None:
                weight = float(int(float(row[s_col])))
            else:
                weight = 1.0
            edges.append((key[0], key[1], weight))
    ordered = [None] * len(names)
    for name, i in names.items():
        ordered[i] = name
    return tuple(ordered), edges


def _adjacency_lists(n, edges):
    adj = [[] for _ in range(n)]
    for i, j, _ in edges:
        adj[i].append(j)
        adj[j].append(i)
    return [sorted(a) for a in adj]


def centrality(names, edges) -> CentralityReport:
    """Degree, signed strength and normalized betweenness per node."""
    n = len(names)
    degree = np.zeros(n, dtype=np.int64)
    strength = np.zeros(n)
    for i, j, w in edges:
        degree[i] += 1
        degree[j] += 1
        strength[i] += w
        strength[j] += w
    bc = _brandes(n, _adjacency_lists(n, edges))
    return CentralityReport(names=tuple(names), degree=degree,
                            strength=strength, betweenness=bc)


def _brandes(n, adj):
    """Exact betweenness, unweighted, normalized by (n-1)(n-2)/2."""
    bc = np.zeros(n)
    for s in range(n):
        order = []
        preds = [[] for _ in range(n)]
        sigma = np.zeros(n)
        sigma[s] = 1.0
        dist = np.full(n, -1)
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            order.append(v)
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = np.zeros(n)
        for w in reversed(order):
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                bc[w] += delta[w]
    bc /= 2.0  # each unordered pair accumulated from both endpoints
    if n > 2:
        bc /= (n - 1) * (n - 2) / 2.0
    return bc


def communities(names, edges, seed=0) -> CommunityAssignment:
    """Louvain-style greedy modularity on absolute edge weights."""
    n = len(names)
    weights = [(i, j, abs(w)) for i, j, w in edges if w != 0]
    labels = _louvain(n, weights, seed)
    q = modularity(n, weights, labels)
    return CommunityAssignment(names=tuple(names),
                               labels=labels, modularity=q)


def modularity(n, edges, labels) -> float:
    m2 = 2.0 * sum(w for _, _, w in edges)
    if m2 == 0:
        return 0.0
    deg = np.zeros(n)
    inner = {}
    tot = {}
    for i, j, w in edges:
        deg[i] += w
        deg[j] += w
        if labels[i] == labels[j]:
            inner[labels[i]] = inner.get(labels[i], 0.0) + w
    for v in range(n):
        tot[labels[v]] = tot.get(labels[v], 0.0) + deg[v]
    return sum(inner.get(c, 0.0) / (m2 / 2.0) - (tot[c] / m2) ** 2
               for c in tot)


def _louvain(n, edges, seed):
    node_of = list(range(n))          # original node -> current super-node
    labels = np.arange(n)
    cur_edges = edges
    cur_n = n
    stream = SplitMix64(mix_seed(seed, 0x10feed))
    for _level in range(32):
        comm = _local_moves(cur_n, cur_edges, stream)
        n_comm = len(set(comm))
        if n_comm == cur_n:
            break
        remap = {}
        for c in comm:  # contiguous ids in first-appearance order
            if c not in remap:
                remap[c] = len(remap)
        comm = [remap[c] for c in comm]
        labels = np.array([comm[labels[v]] for v in range(n)])
        agg = {}  # self-loops carry the internal community weight
        for i, j, w in cur_edges:
            a, b = comm[i], comm[j]
            key = (min(a, b), max(a, b))
            agg[key] = agg.get(key, 0.0) + w
        cur_edges = [(a, b, w) for (a, b), w in sorted(agg.items())]
        cur_n = n_comm
        node_of = comm
    # contiguous final ids ordered by first appearance over node index
    remap = {}
    out = np.empty(n, dtype=np.int64)
    for v in range(n):
        c = labels[v]
        if c not in remap:
            remap[c] = len(remap)
        out[v] = remap[c]
    return out


def _local_moves(n, edges, stream):
    # self-loops (aggregated internal weight) count in degrees but move with
    # their node, so they never enter the neighbor-link sums
    adj = [{} for _ in range(n)]
    deg = np.zeros(n)
    for i, j, w in edges:
        if i == j:
            deg[i] += 2.0 * w
            continue
        adj[i][j] = adj[i].get(j, 0.0) + w
        adj[j][i] = adj[j].get(i, 0.0) + w
        deg[i] += w
        deg[j] += w
    m2 = deg.sum()
    comm = list(range(n))
    tot = deg.copy()
    if m2 == 0:
        return comm

    order = list(range(n))
    draws = stream.next_block(n)
    for i in range(n - 1):  # seeded Fisher-Yates scan order
        j = i + int(draws[i] % np.uint64(n - i))
        order[i], order[j] = order[j], order[i]

    improved = True
    while improved:
        improved = False
        for v in order:
            cv = comm[v]
            links = {}
            for u, w in adj[v].items():
                links[comm[u]] = links.get(comm[u], 0.0) + w
            tot[cv] -= deg[v]
            base = links.get(cv, 0.0) - deg[v] * tot[cv] / m2
            best_c, best_gain = cv, 0.0
            for c in sorted(links):
                gain = links[c] - deg[v] * tot[c] / m2
                if gain - base > best_gain + 1e-12:
                    best_gain = gain - base
                    best_c = c
            tot[cv] += deg[v]
            if best_c != cv:
                tot[cv] -= deg[v]
                tot[best_c] += deg[v]
                comm[v] = best_c
                improved = True
    return comm


def differential(names_a, freq_a, names_b, freq_b, *, rep_a=None, rep_b=None,
                 n_perm=0, seed=0) -> DifferentialReport:
    """Per-pair frequency differences and per-node differential connectivity.

    `freq_*` map (i, j) index pairs to selection frequencies.  With
    `n_perm > 0`, both `rep_*` must map replicate ids to iterables of present
    (i, j) pairs; group labels are swapped per replicate id and the add-one
    permutation p-value of dc is reported per node.
    """
    if tuple(names_a) != tuple(names_b):
        raise DataError("variable sets differ between the two networks")
    names = tuple(names_a)
    n = len(names)

    pairs = sorted(set(freq_a) | set(freq_b))
    dfreq = np.array([freq_a.get(k, 0.0) - freq_b.get(k, 0.0) for k in pairs])
    dc = np.zeros(n)
    for (i, j), d in zip(pairs, dfreq):
        dc[i] += abs(d)
        dc[j] += abs(d)

    pvals = None
    if n_perm > 0:
        if rep_a is None or rep_b is None:
            raise DataError("permutation test needs retained replicate "
                            "adjacencies from both runs (--keep-replicates)")
        common = sorted(set(rep_a) & set(rep_b))
        if len(common) < 2:
            raise DataError("fewer than 2 replicate ids shared between runs")
        pair_idx = {k: t for t, k in enumerate(pairs)}
        mat_a = _replicate_matrix(rep_a, common, pair_idx)
        mat_b = _replicate_matrix(rep_b, common, pair_idx)
        dc_obs = _dc_from(mat_a, mat_b, pairs, n)
        stream = SplitMix64(mix_seed(seed, 0xd1ff))
        exceed = np.zeros(n, dtype=np.int64)
        for _ in range(n_perm):
            flips = stream.integers(2, len(common)).astype(bool)
            pa = np.where(flips[:, None], mat_b, mat_a)
            pb = np.where(flips[:, None], mat_a, mat_b)
            exceed += _dc_from(pa, pb, pairs, n) >= dc_obs - 1e-12
        pvals = (1.0 + exceed) / (n_perm + 1.0)

    return DifferentialReport(names=names, pairs=tuple(pairs), dfreq=dfreq,
                              dc=dc, pvals=pvals)


def _replicate_matrix(rep, ids, pair_idx):
    mat = np.zeros((len(ids), len(pair_idx)))
    for row, r in enumerate(ids):
        for pair in rep[r]:
            k = pair_idx.get(tuple(pair))
            if k is not None:
                mat[row, k] = 1.0
    return mat


def _dc_from(mat_a, mat_b, pairs, n):
    diff = np.abs(mat_a.mean(axis=0) - mat_b.mean(axis=0))
    dc = np.zeros(n)
    for (i, j), d in zip(pairs, diff):
        dc[i] += d
        dc[j] += d
    return dc
