"""Signed graph container and the fast GDVM construction entry points."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..errors import DataError
from ..resampling import SplitMix64, mix_seed

ORBIT_COLUMNS = tuple(f"o{i}" for i in range(15))

# 15 signed orbits over <=3-node graphlets; p/m encode +/- edge signs.
# O1 columns are (incident sign, far sign); O3 columns are
# (incident sign multiset, opposite-edge sign).
SIGNED_COLUMNS = (
    "o0_p", "o0_m",
    "o1_pp", "o1_pm", "o1_mp", "o1_mm",
    "o2_pp", "o2_pm", "o2_mm",
    "o3_pp_p", "o3_pp_m", "o3_pm_p", "o3_pm_m", "o3_mm_p", "o3_mm_m",
)

# column blocks that collapse onto unsigned orbits 0..3
SIGN_COLLAPSE = ((0, (0, 1)), (1, (2, 3, 4, 5)), (2, (6, 7, 8)),
                 (3, (9, 10, 11, 12, 13, 14)))


@dataclass(frozen=True)
class SignedGraph:
    """Simple undirected graph with +/-1 edge signs, stored as sorted CSR."""

    n_nodes: int
    indptr: np.ndarray       # int64[n+1]
    indices: np.ndarray      # int64[nnz], sorted per row
    signs: np.ndarray        # int8[nnz], aligned with indices
    names: tuple[str, ...] | None = None

    @property
    def n_edges(self) -> int:
        return len(self.indices) // 2

    def degree(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return i < len(nb) and nb[i] == v

    def sign(self, u: int, v: int) -> int:
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        if i >= len(nb) or nb[i] != v:
            raise KeyError(f"no edge ({u}, {v})")
        return int(self.signs[self.indptr[u] + i])

    def edge_list(self):
        """(u, v, sign) triples with u < v, lexicographic."""
        out = []
        for u in range(self.n_nodes):
            lo, hi = self.indptr[u], self.indptr[u + 1]
            for k in range(lo, hi):
                v = self.indices[k]
                if u < v:
                    out.append((u, int(v), int(self.signs[k])))
        return out

    @classmethod
    def from_edges(cls, edges, signs=None, n_nodes=None, names=None):
        """Build from (u, v) pairs; `signs` defaults to all +1."""
        edges = [(int(u), int(v)) for u, v in edges]
        if signs is None:
            signs = [1] * len(edges)
        if len(signs) != len(edges):
            raise DataError("signs length does not match edges")
        if n_nodes is None:
            n_nodes = 1 + max((max(u, v) for u, v in edges), default=-1)
        if names is not None and len(names) != n_nodes:
            raise DataError("names length does not match node count")

        seen = set()
        half: list[tuple[int, int, int]] = []
        for (u, v), s in zip(edges, signs):
            s = int(s)
            if s not in (-1, 1):
                raise DataError(f"edge sign must be +1 or -1, got {s}")
            if u == v:
                raise DataError(f"self loop at node {u}")
            if not (0 <= u < n_nodes and 0 <= v < n_nodes):
                raise DataError(f"edge ({u}, {v}) outside [0, {n_nodes})")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise DataError(f"duplicate edge ({u}, {v})")
            seen.add(key)
            half.append((u, v, s))
            half.append((v, u, s))

        half.sort()
        indptr = np.zeros(n_nodes + 1, dtype=np.int64)
        indices = np.empty(len(half), dtype=np.int64)
        sgn = np.empty(len(half), dtype=np.int8)
        for k, (u, v, s) in enumerate(half):
            indptr[u + 1] += 1
            indices[k] = v
            sgn[k] = s
        np.cumsum(indptr, out=indptr)
        return cls(n_nodes=n_nodes, indptr=indptr, indices=indices, signs=sgn,
                   names=tuple(names) if names is not None else None)


def gdvm_unsigned(graph: SignedGraph) -> np.ndarray:
    """Exact induced orbit counts 0..14 for every node (signs ignored)."""
    n = graph.n_nodes
    counts = np.zeros((n, 15), dtype=np.int64)
    tri = np.zeros(len(graph.indices), dtype=np.int64)
    scratch = np.zeros(max(n, 1), dtype=np.int64)
    touched = np.zeros(max(n, 1), dtype=np.int64)
    kernels.unsigned_orbit_counts(graph.indptr, graph.indices, counts,
                                  tri, scratch, touched)
    return counts


def gdvm_signed(graph: SignedGraph) -> np.ndarray:
    """Exact signed orbit counts (15 columns, <=3-node graphlets) per node."""
    counts = np.zeros((graph.n_nodes, 15), dtype=np.int64)
    kernels.signed_orbit_counts(graph.indptr, graph.indices, graph.signs,
                                counts)
    return counts


# number of distinct orbits in each orbit's graphlet; fixes the similarity
# weights w_k = 1 - log(o_k)/log(15)
ORBIT_GRAPHLET_SIZES = (1, 2, 2, 1, 2, 2, 2, 2, 1, 3, 3, 3, 2, 2, 1)
_DEFAULT_WEIGHTS = tuple(1.0 - math.log(o) / math.log(15.0)
                         for o in ORBIT_GRAPHLET_SIZES)


def gdv_similarity(a, b, weights=None) -> float:
    """Similarity in [0, 1] between two orbit-count vectors.

    1 - sum_k w_k |log(a_k+1) - log(b_k+1)| / sum_k w_k log(max(a_k, b_k)+2);
    natural logs.  Default weights apply to the 15 unsigned orbit columns,
    otherwise uniform weights are used.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise DataError("orbit vectors must be 1-d and of equal length")
    if weights is None:
        weights = _DEFAULT_WEIGHTS if len(a) == 15 else np.ones(len(a))
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != a.shape:
        raise DataError("weights length does not match vectors")
    num = float(np.sum(w * np.abs(np.log(a + 1.0) - np.log(b + 1.0))))
    den = float(np.sum(w * np.log(np.maximum(a, b) + 2.0)))
    if den == 0.0:
        raise DataError("all-zero weights")
    return 1.0 - num / den


def read_graph_tsv(path) -> SignedGraph:
    """Edge-list TSV: columns source, target, optional sign in {+1, -1}.

    Node names are arbitrary strings; ids are assigned by first appearance.
    A missing sign column means all edges are positive.
    """
    edges, signs = [], []
    ids: dict[str, int] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        header = fh.readline().rstrip("\r\n").split("\t")
        if len(header) < 2 or header[0] != "source" or header[1] != "target":
            raise DataError(f"{path}: expected header source<TAB>target[<TAB>...]")
        sign_col = header.index("sign") if "sign" in header else None
        for lnum, line in enumerate(fh, start=2):
            row = line.rstrip("\r\n").split("\t")
            if row == [""]:
                continue
            if len(row) != len(header):
                raise DataError(f"{path}: row {lnum} has {len(row)} fields, "
                                f"expected {len(header)}")
            for name in row[:2]:
                if name not in ids:
                    ids[name] = len(ids)
            edges.append((ids[row[0]], ids[row[1]]))
            if sign_col is None:
                signs.append(1)
            else:
                try:
                    s = int(float(row[sign_col]))
                except ValueError:
                    raise DataError(f"{path}: bad sign {row[sign_col]!r} "
                                    f"at row {lnum}") from None
                signs.append(s)
    names = [None] * len(ids)
    for name, i in ids.items():
        names[i] = name
    return SignedGraph.from_edges(edges, signs, n_nodes=len(ids), names=names)


def _node_names(graph: SignedGraph):
    if graph.names is not None:
        return graph.names
    return tuple(str(i) for i in range(graph.n_nodes))


def write_gdvm(graph: SignedGraph, counts: np.ndarray, fh) -> None:
    fh.write("node\t" + "\t".join(ORBIT_COLUMNS) + "\n")
    for name, row in zip(_node_names(graph), counts):
        fh.write(name + "\t" + "\t".join(str(int(c)) for c in row) + "\n")


def write_signed_gdvm(graph: SignedGraph, scounts: np.ndarray,
                      counts_unsigned: np.ndarray, fh) -> None:
    """Signed 15-column block followed by the unsigned 4-node orbits o4..o14."""
    header = SIGNED_COLUMNS + tuple(f"o{i}" for i in range(4, 15))
    fh.write("node\t" + "\t".join(header) + "\n")
    for name, srow, urow in zip(_node_names(graph), scounts, counts_unsigned):
        cells = [str(int(c)) for c in srow] + [str(int(c)) for c in urow[4:]]
        fh.write(name + "\t" + "\t".join(cells) + "\n")


def random_signed_graph(n_nodes, n_edges=None, density=None, seed=0,
                        neg_fraction=0.5) -> SignedGraph:
    """Deterministic Erdos-Renyi-style signed graph for tests and benchmarks."""
    if (n_edges is None) == (density is None):
        raise DataError("give exactly one of n_edges / density")
    max_edges = n_nodes * (n_nodes - 1) // 2
    if n_edges is None:
        n_edges = int(round(density * max_edges))
    if n_edges > max_edges:
        raise DataError("more edges requested than pairs available")
    stream = SplitMix64(mix_seed(seed, 0))
    chosen: set[tuple[int, int]] = set()
    edges = []
    while len(edges) < n_edges:
        block = stream.integers(n_nodes, 2 * (n_edges - len(edges)) + 8)
        for k in range(0, len(block) - 1, 2):
            u, v = int(block[k]), int(block[k + 1])
            if u == v:
                continue
            key = (min(u, v), max(u, v))
            if key in chosen:
                continue
            chosen.add(key)
            edges.append(key)
            if len(edges) == n_edges:
                break
    sbits = stream.integers(10_000, n_edges)
    signs = np.where(sbits < int(neg_fraction * 10_000), -1, 1)
    return SignedGraph.from_edges(edges, signs.tolist(), n_nodes=n_nodes)
