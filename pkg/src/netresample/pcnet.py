"""PC-stable structure learning with Fisher-z tests, plus its ensemble.

The skeleton phase freezes adjacency sets at the start of every conditioning
level, so edge-removal order cannot influence the result; v-structures are
collected before being applied, and opposing orientation claims on an edge
revert it to undirected (flagged) instead of being overwritten.  Meek rules
R1-R4 are applied in a fixed scan order until fixpoint.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import __version__
from ._fileio import write_tsv
from .dataio import Dataset
from .errors import DataError, EnsembleUnstableError, NetresampleError
from .ggm import sample_correlation
from .resampling import ResamplePlan, draw

log = logging.getLogger(__name__)


def fisher_z_test(corr, i, j, cond, n, alpha):
    """Conditional-independence test of (i, j) given `cond`.

    The partial correlation comes from the inverse of the correlation
    submatrix over {i, j} + cond; the z statistic sqrt(n - |S| - 3) |atanh r|
    is referred to a standard normal.  Returns (independent, pval).
    """
    cond = tuple(cond)
    if i == j or i in cond or j in cond:
        raise DataError("test indices must be distinct from the conditioning set")
    if n - len(cond) - 3 < 1:
        raise DataError(f"sample size {n} too small for |S| = {len(cond)}")
    if len(cond) == 0:
        r = corr[i, j]
    else:
        ix = np.array((i, j) + cond)
        sub = corr[np.ix_(ix, ix)]
        try:
            prec = np.linalg.inv(sub)
        except np.linalg.LinAlgError:
            log.warning("degenerate conditioning set %s for pair (%d, %d)",
                        cond, i, j)
            return False, 0.0
        denom = prec[0, 0] * prec[1, 1]
        if denom <= 0:
            log.warning("non-PD submatrix for pair (%d, %d) given %s", i, j, cond)
            return False, 0.0
        r = -prec[0, 1] / math.sqrt(denom)
    if abs(r) >= 1.0:
        log.warning("|partial correlation| >= 1 for pair (%d, %d) given %s",
                    i, j, cond)
        return False, 0.0
    stat = math.sqrt(n - len(cond) - 3) * abs(math.atanh(r))
    pval = math.erfc(stat / math.sqrt(2.0))
    return pval > alpha, pval


def pc_skeleton(corr, n, alpha, max_cond):
    """PC-stable skeleton: returns (adjacency sets, sepsets dict).

    Adjacency sets are frozen at the start of each level; edges and
    conditioning subsets are visited in lexicographic order.
    """
    p = corr.shape[0]
    if not 0.0 < alpha < 1.0:
        raise DataError("alpha must be in (0, 1)")
    if max_cond < 0:
        raise DataError("max_cond must be >= 0")
    adj = [set(range(p)) - {i} for i in range(p)]
    sepsets: dict[tuple[int, int], tuple[int, ...]] = {}

    level = 0
    while level <= max_cond and n - level - 3 >= 1:
        frozen = [tuple(sorted(adj[i])) for i in range(p)]
        if all(len(frozen[i]) - 1 < level for i in range(p)):
            break
        for i in range(p):
            for j in frozen[i]:
                if j < i or j not in adj[i]:
                    continue
                removed = False
                for side_a, side_b in ((i, j), (j, i)):
                    candidates = tuple(v for v in frozen[side_a] if v != side_b)
                    if len(candidates) < level:
                        continue
                    for cond in combinations(candidates, level):
                        independent, _ = fisher_z_test(corr, side_a, side_b,
                                                       cond, n, alpha)
                        if independent:
                            adj[i].discard(j)
                            adj[j].discard(i)
                            sepsets[(min(i, j), max(i, j))] = cond
                            removed = True
                            break
                    if removed:
                        break
        level += 1
    return adj, sepsets


@dataclass(frozen=True)
class Cpdag:
    """Completed partially directed acyclic graph over p nodes."""

    n_nodes: int
    directed: frozenset    # (a, b) meaning a -> b
    undirected: frozenset  # (a, b) with a < b
    sepsets: dict = field(compare=False)
    conflicted: frozenset = frozenset()  # edges reverted to undirected

    def skeleton_pairs(self):
        pairs = {(min(a, b), max(a, b)) for a, b in self.directed}
        return sorted(pairs | set(self.undirected))

    def has_any_edge(self, a, b):
        key = (min(a, b), max(a, b))
        return key in self.undirected or (a, b) in self.directed \
            or (b, a) in self.directed


def orient_cpdag(adj, sepsets) -> Cpdag:
    """V-structure orientation (conflicts -> undirected, flagged) followed by
    Meek rules R1-R4 to fixpoint."""
    p = len(adj)
    claims = set()
    for j in range(p):
        for i, k in combinations(sorted(adj[j]), 2):
            if k in adj[i]:
                continue
            sep = sepsets.get((min(i, k), max(i, k)))
            if sep is not None and j not in sep:
                claims.add((i, j))
                claims.add((k, j))

    directed = set()
    conflicted = set()
    undirected = {(min(i, j), max(i, j)) for i in range(p) for j in adj[i] if i < j}
    for a, b in sorted(claims):
        if (b, a) in claims:
            conflicted.add((min(a, b), max(a, b)))
            continue
        key = (min(a, b), max(a, b))
        if key in undirected:
            undirected.discard(key)
            directed.add((a, b))

    _apply_meek(p, adj, directed, undirected)
    return Cpdag(n_nodes=p, directed=frozenset(directed),
                 undirected=frozenset(undirected), sepsets=dict(sepsets),
                 conflicted=frozenset(conflicted))


def _apply_meek(p, adj, directed, undirected):
    """Meek rules, fixed scan order, until no undirected edge changes.

    R1: a->b, b-c, a/c non-adjacent        => b->c
    R2: a->c->b with a-b                   => a->b
    R3: a-c, a-d, c->b, d->b, c/d non-adj  => a->b  (a-b undirected)
    R4: a-c, c->d, d->b, c/b non-adjacent  => a->b  (a-b undirected)
    """
    def orient(a, b):
        undirected.discard((min(a, b), max(a, b)))
        directed.add((a, b))

    changed = True
    while changed:
        changed = False
        for x, y in sorted(undirected):
            for a, b in ((x, y), (y, x)):
                if _meek_fires(adj, directed, undirected, a, b):
                    orient(a, b)
                    changed = True
                    break
            if changed:
                break


def _meek_fires(adj, directed, undirected, a, b):
    """True when some Meek rule orients the undirected edge a-b as a->b."""
    def und(u, v):
        return (min(u, v), max(u, v)) in undirected

    # R1: c->a with c, b non-adjacent
    for c, t in directed:
        if t == a and c != b and b not in adj[c]:
            return True
    # R2: a->c->b
    for c in adj[a]:
        if (a, c) in directed and (c, b) in directed:
            return True
    # R3: a-c, a-d, c->b, d->b, c/d non-adjacent
    parents = [c for c in adj[b] if (c, b) in directed and c != a and und(a, c)]
    for c, d in combinations(sorted(parents), 2):
        if d not in adj[c]:
            return True
    # R4: a-c, c->d, d->b, c/b non-adjacent
    for c in sorted(adj[a]):
        if c == b or not und(a, c) or b in adj[c]:
            continue
        for d in adj[c]:
            if (c, d) in directed and (d, b) in directed:
                return True
    return False


def markov_blanket(g: Cpdag, v: int) -> set:
    """Neighbors of v (any edge type) plus co-parents via directed edges."""
    if not 0 <= v < g.n_nodes:
        raise DataError(f"node {v} outside [0, {g.n_nodes})")
    mb = set()
    for a, b in g.directed:
        if a == v:
            mb.add(b)
        elif b == v:
            mb.add(a)
    for a, b in g.undirected:
        if a == v:
            mb.add(b)
        elif b == v:
            mb.add(a)
    children = {b for a, b in g.directed if a == v}
    for a, b in g.directed:
        if b in children and a != v:
            mb.add(a)
    return mb


@dataclass(frozen=True)
class BnEnsembleStats:
    """Selection frequencies over the PC ensemble."""

    var_names: tuple[str, ...]
    skeleton_freq: np.ndarray   # (p, p) symmetric, zero diagonal
    orient_freq: np.ndarray     # (p, p), entry (a, b) for a -> b
    mb_freq: np.ndarray         # (p, p), entry (v, u) for u in MB(v)
    tau: float
    b: int
    n_valid: int
    provenance: dict

    def consensus_skeleton(self):
        """Pairs (i, j) with skeleton frequency >= tau."""
        p = len(self.var_names)
        return [(i, j) for i in range(p) for j in range(i + 1, p)
                if self.skeleton_freq[i, j] >= self.tau]


def _pc_replicate(dataset, plan, replicate_id, alpha, max_cond):
    idx = draw(plan, replicate_id, dataset)
    if len(np.unique(idx.rows)) < 3:
        return f"fewer than 3 distinct rows (seed {idx.replicate_seed})"
    x = dataset.values[idx.rows]
    try:
        corr = sample_correlation(x, dataset.var_names)
    except NetresampleError as exc:
        return str(exc)
    n = len(idx.rows)
    if n - 3 < 1:
        return f"replicate too small for any independence test (n = {n})"
    adj, sepsets = pc_skeleton(corr, n, alpha, max_cond)
    cpdag = orient_cpdag(adj, sepsets)
    p = dataset.n_vars
    skel = np.zeros((p, p), dtype=np.int64)
    for i, j in cpdag.skeleton_pairs():
        skel[i, j] = skel[j, i] = 1
    orient = np.zeros((p, p), dtype=np.int64)
    for a, b in cpdag.directed:
        orient[a, b] = 1
    mb = np.zeros((p, p), dtype=np.int64)
    for v in range(p):
        for u in markov_blanket(cpdag, v):
            mb[v, u] = 1
    return skel, orient, mb


def run_ensemble_pc(dataset: Dataset, plan: ResamplePlan, *, alpha=0.01,
                    max_cond=3, tau=0.8, threads=1,
                    keep_replicates=False) -> BnEnsembleStats:
    """Skeleton / orientation / Markov-blanket frequencies over B replicates."""
    if not 0.0 < tau <= 1.0:
        raise NetresampleError("tau must be in (0, 1]")
    if threads < 1:
        raise NetresampleError("threads must be >= 1")

    results: dict[int, object] = {}
    if threads == 1:
        for r in range(plan.b):
            results[r] = _pc_replicate(dataset, plan, r, alpha, max_cond)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futs = {r: pool.submit(_pc_replicate, dataset, plan, r, alpha,
                                   max_cond)
                    for r in range(plan.b)}
            for r, fut in futs.items():
                results[r] = fut.result()

    valid_ids = [r for r in range(plan.b) if not isinstance(results[r], str)]
    failures = {r: results[r] for r in range(plan.b) if isinstance(results[r], str)}
    n_valid = len(valid_ids)
    required = max(10, plan.b / 2)
    if n_valid < required:
        raise EnsembleUnstableError(n_valid, plan.b, required)

    p = dataset.n_vars
    skel = np.zeros((p, p))
    orient = np.zeros((p, p))
    mb = np.zeros((p, p))
    for r in valid_ids:
        s, o, m = results[r]
        skel += s
        orient += o
        mb += m
    skel /= n_valid
    orient /= n_valid
    mb /= n_valid

    provenance = {
        "strategy": plan.strategy,
        "b": plan.b,
        "subsample_fraction": plan.subsample_fraction,
        "cluster_fraction": plan.cluster_fraction,
        "master_seed": plan.master_seed,
        "alpha": alpha,
        "max_cond": max_cond,
        "tau": tau,
        "n_valid": n_valid,
        "failed_replicates": {str(r): failures[r] for r in sorted(failures)},
        "valid_replicates": valid_ids,
        "tool_version": __version__,
    }
    stats = BnEnsembleStats(var_names=dataset.var_names, skeleton_freq=skel,
                            orient_freq=orient, mb_freq=mb, tau=tau,
                            b=plan.b, n_valid=n_valid, provenance=provenance)
    if keep_replicates:
        stats.provenance["replicate_skeletons"] = {
            str(r): [(int(i), int(j))
                     for i, j in zip(*np.nonzero(np.triu(results[r][0], 1)))]
            for r in valid_ids}
    return stats


def write_bn_stats(stats: BnEnsembleStats, out_dir) -> None:
    """bn_skeleton.tsv, bn_orient.tsv, bn_mb.tsv and bn_consensus.tsv."""
    names = stats.var_names
    p = len(names)
    write_tsv(
        os.path.join(out_dir, "bn_skeleton.tsv"),
        ("source", "target", "skeleton_freq"),
        ((names[i], names[j], float(stats.skeleton_freq[i, j]))
         for i in range(p) for j in range(i + 1, p)
         if stats.skeleton_freq[i, j] > 0))
    write_tsv(
        os.path.join(out_dir, "bn_orient.tsv"),
        ("from", "to", "orient_freq"),
        ((names[a], names[b], float(stats.orient_freq[a, b]))
         for a in range(p) for b in range(p) if stats.orient_freq[a, b] > 0))
    write_tsv(
        os.path.join(out_dir, "bn_mb.tsv"),
        ("node", "member", "mb_freq"),
        ((names[v], names[u], float(stats.mb_freq[v, u]))
         for v in range(p) for u in range(p) if stats.mb_freq[v, u] > 0))
    write_tsv(
        os.path.join(out_dir, "bn_consensus.tsv"),
        ("source", "target", "skeleton_freq"),
        ((names[i], names[j], float(stats.skeleton_freq[i, j]))
         for i, j in stats.consensus_skeleton()))
