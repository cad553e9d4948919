"""Replicate orchestration and consensus aggregation for GGM inference.

B replicates are drawn, estimated independently (optionally across a thread
pool) and folded into per-edge statistics in replicate-id order, so results
never depend on scheduling.  Failed replicates -- degenerate columns, too few
distinct rows, glasso non-convergence -- are excluded from every denominator
and recorded in the provenance.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from ._fileio import write_json, write_tsv
from .dataio import Dataset
from .errors import EnsembleUnstableError, NetresampleError
from .ggm import glasso, lambda_max, sample_correlation, to_network
from .resampling import ResamplePlan, draw


def empirical_pvalue(pcor_samples) -> float:
    """Two-sided add-one sign test over the replicate estimates.

    p = 2 * min( (1 + #{x <= 0}) / (n+1), (1 + #{x >= 0}) / (n+1) ), capped
    at 1; exact zeros count on both sides, so p is never 0.
    """
    x = np.asarray(pcor_samples, dtype=np.float64)
    n = len(x)
    if n < 1:
        raise NetresampleError("empirical_pvalue needs at least one sample")
    le = int(np.count_nonzero(x <= 0))
    ge = int(np.count_nonzero(x >= 0))
    p = 2.0 * min((1 + le) / (n + 1), (1 + ge) / (n + 1))
    return min(p, 1.0)


def bh_adjust(pvals) -> np.ndarray:
    """Benjamini-Hochberg step-up adjustment, capped at 1, original order."""
    p = np.asarray(pvals, dtype=np.float64)
    if p.ndim != 1:
        raise NetresampleError("pvals must be 1-d")
    if len(p) == 0:
        return p.copy()
    if p.min() < 0 or p.max() > 1:
        raise NetresampleError("p-values must lie in [0, 1]")
    m = len(p)
    order = np.argsort(p, kind="stable")
    scaled = p[order] * m / np.arange(1, m + 1)
    adj = np.minimum.accumulate(scaled[::-1])[::-1]
    out = np.empty(m)
    out[order] = np.minimum(adj, 1.0)
    return out


def percentile_ci(samples, alpha):
    """Equal-tailed percentile interval via linear rank interpolation.

    With sorted x_1..x_m the q-quantile interpolates at rank 1 + (m-1) q.
    Returns (None, None) when fewer than 10 samples are available.
    """
    x = np.asarray(samples, dtype=np.float64)
    if len(x) < 10:
        return (None, None)
    lo, hi = np.quantile(x, [alpha / 2.0, 1.0 - alpha / 2.0])
    return float(lo), float(hi)


@dataclass(frozen=True)
class EdgeStats:
    """Aggregated statistics for one variable pair (i < j)."""

    i: int
    j: int
    freq: float
    pcor_mean: float
    ci_lo: float | None
    ci_hi: float | None
    pval: float
    padj: float
    n_valid: int

    @property
    def sign(self) -> int:
        return 1 if self.pcor_mean >= 0 else -1


@dataclass(frozen=True)
class ConsensusNetwork:
    """Edge statistics plus the tau-thresholded signed consensus graph."""

    var_names: tuple[str, ...]
    edges: tuple[EdgeStats, ...]
    tau: float
    alpha: float
    b: int
    n_valid: int
    lam: float
    provenance: dict
    replicates: dict | None = None   # replicate_id -> [(i, j, theta, pcor)]

    @property
    def graph_edges(self) -> tuple[EdgeStats, ...]:
        return tuple(e for e in self.edges if e.freq >= self.tau)

    def name_of(self, idx: int) -> str:
        return self.var_names[idx]


def resolve_lambda(s_full, lambda_value=None, lambda_scale=0.2) -> float:
    """Fixed penalty used for every replicate: explicit value, or a multiple
    of the full-data empty-graph threshold."""
    if lambda_value is not None:
        if lambda_value < 0:
            raise NetresampleError("lambda must be non-negative")
        return float(lambda_value)
    return float(lambda_scale) * lambda_max(s_full)


def _ggm_replicate(dataset, plan, replicate_id, lam, tol, max_iter):
    """One replicate: draw -> restrict -> re-standardize -> glasso -> network.

    Returns (adjacency, pcor, theta) vectors over pairs i<j, or an error
    string on failure.
    """
    idx = draw(plan, replicate_id, dataset)
    if len(np.unique(idx.rows)) < 3:
        return f"fewer than 3 distinct rows (seed {idx.replicate_seed})"
    x = dataset.values[idx.rows]
    try:
        s = sample_correlation(x, dataset.var_names)
        est = glasso(s, lam, tol=tol, max_iter=max_iter)
    except NetresampleError as exc:
        return str(exc)
    if not est.converged:
        return f"glasso did not converge in {est.iterations} sweeps"
    net = to_network(est)
    iu, ju = np.triu_indices(dataset.n_vars, 1)
    return net.adjacency[iu, ju], net.pcor[iu, ju], est.theta[iu, ju]


def run_ensemble_ggm(dataset: Dataset, plan: ResamplePlan, *,
                     lambda_value=None, lambda_scale=0.2, tau=0.8, alpha=0.05,
                     tol=1e-4, max_iter=500, threads=1,
                     keep_replicates=False) -> ConsensusNetwork:
    """Consensus partial-correlation network over B resampled glasso fits."""
    if not 0.0 < tau <= 1.0:
        raise NetresampleError("tau must be in (0, 1]")
    if not 0.0 < alpha < 0.5:
        raise NetresampleError("alpha must be in (0, 0.5)")
    if threads < 1:
        raise NetresampleError("threads must be >= 1")

    s_full = sample_correlation(dataset.values, dataset.var_names)
    lam = resolve_lambda(s_full, lambda_value, lambda_scale)

    results: dict[int, object] = {}
    if threads == 1:
        for r in range(plan.b):
            results[r] = _ggm_replicate(dataset, plan, r, lam, tol, max_iter)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futs = {r: pool.submit(_ggm_replicate, dataset, plan, r, lam,
                                   tol, max_iter)
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
    iu, ju = np.triu_indices(p, 1)
    adj = np.stack([results[r][0] for r in valid_ids])
    pcors = np.stack([results[r][1] for r in valid_ids])

    sel = adj.sum(axis=0)
    keep = np.flatnonzero(sel > 0)
    pvals = np.array([empirical_pvalue(pcors[:, k]) for k in keep])
    padj = bh_adjust(pvals)

    edges = []
    for pos, k in enumerate(keep):
        ci_lo, ci_hi = percentile_ci(pcors[:, k], alpha)
        edges.append(EdgeStats(
            i=int(iu[k]), j=int(ju[k]),
            freq=float(sel[k] / n_valid),
            pcor_mean=float(pcors[:, k].mean()),
            ci_lo=ci_lo, ci_hi=ci_hi,
            pval=float(pvals[pos]), padj=float(padj[pos]),
            n_valid=n_valid))

    provenance = {
        "strategy": plan.strategy,
        "b": plan.b,
        "subsample_fraction": plan.subsample_fraction,
        "cluster_fraction": plan.cluster_fraction,
        "master_seed": plan.master_seed,
        "lambda": lam,
        "lambda_scale": None if lambda_value is not None else lambda_scale,
        "tau": tau,
        "alpha": alpha,
        "glasso_tol": tol,
        "glasso_max_iter": max_iter,
        "n_valid": n_valid,
        "failed_replicates": {str(r): failures[r] for r in sorted(failures)},
        "valid_replicates": valid_ids,
        "tool_version": __version__,
    }

    replicates = None
    if keep_replicates:
        replicates = {}
        thetas = np.stack([results[r][2] for r in valid_ids])
        for row, r in enumerate(valid_ids):
            present = np.flatnonzero(adj[row])
            replicates[r] = [(int(iu[k]), int(ju[k]), float(thetas[row, k]),
                              float(pcors[row, k])) for k in present]

    return ConsensusNetwork(var_names=dataset.var_names, edges=tuple(edges),
                            tau=tau, alpha=alpha, b=plan.b, n_valid=n_valid,
                            lam=lam, provenance=provenance,
                            replicates=replicates)


def consensus_to_dict(cn: ConsensusNetwork) -> dict:
    """JSON-ready form of a consensus network (deterministic ordering)."""
    return {
        "var_names": list(cn.var_names),
        "tau": cn.tau,
        "alpha": cn.alpha,
        "b": cn.b,
        "n_valid": cn.n_valid,
        "lambda": cn.lam,
        "n_tested_pairs": len(cn.edges),
        "provenance": cn.provenance,
        "edges": [
            {
                "source": cn.var_names[e.i],
                "target": cn.var_names[e.j],
                "freq": e.freq,
                "pcor_mean": e.pcor_mean,
                "ci_lo": e.ci_lo,
                "ci_hi": e.ci_hi,
                "pval": e.pval,
                "padj": e.padj,
                "n_valid": e.n_valid,
            }
            for e in cn.edges
        ],
        "graph": [
            {
                "source": cn.var_names[e.i],
                "target": cn.var_names[e.j],
                "weight": e.pcor_mean,
                "sign": e.sign,
            }
            for e in cn.graph_edges
        ],
    }


def write_consensus(cn: ConsensusNetwork, out_dir) -> None:
    """consensus.json + edges.tsv + graph.tsv (+ per-replicate dumps)."""
    write_json(os.path.join(out_dir, "consensus.json"), consensus_to_dict(cn))
    write_tsv(
        os.path.join(out_dir, "edges.tsv"),
        ("source", "target", "freq", "pcor_mean", "ci_lo", "ci_hi",
         "pval", "padj", "sign"),
        ((cn.var_names[e.i], cn.var_names[e.j], e.freq, e.pcor_mean,
          e.ci_lo, e.ci_hi, e.pval, e.padj, f"{e.sign:+d}")
         for e in cn.edges))
    write_tsv(
        os.path.join(out_dir, "graph.tsv"),
        ("source", "target", "weight", "sign"),
        ((cn.var_names[e.i], cn.var_names[e.j], e.pcor_mean, f"{e.sign:+d}")
         for e in cn.graph_edges))
    if cn.replicates is not None:
        rep_dir = os.path.join(out_dir, "replicates")
        os.makedirs(rep_dir, exist_ok=True)
        for r, entries in cn.replicates.items():
            write_tsv(
                os.path.join(rep_dir, f"theta_r{r:04d}.tsv"),
                ("i", "j", "theta", "pcor"),
                ((cn.var_names[i], cn.var_names[j], theta, pcor)
                 for i, j, theta, pcor in entries))
