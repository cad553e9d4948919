"""Replicate row-index generation under six resampling strategies.

Every replicate is drawn from its own counter-based splitmix64 stream whose
seed is a fixed 64-bit hash mix of ``(master_seed, replicate_id)``, so index
sets depend only on the plan and the dataset's label ordering -- never on
execution order, thread count or platform RNG state.

Strategies
----------
bootstrap                    n rows drawn with replacement
subsample                    ceil(f*n) distinct rows, without replacement
stratified_bootstrap         bootstrap within each stratum, sizes preserved
stratified_subsample         ceil(f*n_s) distinct rows per stratum s
cluster_bootstrap            K whole clusters drawn with replacement
fractional_cluster_bootstrap ceil(f*K) whole clusters drawn with replacement
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataio import Dataset
from .errors import DataError

STRATEGIES = (
    "bootstrap",
    "subsample",
    "stratified_bootstrap",
    "stratified_subsample",
    "cluster_bootstrap",
    "fractional_cluster_bootstrap",
)

_STRATIFIED = {"stratified_bootstrap", "stratified_subsample"}
_CLUSTERED = {"cluster_bootstrap", "fractional_cluster_bootstrap"}

_U64 = (1 << 64) - 1
# splitmix64 constants (Steele, Lea & Flood 2014); GOLDEN is the stream increment.
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def mix_seed(master_seed: int, k: int) -> int:
    """Fixed 64-bit hash mix: splitmix64 output for state master_seed at step k+1."""
    z = (master_seed + (k + 1) * _GOLDEN) & _U64
    z = ((z ^ (z >> 30)) * _MIX1) & _U64
    z = ((z ^ (z >> 27)) * _MIX2) & _U64
    return z ^ (z >> 31)


class SplitMix64:
    """Counter-based splitmix64 stream over numpy uint64 blocks."""

    def __init__(self, seed: int):
        self._seed = np.uint64(seed & _U64)
        self._counter = 0

    def next_block(self, count: int) -> np.ndarray:
        idx = np.arange(self._counter + 1, self._counter + count + 1, dtype=np.uint64)
        self._counter += count
        z = self._seed + idx * np.uint64(_GOLDEN)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        return z ^ (z >> np.uint64(31))

    def integers(self, bound: int, count: int) -> np.ndarray:
        """count draws uniform over [0, bound) (modulo map; bias < bound/2^64)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        return (self.next_block(count) % np.uint64(bound)).astype(np.int64)

    def choose_without_replacement(self, n: int, k: int) -> np.ndarray:
        """k distinct values from [0, n) via a partial Fisher-Yates shuffle."""
        if not 0 <= k <= n:
            raise ValueError("need 0 <= k <= n")
        pool = np.arange(n, dtype=np.int64)
        draws = self.next_block(k)
        for i in range(k):
            j = i + int(draws[i] % np.uint64(n - i))
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]


@dataclass(frozen=True)
class ResamplePlan:
    strategy: str
    b: int
    master_seed: int
    subsample_fraction: float = 0.8
    cluster_fraction: float = 0.8


@dataclass(frozen=True)
class ResampleIndex:
    replicate_id: int
    rows: np.ndarray          # sorted multiset of row indices
    replicate_seed: int


def make_plan(strategy, b, dataset: Dataset, seed,
              subsample_fraction=0.8, cluster_fraction=0.8) -> ResamplePlan:
    """Validate strategy/parameters against the dataset's metadata."""
    if strategy not in STRATEGIES:
        raise DataError(f"unknown resampling strategy {strategy!r}; "
                        f"expected one of {STRATEGIES}")
    if b < 2:
        raise DataError(f"replicate count B must be >= 2, got {b}")
    if not 0.0 < subsample_fraction <= 1.0:
        raise DataError("subsample_fraction must be in (0, 1]")
    if not 0.0 < cluster_fraction <= 1.0:
        raise DataError("cluster_fraction must be in (0, 1]")
    if strategy in _STRATIFIED and dataset.stratum is None:
        raise DataError(f"stratum labels required for strategy {strategy!r}")
    if strategy in _CLUSTERED and dataset.cluster is None:
        raise DataError(f"cluster labels required for strategy {strategy!r}")
    seed = int(seed)
    if not 0 <= seed <= _U64:
        raise DataError("seed must fit in 64 unsigned bits")
    return ResamplePlan(strategy=strategy, b=int(b), master_seed=seed,
                        subsample_fraction=float(subsample_fraction),
                        cluster_fraction=float(cluster_fraction))


def _groups(labels):
    """Row indices per label, labels in sorted order (deterministic)."""
    labels = np.asarray(labels)
    uniq = sorted(set(labels.tolist()))
    return [(lab, np.flatnonzero(labels == lab)) for lab in uniq]


def draw(plan: ResamplePlan, replicate_id: int, dataset: Dataset) -> ResampleIndex:
    """Index set for one replicate; a pure function of (plan, id, dataset labels)."""
    if not 0 <= replicate_id < plan.b:
        raise DataError(f"replicate_id {replicate_id} outside [0, {plan.b})")
    seed = mix_seed(plan.master_seed, replicate_id)
    stream = SplitMix64(seed)
    n = dataset.n_samples
    strat = plan.strategy

    if strat == "bootstrap":
        rows = stream.integers(n, n)
    elif strat == "subsample":
        k = math.ceil(plan.subsample_fraction * n)
        rows = stream.choose_without_replacement(n, k)
    elif strat == "stratified_bootstrap":
        parts = [members[stream.integers(len(members), len(members))]
                 for _, members in _groups(dataset.stratum)]
        rows = np.concatenate(parts)
    elif strat == "stratified_subsample":
        parts = []
        for _, members in _groups(dataset.stratum):
            k = math.ceil(plan.subsample_fraction * len(members))
            parts.append(members[stream.choose_without_replacement(len(members), k)])
        rows = np.concatenate(parts)
    elif strat in _CLUSTERED:
        groups = _groups(dataset.cluster)
        n_clusters = len(groups)
        n_draws = n_clusters if strat == "cluster_bootstrap" \
            else math.ceil(plan.cluster_fraction * n_clusters)
        picks = stream.integers(n_clusters, n_draws)
        rows = np.concatenate([groups[int(c)][1] for c in picks])
    else:  # pragma: no cover - guarded by make_plan
        raise DataError(f"unknown strategy {strat!r}")

    rows = np.sort(rows.astype(np.int64))
    return ResampleIndex(replicate_id=replicate_id, rows=rows, replicate_seed=seed)


def dump_indices(plan: ResamplePlan, dataset: Dataset, fh) -> None:
    """Audit dump of every replicate's index multiset as TSV."""
    fh.write("replicate_id\trow_index\tmultiplicity\n")
    for r in range(plan.b):
        rows = draw(plan, r, dataset).rows
        idx, counts = np.unique(rows, return_counts=True)
        for i, c in zip(idx, counts):
            fh.write(f"{r}\t{i}\t{c}\n")
