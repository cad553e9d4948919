import math

import numpy as np
import pytest

from netresample.errors import DataError
from netresample.resampling import (SplitMix64, draw, dump_indices, make_plan,
                                    mix_seed)

from conftest import make_dataset


def clustered_dataset(n_clusters=10, size=3, seed=0):
    n = n_clusters * size
    labels = tuple(f"c{i // size}" for i in range(n))
    return make_dataset(n=n, p=3, seed=seed, cluster=labels)


def stratified_dataset(sizes={"A": 3, "B": 2}, seed=0):
    labels = tuple(lab for lab, k in sizes.items() for _ in range(k))
    return make_dataset(n=len(labels), p=3, seed=seed, stratum=labels)


def test_plan_requires_cluster_labels():
    d = make_dataset()
    with pytest.raises(DataError, match="cluster labels required"):
        make_plan("cluster_bootstrap", 100, d, seed=7)


def test_plan_requires_stratum_labels():
    d = make_dataset()
    with pytest.raises(DataError, match="stratum labels required"):
        make_plan("stratified_subsample", 100, d, seed=7)


def test_plan_b_too_small():
    d = make_dataset()
    with pytest.raises(DataError, match="B must be >= 2"):
        make_plan("bootstrap", 1, d, seed=42)


def test_plan_valid():
    d = make_dataset()
    plan = make_plan("bootstrap", 200, d, seed=42)
    assert plan.b == 200 and plan.strategy == "bootstrap"


def test_bootstrap_shape():
    d = make_dataset(n=5)
    plan = make_plan("bootstrap", 10, d, seed=1)
    idx = draw(plan, 0, d)
    assert len(idx.rows) == 5
    assert idx.rows.min() >= 0 and idx.rows.max() < 5


def test_subsample_distinct():
    d = make_dataset(n=10)
    plan = make_plan("subsample", 10, d, seed=1, subsample_fraction=0.6)
    idx = draw(plan, 3, d)
    assert len(idx.rows) == math.ceil(0.6 * 10)
    assert len(np.unique(idx.rows)) == len(idx.rows)


def test_subsample_full_fraction_is_identity_set():
    d = make_dataset(n=8)
    plan = make_plan("subsample", 5, d, seed=3, subsample_fraction=1.0)
    for r in range(5):
        assert np.array_equal(draw(plan, r, d).rows, np.arange(8))


def test_stratified_bootstrap_quotas():
    d = stratified_dataset({"A": 3, "B": 2})
    plan = make_plan("stratified_bootstrap", 20, d, seed=5)
    labels = np.asarray(d.stratum)
    for r in range(20):
        drawn = labels[draw(plan, r, d).rows]
        assert (drawn == "A").sum() == 3
        assert (drawn == "B").sum() == 2


def test_stratified_subsample_quotas():
    d = stratified_dataset({"A": 5, "B": 4, "C": 2})
    plan = make_plan("stratified_subsample", 20, d, seed=5,
                     subsample_fraction=0.5)
    labels = np.asarray(d.stratum)
    for r in range(20):
        rows = draw(plan, r, d).rows
        assert len(np.unique(rows)) == len(rows)
        drawn = labels[rows]
        assert (drawn == "A").sum() == math.ceil(0.5 * 5)
        assert (drawn == "B").sum() == math.ceil(0.5 * 4)
        assert (drawn == "C").sum() == math.ceil(0.5 * 2)


def test_cluster_bootstrap_membership_enumeration():
    # clusters c0 = {0, 1}, c1 = {2}; two draws with replacement give one of
    # four equally likely row multisets
    d = make_dataset(n=3, p=3, cluster=("c0", "c0", "c1"))
    plan = make_plan("cluster_bootstrap", 10, d, seed=123)
    allowed = {(0, 0, 1, 1), (0, 1, 2), (2, 2)}
    for r in range(10):
        rows = tuple(sorted(draw(plan, r, d).rows.tolist()))
        assert rows in allowed


def test_cluster_bootstrap_keeps_clusters_intact():
    d = clustered_dataset(n_clusters=6, size=4)
    plan = make_plan("cluster_bootstrap", 30, d, seed=9)
    labels = np.asarray(d.cluster)
    for r in range(30):
        rows = draw(plan, r, d).rows
        # exactly K cluster draws
        assert len(rows) == 24
        drawn = labels[rows]
        for lab in np.unique(drawn):
            members = np.flatnonzero(labels == lab)
            mult = {int((rows == m).sum()) for m in members}
            assert len(mult) == 1  # uniform multiplicity within each cluster


def test_fractional_cluster_bootstrap_draw_count():
    d = clustered_dataset(n_clusters=10, size=3)
    plan = make_plan("fractional_cluster_bootstrap", 20, d, seed=11,
                     cluster_fraction=0.75)
    labels = np.asarray(d.cluster)
    for r in range(20):
        rows = draw(plan, r, d).rows
        n_draws = sum(
            int((rows == np.flatnonzero(labels == lab)[0]).sum())
            for lab in np.unique(labels[rows]))
        assert n_draws == math.ceil(0.75 * 10)


def test_determinism_across_calls_and_order():
    d = make_dataset(n=40)
    plan = make_plan("bootstrap", 50, d, seed=77)
    a = [draw(plan, r, d).rows for r in range(50)]
    b = [draw(plan, r, d).rows for r in reversed(range(50))][::-1]
    for x, y in zip(a, b):
        assert np.array_equal(x, y)


def test_replicate_seed_mix_documented():
    plan_seed = 99
    assert draw(make_plan("bootstrap", 5, make_dataset(), plan_seed), 3,
                make_dataset()).replicate_seed == mix_seed(plan_seed, 3)


def test_distinct_replicates_differ():
    d = make_dataset(n=30)
    plan = make_plan("bootstrap", 20, d, seed=1)
    sets = {tuple(draw(plan, r, d).rows.tolist()) for r in range(20)}
    assert len(sets) > 15


def test_bootstrap_coverage_smoke():
    d = make_dataset(n=10)
    plan = make_plan("bootstrap", 2000, d, seed=2024)
    seen = np.zeros(10, dtype=bool)
    for r in range(2000):
        seen[np.unique(draw(plan, r, d).rows)] = True
        if seen.all():
            break
    assert seen.all()


def test_splitmix_blocks_are_contiguous():
    s = SplitMix64(42)
    a = s.next_block(10)
    s2 = SplitMix64(42)
    b = np.concatenate([s2.next_block(3), s2.next_block(7)])
    assert np.array_equal(a, b)


def test_dump_indices_format(tmp_path):
    d = make_dataset(n=6)
    plan = make_plan("bootstrap", 3, d, seed=5)
    out = tmp_path / "idx.tsv"
    with open(out, "w") as fh:
        dump_indices(plan, d, fh)
    lines = out.read_text().splitlines()
    assert lines[0] == "replicate_id\trow_index\tmultiplicity"
    total = {}
    for line in lines[1:]:
        r, i, c = map(int, line.split("\t"))
        total[r] = total.get(r, 0) + c
    assert total == {0: 6, 1: 6, 2: 6}
