import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netresample.dataio import (Dataset, load_dataset, standardize,
                                standardize_matrix, write_dataset)
from netresample.errors import DataError, ZeroVarianceError

from conftest import make_dataset


def test_load_plain(tiny_tsv):
    d = load_dataset(tiny_tsv)
    assert d.n_samples == 4
    assert d.n_vars == 3
    assert d.var_names == ("A", "B", "C")
    assert d.sample_ids == ("s1", "s2", "s3", "s4")
    assert d.stratum is None and d.cluster is None
    assert d.values[1, 2] == 6.5


def test_na_reject(tmp_path, tiny_tsv):
    path = tmp_path / "na.tsv"
    path.write_text(tiny_tsv.read_text().replace("8.25", "NA"))
    with pytest.raises(DataError, match="missing value"):
        load_dataset(path, missing_policy="reject")


def test_na_drop_rows(tmp_path, tiny_tsv):
    path = tmp_path / "na.tsv"
    path.write_text(tiny_tsv.read_text().replace("8.25", "NA"))
    d = load_dataset(path, missing_policy="drop_rows")
    assert d.n_samples == 3
    assert d.dropped_sample_ids == ("s3",)


def test_metadata_join(tmp_path, tiny_tsv):
    meta = tmp_path / "meta.tsv"
    meta.write_text("sample_id\tstratum\tcluster\n"
                    "s2\tx\tc1\ns1\tx\tc1\ns4\ty\tc2\ns3\ty\tc2\n")
    d = load_dataset(tiny_tsv, meta)
    # metadata reordered to data order
    assert d.stratum == ("x", "x", "y", "y")
    assert d.cluster == ("c1", "c1", "c2", "c2")


def test_metadata_unknown_sample(tmp_path, tiny_tsv):
    meta = tmp_path / "meta.tsv"
    meta.write_text("sample_id\tstratum\n"
                    "s1\tx\ns2\tx\ns3\ty\ns4\ty\nS9\tz\n")
    with pytest.raises(DataError, match="S9"):
        load_dataset(tiny_tsv, meta)


def test_metadata_missing_sample(tmp_path, tiny_tsv):
    meta = tmp_path / "meta.tsv"
    meta.write_text("sample_id\tstratum\ns1\tx\ns2\tx\ns3\ty\n")
    with pytest.raises(DataError, match="s4"):
        load_dataset(tiny_tsv, meta)


def test_duplicate_var_names(tmp_path):
    path = tmp_path / "dup.tsv"
    path.write_text("sample_id\tA\tA\ns1\t1\t2\ns2\t3\t4\ns3\t5\t6\n")
    with pytest.raises(DataError, match="duplicate variable"):
        load_dataset(path)


def test_unparseable_cell(tmp_path):
    path = tmp_path / "bad.tsv"
    path.write_text("sample_id\tA\tB\ns1\t1\t2\ns2\tfoo\t4\ns3\t5\t6\n")
    with pytest.raises(DataError, match="foo"):
        load_dataset(path)


def test_crlf_accepted(tmp_path, tiny_tsv):
    path = tmp_path / "crlf.tsv"
    path.write_bytes(tiny_tsv.read_text().replace("\n", "\r\n").encode())
    d = load_dataset(path)
    assert d.n_samples == 4


def test_too_few_samples():
    with pytest.raises(DataError, match="3 samples"):
        Dataset(values=np.zeros((2, 3)), var_names=("a", "b", "c"),
                sample_ids=("s1", "s2"))


def test_roundtrip_bit_exact(tmp_path):
    d = make_dataset(n=17, p=5, seed=99)
    out = tmp_path / "out.tsv"
    write_dataset(d, out)
    d2 = load_dataset(out)
    assert np.array_equal(d.values, d2.values)
    assert d.var_names == d2.var_names
    assert d.sample_ids == d2.sample_ids


def test_standardize_hand_example():
    d = make_dataset(n=3, p=2, seed=0)
    d = Dataset(values=np.array([[1.0, 5.0], [2.0, 6.0], [3.0, 8.0]]),
                var_names=d.var_names[:2], sample_ids=d.sample_ids[:3])
    z = standardize(d)
    assert np.allclose(z.values[:, 0], [-1.0, 0.0, 1.0])
    assert np.allclose(z.mean, [2.0, 19.0 / 3.0])


def test_standardize_idempotent():
    d = make_dataset(n=25, p=6, seed=3)
    z1 = standardize(d)
    z2, _, _ = standardize_matrix(z1.values)
    assert np.allclose(z1.values, z2, atol=1e-10)
    assert np.abs(z1.values.mean(axis=0)).max() < 1e-10
    assert np.abs(z1.values.std(axis=0, ddof=1) - 1).max() < 1e-10


def test_standardize_zero_variance():
    d = make_dataset(n=10, p=3, seed=1)
    values = d.values.copy()
    values[:, 1] = 5.0
    d = Dataset(values=values, var_names=d.var_names, sample_ids=d.sample_ids)
    with pytest.raises(ZeroVarianceError, match="V1"):
        standardize(d)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(min_value=-1e6, max_value=1e6), min_size=4,
                max_size=40),
       st.integers(min_value=0, max_value=2**32))
def test_standardize_idempotence_property(col, seed):
    rng = np.random.default_rng(seed)
    x = np.column_stack([np.asarray(col), rng.normal(size=len(col))])
    if x[:, 0].var(ddof=1) <= 1e-12:
        return
    z1, _, _ = standardize_matrix(x)
    z2, _, _ = standardize_matrix(z1)
    assert np.allclose(z1, z2, atol=1e-10)
