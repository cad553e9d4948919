import numpy as np
import pytest

from netresample.dataio import Dataset


@pytest.fixture
def tiny_tsv(tmp_path):
    """4 samples x 3 variables, no missing values."""
    path = tmp_path / "tiny.tsv"
    path.write_text(
        "sample_id\tA\tB\tC\n"
        "s1\t1.0\t2.0\t3.0\n"
        "s2\t4.0\t5.0\t6.5\n"
        "s3\t7.0\t8.25\t9.0\n"
        "s4\t-1.0\t0.5\t2.0\n")
    return path


def make_dataset(n=30, p=4, seed=0, stratum=None, cluster=None):
    rng = np.random.default_rng(seed)
    values = rng.normal(size=(n, p))
    return Dataset(
        values=values,
        var_names=tuple(f"V{k}" for k in range(p)),
        sample_ids=tuple(f"s{i}" for i in range(n)),
        stratum=stratum,
        cluster=cluster,
    )


def gaussian_dataset(theta, n, seed):
    """Samples from N(0, inv(theta)) as a Dataset."""
    rng = np.random.default_rng(seed)
    cov = np.linalg.inv(theta)
    p = theta.shape[0]
    values = rng.multivariate_normal(np.zeros(p), cov, size=n)
    return Dataset(values=values,
                   var_names=tuple(f"V{k}" for k in range(p)),
                   sample_ids=tuple(f"s{i}" for i in range(n)))
