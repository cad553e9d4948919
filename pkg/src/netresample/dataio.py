"""Tabular data ingestion, validation and column standardization.

Input format is TSV: the first row holds variable names (first cell is the
sample-id column header and is ignored), the first column holds sample ids,
and every remaining cell is a decimal number or the missing-value token
``NA``.  An optional metadata TSV carries per-sample ``stratum`` and
``cluster`` labels joined on ``sample_id``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, ZeroVarianceError

log = logging.getLogger(__name__)

NA_TOKEN = "NA"

_MISSING_POLICIES = ("reject", "drop_rows")


@dataclass(frozen=True)
class Dataset:
    """Numeric sample x variable matrix plus optional sample metadata."""

    values: np.ndarray
    var_names: tuple[str, ...]
    sample_ids: tuple[str, ...]
    stratum: tuple[str, ...] | None = None
    cluster: tuple[str, ...] | None = None
    dropped_sample_ids: tuple[str, ...] = field(default=())

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def n_vars(self) -> int:
        return self.values.shape[1]

    def __post_init__(self):
        v = self.values
        if v.ndim != 2:
            raise DataError("values must be a 2-d matrix")
        n, p = v.shape
        if n < 3:
            raise DataError(f"need at least 3 samples, got {n}")
        if p < 2:
            raise DataError(f"need at least 2 variables, got {p}")
        if len(self.var_names) != p:
            raise DataError("var_names length does not match matrix width")
        if len(self.sample_ids) != n:
            raise DataError("sample_ids length does not match matrix height")
        if len(set(self.var_names)) != p:
            raise DataError("duplicate variable names: "
                            + ", ".join(sorted(_duplicates(self.var_names))))
        if len(set(self.sample_ids)) != n:
            raise DataError("duplicate sample ids: "
                            + ", ".join(sorted(_duplicates(self.sample_ids))))
        if not np.all(np.isfinite(v)):
            raise DataError("non-finite values present after ingestion")
        for name, labels in (("stratum", self.stratum), ("cluster", self.cluster)):
            if labels is not None:
                if len(labels) != n:
                    raise DataError(f"{name} labels length does not match samples")
                if any(lab == "" for lab in labels):
                    raise DataError(f"empty {name} label")


@dataclass(frozen=True)
class StandardizedDataset:
    """Column-wise z-scored matrix with the original moments retained."""

    values: np.ndarray
    mean: np.ndarray
    sd: np.ndarray
    var_names: tuple[str, ...]
    sample_ids: tuple[str, ...]


def _duplicates(items):
    seen, dups = set(), set()
    for it in items:
        if it in seen:
            dups.add(it)
        seen.add(it)
    return dups


def _read_rows(path):
    with open(path, encoding="utf-8", newline="") as fh:
        for line in fh:
            yield line.rstrip("\r\n").split("\t")


def load_dataset(data_path, meta_path=None, missing_policy="reject") -> Dataset:
    """Load and validate a TSV data matrix, joining optional sample metadata.

    Parameters
    ----------
    data_path : str or path
        TSV file; header row = variable names, first column = sample ids,
        cells are decimal numbers or ``NA``.
    meta_path : str or path, optional
        TSV with a ``sample_id`` column and optional ``stratum`` / ``cluster``
        columns.  Sample sets must match the data file exactly.
    missing_policy : {"reject", "drop_rows"}
        ``reject`` errors on the first ``NA``; ``drop_rows`` removes every
        row containing one and records the dropped sample ids.
    """
    if missing_policy not in _MISSING_POLICIES:
        raise DataError(f"unknown missing policy {missing_policy!r}; "
                        f"expected one of {_MISSING_POLICIES}")

    rows = list(_read_rows(data_path))
    if not rows or len(rows[0]) < 3:
        raise DataError(f"{data_path}: expected a header with at least two variables")
    var_names = tuple(rows[0][1:])

    sample_ids: list[str] = []
    data: list[list[float]] = []
    dropped: list[str] = []
    for rnum, row in enumerate(rows[1:], start=2):
        if len(row) == 1 and row[0] == "":
            continue  # trailing blank line
        if len(row) != len(var_names) + 1:
            raise DataError(f"{data_path}: row {rnum} has {len(row)} fields, "
                            f"expected {len(var_names) + 1}")
        sid = row[0]
        parsed: list[float] = []
        has_na = False
        for cnum, cell in enumerate(row[1:]):
            if cell == NA_TOKEN:
                if missing_policy == "reject":
                    raise DataError(
                        f"{data_path}: missing value at sample {sid!r}, "
                        f"variable {var_names[cnum]!r} (policy 'reject')")
                has_na = True
                continue
            try:
                val = float(cell)
            except ValueError:
                raise DataError(
                    f"{data_path}: unparseable cell {cell!r} at row {rnum}, "
                    f"column {var_names[cnum]!r}") from None
            if not math.isfinite(val):
                raise DataError(
                    f"{data_path}: non-finite value at row {rnum}, "
                    f"column {var_names[cnum]!r}")
            parsed.append(val)
        if has_na:
            dropped.append(sid)
            continue
        sample_ids.append(sid)
        data.append(parsed)

    values = np.asarray(data, dtype=np.float64)
    if values.size == 0:
        raise DataError(f"{data_path}: no usable rows")
    if dropped:
        log.warning("%s: %d row(s) dropped for missing values: %s",
                    data_path, len(dropped), ", ".join(dropped))

    stratum = cluster = None
    if meta_path is not None:
        stratum, cluster = _load_metadata(meta_path, sample_ids, set(dropped))

    return Dataset(values=values, var_names=var_names,
                   sample_ids=tuple(sample_ids), stratum=stratum,
                   cluster=cluster, dropped_sample_ids=tuple(dropped))


def _load_metadata(meta_path, sample_ids, dropped_ids):
    rows = list(_read_rows(meta_path))
    if not rows:
        raise DataError(f"{meta_path}: empty metadata file")
    header = rows[0]
    if "sample_id" not in header:
        raise DataError(f"{meta_path}: metadata needs a 'sample_id' column")
    cols = {name: header.index(name) for name in ("sample_id", "stratum", "cluster")
            if name in header}

    by_id: dict[str, list[str]] = {}
    for rnum, row in enumerate(rows[1:], start=2):
        if len(row) == 1 and row[0] == "":
            continue
        if len(row) != len(header):
            raise DataError(f"{meta_path}: row {rnum} has {len(row)} fields, "
                            f"expected {len(header)}")
        sid = row[cols["sample_id"]]
        if sid in by_id:
            raise DataError(f"{meta_path}: duplicate sample_id {sid!r}")
        by_id[sid] = row

    known = set(sample_ids) | dropped_ids
    for sid in by_id:
        if sid not in known:
            raise DataError(f"{meta_path}: sample {sid!r} not present in data")
    for sid in sample_ids:
        if sid not in by_id:
            raise DataError(f"{meta_path}: sample {sid!r} missing from metadata")

    def column(name):
        if name not in cols:
            return None
        labels = tuple(by_id[sid][cols[name]] for sid in sample_ids)
        if any(lab == "" for lab in labels):
            raise DataError(f"{meta_path}: empty {name} label")
        return labels

    return column("stratum"), column("cluster")


def write_dataset(dataset: Dataset, path) -> None:
    """Write a Dataset back to TSV (17 significant digits, round-trip exact)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("sample_id\t" + "\t".join(dataset.var_names) + "\n")
        for sid, row in zip(dataset.sample_ids, dataset.values):
            cells = "\t".join(f"{v:.17g}" for v in row)
            fh.write(f"{sid}\t{cells}\n")


def standardize(dataset: Dataset) -> StandardizedDataset:
    """Z-score every column (mean 0, sample sd 1 with the n-1 denominator)."""
    values, mean, sd = standardize_matrix(dataset.values, dataset.var_names)
    return StandardizedDataset(values=values, mean=mean, sd=sd,
                               var_names=dataset.var_names,
                               sample_ids=dataset.sample_ids)


def standardize_matrix(x, var_names=None):
    """Column z-scoring of a raw matrix; raises on zero-variance columns.

    Returns ``(z, mean, sd)``; ``sd`` uses the n-1 denominator.
    """
    x = np.asarray(x, dtype=np.float64)
    mean = x.mean(axis=0)
    var = x.var(axis=0, ddof=1)
    bad = np.flatnonzero(var <= 1e-12)
    if bad.size:
        names = ([var_names[i] for i in bad] if var_names is not None
                 else bad.tolist())
        raise ZeroVarianceError(names)
    sd = np.sqrt(var)
    return (x - mean) / sd, mean, sd
