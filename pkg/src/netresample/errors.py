"""Exception hierarchy.

Data problems (bad files, invalid labels, degenerate columns) raise
:class:`DataError`; numerical failures that occur on structurally valid input
(non-convergence, unstable ensembles) raise :class:`NumericalError`.  The CLI
maps these to exit codes 2 and 3 respectively.
"""


class NetresampleError(Exception):
    """Base class for all errors raised by this package."""


class DataError(NetresampleError):
    """Invalid or inconsistent input data / configuration."""


class ZeroVarianceError(DataError):
    """A column has (numerically) zero variance and cannot be standardized."""

    def __init__(self, columns):
        self.columns = list(columns)
        super().__init__(
            "zero-variance column(s): " + ", ".join(map(str, self.columns))
        )


class NumericalError(NetresampleError):
    """A numerical procedure failed on structurally valid input."""


class EnsembleUnstableError(NumericalError):
    """Too few replicates produced a usable network estimate."""

    def __init__(self, n_valid, b, required):
        self.n_valid = n_valid
        self.b = b
        self.required = required
        super().__init__(
            f"ensemble unstable: {n_valid} of {b} replicates valid "
            f"(need at least {required:g})"
        )


class ReplicateFailure(NetresampleError):
    """A single replicate could not be estimated (recorded, not fatal)."""
