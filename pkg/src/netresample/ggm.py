"""Sparse Gaussian graphical model estimation per replicate.

`glasso` maximizes  log det(Theta) - tr(S Theta) - lam * ||Theta||_1,offdiag
by block coordinate descent on the covariance estimate W: each column is a
lasso subproblem solved by cyclic coordinate descent with warm starts.  The
diagonal is unpenalized, so the fitted covariance keeps diag(W) == diag(S)
and lam == 0 reproduces the plain inverse.

Convergence is declared on the duality gap
    gap = primal(Theta) - [log det(W~) + p]
where W~ is the current W projected onto the dual-feasible box
|W - S|_offdiag <= lam, diag(W~) = diag(S).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DataError, NumericalError
from .dataio import standardize_matrix


@dataclass(frozen=True)
class PrecisionEstimate:
    """Estimated precision matrix and its exact inverse (fitted covariance)."""

    theta: np.ndarray
    w: np.ndarray
    lam: float
    converged: bool
    iterations: int
    duality_gap: float
    objective_path: tuple[float, ...]


@dataclass(frozen=True)
class NetworkEstimate:
    """Partial correlations and thresholded adjacency for one replicate."""

    pcor: np.ndarray
    adjacency: np.ndarray


def sample_correlation(x: np.ndarray, var_names=None) -> np.ndarray:
    """Correlation matrix of a replicate after re-standardizing its columns.

    Raises ZeroVarianceError when a column degenerates inside the replicate
    and DataError for fewer than 3 rows.
    """
    x = np.asarray(x, dtype=np.float64)
    m = x.shape[0]
    if m < 3:
        raise DataError(f"replicate needs at least 3 rows, got {m}")
    z, _, _ = standardize_matrix(x, var_names)
    s = (z.T @ z) / (m - 1)
    s = (s + s.T) / 2.0
    np.fill_diagonal(s, 1.0)
    return s


def lambda_max(s: np.ndarray) -> float:
    """Smallest penalty for which the glasso solution is fully diagonal."""
    off = np.abs(s).copy()
    np.fill_diagonal(off, 0.0)
    return float(off.max())


def _validate_correlation(s: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=np.float64)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise DataError("correlation matrix must be square")
    if s.shape[0] < 2:
        raise DataError("need at least 2 variables")
    if not np.allclose(s, s.T, atol=1e-12):
        raise DataError("correlation matrix not symmetric")
    if not np.allclose(np.diag(s), 1.0, atol=1e-10):
        raise DataError("correlation matrix must have unit diagonal")
    return (s + s.T) / 2.0


def glasso(s, lam, tol=1e-4, max_iter=500, inner_tol=1e-6,
           inner_max_iter=1000) -> PrecisionEstimate:
    """L1-penalized precision estimation (off-diagonal penalty only).

    Parameters
    ----------
    s : (p, p) correlation matrix.
    lam : penalty >= 0.  For lam == 0, `s` must be invertible.
    tol : duality-gap tolerance; converged when gap <= tol * p.
    max_iter : maximum number of full column sweeps.
    inner_tol, inner_max_iter : lasso coordinate-descent controls.
    """
    s = _validate_correlation(s)
    if lam < 0:
        raise DataError("lambda must be non-negative")
    p = s.shape[0]
    if lam == 0.0:
        try:
            np.linalg.cholesky(s)
        except np.linalg.LinAlgError:
            raise NumericalError(
                "correlation matrix is singular; lambda = 0 needs an "
                "invertible input") from None

    w = s.copy()
    b = np.zeros((p, p))
    others = [np.concatenate([np.arange(j), np.arange(j + 1, p)])
              for j in range(p)]
    theta = np.eye(p)
    gap = np.inf
    objective_path: list[float] = []
    sweeps = 0
    converged = False

    for sweeps in range(1, max_iter + 1):
        for j in range(p):
            o = others[j]
            v = np.ascontiguousarray(w[np.ix_(o, o)])
            s12 = np.ascontiguousarray(s[o, j])
            beta = np.ascontiguousarray(b[o, j])
            u = v @ beta
            kernels.lasso_cd(v, s12, beta, u, lam, inner_tol, inner_max_iter)
            b[o, j] = beta
            w[o, j] = u
            w[j, o] = u

        theta = _assemble_theta(s, w, b, others)
        if theta is None:
            objective_path.append(-np.inf)
            continue
        obj, gap = _objective_and_gap(s, w, theta, lam)
        objective_path.append(obj)
        if gap <= tol * p:
            converged = True
            break

    if theta is None:  # never assembled cleanly
        raise NumericalError("glasso failed to produce a positive definite "
                             "estimate")
    try:
        np.linalg.cholesky(theta)
    except np.linalg.LinAlgError:
        raise NumericalError("glasso estimate lost positive definiteness") \
            from None
    w_out = np.linalg.inv(theta)
    w_out = (w_out + w_out.T) / 2.0
    return PrecisionEstimate(theta=theta, w=w_out, lam=float(lam),
                             converged=converged, iterations=sweeps,
                             duality_gap=float(gap),
                             objective_path=tuple(objective_path))


def _assemble_theta(s, w, b, others):
    p = s.shape[0]
    theta = np.empty((p, p))
    for j in range(p):
        o = others[j]
        beta = b[o, j]
        denom = w[j, j] - w[o, j] @ beta
        if denom <= 0:
            return None
        theta[j, j] = 1.0 / denom
        theta[o, j] = -beta / denom
    return (theta + theta.T) / 2.0


def _offdiag_l1(theta) -> float:
    return float(np.abs(theta).sum() - np.trace(np.abs(theta)))


def _objective_and_gap(s, w, theta, lam):
    """Penalized log-likelihood of theta and duality gap vs projected W."""
    sign, logdet = np.linalg.slogdet(theta)
    if sign <= 0:
        return -np.inf, np.inf
    tr = float((s * theta).sum())
    l1 = _offdiag_l1(theta)
    objective = logdet - tr - lam * l1
    primal = -objective

    w_proj = np.clip(w, s - lam, s + lam)
    np.fill_diagonal(w_proj, np.diag(s))
    sign_w, logdet_w = np.linalg.slogdet(w_proj)
    if sign_w <= 0:
        return objective, np.inf
    gap = primal - (logdet_w + s.shape[0])
    return objective, float(gap)


def kkt_residual(s, theta, w, lam, zero_tol=1e-8) -> float:
    """Largest violation of the glasso stationarity conditions.

    diag: |w_ii - s_ii|; off-diagonal: |w_ij - s_ij - lam*sign(theta_ij)|
    where theta_ij != 0, else max(0, |s_ij - w_ij| - lam).
    """
    p = s.shape[0]
    res = float(np.max(np.abs(np.diag(w) - np.diag(s))))
    off = ~np.eye(p, dtype=bool)
    active = off & (np.abs(theta) > zero_tol)
    inactive = off & ~active
    if active.any():
        res = max(res, float(np.max(np.abs(
            w[active] - s[active] - lam * np.sign(theta[active])))))
    if inactive.any():
        res = max(res, float(np.max(
            np.abs(s[inactive] - w[inactive]) - lam).clip(min=0.0)))
    return res


def to_network(est: PrecisionEstimate, zero_tol=1e-8) -> NetworkEstimate:
    """Partial correlations pcor_ij = -theta_ij / sqrt(theta_ii theta_jj)."""
    if not est.converged:
        raise NumericalError("refusing to build a network from a "
                             "non-converged precision estimate")
    theta = est.theta
    d = np.sqrt(np.diag(theta))
    pcor = -theta / np.outer(d, d)
    np.fill_diagonal(pcor, 0.0)
    pcor = (pcor + pcor.T) / 2.0
    adjacency = np.abs(theta) > zero_tol
    np.fill_diagonal(adjacency, False)
    return NetworkEstimate(pcor=pcor, adjacency=adjacency)
