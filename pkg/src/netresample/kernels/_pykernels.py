"""Pure numpy/scipy backend for the hot kernels.

Same contracts as the compiled module: exact integer orbit counts and an
in-place lasso coordinate descent.  The orbit counters vectorize the raw
combinatorial sums with sparse matrix algebra; only the 4-clique stage and
the per-coordinate lasso updates remain Python loops.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

BACKEND_NAME = "python"


def _csr(indptr, indices, n, data=None):
    if data is None:
        data = np.ones(len(indices), dtype=np.int64)
    return sp.csr_matrix((data, indices.astype(np.int64), indptr.astype(np.int64)),
                         shape=(n, n))


def _rowsum(m) -> np.ndarray:
    return np.asarray(m.sum(axis=1)).ravel().astype(np.int64)


def _pairdiag(m1, m2) -> np.ndarray:
    """diag(m1 @ m2) without forming the product."""
    return _rowsum(m1.multiply(m2.T.tocsr()))


def unsigned_orbit_counts(indptr, indices, counts, tri, scratch, touched):
    """Induced orbit counts 0..14 per node (same workspace signature as the
    compiled kernel; `tri`/`scratch`/`touched` are ignored here)."""
    n = counts.shape[0]
    a = _csr(indptr, indices, n)
    d = _rowsum(a)

    aa = a @ a
    tri_e = aa.multiply(a)              # per-edge triangle counts
    t = _rowsum(tri_e) // 2             # per-node triangle counts
    tri_sq = _rowsum(tri_e.multiply(tri_e))
    tri_d = tri_e @ d
    tri_opp = _pairdiag(a, tri_e @ a) // 2  # sum of opposite-edge triangle counts

    counts[:, 0] = d
    counts[:, 3] = t
    counts[:, 2] = d * (d - 1) // 2 - t
    adeg = a @ d                        # sum of neighbor degrees
    q1 = adeg - d - 2 * t
    counts[:, 1] = q1

    f14 = _k4_counts(indptr, indices, n)
    f_12_14 = tri_opp - t
    f_10_13 = tri_d - 2 * t - 2 * tri_opp
    f_13_14 = tri_sq - 2 * t
    f_11_13 = 2 * t * (d - 1) - tri_sq
    f_7_11 = d * (d - 1) * (d - 2) - (2 * d - 3) * 2 * t + tri_sq
    f_5_8 = (d - 1) * (adeg - d) - 2 * t * (d - 1) - (tri_d - 2 * t) + tri_sq
    f_6_9 = a @ ((d - 1) * (d - 2)) - 2 * tri_d + 6 * t + tri_sq
    f_9_12 = 2 * (a @ t) - 2 * t - 2 * tri_opp
    f_4_8 = a @ q1 - (d * d - d - 2 * t) - f_10_13

    # 2-path counts to non-adjacent nodes (diag of aa is exactly d)
    path2 = aa - tri_e - sp.diags(d, format="csr", dtype=np.int64)
    f_8_12 = _rowsum(path2.multiply(path2)) - _rowsum(path2)

    counts[:, 14] = f14
    counts[:, 13] = (f_13_14 - 6 * f14) // 2
    counts[:, 12] = f_12_14 - 3 * f14
    counts[:, 11] = (f_11_13 - f_13_14 + 6 * f14) // 2
    counts[:, 10] = f_10_13 - f_13_14 + 6 * f14
    counts[:, 9] = (f_9_12 - 2 * f_12_14 + 6 * f14) // 2
    counts[:, 8] = (f_8_12 - 2 * f_12_14 + 6 * f14) // 2
    counts[:, 7] = (f_13_14 + f_7_11 - f_11_13 - 6 * f14) // 6
    counts[:, 6] = (2 * f_12_14 + f_6_9 - f_9_12 - 6 * f14) // 2
    counts[:, 5] = 2 * f_12_14 + f_5_8 - f_8_12 - 6 * f14
    counts[:, 4] = 2 * f_12_14 + f_4_8 - f_8_12 - 6 * f14


def _k4_counts(indptr, indices, n):
    """4-clique count per node: for each edge (x, y) with x < y, adjacent
    pairs among common neighbors > y identify each clique exactly once."""
    k4 = np.zeros(n, dtype=np.int64)
    neigh = [indices[indptr[x]:indptr[x + 1]] for x in range(n)]
    edge_set = {(int(x) << 32) | int(y)
                for x in range(n) for y in neigh[x] if x < y}
    for x in range(n):
        nx = neigh[x]
        for y in nx[nx > x]:
            w = np.intersect1d(nx[nx > y], neigh[y][neigh[y] > y],
                               assume_unique=True)
            for ai in range(len(w)):
                for bi in range(ai + 1, len(w)):
                    if (int(w[ai]) << 32) | int(w[bi]) in edge_set:
                        k4[x] += 1
                        k4[y] += 1
                        k4[w[ai]] += 1
                        k4[w[bi]] += 1
    return k4


def signed_orbit_counts(indptr, indices, sgn, counts):
    """Signed orbit counts (15 columns, <=3-node graphlets) per node."""
    n = counts.shape[0]
    pos = sgn > 0
    a = _csr(indptr, indices, n)
    ap = _csr(indptr, indices, n, pos.astype(np.int64))
    am = _csr(indptr, indices, n, (~pos).astype(np.int64))
    ap.eliminate_zeros()
    am.eliminate_zeros()

    dp = _rowsum(ap)
    dm = _rowsum(am)
    counts[:, 0] = dp
    counts[:, 1] = dm

    # triangle corners split by (incident sign multiset, opposite sign):
    # diag(M1 @ M2 @ M3) with M1/M3 the incident-edge signs, M2 the opposite
    pp = ap @ ap
    pm = ap @ am
    mp = am @ ap
    mm = am @ am
    counts[:, 9] = _pairdiag(ap, pp) // 2   # ({++}, +): diag(Ap Ap Ap) / 2
    counts[:, 10] = _pairdiag(ap, mp) // 2  # ({++}, -): diag(Ap Am Ap) / 2
    counts[:, 11] = _pairdiag(ap, pm)       # ({+-}, +): diag(Ap Ap Am)
    counts[:, 12] = _pairdiag(ap, mm)       # ({+-}, -): diag(Ap Am Am)
    counts[:, 13] = _pairdiag(am, pm) // 2  # ({--}, +): diag(Am Ap Am) / 2
    counts[:, 14] = _pairdiag(am, mm) // 2  # ({--}, -): diag(Am Am Am) / 2

    # O2: neighbor-pair combinatorics minus triangle corners (induced)
    tri_pp = counts[:, 9] + counts[:, 10]
    tri_pm = counts[:, 11] + counts[:, 12]
    tri_mm = counts[:, 13] + counts[:, 14]
    counts[:, 6] = dp * (dp - 1) // 2 - tri_pp
    counts[:, 7] = dp * dm - tri_pm
    counts[:, 8] = dm * (dm - 1) // 2 - tri_mm

    # O1: for each half-edge (x, y), far-endpoint neighbors by sign, minus
    # x itself and minus common neighbors (which would close a triangle)
    y_arr = indices.astype(np.int64)
    if len(y_arr) == 0:
        return
    x_arr = np.repeat(np.arange(n, dtype=np.int64),
                      np.diff(indptr).astype(np.int64))
    cp = (a @ ap).tocsr()
    cm = (a @ am).tocsr()
    cp_e = np.asarray(cp[x_arr, y_arr]).ravel().astype(np.int64)
    cm_e = np.asarray(cm[x_arr, y_arr]).ravel().astype(np.int64)
    s_pos = pos
    far_p = dp[y_arr] - s_pos.astype(np.int64) - cp_e
    far_m = dm[y_arr] - (~s_pos).astype(np.int64) - cm_e
    np.add.at(counts[:, 2], x_arr[s_pos], far_p[s_pos])
    np.add.at(counts[:, 3], x_arr[s_pos], far_m[s_pos])
    np.add.at(counts[:, 4], x_arr[~s_pos], far_p[~s_pos])
    np.add.at(counts[:, 5], x_arr[~s_pos], far_m[~s_pos])


def lasso_cd(v, s, beta, u, lam, tol, max_cycles):
    """Cyclic coordinate descent for min 0.5 b'Vb - s'b + lam*|b|_1.

    `u` must enter as V @ beta; both `u` and `beta` are updated in place.
    Returns the number of cycles run.
    """
    q = v.shape[0]
    if q == 0:
        return 0
    cyc = 0
    while cyc < max_cycles:
        cyc += 1
        dmax = 0.0
        for k in range(q):
            vkk = v[k, k]
            bk = beta[k]
            r = s[k] - u[k] + vkk * bk
            if r > lam:
                bnew = (r - lam) / vkk
            elif r < -lam:
                bnew = (r + lam) / vkk
            else:
                bnew = 0.0
            delta = bnew - bk
            if delta != 0.0:
                beta[k] = bnew
                u += v[k] * delta
                if abs(delta) > dmax:
                    dmax = abs(delta)
        if dmax <= tol:
            break
    return cyc
