# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: graphlet orbit counting and lasso coordinate descent.

Graph input is CSR over int64 (indptr, indices) with sorted neighbor lists;
edge signs ride along as an int8 array aligned with `indices`.  Orbit counts
use the combinatorial-correction scheme: raw sums over degrees, per-edge
triangle counts and induced-path scans are combined into exact induced-orbit
counts, so no explicit 4-subset enumeration is ever performed.
"""

BACKEND_NAME = "compiled"


cdef inline bint _adjacent(const long long[:] indptr, const long long[:] indices,
                           Py_ssize_t a, long long b) noexcept nogil:
    cdef Py_ssize_t lo = indptr[a]
    cdef Py_ssize_t hi = indptr[a + 1]
    cdef Py_ssize_t mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if indices[mid] < b:
            lo = mid + 1
        else:
            hi = mid
    return lo < indptr[a + 1] and indices[lo] == b


def unsigned_orbit_counts(const long long[:] indptr, const long long[:] indices,
                          long long[:, ::1] counts,
                          long long[:] tri, long long[:] scratch,
                          long long[:] touched):
    """Induced orbit counts 0..14 per node into `counts` (pre-zeroed).

    `tri` is a per-half-edge workspace (len == indices), `scratch` and
    `touched` are per-node int64 workspaces (len == n).
    """
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t x, kx, kx2, ky, kz, i, j, a, b
    cdef long long y, z, zz, deg_x, deg_y, deg_z, t_xy, t_xz, t_yz
    cdef long long f14, f_12_14, f_10_13, f_13_14, f_11_13
    cdef long long f_7_11, f_5_8, f_6_9, f_9_12, f_4_8, f_8_12
    cdef Py_ssize_t ntouched
    cdef Py_ssize_t wn

    with nogil:
        # per-half-edge triangle counts by sorted-list intersection
        for x in range(n):
            for kx in range(indptr[x], indptr[x + 1]):
                y = indices[kx]
                i = indptr[x]
                j = indptr[y]
                t_xy = 0
                while i < indptr[x + 1] and j < indptr[y + 1]:
                    if indices[i] == indices[j]:
                        t_xy += 1
                        i += 1
                        j += 1
                    elif indices[i] < indices[j]:
                        i += 1
                    else:
                        j += 1
                tri[kx] = t_xy

        # 4-cliques: for the two smallest vertices x < y, scan common
        # neighbors z > y and test pairs for adjacency
        for x in range(n):
            for kx in range(indptr[x], indptr[x + 1]):
                y = indices[kx]
                if y <= x:
                    continue
                wn = 0
                i = indptr[x]
                j = indptr[y]
                while i < indptr[x + 1] and j < indptr[y + 1]:
                    if indices[i] == indices[j]:
                        if indices[i] > y:
                            scratch[wn] = indices[i]
                            wn += 1
                        i += 1
                        j += 1
                    elif indices[i] < indices[j]:
                        i += 1
                    else:
                        j += 1
                for a in range(wn):
                    for b in range(a + 1, wn):
                        if _adjacent(indptr, indices, scratch[a], scratch[b]):
                            counts[x, 14] += 1
                            counts[y, 14] += 1
                            counts[scratch[a], 14] += 1
                            counts[scratch[b], 14] += 1

        for x in range(n):
            scratch[x] = 0

        for x in range(n):
            deg_x = indptr[x + 1] - indptr[x]
            counts[x, 0] = deg_x
            f14 = counts[x, 14]
            f_12_14 = 0; f_10_13 = 0; f_13_14 = 0; f_11_13 = 0
            f_7_11 = 0; f_5_8 = 0; f_6_9 = 0; f_9_12 = 0; f_4_8 = 0; f_8_12 = 0
            ntouched = 0

            # x as a triangle corner / path center
            for kx in range(indptr[x], indptr[x + 1]):
                y = indices[kx]
                deg_y = indptr[y + 1] - indptr[y]
                t_xy = tri[kx]
                for ky in range(indptr[y], indptr[y + 1]):
                    z = indices[ky]
                    if z == x:
                        continue
                    if _adjacent(indptr, indices, x, z):
                        if z < y:
                            t_yz = tri[ky]
                            deg_z = indptr[z + 1] - indptr[z]
                            f_12_14 += t_yz - 1
                            f_10_13 += (deg_y - 1 - t_yz) + (deg_z - 1 - t_yz)
                    else:
                        if scratch[z] == 0:
                            touched[ntouched] = z
                            ntouched += 1
                        scratch[z] += 1
                for kx2 in range(kx + 1, indptr[x + 1]):
                    z = indices[kx2]
                    t_xz = tri[kx2]
                    if _adjacent(indptr, indices, y, z):
                        counts[x, 3] += 1
                        f_13_14 += (t_xy - 1) + (t_xz - 1)
                        f_11_13 += (deg_x - 1 - t_xy) + (deg_x - 1 - t_xz)
                    else:
                        counts[x, 2] += 1
                        f_7_11 += (deg_x - 2 - t_xy) + (deg_x - 2 - t_xz)
                        deg_z = indptr[z + 1] - indptr[z]
                        f_5_8 += (deg_y - 1 - t_xy) + (deg_z - 1 - t_xz)

            # x as a path end (induced 2-paths x-y-z)
            for kx in range(indptr[x], indptr[x + 1]):
                y = indices[kx]
                deg_y = indptr[y + 1] - indptr[y]
                t_xy = tri[kx]
                for ky in range(indptr[y], indptr[y + 1]):
                    z = indices[ky]
                    if z == x:
                        continue
                    if _adjacent(indptr, indices, x, z):
                        continue
                    counts[x, 1] += 1
                    t_yz = tri[ky]
                    deg_z = indptr[z + 1] - indptr[z]
                    f_6_9 += deg_y - 2 - t_xy
                    f_9_12 += t_yz
                    f_4_8 += deg_z - 1 - t_yz
                    f_8_12 += scratch[z] - 1

            for i in range(ntouched):
                scratch[touched[i]] = 0

            # combinatorial corrections down to induced counts
            counts[x, 13] = (f_13_14 - 6 * f14) // 2
            counts[x, 12] = f_12_14 - 3 * f14
            counts[x, 11] = (f_11_13 - f_13_14 + 6 * f14) // 2
            counts[x, 10] = f_10_13 - f_13_14 + 6 * f14
            counts[x, 9] = (f_9_12 - 2 * f_12_14 + 6 * f14) // 2
            counts[x, 8] = (f_8_12 - 2 * f_12_14 + 6 * f14) // 2
            counts[x, 7] = (f_13_14 + f_7_11 - f_11_13 - 6 * f14) // 6
            counts[x, 6] = (2 * f_12_14 + f_6_9 - f_9_12 - 6 * f14) // 2
            counts[x, 5] = 2 * f_12_14 + f_5_8 - f_8_12 - 6 * f14
            counts[x, 4] = 2 * f_12_14 + f_4_8 - f_8_12 - 6 * f14


def signed_orbit_counts(const long long[:] indptr, const long long[:] indices,
                        const signed char[:] sgn, long long[:, ::1] counts):
    """Signed orbit counts (15 columns over <=3-node graphlets) into `counts`.

    Column order: O0(+), O0(-); O1(inc,far) for ++, +-, -+, --;
    O2{++}, O2{+-}, O2{--}; O3(inc multiset, opposite) for
    ({++},+), ({++},-), ({+-},+), ({+-},-), ({--},+), ({--},-).
    """
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t x, kx, ky, i, j
    cdef long long y, z, dp, dm
    cdef int sxy, sxz, syz
    cdef long long tpp, tpm, tmm

    with nogil:
        for x in range(n):
            # signed degrees -> O0, then pair combinatorics for O2
            dp = 0
            dm = 0
            for kx in range(indptr[x], indptr[x + 1]):
                if sgn[kx] > 0:
                    dp += 1
                else:
                    dm += 1
            counts[x, 0] = dp
            counts[x, 1] = dm
            counts[x, 6] = dp * (dp - 1) // 2
            counts[x, 7] = dp * dm
            counts[x, 8] = dm * (dm - 1) // 2

        # one triangle pass (x < y < z): O3 per corner plus the induced
        # correction removing triangle corners from the O2 pair counts
        for x in range(n):
            for kx in range(indptr[x], indptr[x + 1]):
                y = indices[kx]
                if y <= x:
                    continue
                sxy = sgn[kx]
                i = kx + 1
                j = indptr[y]
                while j < indptr[y + 1] and indices[j] <= y:
                    j += 1
                while i < indptr[x + 1] and j < indptr[y + 1]:
                    if indices[i] == indices[j]:
                        z = indices[i]
                        sxz = sgn[i]
                        syz = sgn[j]
                        _attribute_triangle(counts, x, sxy, sxz, syz)
                        _attribute_triangle(counts, y, sxy, syz, sxz)
                        _attribute_triangle(counts, z, sxz, syz, sxy)
                        i += 1
                        j += 1
                    elif indices[i] < indices[j]:
                        i += 1
                    else:
                        j += 1

        # O1: per-edge scan of the far endpoint's neighbors, adjacency-tested
        for x in range(n):
            for kx in range(indptr[x], indptr[x + 1]):
                y = indices[kx]
                sxy = sgn[kx]
                for ky in range(indptr[y], indptr[y + 1]):
                    z = indices[ky]
                    if z == x:
                        continue
                    if _adjacent(indptr, indices, x, z):
                        continue
                    syz = sgn[ky]
                    if sxy > 0:
                        counts[x, 2 if syz > 0 else 3] += 1
                    else:
                        counts[x, 4 if syz > 0 else 5] += 1


cdef inline void _attribute_triangle(long long[:, ::1] counts, Py_ssize_t v,
                                     int s1, int s2, int sopp) noexcept nogil:
    # corner v with incident signs {s1, s2} and opposite-edge sign sopp
    cdef Py_ssize_t base
    if s1 > 0 and s2 > 0:
        counts[v, 6] -= 1
        base = 9
    elif s1 < 0 and s2 < 0:
        counts[v, 8] -= 1
        base = 13
    else:
        counts[v, 7] -= 1
        base = 11
    counts[v, base + (0 if sopp > 0 else 1)] += 1


def lasso_cd(const double[:, ::1] v, const double[::1] s, double[::1] beta,
             double[::1] u, double lam, double tol, int max_cycles):
    """Cyclic coordinate descent for min 0.5 b'Vb - s'b + lam*|b|_1.

    `u` must enter as V @ beta and is maintained incrementally; `beta` is
    updated in place.  Returns the number of cycles run.
    """
    cdef Py_ssize_t q = v.shape[0]
    cdef Py_ssize_t k, i
    cdef double r, bk, bnew, delta, dmax, vkk
    cdef int cyc = 0
    if q == 0:
        return 0
    with nogil:
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
                    for i in range(q):
                        u[i] += v[k, i] * delta
                    if delta < 0.0:
                        delta = -delta
                    if delta > dmax:
                        dmax = delta
            if dmax <= tol:
                break
    return cyc
