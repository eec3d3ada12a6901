# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: batch statistic evaluation, the two local searches,
and the exhaustive partition scan.

Semantics (move order, tie-breaking, accepted-move caps, canonical keys)
mirror ``_purepy`` exactly; see that module for the contract.  Incremental
pair sums are refreshed from scratch every few thousand steps so float drift
stays below comparison noise, and returned values are always recomputed
exactly from the final state.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

COMPILED = True

cdef enum:
    REFRESH_INTERVAL = 4096


cdef inline double _bn(double w1, double w2, double bt, long n1, long n2, long n) noexcept nogil:
    cdef double u1, u2, u12
    cdef double a1 = n1, a2 = n2, nf = n
    if n1 >= 2 and n2 >= 2:
        u1 = 2.0 * w1 / (a1 * (a1 - 1.0))
        u2 = 2.0 * w2 / (a2 * (a2 - 1.0))
        u12 = bt / (a1 * a2)
        return a1 * a2 / (nf * (nf - 1.0)) * (2.0 * u12 - u1 - u2)
    if n1 == 1 and n2 >= 2:
        u12 = bt / a2
        u2 = 2.0 * w2 / (a2 * (a2 - 1.0))
        return (u12 - u2) / nf
    if n2 == 1 and n1 >= 2:
        u12 = bt / a1
        u1 = 2.0 * w1 / (a1 * (a1 - 1.0))
        return (u12 - u1) / nf
    return 0.0


cdef void _full_sums(const double[:, ::1] phi, const unsigned char[::1] in1,
                     double[::1] s1, double[::1] s2,
                     double* w1, double* w2, double* bt) noexcept nogil:
    cdef Py_ssize_t n = phi.shape[0]
    cdef Py_ssize_t i, j
    cdef double a1, a2, a12, v
    for i in range(n):
        s1[i] = 0.0
        s2[i] = 0.0
    a1 = 0.0
    a2 = 0.0
    a12 = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            v = phi[i, j]
            if in1[i]:
                if in1[j]:
                    a1 += v
                    s1[i] += v
                    s1[j] += v
                else:
                    a12 += v
                    s2[i] += v
                    s1[j] += v
            else:
                if in1[j]:
                    a12 += v
                    s1[i] += v
                    s2[j] += v
                else:
                    a2 += v
                    s2[i] += v
                    s2[j] += v
    w1[0] = a1
    w2[0] = a2
    bt[0] = a12


def bn_batch(object phi_in, object groups_in):
    """Raw Bn for each membership row; both sides must be non-empty."""
    cdef cnp.ndarray[double, ndim=2, mode="c"] phi = np.ascontiguousarray(phi_in, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2, mode="c"] groups = np.ascontiguousarray(groups_in, dtype=np.float64)
    cdef Py_ssize_t m = groups.shape[0]
    cdef Py_ssize_t n = phi.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(m, dtype=np.float64)
    cdef Py_ssize_t r, i, j
    cdef double w1, w2, bt, v
    cdef long n1
    cdef bint gi
    for r in range(m):
        w1 = 0.0
        w2 = 0.0
        bt = 0.0
        n1 = 0
        for i in range(n):
            if groups[r, i] != 0.0:
                n1 += 1
        for i in range(n):
            gi = groups[r, i] != 0.0
            for j in range(i + 1, n):
                v = phi[i, j]
                if gi:
                    if groups[r, j] != 0.0:
                        w1 += v
                    else:
                        bt += v
                else:
                    if groups[r, j] != 0.0:
                        bt += v
                    else:
                        w2 += v
        out[r] = _bn(w1, w2, bt, n1, n - n1, n)
    return out


def relocate_search(object phi_in, object group0, object inv_sd_in, long max_moves=1000000):
    """Steepest-ascent single-element relocation on ``bn * inv_sd[n1]``."""
    cdef cnp.ndarray[double, ndim=2, mode="c"] phi = np.ascontiguousarray(phi_in, dtype=np.float64)
    cdef cnp.ndarray[unsigned char, ndim=1, mode="c"] in1 = \
        np.ascontiguousarray(group0, dtype=np.uint8).copy()
    cdef cnp.ndarray[double, ndim=1, mode="c"] inv_sd = np.ascontiguousarray(inv_sd_in, dtype=np.float64)
    cdef Py_ssize_t n = phi.shape[0]
    cdef cnp.ndarray[double, ndim=1] s1 = np.zeros(n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] s2 = np.zeros(n, dtype=np.float64)
    cdef double w1, w2, bt, cur, obj, best_obj, cw1, cw2, cbt
    cdef double bw1 = 0.0, bw2 = 0.0, bbt = 0.0
    cdef long n1 = 0, n1c, moves = 0
    cdef Py_ssize_t i, bi, j

    _full_sums(phi, in1, s1, s2, &w1, &w2, &bt)
    for i in range(n):
        if in1[i]:
            n1 += 1
    cur = _bn(w1, w2, bt, n1, n - n1, n) * inv_sd[n1]

    while moves < max_moves:
        best_obj = cur
        bi = -1
        for i in range(n):
            if in1[i]:
                n1c = n1 - 1
                if n1c < 1:
                    continue
                cw1 = w1 - s1[i]
                cw2 = w2 + s2[i]
                cbt = bt - s2[i] + s1[i]
            else:
                n1c = n1 + 1
                if n1c > n - 1:
                    continue
                cw1 = w1 + s1[i]
                cw2 = w2 - s2[i]
                cbt = bt - s1[i] + s2[i]
            obj = _bn(cw1, cw2, cbt, n1c, n - n1c, n) * inv_sd[n1c]
            if obj > best_obj:
                best_obj = obj
                bi = i
                bw1 = cw1
                bw2 = cw2
                bbt = cbt
        if bi < 0:
            break
        if in1[bi]:
            for j in range(n):
                s1[j] -= phi[j, bi]
                s2[j] += phi[j, bi]
            n1 -= 1
        else:
            for j in range(n):
                s1[j] += phi[j, bi]
                s2[j] -= phi[j, bi]
            n1 += 1
        in1[bi] = not in1[bi]
        w1 = bw1
        w2 = bw2
        bt = bbt
        cur = best_obj
        moves += 1
        if moves % REFRESH_INTERVAL == 0:
            _full_sums(phi, in1, s1, s2, &w1, &w2, &bt)

    _full_sums(phi, in1, s1, s2, &w1, &w2, &bt)
    cur = _bn(w1, w2, bt, n1, n - n1, n) * inv_sd[n1]
    return np.asarray(in1), float(cur)


def swap_search(object phi_in, object group0, long max_moves=1000000):
    """Steepest-ascent pairwise exchange at fixed subgroup size, raw Bn."""
    cdef cnp.ndarray[double, ndim=2, mode="c"] phi = np.ascontiguousarray(phi_in, dtype=np.float64)
    cdef cnp.ndarray[unsigned char, ndim=1, mode="c"] in1 = \
        np.ascontiguousarray(group0, dtype=np.uint8).copy()
    cdef Py_ssize_t n = phi.shape[0]
    cdef cnp.ndarray[double, ndim=1] s1 = np.zeros(n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] s2 = np.zeros(n, dtype=np.float64)
    cdef double w1, w2, bt, cur, val, best_val, cw1, cw2, cbt, pij
    cdef double bw1 = 0.0, bw2 = 0.0, bbt = 0.0
    cdef long n1 = 0, moves = 0
    cdef Py_ssize_t i, j, k, bi, bj

    _full_sums(phi, in1, s1, s2, &w1, &w2, &bt)
    for i in range(n):
        if in1[i]:
            n1 += 1
    cur = _bn(w1, w2, bt, n1, n - n1, n)

    while moves < max_moves and 0 < n1 < n:
        best_val = cur
        bi = -1
        bj = -1
        for i in range(n):
            if not in1[i]:
                continue
            for j in range(n):
                if in1[j]:
                    continue
                pij = phi[i, j]
                cw1 = w1 - s1[i] + s1[j] - pij
                cw2 = w2 + s2[i] - s2[j] - pij
                cbt = bt + (s1[i] - s2[i]) + (s2[j] - s1[j]) + 2.0 * pij
                val = _bn(cw1, cw2, cbt, n1, n - n1, n)
                if val > best_val:
                    best_val = val
                    bi = i
                    bj = j
                    bw1 = cw1
                    bw2 = cw2
                    bbt = cbt
        if bi < 0:
            break
        for k in range(n):
            s1[k] += phi[k, bj] - phi[k, bi]
            s2[k] -= phi[k, bj] - phi[k, bi]
        in1[bi] = 0
        in1[bj] = 1
        w1 = bw1
        w2 = bw2
        bt = bbt
        cur = best_val
        moves += 1
        if moves % REFRESH_INTERVAL == 0:
            _full_sums(phi, in1, s1, s2, &w1, &w2, &bt)

    _full_sums(phi, in1, s1, s2, &w1, &w2, &bt)
    cur = _bn(w1, w2, bt, n1, n - n1, n)
    return np.asarray(in1), float(cur)


cdef unsigned long long _canonical_key(const unsigned char[::1] in_a, Py_ssize_t n) noexcept nogil:
    """Key of the canonical assignment: smaller side is group 1 (side A on
    ties), bit n-1-i set when sample i is in group 1."""
    cdef long k = 0
    cdef Py_ssize_t i
    cdef bint flip
    cdef unsigned long long key = 0
    for i in range(n):
        if in_a[i]:
            k += 1
    flip = (k > n - k) or (2 * k == n and not in_a[0])
    for i in range(n):
        if (in_a[i] != 0) != flip:
            key |= (<unsigned long long>1) << (n - 1 - i)
    return key


def exhaustive_scan(object phi_in):
    """Best raw Bn per canonical subgroup size over all partitions.

    Gray-code enumeration of the 2**(n-1) - 1 assignments with sample 0
    pinned to side A; identical result contract to the NumPy version.
    """
    cdef cnp.ndarray[double, ndim=2, mode="c"] phi = np.ascontiguousarray(phi_in, dtype=np.float64)
    cdef Py_ssize_t n = phi.shape[0]
    cdef long half = n // 2
    cdef cnp.ndarray[double, ndim=1] best_bn = np.full(half + 1, -np.inf, dtype=np.float64)
    cdef cnp.ndarray[unsigned long long, ndim=1] best_key = np.zeros(half + 1, dtype=np.uint64)
    cdef cnp.ndarray[unsigned char, ndim=1, mode="c"] in_a = np.zeros(n, dtype=np.uint8)
    cdef cnp.ndarray[double, ndim=1] s_a = np.zeros(n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] s_b = np.zeros(n, dtype=np.float64)
    cdef double w_a, w_b, bt, val
    cdef long k_a, size
    cdef unsigned long long g, n_masks, gray, prev_gray, diff, scanned = 0
    cdef Py_ssize_t e, j
    cdef unsigned long long key

    in_a[0] = 1
    _full_sums(phi, in_a, s_a, s_b, &w_a, &w_b, &bt)
    k_a = 1
    n_masks = (<unsigned long long>1) << (n - 1)

    # evaluate the initial state (mask 0: side A == {0})
    val = _bn(w_a, w_b, bt, k_a, n - k_a, n)
    best_bn[1] = val
    best_key[1] = _canonical_key(in_a, n)
    scanned = 1

    prev_gray = 0
    for g in range(1, n_masks):
        gray = g ^ (g >> 1)
        diff = gray ^ prev_gray
        prev_gray = gray
        e = 0
        while not (diff & ((<unsigned long long>1) << e)):
            e += 1
        e = e + 1  # bit b toggles sample b+1
        if in_a[e]:
            for j in range(n):
                s_a[j] -= phi[j, e]
                s_b[j] += phi[j, e]
            w_a -= s_a[e]
            w_b += s_b[e]
            bt += s_a[e] - s_b[e]
            in_a[e] = 0
            k_a -= 1
        else:
            for j in range(n):
                s_a[j] += phi[j, e]
                s_b[j] -= phi[j, e]
            w_a += s_a[e]
            w_b -= s_b[e]
            bt += s_b[e] - s_a[e]
            in_a[e] = 1
            k_a += 1
        if g % REFRESH_INTERVAL == 0:
            _full_sums(phi, in_a, s_a, s_b, &w_a, &w_b, &bt)
        if k_a == n:
            continue
        scanned += 1
        val = _bn(w_a, w_b, bt, k_a, n - k_a, n)
        size = k_a if k_a <= n - k_a else n - k_a
        if val > best_bn[size]:
            best_bn[size] = val
            best_key[size] = _canonical_key(in_a, n)
        elif val == best_bn[size]:
            key = _canonical_key(in_a, n)
            if key > best_key[size]:
                best_key[size] = key

    # recompute winners exactly from their masks to drop incremental drift
    for size in range(1, half + 1):
        if best_bn[size] == -np.inf:
            continue
        key = best_key[size]
        for j in range(n):
            in_a[j] = 1 if (key >> (n - 1 - j)) & 1 else 0
        _full_sums(phi, in_a, s_a, s_b, &w_a, &w_b, &bt)
        k_a = 0
        for j in range(n):
            if in_a[j]:
                k_a += 1
        best_bn[size] = _bn(w_a, w_b, bt, k_a, n - k_a, n)
    return best_bn, best_key, int(scanned)
