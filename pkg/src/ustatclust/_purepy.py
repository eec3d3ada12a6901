"""Pure NumPy implementations of the hot kernels.

This module is the reference backend: the compiled extension in ``_core.pyx``
implements the same four entry points with identical move semantics and
tie-breaking, and ``_backend`` picks whichever is available.  All functions
work on a raw ``float64`` kernel matrix ``phi`` (symmetric, zero diagonal)
and 0/1 group-membership vectors; no package types appear at this level.

Conventions shared by both backends
-----------------------------------
* ``w1``/``w2`` are sums of kernel values over unordered pairs inside group 1
  and group 2; ``bt`` is the sum over cross pairs.
* Searches are steepest ascent: every candidate move is scored, the best
  strictly improving one is applied, ties go to the lowest candidate index.
* ``max_moves`` caps the number of *accepted* moves, so a run with a smaller
  cap is an exact prefix of a run with a larger one.
* Exhaustive scans break ties between equal statistic values by preferring
  the lexicographically smallest canonical assignment, encoded as the largest
  membership key (bit ``n-1-i`` set when sample ``i`` is in group 1).
"""

from __future__ import annotations

import numpy as np

COMPILED = False


def bn_from_sums(w1: float, w2: float, bt: float, n1: int, n2: int, n: int) -> float:
    """Between-group statistic from pair sums, covering singleton groups.

    For 2 <= n1 <= n-2 this is n1*n2/(n(n-1)) * (2*U12 - U1 - U2); when one
    group is a singleton the within-term of that group drops and the
    coefficient collapses to 1/n.
    """
    nf = float(n)
    if n1 >= 2 and n2 >= 2:
        u1 = 2.0 * w1 / (n1 * (n1 - 1.0))
        u2 = 2.0 * w2 / (n2 * (n2 - 1.0))
        u12 = bt / (n1 * float(n2))
        return n1 * float(n2) / (nf * (nf - 1.0)) * (2.0 * u12 - u1 - u2)
    if n1 == 1 and n2 >= 2:
        u12 = bt / float(n2)
        u2 = 2.0 * w2 / (n2 * (n2 - 1.0))
        return (u12 - u2) / nf
    if n2 == 1 and n1 >= 2:
        u12 = bt / float(n1)
        u1 = 2.0 * w1 / (n1 * (n1 - 1.0))
        return (u12 - u1) / nf
    raise ValueError(f"group sizes ({n1}, {n2}) do not admit the statistic")


def _bn_from_sums_vec(w1, w2, bt, n1, n2, n):
    """Vectorized :func:`bn_from_sums`; invalid sizes yield 0."""
    out = np.zeros(np.shape(w1), dtype=np.float64)
    nf = float(n)
    a1 = n1.astype(np.float64)
    a2 = n2.astype(np.float64)

    mid = (n1 >= 2) & (n2 >= 2)
    if mid.any():
        u1 = 2.0 * w1[mid] / (a1[mid] * (a1[mid] - 1.0))
        u2 = 2.0 * w2[mid] / (a2[mid] * (a2[mid] - 1.0))
        u12 = bt[mid] / (a1[mid] * a2[mid])
        out[mid] = a1[mid] * a2[mid] / (nf * (nf - 1.0)) * (2.0 * u12 - u1 - u2)

    lo = (n1 == 1) & (n2 >= 2)
    if lo.any():
        u12 = bt[lo] / a2[lo]
        u2 = 2.0 * w2[lo] / (a2[lo] * (a2[lo] - 1.0))
        out[lo] = (u12 - u2) / nf

    hi = (n2 == 1) & (n1 >= 2)
    if hi.any():
        u12 = bt[hi] / a1[hi]
        u1 = 2.0 * w1[hi] / (a1[hi] * (a1[hi] - 1.0))
        out[hi] = (u12 - u1) / nf
    return out


def bn_batch(phi: np.ndarray, groups: np.ndarray) -> np.ndarray:
    """Raw Bn for each row of ``groups`` (1.0/0.0 membership indicators).

    Every row must describe a partition with both sides non-empty.
    """
    Z = np.ascontiguousarray(groups, dtype=np.float64)
    n = phi.shape[0]
    G = Z @ phi
    w1 = 0.5 * np.einsum("ij,ij->i", G, Z)
    bt = np.einsum("ij,ij->i", G, 1.0 - Z)
    total = 0.5 * float(phi.sum())
    w2 = total - w1 - bt
    n1 = np.rint(Z.sum(axis=1)).astype(np.int64)
    return _bn_from_sums_vec(w1, w2, bt, n1, n - n1, n)


def _state_from_group(phi, in1):
    z = in1.astype(np.float64)
    s1 = phi @ z
    s2 = phi.sum(axis=1) - s1
    w1 = 0.5 * float(s1 @ z)
    bt = float(s2 @ z)
    total = 0.5 * float(phi.sum())
    w2 = total - w1 - bt
    return s1, s2, w1, w2, bt


def relocate_search(
    phi: np.ndarray, group0: np.ndarray, inv_sd: np.ndarray, max_moves: int = 1_000_000
) -> tuple[np.ndarray, float]:
    """Steepest-ascent single-element relocation on the standardized statistic.

    ``inv_sd[k]`` must hold 1/sd of the statistic for subgroup size ``k``
    (entries 1..n-1; positions 0 and n are ignored).  The objective is
    ``bn * inv_sd[n1]``; moves that would empty a group are never taken.
    Returns the final membership vector and its exactly recomputed objective.
    """
    n = phi.shape[0]
    in1 = np.ascontiguousarray(group0).astype(bool)
    s1, s2, w1, w2, bt = _state_from_group(phi, in1)
    n1 = int(in1.sum())
    cur = bn_from_sums(w1, w2, bt, n1, n - n1, n) * inv_sd[n1]

    moves = 0
    while moves < max_moves:
        w1c = np.where(in1, w1 - s1, w1 + s1)
        w2c = np.where(in1, w2 + s2, w2 - s2)
        btc = np.where(in1, bt - s2 + s1, bt - s1 + s2)
        n1c = np.where(in1, n1 - 1, n1 + 1)
        valid = (n1c >= 1) & (n1c <= n - 1)
        objs = _bn_from_sums_vec(w1c, w2c, btc, n1c, n - n1c, n)
        objs *= inv_sd[np.clip(n1c, 0, n)]
        objs[~valid] = -np.inf
        i = int(np.argmax(objs))
        if not objs[i] > cur:
            break
        col = phi[:, i]
        if in1[i]:
            s1 -= col
            s2 += col
            n1 -= 1
        else:
            s1 += col
            s2 -= col
            n1 += 1
        in1[i] = not in1[i]
        w1, w2, bt, cur = float(w1c[i]), float(w2c[i]), float(btc[i]), float(objs[i])
        moves += 1

    s1, s2, w1, w2, bt = _state_from_group(phi, in1)
    final = bn_from_sums(w1, w2, bt, n1, n - n1, n) * inv_sd[n1]
    return in1.astype(np.uint8), float(final)


def swap_search(
    phi: np.ndarray, group0: np.ndarray, max_moves: int = 1_000_000
) -> tuple[np.ndarray, float]:
    """Steepest-ascent pairwise exchange at fixed subgroup size, raw statistic.

    Returns the final membership vector and its exactly recomputed Bn.
    """
    n = phi.shape[0]
    in1 = np.ascontiguousarray(group0).astype(bool)
    s1, s2, w1, w2, bt = _state_from_group(phi, in1)
    n1 = int(in1.sum())
    n2 = n - n1
    cur = bn_from_sums(w1, w2, bt, n1, n2, n)

    moves = 0
    while moves < max_moves and 0 < n1 < n:
        idx1 = np.flatnonzero(in1)
        idx2 = np.flatnonzero(~in1)
        p12 = phi[np.ix_(idx1, idx2)]
        w1c = w1 - s1[idx1][:, None] + s1[idx2][None, :] - p12
        w2c = w2 + s2[idx1][:, None] - s2[idx2][None, :] - p12
        btc = bt + (s1[idx1] - s2[idx1])[:, None] + (s2[idx2] - s1[idx2])[None, :] + 2.0 * p12
        sizes1 = np.full(w1c.shape, n1, dtype=np.int64)
        vals = _bn_from_sums_vec(w1c, w2c, btc, sizes1, n - sizes1, n)
        flat = int(np.argmax(vals))
        if not vals.flat[flat] > cur:
            break
        i = int(idx1[flat // len(idx2)])
        j = int(idx2[flat % len(idx2)])
        delta = phi[:, j] - phi[:, i]
        s1 += delta
        s2 -= delta
        in1[i] = False
        in1[j] = True
        w1, w2, bt = float(w1c.flat[flat]), float(w2c.flat[flat]), float(btc.flat[flat])
        cur = float(vals.flat[flat])
        moves += 1

    s1, s2, w1, w2, bt = _state_from_group(phi, in1)
    return in1.astype(np.uint8), bn_from_sums(w1, w2, bt, n1, n2, n)


def membership_key(in1: np.ndarray) -> int:
    """Canonical-assignment key: bit ``n-1-i`` set iff sample ``i`` in group 1.

    The canonical group 1 is the smaller side (the side holding sample 0 on a
    size tie), so lexicographically smaller assignments have larger keys.
    """
    in1 = np.asarray(in1).astype(bool)
    n = in1.size
    k = int(in1.sum())
    if k > n - k or (2 * k == n and not in1[0]):
        in1 = ~in1
    key = 0
    for i in range(n):
        if in1[i]:
            key |= 1 << (n - 1 - i)
    return key


def exhaustive_scan(phi: np.ndarray) -> tuple[np.ndarray, np.ndarray, int]:
    """Best raw Bn per canonical subgroup size over all two-group partitions.

    Enumerates the 2**(n-1) - 1 assignments with sample 0 pinned to one side
    and the other side non-empty.  Returns ``(best_bn, best_key, scanned)``
    where both arrays are indexed by canonical size 1..n//2 (slot 0 unused).
    """
    n = phi.shape[0]
    half = n // 2
    n_masks = 1 << (n - 1)
    best_bn = np.full(half + 1, -np.inf)
    best_key = np.zeros(half + 1, dtype=np.uint64)
    scanned = 0
    bits = np.arange(n - 1, dtype=np.uint32)

    chunk = 1 << 13
    for start in range(0, n_masks, chunk):
        masks = np.arange(start, min(start + chunk, n_masks), dtype=np.uint32)
        masks = masks[masks != n_masks - 1]  # all-ones leaves side B empty
        if masks.size == 0:
            continue
        Z = np.empty((masks.size, n), dtype=np.float64)
        Z[:, 0] = 1.0
        Z[:, 1:] = (masks[:, None] >> bits[None, :]) & np.uint32(1)
        vals = bn_batch(phi, Z)
        k_a = np.rint(Z.sum(axis=1)).astype(np.int64)
        size = np.minimum(k_a, n - k_a)
        scanned += masks.size
        for s in range(1, half + 1):
            sel = np.flatnonzero(size == s)
            if sel.size == 0:
                continue
            v = vals[sel]
            top = float(v.max())
            if top < best_bn[s]:
                continue
            cand_keys = [membership_key(Z[j].astype(bool)) for j in sel[v == top]]
            key = max(cand_keys)
            if top > best_bn[s] or (top == best_bn[s] and key > int(best_key[s])):
                best_bn[s] = top
                best_key[s] = key

    # re-evaluate winners in canonical orientation so both backends return
    # values computed from the same membership vector
    for s in range(1, half + 1):
        if np.isfinite(best_bn[s]):
            g = group_from_key(int(best_key[s]), n).astype(np.float64)
            best_bn[s] = float(bn_batch(phi, g[None, :])[0])
    return best_bn, best_key, scanned


def group_from_key(key: int, n: int) -> np.ndarray:
    """Inverse of :func:`membership_key`."""
    return np.array([(key >> (n - 1 - i)) & 1 for i in range(n)], dtype=np.uint8)
