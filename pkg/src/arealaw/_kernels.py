"""Hot loops with a numba path and a pure-numpy path.

The numba path is used when numba imports and the environment variable
``AREALAW_DISABLE_NUMBA`` is unset (or set to ``0``/``false``/empty).
Both paths are always importable as ``<name>_numba`` / ``<name>_numpy`` so
tests and the benchmark can compare them directly.
"""

import os

import numpy as np
import scipy.sparse as sp

_flag = os.environ.get("AREALAW_DISABLE_NUMBA", "").strip().lower()
_DISABLED = _flag not in ("", "0", "false", "no")

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _DISABLED
BACKEND = "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# all-pairs hop distances
# ---------------------------------------------------------------------------


def bfs_all_pairs_numpy(indptr, indices, n):
    """Level-synchronous BFS from every source at once.

    Returns an ``(n, n)`` int64 matrix with ``-1`` for unreachable pairs.
    """
    data = np.ones(len(indices), dtype=np.float64)
    adj = sp.csr_matrix((data, indices, indptr), shape=(n, n))
    dist = np.full((n, n), -1, dtype=np.int64)
    np.fill_diagonal(dist, 0)
    visited = np.eye(n, dtype=bool)
    frontier = np.eye(n, dtype=np.float64)
    level = 0
    while True:
        level += 1
        # row s of `reach` marks vertices adjacent to the frontier of source s
        reach = np.asarray(adj @ frontier.T).T > 0
        new = reach & ~visited
        if not new.any():
            break
        dist[new] = level
        visited |= new
        frontier = new.astype(np.float64)
    return dist


def _bfs_all_pairs_py(indptr, indices, n):
    dist = np.full((n, n), -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    for s in range(n):
        row = dist[s]
        row[s] = 0
        queue[0] = s
        head = 0
        tail = 1
        while head < tail:
            u = queue[head]
            head += 1
            du = row[u] + 1
            for k in range(indptr[u], indptr[u + 1]):
                v = indices[k]
                if row[v] < 0:
                    row[v] = du
                    queue[tail] = v
                    tail += 1
    return dist


# ---------------------------------------------------------------------------
# sum of |A[x, y]| over x inside, y outside
# ---------------------------------------------------------------------------


def cross_abs_sum_numpy(mat, inside):
    inside = np.asarray(inside, dtype=bool)
    return float(np.abs(mat[np.ix_(inside, ~inside)]).sum())


def _cross_abs_sum_py(mat, inside):
    n = mat.shape[0]
    total = 0.0
    for x in range(n):
        if not inside[x]:
            continue
        for y in range(n):
            if not inside[y]:
                total += abs(mat[x, y])
    return total


# ---------------------------------------------------------------------------
# per-distance sums and counts of a row of values
# ---------------------------------------------------------------------------


def bin_by_distance_numpy(values, dist_row, max_d):
    """Sums and counts of ``values`` grouped by ``dist_row`` in ``0..max_d``."""
    keep = (dist_row >= 0) & (dist_row <= max_d)
    d = dist_row[keep]
    sums = np.bincount(d, weights=values[keep], minlength=max_d + 1)
    counts = np.bincount(d, minlength=max_d + 1).astype(np.int64)
    return sums, counts


def _bin_by_distance_py(values, dist_row, max_d):
    sums = np.zeros(max_d + 1, dtype=np.float64)
    counts = np.zeros(max_d + 1, dtype=np.int64)
    for i in range(values.shape[0]):
        d = dist_row[i]
        if d >= 0 and d <= max_d:
            sums[d] += values[i]
            counts[d] += 1
    return sums, counts


if HAVE_NUMBA:
    bfs_all_pairs_numba = njit(cache=True)(_bfs_all_pairs_py)
    cross_abs_sum_numba = njit(cache=True)(_cross_abs_sum_py)
    bin_by_distance_numba = njit(cache=True)(_bin_by_distance_py)
else:  # pragma: no cover
    bfs_all_pairs_numba = _bfs_all_pairs_py
    cross_abs_sum_numba = _cross_abs_sum_py
    bin_by_distance_numba = _bin_by_distance_py


def bfs_all_pairs(indptr, indices, n):
    indptr = np.ascontiguousarray(indptr, dtype=np.int64)
    indices = np.ascontiguousarray(indices, dtype=np.int64)
    if USE_NUMBA:
        return bfs_all_pairs_numba(indptr, indices, int(n))
    return bfs_all_pairs_numpy(indptr, indices, int(n))


def cross_abs_sum(mat, inside):
    mat = np.ascontiguousarray(mat, dtype=np.float64)
    inside = np.ascontiguousarray(inside, dtype=np.bool_)
    if USE_NUMBA:
        return float(cross_abs_sum_numba(mat, inside))
    return cross_abs_sum_numpy(mat, inside)


def bin_by_distance(values, dist_row, max_d):
    values = np.ascontiguousarray(values, dtype=np.float64)
    dist_row = np.ascontiguousarray(dist_row, dtype=np.int64)
    if USE_NUMBA:
        return bin_by_distance_numba(values, dist_row, int(max_d))
    return bin_by_distance_numpy(values, dist_row, int(max_d))
