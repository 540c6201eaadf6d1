"""Pure-numpy reference implementations of the hot kernels.

Semantics here are the contract; the numba versions must agree bitwise on
the benchmark inputs (see benchmarks/bench_kernels.py).
"""

import numpy as np

_CHUNK = 256


def halton_block(n, dims, bases, skip=0):
    """First n Halton points in (0,1)^dims, 1-based indexing shifted by skip."""
    out = np.empty((n, dims), dtype=np.float64)
    idx = np.arange(skip + 1, skip + n + 1, dtype=np.int64)
    for d in range(dims):
        b = int(bases[d])
        i = idx.copy()
        r = np.zeros(n, dtype=np.float64)
        f = 1.0 / b
        while np.any(i > 0):
            r += f * (i % b)
            i //= b
            f /= b
        out[:, d] = r
    return out


def _dist_block(a, b, q):
    diff = np.abs(a[:, None, :] - b[None, :, :])
    if q == 0.0:
        return diff.max(axis=2)
    if q == 1.0:
        return diff.sum(axis=2)
    if q == 2.0:
        return np.sqrt((diff * diff).sum(axis=2))
    return (diff**q).sum(axis=2) ** (1.0 / q)


def max_pairwise(points, q):
    """Max pairwise l_q distance (q=0.0 encodes the max norm)."""
    n = points.shape[0]
    if n < 2:
        return 0.0
    best = 0.0
    for s in range(0, n, _CHUNK):
        blk = points[s : s + _CHUNK]
        d = _dist_block(blk, points[s:], q)
        if d.size:
            best = max(best, float(d.max()))
    return best


def far_pair_search(proj, threshold):
    """First index pair whose max-coordinate gap exceeds threshold, else (-1, -1).

    proj holds functional values row-per-point; the max-coordinate gap of two
    rows is their distance in the facet seminorm the projection encodes.
    """
    n = proj.shape[0]
    for i in range(n - 1):
        gap = np.abs(proj[i + 1 :] - proj[i]).max(axis=1)
        hit = np.nonzero(gap > threshold)[0]
        if hit.size:
            return i, i + 1 + int(hit[0])
    return -1, -1


def szlenk_keep(box_coords, pts, delta, eps, q):
    """Mask of cloud points whose (box) neighbourhood has l_q diameter >= eps."""
    n = box_coords.shape[0]
    keep = np.zeros(n, dtype=np.bool_)
    for i in range(n):
        inside = np.abs(box_coords - box_coords[i]).max(axis=1) < delta
        members = pts[inside]
        if members.shape[0] >= 2 and max_pairwise(members, q) >= eps:
            keep[i] = True
    return keep
