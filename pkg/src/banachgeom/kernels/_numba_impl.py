"""numba @njit versions of the hot kernels. Loop-for-loop ports of
_numpy_impl; compiled lazily on first call, cached on disk."""

import numpy as np
from numba import njit


@njit(cache=True)
def halton_block(n, dims, bases, skip=0):
    out = np.empty((n, dims), dtype=np.float64)
    for j in range(n):
        idx = skip + j + 1
        for d in range(dims):
            b = bases[d]
            i = idx
            f = 1.0 / b
            r = 0.0
            while i > 0:
                r += f * (i % b)
                i //= b
                f /= b
            out[j, d] = r
    return out


@njit(cache=True)
def _dist(points, i, j, q):
    dim = points.shape[1]
    if q == 0.0:
        m = 0.0
        for k in range(dim):
            v = abs(points[i, k] - points[j, k])
            if v > m:
                m = v
        return m
    if q == 2.0:
        s = 0.0
        for k in range(dim):
            v = points[i, k] - points[j, k]
            s += v * v
        return np.sqrt(s)
    s = 0.0
    for k in range(dim):
        s += abs(points[i, k] - points[j, k]) ** q
    if q == 1.0:
        return s
    return s ** (1.0 / q)


@njit(cache=True)
def max_pairwise(points, q):
    n = points.shape[0]
    best = 0.0
    for i in range(n - 1):
        for j in range(i + 1, n):
            d = _dist(points, i, j, q)
            if d > best:
                best = d
    return best


@njit(cache=True)
def far_pair_search(proj, threshold):
    n = proj.shape[0]
    m = proj.shape[1]
    for i in range(n - 1):
        for j in range(i + 1, n):
            gap = 0.0
            for k in range(m):
                v = abs(proj[i, k] - proj[j, k])
                if v > gap:
                    gap = v
            if gap > threshold:
                return i, j
    return -1, -1


@njit(cache=True)
def szlenk_keep(box_coords, pts, delta, eps, q):
    n = box_coords.shape[0]
    k = box_coords.shape[1]
    keep = np.zeros(n, dtype=np.bool_)
    members = np.empty(n, dtype=np.int64)
    for i in range(n):
        cnt = 0
        for j in range(n):
            inside = True
            for c in range(k):
                if abs(box_coords[j, c] - box_coords[i, c]) >= delta:
                    inside = False
                    break
            if inside:
                members[cnt] = j
                cnt += 1
        if cnt < 2:
            continue
        diam = 0.0
        for a in range(cnt - 1):
            for b in range(a + 1, cnt):
                d = _dist(pts, members[a], members[b], q)
                if d > diam:
                    diam = d
            if diam >= eps:
                break
        if diam >= eps:
            keep[i] = True
    return keep
