"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

The backend is picked once at import time from the BANACH_GEOM_BACKEND
environment variable ("numba" by default when numba imports, "numpy" to
force the fallback). benchmarks/bench_kernels.py times the two side by
side.
"""

import numpy as np

from ..config import kernel_backend, thread_cap

__all__ = [
    "BACKEND",
    "halton_block",
    "halton",
    "max_pairwise",
    "far_pair_search",
    "szlenk_keep",
    "PRIMES",
]


def _first_primes(n):
    primes, cand = [], 2
    while len(primes) < n:
        if all(cand % p for p in primes):
            primes.append(cand)
        cand += 1
    return np.asarray(primes, dtype=np.int64)


PRIMES = _first_primes(128)

BACKEND = kernel_backend()

if BACKEND == "numba":
    from . import _numba_impl as _impl

    cap = thread_cap()
    if cap is not None:
        try:
            import numba

            numba.set_num_threads(min(cap, numba.config.NUMBA_NUM_THREADS))
        except (ImportError, ValueError):
            pass
else:
    from . import _numpy_impl as _impl


def halton_block(n, dims, bases=None, skip=0):
    if bases is None:
        bases = PRIMES[:dims]
    return _impl.halton_block(int(n), int(dims), np.asarray(bases, dtype=np.int64), int(skip))


def halton(n, dims, skip=0):
    """Deterministic low-discrepancy points in (0,1)^dims."""
    if dims > len(PRIMES):
        raise ValueError(f"halton supports at most {len(PRIMES)} dimensions")
    return halton_block(n, dims, PRIMES[:dims], skip)


def max_pairwise(points, q):
    """Max pairwise l_q distance over the rows; q=0.0 encodes the max norm."""
    pts = np.ascontiguousarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 2:
        return 0.0
    return float(_impl.max_pairwise(pts, float(q)))


def far_pair_search(proj, threshold):
    proj = np.ascontiguousarray(proj, dtype=np.float64)
    i, j = _impl.far_pair_search(proj, float(threshold))
    return int(i), int(j)


def szlenk_keep(box_coords, pts, delta, eps, q):
    box_coords = np.ascontiguousarray(box_coords, dtype=np.float64)
    pts = np.ascontiguousarray(pts, dtype=np.float64)
    return np.asarray(
        _impl.szlenk_keep(box_coords, pts, float(delta), float(eps), float(q)),
        dtype=bool,
    )
