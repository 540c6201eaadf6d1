#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Run:  python3 benchmarks/bench_kernels.py [--n 2000] [--reps 5]

Both backends are imported directly (ignoring BANACH_GEOM_BACKEND) so one
run reports the speedup and checks agreement.
"""

import argparse
import time

import numpy as np

from banachgeom.kernels import PRIMES
from banachgeom.kernels import _numpy_impl as np_impl

try:
    from banachgeom.kernels import _numba_impl as nb_impl
except ImportError:
    nb_impl = None


def _time(fn, args, reps):
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--reps", type=int, default=5)
    args = ap.parse_args()

    n = args.n
    bases = np.asarray(PRIMES[:8], dtype=np.int64)
    pts = np_impl.halton_block(n, 8, bases)
    proj = pts @ np.random.default_rng(0).normal(size=(8, 6))
    box = pts[:, :2].copy()

    cases = [
        ("halton_block", (n, 8, bases, 0)),
        ("max_pairwise", (pts, 2.0)),
        ("max_pairwise_inf", (pts, 0.0)),
        ("far_pair_search", (proj, 3.5)),
        ("szlenk_keep", (box, pts, 0.05, 0.5, 2.0)),
    ]

    print(f"{'kernel':<18}{'numpy (s)':>12}{'numba (s)':>12}{'speedup':>10}  agree")
    for name, case_args in cases:
        base = name.replace("_inf", "")
        np_fn = getattr(np_impl, base)
        t_np, out_np = _time(np_fn, case_args, args.reps)
        if nb_impl is None:
            print(f"{name:<18}{t_np:>12.4f}{'-':>12}{'-':>10}  numba unavailable")
            continue
        nb_fn = getattr(nb_impl, base)
        nb_fn(*case_args)  # compile outside the timer
        t_nb, out_nb = _time(nb_fn, case_args, args.reps)
        agree = np.allclose(np.asarray(out_np, dtype=float), np.asarray(out_nb, dtype=float))
        print(f"{name:<18}{t_np:>12.4f}{t_nb:>12.4f}{t_np / max(t_nb, 1e-12):>10.1f}  {agree}")


if __name__ == "__main__":
    main()
