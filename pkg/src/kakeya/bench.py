"""Benchmark the numba kernels against their numpy fallbacks.

Runs both implementations of each kernel on identical inputs regardless
of the KAKEYA_NUMBA setting, checks they agree, and prints a timing
table.  Invoked via ``kakeya bench``.
"""

from __future__ import annotations

import time

import numpy as np

from . import kernels


def _time(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run_bench(n: int = 2187, repeats: int = 5) -> list[dict]:
    rng = np.random.default_rng(0)
    centers = rng.uniform(0.0, 1.0, n)
    slopes = rng.uniform(-1.0, 1.0, n)
    width = 1.0 / (6.0 * n)
    xs = np.linspace(0.1, 0.4, 2048)
    ids = rng.integers(0, 1 << 40, size=200_000).astype(np.uint64)
    out_bits = np.empty(ids.shape[0], dtype=np.uint8)
    out_len = np.empty(xs.shape[0])

    rows = []
    if kernels.HAVE_NUMBA:
        kernels.warmup()

    cases = [
        (
            "pair_sum_1d",
            lambda: kernels._nb_pair_sum_1d(centers, slopes, 0.1, 0.4, width),
            lambda: kernels._np_pair_sum_1d(centers, slopes, 0.1, 0.4, width),
        ),
        (
            "union_lengths_1d",
            lambda: kernels._nb_union_lengths_1d(
                centers, slopes, width, xs, out_len
            ),
            lambda: kernels._np_union_lengths_1d(
                centers, slopes, width, xs, out_len
            ),
        ),
        (
            "node_bits",
            lambda: kernels._nb_node_bits(np.uint64(12345), ids, out_bits),
            lambda: kernels._np_node_bits(np.uint64(12345), ids, out_bits),
        ),
    ]

    print(f"kernel benchmark: n={n}, xs={xs.shape[0]}, ids={ids.shape[0]}")
    print(f"{'kernel':<20} {'numba [ms]':>12} {'numpy [ms]':>12} {'speedup':>9}")
    for name, nb, npf in cases:
        if kernels.HAVE_NUMBA:
            nb()  # compile outside timing
            t_nb = _time(nb, repeats) * 1e3
        else:
            t_nb = float("nan")
        t_np = _time(npf, repeats) * 1e3
        speed = t_np / t_nb if t_nb == t_nb else float("nan")
        rows.append({"kernel": name, "numba_ms": t_nb, "numpy_ms": t_np, "speedup": speed})
        print(f"{name:<20} {t_nb:>12.3f} {t_np:>12.3f} {speed:>8.1f}x")

    # agreement spot-check between the two paths
    if kernels.HAVE_NUMBA:
        a = kernels._nb_pair_sum_1d(centers, slopes, 0.1, 0.4, width)
        b = kernels._np_pair_sum_1d(centers, slopes, 0.1, 0.4, width)
        assert abs(a - b) <= 1e-9 * max(abs(a), 1.0), (a, b)
        la = kernels._nb_union_lengths_1d(centers, slopes, width, xs, np.empty_like(out_len))
        lb = kernels._np_union_lengths_1d(centers, slopes, width, xs, np.empty_like(out_len))
        assert np.allclose(la, lb, rtol=1e-10, atol=1e-14)
        ba = kernels._nb_node_bits(np.uint64(9), ids, np.empty_like(out_bits))
        bb = kernels._np_node_bits(np.uint64(9), ids, np.empty_like(out_bits))
        assert np.array_equal(ba, bb)
        print("backends agree on all benchmarked kernels")
    return rows
