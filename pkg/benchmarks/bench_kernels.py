"""Timing comparison of the numba fast path vs the numpy fallback.

Run both paths from one shell:

    python benchmarks/bench_kernels.py

The script re-executes itself with DTNLAB_DISABLE_NUMBA=1 to time the
fallback in a clean interpreter, so the numbers are directly comparable.
"""

import os
import subprocess
import sys
import time

import numpy as np


def _bench(repeat=5):
    from dtnlab import _kernels

    rng = np.random.default_rng(0)
    n = 512
    K = np.abs(rng.normal(size=(n, n)))
    np.fill_diagonal(K, 0.0)
    D = np.abs(rng.normal(size=(n, n))) + 0.1
    L = rng.normal(size=(n, n))
    w = np.full(n, 0.1)
    phi = rng.normal(size=n)
    dphi = rng.normal(size=n)
    c = rng.normal(size=n)
    b = rng.normal(size=n)

    t = np.linspace(0.0, 2.0 * np.pi, 4096, endpoint=False)
    vx, vy = np.cos(t), np.sin(t)
    px = rng.uniform(-1.2, 1.2, size=20000)
    py = rng.uniform(-1.2, 1.2, size=20000)

    cases = {
        "reconstruct_all": lambda: _kernels.reconstruct_all(
            K, L, D, w, phi, dphi, c, b, 0.7),
        "tv_rows": lambda: [_kernels.tv_rows(K[i], K[i + 1], D[i], D[i + 1],
                                             w, 0.5) for i in range(64)],
        "points_in_polygon": lambda: _kernels.points_in_polygon(
            px, py, vx, vy),
    }
    path = "numpy-fallback" if _kernels.NUMBA_DISABLED else "numba"
    for name, fn in cases.items():
        fn()  # warm up (and JIT-compile on the fast path)
        t0 = time.perf_counter()
        for _ in range(repeat):
            fn()
        dt = (time.perf_counter() - t0) / repeat
        print(f"{path:>15s}  {name:<20s} {dt * 1e3:9.2f} ms")


def main():
    _bench()
    if os.environ.get("DTNLAB_DISABLE_NUMBA", "0") in ("", "0"):
        env = dict(os.environ, DTNLAB_DISABLE_NUMBA="1")
        subprocess.run([sys.executable, __file__], env=env, check=True)


if __name__ == "__main__":
    main()
