"""Hot numeric loops with a numba fast path and a pure-numpy fallback.

Set ``DTNLAB_DISABLE_NUMBA=1`` to force the numpy implementations (the
public names at the bottom of this module are rebound at import time).
``benchmarks/bench_kernels.py`` compares the two paths.
"""

import os

import numpy as np

NUMBA_DISABLED = os.environ.get("DTNLAB_DISABLE_NUMBA", "0") not in ("", "0")

if not NUMBA_DISABLED:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a hard dependency
        NUMBA_DISABLED = True


# ---------------------------------------------------------------------------
# point-in-polygon (crossing number), used by the winding-number audits

def _points_in_polygon_np(px, py, vx, vy):
    n = len(vx)
    inside = np.zeros(len(px), dtype=np.bool_)
    j = n - 1
    for i in range(n):
        x1, y1 = vx[j], vy[j]
        x2, y2 = vx[i], vy[i]
        crosses = (y1 > py) != (y2 > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
        inside ^= crosses & (px < xint)
        j = i
    return inside


# ---------------------------------------------------------------------------
# truncated total-variation distance between kernel rows

def _tv_rows_np(Ki, Kj, di, dj, w, delta):
    ti = np.where(di > delta, Ki, 0.0)
    tj = np.where(dj > delta, Kj, 0.0)
    return float(np.sum(np.abs(ti - tj) * w))


# ---------------------------------------------------------------------------
# integro-differential reconstruction of a matrix action

def _reconstruct_all_np(K, L, D, w, phi, dphi, c, b, r0):
    nb = len(phi)
    out = np.empty(nb)
    for i in range(nb):
        comp = np.where(D[i] <= r0, dphi[i] * L[i], 0.0)
        term = (phi - phi[i] - comp) * K[i] * w
        term[i] = 0.0
        out[i] = c[i] * phi[i] + b[i] * dphi[i] + term.sum()
    return out


if NUMBA_DISABLED:
    points_in_polygon = _points_in_polygon_np
    tv_rows = _tv_rows_np
    reconstruct_all = _reconstruct_all_np
else:
    @njit(cache=True)
    def points_in_polygon(px, py, vx, vy):
        n = len(vx)
        m = len(px)
        inside = np.zeros(m, dtype=np.bool_)
        for k in range(m):
            x, y = px[k], py[k]
            flag = False
            j = n - 1
            for i in range(n):
                y1 = vy[j]
                y2 = vy[i]
                if (y1 > y) != (y2 > y):
                    xint = vx[j] + (y - y1) * (vx[i] - vx[j]) / (y2 - y1)
                    if x < xint:
                        flag = not flag
                j = i
            inside[k] = flag
        return inside

    @njit(cache=True)
    def tv_rows(Ki, Kj, di, dj, w, delta):
        acc = 0.0
        for k in range(len(w)):
            a = Ki[k] if di[k] > delta else 0.0
            b = Kj[k] if dj[k] > delta else 0.0
            acc += abs(a - b) * w[k]
        return acc

    @njit(cache=True)
    def reconstruct_all(K, L, D, w, phi, dphi, c, b, r0):
        nb = len(phi)
        out = np.empty(nb)
        for i in range(nb):
            acc = c[i] * phi[i] + b[i] * dphi[i]
            for j in range(nb):
                if j == i:
                    continue
                comp = dphi[i] * L[i, j] if D[i, j] <= r0 else 0.0
                acc += (phi[j] - phi[i] - comp) * K[i, j] * w[j]
            out[i] = acc
        return out
