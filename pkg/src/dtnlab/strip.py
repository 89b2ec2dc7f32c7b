"""Flat-boundary oracle: a periodic strip approximating the half plane.

Rectangle [0, lx) x [0, height], periodic left/right, zero data on the
top edge, active boundary at the bottom.  The harmonic extension there
has the square-root-Laplacian boundary kernel 1/(pi s^2), which the
curved-domain pipeline is checked against.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import InputError


@dataclass
class StripKernel:
    """Extracted bottom-edge kernel of the strip harmonic extension."""

    s: np.ndarray       # separations (one per bottom node, signed by wrap)
    K: np.ndarray       # kernel samples K(s)
    drift: float
    h: float
    lx: float
    height: float

    def at(self, sep, width=None):
        """Kernel value nearest to the requested separation."""
        k = int(np.argmin(np.abs(np.abs(self.s) - sep)))
        return float(self.K[k])


def strip_kernel(lx=16.0, height=8.0, h=1.0 / 32.0):
    """Solve one cardinal-data column and read off the boundary kernel.

    Translation invariance in x makes a single column sufficient: the
    kernel at separation i*h is the normal derivative at node i for the
    nodal hat at node 0, divided by the node weight h."""
    nx = int(round(lx / h))
    ny = int(round(height / h))
    if abs(nx * h - lx) > 1e-12 * lx or ny < 8:
        raise InputError("strip dimensions must be multiples of h")
    n = nx * (ny - 1)   # interior rows j = 1 .. ny-1

    def idx(i, j):
        return (j - 1) * nx + (i % nx)

    rows, cols, vals = [], [], []
    rhs = np.zeros(n)
    phi = np.zeros(nx)
    phi[0] = 1.0
    inv_h2 = 1.0 / (h * h)
    for j in range(1, ny):
        for i in range(nx):
            k = idx(i, j)
            rows.append(k)
            cols.append(k)
            vals.append(-4.0 * inv_h2)
            for ii, jj in ((i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)):
                if jj == 0:
                    rhs[k] -= inv_h2 * phi[ii % nx]
                elif jj == ny:
                    pass  # zero data on the far edge
                else:
                    rows.append(k)
                    cols.append(idx(ii, jj))
                    vals.append(inv_h2)
    A = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsc()
    u = spla.splu(A).solve(rhs)

    # one-sided normal derivative along +y with on-grid probes at 2h, 4h
    delta = 2.0 * h
    d1 = u[idx(np.arange(nx), 2)] if ny > 4 else None
    u2 = np.array([u[idx(i, 2)] for i in range(nx)])
    u4 = np.array([u[idx(i, 4)] for i in range(nx)])
    dn = (-3.0 * phi + 4.0 * u2 - u4) / (2.0 * delta)
    K = dn / h
    s = (np.arange(nx) * h + lx / 2.0) % lx - lx / 2.0
    # drift: cutoff-weighted first moment of the matrix row (symmetry -> 0)
    r0 = lx / 4.0
    ramp = 2.0 * h
    eta = np.clip(1.0 - (np.abs(s) - r0) / ramp, 0.0, 1.0)
    mask = np.arange(nx) != 0
    drift = float(np.sum((dn * eta * s)[mask]))
    return StripKernel(s=s, K=K, drift=drift, h=h, lx=lx, height=height)


def half_plane_kernel(sep):
    """Boundary jump kernel of the half-plane harmonic extension."""
    return 1.0 / (np.pi * np.asarray(sep, dtype=float) ** 2)
