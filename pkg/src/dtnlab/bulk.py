"""Cartesian cut-cell discretization of the bulk Dirichlet problem.

Interior nodes live on a uniform lattice containing the origin; arms that
cross the boundary are shortened to the exact intersection point
(Shortley-Weller).  All assembled operators are monotone: nonnegative
off-diagonal and boundary couplings, negative diagonal, zero row sums.
"""

from dataclasses import dataclass

import numpy as np
import scipy.ndimage
import scipy.sparse as sp
from scipy.optimize import brentq

from .errors import GridError, SpecError

# direction order: east, west, north, south
_DIRS = np.array([[1, 0], [-1, 0], [0, 1], [0, -1]])
_MIN_ARM_FRACTION = 1e-3


@dataclass
class DomainGrid:
    """Classified lattice for one curve at one spacing."""

    curve: object
    h: float
    xs: np.ndarray          # lattice x coordinates
    ys: np.ndarray          # lattice y coordinates
    mask: np.ndarray        # (ny, nx) interior mask
    index: np.ndarray       # (ny, nx) -> interior ordinal or -1
    coords: np.ndarray      # (n_int, 2)
    neighbors: np.ndarray   # (n_int, 4) interior ordinal or -1
    arms: np.ndarray        # (n_int, 4) arm lengths in (0, h]
    crossing_id: np.ndarray  # (n_int, 4) crossing ordinal or -1
    crossing_s: np.ndarray  # (n_cross,) arc-length coordinate on the curve
    crossing_xy: np.ndarray  # (n_cross, 2)

    @property
    def n_interior(self):
        return len(self.coords)

    @property
    def n_crossing(self):
        return len(self.crossing_s)

    @property
    def cell_area(self):
        return self.h * self.h

    def audit_inside(self, sample=None, rng=None):
        """Check the interior mask against an independent winding-number test.

        Returns the number of disagreeing nodes (0 when consistent)."""
        pts = self.coords
        if sample is not None and sample < len(pts):
            rng = np.random.default_rng(0) if rng is None else rng
            pts = pts[rng.choice(len(pts), size=sample, replace=False)]
        wind = self.curve.contains_winding(pts)
        return int(np.count_nonzero(~wind))

    def boundary_interpolation(self, bgrid):
        """Sparse map from boundary-grid values to crossing-point values.

        Uses the compact C^1 cubic hat (support one grid interval), so the
        weights are nonnegative and sum to one on every row."""
        ds = bgrid.spacing
        u = self.crossing_s / ds
        j = np.floor(u).astype(int) % bgrid.n
        f = u - np.floor(u)
        wr = 3.0 * f * f - 2.0 * f * f * f
        rows = np.repeat(np.arange(self.n_crossing), 2)
        cols = np.stack([j, (j + 1) % bgrid.n], axis=1).ravel()
        vals = np.stack([1.0 - wr, wr], axis=1).ravel()
        T = sp.coo_matrix((vals, (rows, cols)),
                          shape=(self.n_crossing, bgrid.n))
        return T.tocsr()


def _crossing_fraction(curve, p, e, h):
    """Fraction tau in (0,1] where p + tau*h*e meets the boundary."""
    def g(tau):
        z = p + tau * h * e
        r = np.hypot(z[0], z[1])
        return r - float(curve.radial_profile(np.arctan2(z[1], z[0])))

    g1 = g(1.0)
    if g1 < 0.0:  # neighbor classified exterior but radially inside: degenerate
        raise GridError("inconsistent arm classification; shift the grid origin")
    if g1 == 0.0:  # neighbor sits exactly on the boundary
        return 1.0
    return brentq(g, 0.0, 1.0, xtol=1e-14)


def build_grid(curve, h, origin=(0.0, 0.0)):
    """Classify lattice nodes and resolve all boundary-crossing arms.

    origin shifts the lattice by a fraction of h in each direction; use
    it to step away from degenerate cuts (boundary passing through or
    arbitrarily close to a lattice node)."""
    t = np.linspace(0.0, 2.0 * np.pi, 2048, endpoint=False)
    pts = curve.gamma(t)
    pad = 2.5 * h
    ox, oy = origin[0] * h, origin[1] * h
    i_lo = int(np.floor((pts[:, 0].min() - pad - ox) / h))
    i_hi = int(np.ceil((pts[:, 0].max() + pad - ox) / h))
    j_lo = int(np.floor((pts[:, 1].min() - pad - oy) / h))
    j_hi = int(np.ceil((pts[:, 1].max() + pad - oy) / h))
    xs = np.arange(i_lo, i_hi + 1) * h + ox
    ys = np.arange(j_lo, j_hi + 1) * h + oy
    X, Y = np.meshgrid(xs, ys)
    nodes = np.stack([X.ravel(), Y.ravel()], axis=-1)
    mask = curve.contains(nodes).reshape(len(ys), len(xs))

    labels, ncomp = scipy.ndimage.label(mask)
    if ncomp == 0:
        raise GridError("no interior nodes at this spacing")
    if ncomp > 1:
        raise GridError(
            f"interior is disconnected on the grid ({ncomp} components); "
            "refine h")

    index = -np.ones(mask.shape, dtype=int)
    jj, ii = np.nonzero(mask)
    n_int = len(ii)
    index[jj, ii] = np.arange(n_int)
    coords = np.stack([xs[ii], ys[jj]], axis=-1)

    neighbors = -np.ones((n_int, 4), dtype=int)
    arms = np.full((n_int, 4), h, dtype=float)
    crossing_id = -np.ones((n_int, 4), dtype=int)
    cross_s = []
    cross_xy = []

    for d, (di, dj) in enumerate(_DIRS):
        ni = ii + di
        nj = jj + dj
        inb = index[nj, ni]
        neighbors[:, d] = inb
        e = np.array([di, dj], dtype=float)
        for k in np.nonzero(inb < 0)[0]:
            tau = _crossing_fraction(curve, coords[k], e, h)
            if tau < _MIN_ARM_FRACTION:
                raise GridError(
                    f"degenerate cut (arm {tau:.2e} h) at node {coords[k]}; "
                    "shift the grid origin")
            z = coords[k] + tau * h * e
            s = float(curve.s_of_angle(np.arctan2(z[1], z[0])))
            crossing_id[k, d] = len(cross_s)
            arms[k, d] = tau * h
            cross_s.append(s)
            cross_xy.append(z)

    return DomainGrid(
        curve=curve, h=h, xs=xs, ys=ys, mask=mask, index=index,
        coords=coords, neighbors=neighbors, arms=arms,
        crossing_id=crossing_id,
        crossing_s=np.array(cross_s),
        crossing_xy=np.array(cross_xy).reshape(-1, 2),
    )


def cell_stencil(grid, p):
    """Bilinear stencil (4 interior ordinals, 4 weights) at point p.

    Returns None when the surrounding cell is not fully interior."""
    h = grid.h
    fx = (p[0] - grid.xs[0]) / h
    fy = (p[1] - grid.ys[0]) / h
    i = int(np.floor(fx))
    j = int(np.floor(fy))
    if i < 0 or j < 0 or i + 1 >= len(grid.xs) or j + 1 >= len(grid.ys):
        return None
    idx = grid.index[j:j + 2, i:i + 2]
    if (idx < 0).any():
        return None
    tx = fx - i
    ty = fy - j
    w = np.array([(1 - tx) * (1 - ty), tx * (1 - ty),
                  (1 - tx) * ty, tx * ty])
    return np.array([idx[0, 0], idx[0, 1], idx[1, 0], idx[1, 1]]), w


def sample_field(grid, values, points):
    """Bilinear interpolation of an interior field at one or more points."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    out = np.empty(len(pts))
    for k, p in enumerate(pts):
        st = cell_stencil(grid, p)
        if st is None:
            raise GridError(f"sample point {p} is not inside an interior cell")
        idx, w = st
        out[k] = values[idx] @ w
    return out if np.ndim(points) > 1 else float(out[0])


@dataclass
class DiscreteOperator:
    """Monotone sparse system: A u + Bc u_crossings = 0 at interior nodes."""

    A: sp.csr_matrix     # interior x interior
    Bc: sp.csr_matrix    # interior x crossings, nonnegative
    grid: DomainGrid
    label: str = ""
    consistency_order: int = 2

    def monotonicity_report(self):
        offdiag = self.A - sp.diags(self.A.diagonal())
        rowsum = np.asarray(self.A.sum(axis=1)).ravel() + \
            np.asarray(self.Bc.sum(axis=1)).ravel()
        return {
            "min_offdiag": float(offdiag.data.min()) if offdiag.nnz else 0.0,
            "max_diag": float(self.A.diagonal().max()),
            "min_boundary_coupling": float(self.Bc.data.min()) if self.Bc.nnz else 0.0,
            "max_abs_rowsum": float(np.abs(rowsum).max()),
        }

    def dump_pattern_csv(self, path):
        coo = self.A.tocoo()
        with open(path, "w") as fh:
            fh.write("row,col,value\n")
            for r, c, v in zip(coo.row, coo.col, coo.data):
                fh.write(f"{r},{c},{v!r}\n")


def assemble_operator(grid, kind, a1, a2, lam=None, Lam=None, label=""):
    """Assemble one monotone system for a diagonal coefficient field.

    kind 'divergence' uses face-midpoint coefficients, 'nondivergence'
    node coefficients with arm-weighted second differences.  a1, a2 are
    vectorized callables (x, y) -> coefficient.
    """
    if kind not in ("divergence", "nondivergence"):
        raise SpecError(f"unknown operator kind {kind!r}")
    x = grid.coords[:, 0]
    y = grid.coords[:, 1]
    if lam is not None:
        for name, a in (("a1", a1), ("a2", a2)):
            vals = np.asarray(a(x, y))
            bad = np.nonzero((vals < lam - 1e-12) | (vals > Lam + 1e-12))[0]
            if len(bad):
                k = bad[0]
                raise SpecError(
                    f"ellipticity violation: {name}={vals[k]:.6g} outside "
                    f"[{lam}, {Lam}] at node {k} ({x[k]:.4g}, {y[k]:.4g})")

    n = grid.n_interior
    arms = grid.arms
    coeff_dir = np.empty((n, 4))
    for d, (di, dj) in enumerate(_DIRS):
        a = a1 if di != 0 else a2
        if kind == "divergence":
            fx = x + 0.5 * arms[:, d] * di
            fy = y + 0.5 * arms[:, d] * dj
            coeff_dir[:, d] = a(fx, fy)
        else:
            coeff_dir[:, d] = a(x, y)

    hsum_x = arms[:, 0] + arms[:, 1]
    hsum_y = arms[:, 2] + arms[:, 3]
    hsum = np.stack([hsum_x, hsum_x, hsum_y, hsum_y], axis=1)
    c = 2.0 * coeff_dir / (arms * hsum)

    rows_a, cols_a, vals_a = [], [], []
    rows_b, cols_b, vals_b = [], [], []
    diag = -c.sum(axis=1)
    rows_a.append(np.arange(n))
    cols_a.append(np.arange(n))
    vals_a.append(diag)
    for d in range(4):
        nb = grid.neighbors[:, d]
        m = nb >= 0
        rows_a.append(np.nonzero(m)[0])
        cols_a.append(nb[m])
        vals_a.append(c[m, d])
        mc = ~m
        rows_b.append(np.nonzero(mc)[0])
        cols_b.append(grid.crossing_id[mc, d])
        vals_b.append(c[mc, d])

    A = sp.coo_matrix(
        (np.concatenate(vals_a),
         (np.concatenate(rows_a), np.concatenate(cols_a))),
        shape=(n, n)).tocsr()
    Bc = sp.coo_matrix(
        (np.concatenate(vals_b),
         (np.concatenate(rows_b), np.concatenate(cols_b))),
        shape=(n, grid.n_crossing)).tocsr()
    return DiscreteOperator(A=A, Bc=Bc, grid=grid, label=label)
