"""Closed smooth planar boundary curves and their intrinsic geometry.

A curve is a trigonometric polynomial t in [0, 2pi) -> R^2, oriented
counterclockwise, star-shaped about the origin.  All distances along the
boundary are arc-length (geodesic) distances; the inward normal is the
counterclockwise rotation of the unit tangent.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import GeometryError, InputError

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)
_N_FINE = 8192
_TWO_PI = 2.0 * np.pi


def _wrap_offset(delta, period):
    """Wrap a signed offset into (-period/2, period/2]."""
    return (np.asarray(delta) + 0.5 * period) % period - 0.5 * period


@dataclass
class AnnuliReport:
    """Worst geodesic/chord ratio over a sampled double ring around a point."""

    base_s: float
    radius: float
    max_ratio: float
    threshold: float = 9.0 / 8.0

    @property
    def passed(self):
        return self.max_ratio <= self.threshold


class BoundaryCurve:
    """Closed C^inf planar curve given by trigonometric coefficients.

    gamma(t) = (sum ax[k] cos(kt) + bx[k] sin(kt),
                sum ay[k] cos(kt) + by[k] sin(kt))
    """

    def __init__(self, ax, bx, ay, by, r0=None, label="curve"):
        self.ax = np.asarray(ax, dtype=float)
        self.bx = np.asarray(bx, dtype=float)
        self.ay = np.asarray(ay, dtype=float)
        self.by = np.asarray(by, dtype=float)
        self.label = label
        self._build_tables()
        if r0 is None:
            r0 = self.perimeter / 4.0
        if r0 > self.perimeter / 2.0:
            raise GeometryError(
                f"r0={r0} exceeds half the perimeter {self.perimeter / 2.0}")
        self.r0 = float(r0)

    # -- construction helpers -------------------------------------------------

    @classmethod
    def circle(cls, radius=1.0, **kw):
        z = np.zeros(2)
        ax = np.array([0.0, radius])
        by = np.array([0.0, radius])
        return cls(ax, z, z, by, label=kw.pop("label", f"circle(R={radius})"), **kw)

    @classmethod
    def ellipse(cls, a=2.0, b=1.0, **kw):
        z = np.zeros(2)
        ax = np.array([0.0, a])
        by = np.array([0.0, b])
        return cls(ax, z, z, by, label=kw.pop("label", f"ellipse({a},{b})"), **kw)

    @classmethod
    def star(cls, amplitude=0.15, lobes=3, **kw):
        """r(theta) = 1 + amplitude*cos(lobes*theta), as a trig polynomial."""
        m = int(lobes)
        n = m + 2
        ax = np.zeros(n)
        bx = np.zeros(n)
        ay = np.zeros(n)
        by = np.zeros(n)
        ax[1] = 1.0
        ax[m - 1] += amplitude / 2.0
        ax[m + 1] += amplitude / 2.0
        by[1] = 1.0
        by[m + 1] += amplitude / 2.0
        by[m - 1] -= amplitude / 2.0
        label = kw.pop("label", f"star(a={amplitude},m={m})")
        return cls(ax, bx, ay, by, label=label, **kw)

    # -- parametrization ------------------------------------------------------

    def _trig(self, t, order=0):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        k = np.arange(len(self.ax))
        kt = np.outer(t, k)
        c, s = np.cos(kt), np.sin(kt)
        if order == 0:
            bc, bs = c, s
        elif order == 1:
            bc, bs = -s * k, c * k
        elif order == 2:
            bc, bs = -c * k * k, -s * k * k
        else:
            raise ValueError("derivative order must be 0, 1, or 2")
        x = bc @ self.ax + bs @ self.bx
        y = bc @ self.ay + bs @ self.by
        return np.stack([x, y], axis=-1)

    def gamma(self, t):
        return self._trig(t, 0)

    def dgamma(self, t):
        return self._trig(t, 1)

    def speed(self, t):
        return np.linalg.norm(self._trig(t, 1), axis=-1)

    def curvature(self, t):
        d1 = self._trig(t, 1)
        d2 = self._trig(t, 2)
        num = d1[..., 0] * d2[..., 1] - d1[..., 1] * d2[..., 0]
        return num / np.linalg.norm(d1, axis=-1) ** 3

    # -- tables ---------------------------------------------------------------

    def _build_tables(self):
        n = _N_FINE
        t_knots = np.linspace(0.0, _TWO_PI, n + 1)
        ht = _TWO_PI / n
        # cumulative arc length by per-interval Gauss-Legendre quadrature
        mids = t_knots[:-1, None] + 0.5 * ht * (1.0 + _GL_NODES[None, :])
        sp = self.speed(mids.ravel()).reshape(n, -1)
        if sp.min() < 1e-10:
            raise GeometryError("parametrization is not regular (|gamma'| ~ 0)")
        seg = 0.5 * ht * sp @ _GL_WEIGHTS
        s_knots = np.concatenate([[0.0], np.cumsum(seg)])
        self._t_knots = t_knots
        self._s_knots = s_knots
        self.perimeter = float(s_knots[-1])

        pts = self.gamma(t_knots)
        rad = np.linalg.norm(pts, axis=-1)
        if rad.min() < 1e-9:
            raise GeometryError("curve passes through the origin")
        theta = np.unwrap(np.arctan2(pts[:, 1], pts[:, 0]))
        theta -= theta[0]
        dth = np.diff(theta)
        if dth.min() <= 0.0:
            raise GeometryError("curve is not star-shaped about the origin")
        if abs(theta[-1] - _TWO_PI) > 1e-8:
            raise GeometryError("curve is not counterclockwise and simple")
        self._theta_knots = theta
        self._radius_knots = rad
        kap = self.curvature(t_knots)
        self.max_curvature = float(np.abs(kap).max())
        area2 = np.trapezoid(
            pts[:, 0] * self._trig(t_knots, 1)[:, 1]
            - pts[:, 1] * self._trig(t_knots, 1)[:, 0],
            t_knots,
        )
        if area2 <= 0.0:
            raise GeometryError("curve orientation must be counterclockwise")
        self.area = 0.5 * float(area2)

    def _s_of_t(self, t):
        """Arc length at parameter t, table + local quadrature (vectorized)."""
        t_arr = np.atleast_1d(np.asarray(t, dtype=float)) % _TWO_PI
        k = np.minimum((t_arr / (_TWO_PI / _N_FINE)).astype(int), _N_FINE - 1)
        t0 = self._t_knots[k]
        half = 0.5 * (t_arr - t0)
        nodes = t0[:, None] + half[:, None] * (1.0 + _GL_NODES[None, :])
        local = half * (self.speed(nodes.ravel()).reshape(len(t_arr), -1)
                        @ _GL_WEIGHTS)
        out = self._s_knots[k] + local
        return out if np.ndim(t) else float(out[0])

    def t_of_s(self, s):
        """Invert the arc-length table with Newton refinement."""
        s_arr = np.atleast_1d(np.asarray(s, dtype=float)) % self.perimeter
        idx = np.clip(np.searchsorted(self._s_knots, s_arr) - 1, 0, _N_FINE - 1)
        ds = self._s_knots[idx + 1] - self._s_knots[idx]
        t = self._t_knots[idx] + (s_arr - self._s_knots[idx]) / ds * (
            _TWO_PI / _N_FINE)
        for _ in range(4):
            t = t - (self._s_of_t(t) - s_arr) / self.speed(t)
        t %= _TWO_PI
        return t if np.ndim(s) else float(t[0])

    # -- intrinsic operations -------------------------------------------------

    def point_and_normal(self, s):
        """Boundary point and unit inward normal at arc length s."""
        t = np.atleast_1d(self.t_of_s(s))
        p = self.gamma(t)
        d = self._trig(t, 1)
        sp = np.linalg.norm(d, axis=-1, keepdims=True)
        if sp.min() < 1e-10:
            raise GeometryError("non-regular parametrization point")
        tang = d / sp
        nu = np.stack([-tang[..., 1], tang[..., 0]], axis=-1)
        if np.ndim(s) == 0:
            return p[0], nu[0]
        return p, nu

    def geodesic_distance(self, s1, s2):
        d = np.abs(_wrap_offset(np.asarray(s2) - np.asarray(s1), self.perimeter))
        return d if d.ndim else float(d)

    def log_map(self, x_s, h_s, tol=1e-12):
        """Signed arc-length offset from x_s to h_s, within injectivity range."""
        off = _wrap_offset(np.asarray(h_s, dtype=float) - x_s, self.perimeter)
        half = self.perimeter / 2.0
        if np.any(np.abs(np.abs(off) - half) < tol * self.perimeter):
            raise InputError("log map is ambiguous at antipodal points")
        return off if off.ndim else float(off)

    @property
    def annuli_threshold(self):
        """Largest radius at which the geodesic/chord comparison is certified."""
        return 0.5 / self.max_curvature if self.max_curvature > 0 else np.inf

    def annuli_inclusion_check(self, x_s, r, n_samples=2001):
        eps0 = self.annuli_threshold
        if r >= eps0:
            raise InputError(
                f"radius {r} is above the curvature threshold eps0={eps0:.6g}")
        offs = np.linspace(-2.0 * r, 2.0 * r, n_samples)
        offs = offs[np.abs(offs) > 1e-12]
        x_pt = self.gamma(self.t_of_s(x_s))[0]
        h_pts = self.gamma(self.t_of_s(x_s + offs))
        chord = np.linalg.norm(h_pts - x_pt, axis=-1)
        ratio = np.abs(offs) / chord
        return AnnuliReport(base_s=float(x_s), radius=float(r),
                            max_ratio=float(ratio.max()))

    # -- ambient tests --------------------------------------------------------

    def radial_profile(self, theta):
        th = np.asarray(theta, dtype=float) % _TWO_PI
        return np.interp(th, self._theta_knots, self._radius_knots)

    def s_of_angle(self, theta):
        th = np.asarray(theta, dtype=float) % _TWO_PI
        return np.interp(th, self._theta_knots, self._s_knots)

    def contains(self, points):
        """Star-shaped inside test for an (m, 2) array of points."""
        p = np.atleast_2d(points)
        r = np.linalg.norm(p, axis=-1)
        th = np.arctan2(p[:, 1], p[:, 0])
        return r < self.radial_profile(th)

    def contains_winding(self, points, n_poly=8192):
        """Independent crossing-number test against a dense polygon."""
        p = np.atleast_2d(np.asarray(points, dtype=float))
        t = np.linspace(0.0, _TWO_PI, n_poly, endpoint=False)
        poly = self.gamma(t)
        return _kernels.points_in_polygon(
            np.ascontiguousarray(p[:, 0]), np.ascontiguousarray(p[:, 1]),
            np.ascontiguousarray(poly[:, 0]), np.ascontiguousarray(poly[:, 1]))


@dataclass
class BoundaryGrid:
    """Uniform arc-length discretization of a boundary curve."""

    curve: BoundaryCurve
    s: np.ndarray
    w: np.ndarray
    points: np.ndarray
    normals: np.ndarray
    spacing: float = field(init=False)

    def __post_init__(self):
        self.spacing = float(self.w[0])

    @property
    def n(self):
        return len(self.s)

    def pairwise_distance(self):
        """Geodesic distance matrix between all node pairs."""
        diff = self.s[None, :] - self.s[:, None]
        return np.abs(_wrap_offset(diff, self.curve.perimeter))

    def pairwise_log_map(self):
        """Signed arc offset matrix; the antipodal column sign is +P/2."""
        diff = self.s[None, :] - self.s[:, None]
        return _wrap_offset(diff, self.curve.perimeter)


def build_boundary_grid(curve, n_nodes):
    """Uniform arc-length nodes with equal quadrature weights."""
    if n_nodes < 4:
        raise InputError("boundary grid needs at least 4 nodes")
    s = np.arange(n_nodes) * (curve.perimeter / n_nodes)
    pts, nus = curve.point_and_normal(s)
    w = np.full(n_nodes, curve.perimeter / n_nodes)
    return BoundaryGrid(curve=curve, s=s, w=w, points=pts, normals=nus)
