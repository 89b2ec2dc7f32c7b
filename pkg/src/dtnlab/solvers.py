"""Dirichlet solves for linear and Bellman bulk operators.

Linear kinds are solved by a cached sparse LU shared across right-hand
sides; Bellman kinds by policy iteration (frozen-control solve, pointwise
control improvement), re-factorizing whenever the policy changes.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .bulk import assemble_operator
from .errors import InputError, SolverError, SpecError

LINEAR_KINDS = ("divergence", "nondivergence")
BELLMAN_KINDS = ("bellman_min", "bellman_max")


def constant_field(value):
    v = float(value)
    return lambda x, y: np.full_like(np.asarray(x, dtype=float), v)


def holder_field(mid, amp, alpha=0.5, center=(0.3, 0.2), freq=2):
    """mid + amp * |x - p|^alpha * cos(freq * angle); Holder-alpha at p."""
    cx, cy = center

    def a(x, y):
        dx = np.asarray(x, dtype=float) - cx
        dy = np.asarray(y, dtype=float) - cy
        rho = np.hypot(dx, dy)
        ang = np.arctan2(dy, dx)
        return mid + amp * rho ** alpha * np.cos(freq * ang)

    return a


@dataclass
class OperatorSpec:
    """Bulk elliptic operator description."""

    kind: str
    lam: float
    Lam: float
    label: str
    a1: object = None
    a2: object = None
    controls: tuple = ()   # tuple of (a1, a2) pairs for Bellman kinds

    def __post_init__(self):
        if self.lam > self.Lam or self.lam <= 0:
            raise SpecError(f"invalid ellipticity pair ({self.lam}, {self.Lam})")
        if self.kind in LINEAR_KINDS:
            if self.a1 is None or self.a2 is None:
                raise SpecError("linear spec needs coefficient fields a1, a2")
        elif self.kind in BELLMAN_KINDS:
            if not self.controls:
                raise SpecError("Bellman spec needs a nonempty control set")
        else:
            raise SpecError(f"unknown operator kind {self.kind!r}")

    @property
    def is_linear(self):
        return self.kind in LINEAR_KINDS

    @classmethod
    def laplacian(cls, label="laplacian"):
        return cls(kind="divergence", lam=1.0, Lam=1.0, label=label,
                   a1=constant_field(1.0), a2=constant_field(1.0))

    @classmethod
    def divergence_holder(cls, lam=1.0, Lam=2.0, alpha=0.5,
                          label="divergence-holder"):
        mid = 0.5 * (lam + Lam)
        amp = 0.18 * (Lam - lam)
        return cls(kind="divergence", lam=lam, Lam=Lam, label=label,
                   a1=holder_field(mid, amp, alpha, center=(0.3, 0.2)),
                   a2=holder_field(mid, amp, alpha, center=(-0.2, 0.1), freq=3))

    @classmethod
    def nondivergence_holder(cls, lam=1.0, Lam=2.0, alpha=0.5,
                             label="nondivergence-holder"):
        mid = 0.5 * (lam + Lam)
        amp = 0.18 * (Lam - lam)
        return cls(kind="nondivergence", lam=lam, Lam=Lam, label=label,
                   a1=holder_field(mid, amp, alpha, center=(0.25, -0.15)),
                   a2=holder_field(mid, amp, alpha, center=(-0.1, 0.3), freq=3))

    @classmethod
    def pucci(cls, sign, lam=1.0, Lam=2.0):
        """Finite axis-aligned surrogate of the extremal operators.

        Controls are diag(a1, a2) with a_i in {lam, mid, Lam}; 'minus'
        takes the pointwise minimum over controls, 'plus' the maximum."""
        if sign not in ("minus", "plus"):
            raise SpecError("Pucci sign must be 'minus' or 'plus'")
        levels = (lam, 0.5 * (lam + Lam), Lam)
        controls = tuple(
            (constant_field(u), constant_field(v))
            for u in levels for v in levels)
        kind = "bellman_min" if sign == "minus" else "bellman_max"
        return cls(kind=kind, lam=lam, Lam=Lam, controls=controls,
                   label=f"pucci-{sign}({lam},{Lam})")


@dataclass
class SolutionField:
    """Bulk solution restricted to interior nodes."""

    values: np.ndarray
    boundary_data: np.ndarray
    residual: float
    iterations: int = 0
    policy: np.ndarray = None
    residual_history: list = field(default_factory=list)

    def check_maximum_principle(self, tol=1e-11):
        lo = self.boundary_data.min() - tol
        hi = self.boundary_data.max() + tol
        return bool(self.values.min() >= lo and self.values.max() <= hi)


class BulkProblem:
    """One (spec, grid, boundary grid) triple with cached factorizations."""

    def __init__(self, spec, grid, bgrid):
        self.spec = spec
        self.grid = grid
        self.bgrid = bgrid
        self._T = grid.boundary_interpolation(bgrid)
        if spec.is_linear:
            fields = [(spec.a1, spec.a2)]
            kind = spec.kind
        else:
            fields = list(spec.controls)
            kind = "nondivergence"
        self._ops = []
        for (a1, a2) in fields:
            op = assemble_operator(grid, kind, a1, a2,
                                   lam=spec.lam, Lam=spec.Lam,
                                   label=spec.label)
            B = (op.Bc @ self._T).tocsr()
            self._ops.append((op.A, B))
        self._lu = spla.splu(self._ops[0][0].tocsc()) if spec.is_linear else None

    @property
    def n_controls(self):
        return len(self._ops)

    def boundary_matrix(self, control=0):
        return self._ops[control][1]

    # -- linear path ----------------------------------------------------------

    def solve_linear(self, phi, rhs=None):
        if not self.spec.is_linear:
            raise InputError("solve_linear requires a linear spec")
        phi = np.asarray(phi, dtype=float)
        A, B = self._ops[0]
        b = -B @ phi if rhs is None else np.asarray(rhs, dtype=float)
        u = self._lu.solve(b)
        scale = max(np.abs(b).max(), np.abs(A.diagonal()).max() * max(
            1.0, np.abs(u).max()))
        res = np.abs(A @ u - b).max() / scale if scale > 0 else 0.0
        return SolutionField(values=u, boundary_data=phi, residual=float(res))

    def solve_many(self, Phi):
        """Solve for every column of a dense boundary-data matrix."""
        A, B = self._ops[0]
        rhs = -(B @ Phi)
        return self._lu.solve(rhs)

    # -- Bellman path ---------------------------------------------------------

    def solve_bellman(self, phi, maxiter=200):
        if self.spec.is_linear:
            return self.solve_linear(phi)
        phi = np.asarray(phi, dtype=float)
        n = self.grid.n_interior
        nc = self.n_controls
        reducer = np.argmin if self.spec.kind == "bellman_min" else np.argmax
        pick = np.min if self.spec.kind == "bellman_min" else np.max
        policy = np.zeros(n, dtype=int)
        history = []
        u = None
        for it in range(1, maxiter + 1):
            A_pi, b_pi = self._frozen_system(policy, phi)
            u = spla.splu(A_pi.tocsc()).solve(b_pi)
            R = np.empty((nc, n))
            for c, (A, B) in enumerate(self._ops):
                R[c] = A @ u + B @ phi
            history.append(float(np.abs(pick(R, axis=0)).max()))
            new_policy = reducer(R, axis=0)
            if np.array_equal(new_policy, policy):
                return SolutionField(values=u, boundary_data=phi,
                                     residual=history[-1], iterations=it,
                                     policy=policy, residual_history=history)
            policy = new_policy
        raise SolverError(
            f"policy iteration did not converge in {maxiter} iterations; "
            f"residual history {history[-5:]}")

    def _frozen_system(self, policy, phi):
        A_pi, B_pi = self.frozen_matrices(policy)
        return A_pi, -(B_pi @ phi)

    def frozen_matrices(self, policy):
        """Row-mix the per-control systems according to a frozen policy."""
        n = self.grid.n_interior
        A_pi = None
        B_pi = None
        for c, (A, B) in enumerate(self._ops):
            d = sp.diags((policy == c).astype(float))
            A_pi = d @ A if A_pi is None else A_pi + d @ A
            B_pi = d @ B if B_pi is None else B_pi + d @ B
        return A_pi.tocsr(), B_pi.tocsr()

    def solve(self, phi):
        if self.spec.is_linear:
            return self.solve_linear(phi)
        return self.solve_bellman(phi)


def compute_green(problem, source):
    """Discrete Green field for a unit point mass at an interior node.

    source is an interior-node ordinal or an (x, y) pair mapped to the
    nearest interior node."""
    if not problem.spec.is_linear:
        raise InputError("Green's function requires a linear spec")
    grid = problem.grid
    if np.ndim(source) == 1:
        k = int(np.argmin(np.linalg.norm(grid.coords - np.asarray(source),
                                         axis=1)))
    else:
        k = int(source)
        if not 0 <= k < grid.n_interior:
            raise InputError(f"source node {k} is not interior")
    rhs = np.zeros(grid.n_interior)
    rhs[k] = -1.0 / grid.cell_area
    sol = problem.solve_linear(np.zeros(problem.bgrid.n), rhs=rhs)
    return sol.values, k


def smoothed_arc_indicator(bgrid, s_lo, s_hi):
    """Indicator of the arc [s_lo, s_hi] with a one-node linear ramp."""
    P = bgrid.curve.perimeter
    span = (s_hi - s_lo) % P
    rel = (bgrid.s - s_lo) % P
    phi = ((rel <= span)).astype(float)
    ds = bgrid.spacing
    edge_lo = np.abs((bgrid.s - s_lo + P / 2) % P - P / 2)
    edge_hi = np.abs((bgrid.s - s_hi + P / 2) % P - P / 2)
    near = np.minimum(edge_lo, edge_hi) < 0.5 * ds
    phi[near] = 0.5
    return phi


def compute_harmonic_measure(problem, x_point, s_lo, s_hi):
    """Measure of a boundary arc seen from an interior point."""
    from .bulk import sample_field
    phi = smoothed_arc_indicator(problem.bgrid, s_lo, s_hi)
    sol = problem.solve_linear(phi)
    val = sample_field(problem.grid, sol.values, np.asarray(x_point))
    return float(np.clip(val, 0.0, 1.0))
