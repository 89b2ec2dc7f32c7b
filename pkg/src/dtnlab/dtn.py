"""The Dirichlet-to-Neumann map: evaluation, matrix assembly, extremal
operators, frozen-policy linearizations, and the comparison audit.

The map sends nodal boundary data to the inward normal derivative of the
bulk solution, read off by a one-sided difference along the normal using
bilinearly interpolated interior samples.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .bulk import cell_stencil
from .errors import GridError, SolverError
from .solvers import BulkProblem, OperatorSpec


def _probe_stencils(grid, bgrid):
    """Per-node probe stencils for the one-sided normal derivative.

    Prefers the second-order two-probe difference with both probe cells
    interior; falls back to first order (flagged) when only one probe
    fits."""
    h = grid.h
    n = bgrid.n
    rows1, cols1, vals1 = [], [], []
    rows2, cols2, vals2 = [], [], []
    delta = np.empty(n)
    order = np.full(n, 2, dtype=int)
    for i in range(n):
        p = bgrid.points[i]
        nu = bgrid.normals[i]
        found = None
        d = 2.0 * h
        while d <= 10.0 * h:
            st1 = cell_stencil(grid, p + d * nu)
            st2 = cell_stencil(grid, p + 2.0 * d * nu)
            if st1 is not None and st2 is not None:
                found = (st1, st2)
                break
            d += 0.25 * h
        if found is not None:
            (i1, w1), (i2, w2) = found
            rows1 += [i] * 4
            cols1 += list(i1)
            vals1 += list(w1)
            rows2 += [i] * 4
            cols2 += list(i2)
            vals2 += list(w2)
            delta[i] = d
            continue
        d = 2.0 * h
        st1 = None
        while d <= 10.0 * h and st1 is None:
            st1 = cell_stencil(grid, p + d * nu)
            if st1 is None:
                d += 0.25 * h
        if st1 is None:
            raise GridError(
                f"no interior probe for boundary node {i}; grid too coarse")
        i1, w1 = st1
        rows1 += [i] * 4
        cols1 += list(i1)
        vals1 += list(w1)
        delta[i] = d
        order[i] = 1
    S1 = sp.coo_matrix((vals1, (rows1, cols1)),
                       shape=(n, grid.n_interior)).tocsr()
    S2 = sp.coo_matrix((vals2, (rows2, cols2)),
                       shape=(n, grid.n_interior)).tocsr()
    return S1, S2, delta, order


@dataclass
class DtnMatrix:
    """Dense boundary-node matrix of a linear D-to-N map."""

    M: np.ndarray
    bgrid: object
    label: str
    h: float

    def apply(self, phi):
        return self.M @ np.asarray(phi, dtype=float)

    def row_sums(self):
        return self.M.sum(axis=1)

    def min_offdiagonal(self):
        off = self.M.copy()
        np.fill_diagonal(off, np.inf)
        return float(off.min())

    def export_csv(self, path, sidecar=None):
        """Write (i, j, M_ij) rows; optionally a JSON provenance sidecar."""
        with open(path, "w") as fh:
            fh.write("i,j,M_ij\n")
            for i in range(len(self.M)):
                for j in range(len(self.M)):
                    fh.write(f"{i},{j},{self.M[i, j]!r}\n")
        if sidecar is not None:
            import json
            meta = {"label": self.label, "h": self.h,
                    "n_boundary": int(self.bgrid.n),
                    "perimeter": float(self.bgrid.curve.perimeter)}
            with open(sidecar, "w") as fh:
                json.dump(meta, fh, indent=2, sort_keys=True)
                fh.write("\n")


class DtnOperator:
    """Evaluation context for the D-to-N map of one bulk spec."""

    def __init__(self, spec, grid, bgrid):
        self.spec = spec
        self.grid = grid
        self.bgrid = bgrid
        self.problem = BulkProblem(spec, grid, bgrid)
        self._S1, self._S2, self._delta, self._order = _probe_stencils(
            grid, bgrid)
        self._matrix = None

    @property
    def probe_orders(self):
        return self._order

    def _normal_derivative(self, u, phi):
        two = self._order == 2
        out = np.empty(self.bgrid.n)
        s1 = self._S1 @ u
        s2 = self._S2 @ u
        out[two] = (-3.0 * phi[two] + 4.0 * s1[two] - s2[two]) / (
            2.0 * self._delta[two])
        one = ~two
        out[one] = (s1[one] - phi[one]) / self._delta[one]
        return out

    def evaluate(self, phi):
        """Inward normal derivative of the bulk solution at every node."""
        phi = np.asarray(phi, dtype=float)
        sol = self.problem.solve(phi)
        return self._normal_derivative(sol.values, phi)

    def solve_and_evaluate(self, phi):
        phi = np.asarray(phi, dtype=float)
        sol = self.problem.solve(phi)
        return sol, self._normal_derivative(sol.values, phi)

    # -- linear assembly ------------------------------------------------------

    def matrix(self, chunk=64):
        """Assemble the dense D-to-N matrix column by column (linear only).

        Column j is the map applied to the cardinal hat at node j; by
        linearity the matrix action reproduces evaluate() exactly."""
        if not self.spec.is_linear:
            raise SolverError("matrix assembly requires a linear spec")
        if self._matrix is None:
            self._matrix = self._assemble(self.problem.solve_many, self.spec.label)
        return self._matrix

    def _assemble(self, solve_many, label, chunk=64):
        n = self.bgrid.n
        M = np.empty((n, n))
        eye = np.eye(n)
        for lo in range(0, n, chunk):
            hi = min(lo + chunk, n)
            U = solve_many(eye[:, lo:hi])
            block = np.asarray(U)
            D1 = self._S1 @ block
            D2 = self._S2 @ block
            Phi = eye[:, lo:hi]
            two = self._order == 2
            M[two, lo:hi] = (-3.0 * Phi[two] + 4.0 * D1[two] - D2[two]) / (
                2.0 * self._delta[two, None])
            one = ~two
            M[one, lo:hi] = (D1[one] - Phi[one]) / self._delta[one, None]
        return DtnMatrix(M=M, bgrid=self.bgrid, label=label, h=self.grid.h)

    # -- frozen policies ------------------------------------------------------

    def frozen_policy_matrix(self, phi=None, policy=None):
        """Linear D-to-N matrix of a frozen Bellman policy.

        When policy is None the data phi is solved first and the converged
        policy is frozen."""
        if self.spec.is_linear:
            return self.matrix()
        if policy is None:
            sol = self.problem.solve_bellman(np.asarray(phi, dtype=float))
            policy = sol.policy
        A_pi, B_pi = self.problem.frozen_matrices(policy)
        lu = spla.splu(A_pi.tocsc())

        def solve_many(Phi):
            return lu.solve(-(B_pi @ Phi))

        label = f"{self.spec.label}|frozen"
        return self._assemble(solve_many, label)


def extremal_dtn(sign, grid, bgrid, phi, lam, Lam, cache=None):
    """Normal derivative of the extremal (Pucci surrogate) solution."""
    key = (sign, lam, Lam)
    if cache is not None and key in cache:
        op = cache[key]
    else:
        op = DtnOperator(OperatorSpec.pucci(sign, lam, Lam), grid, bgrid)
        if cache is not None:
            cache[key] = op
    return op.evaluate(phi)


def random_smooth(bgrid, rng, degree=5, amplitude=1.0):
    """Random trigonometric polynomial sampled at the boundary nodes."""
    theta = 2.0 * np.pi * bgrid.s / bgrid.curve.perimeter
    out = np.zeros(bgrid.n)
    for k in range(1, degree + 1):
        ak, bk = rng.normal(size=2) / k
        out += ak * np.cos(k * theta) + bk * np.sin(k * theta)
    return amplitude * out


def touching_pair(bgrid, rng, degree=5):
    """Smooth u <= v with contact at a random node; returns (u, v, node)."""
    u = random_smooth(bgrid, rng, degree)
    i0 = int(rng.integers(bgrid.n))
    P = bgrid.curve.perimeter
    amp = float(rng.uniform(0.2, 1.0))
    bump = amp * (1.0 - np.cos(2.0 * np.pi * (bgrid.s - bgrid.s[i0]) / P))
    return u, u + bump, i0


@dataclass
class GcpReport:
    """Outcome of the comparison-property audit over random touching pairs."""

    trials: int
    max_violation: float
    tolerance: float
    worst_node: int = -1
    violations: list = field(default_factory=list)

    @property
    def passed(self):
        return self.max_violation <= self.tolerance


def check_sandwich(op, op_minus, op_plus, trials=50, seed=0, tol_factor=10.0):
    """Audit M-(u-v) <= I(u) - I(v) <= M+(u-v) at every node.

    op is any D-to-N context; op_minus / op_plus are the extremal
    contexts with the same ellipticity pair."""
    rng = np.random.default_rng(seed)
    tol = tol_factor * op.grid.h
    worst = 0.0
    worst_node = -1
    for _ in range(trials):
        u = random_smooth(op.bgrid, rng)
        v = random_smooth(op.bgrid, rng)
        diff = op.evaluate(u) - op.evaluate(v)
        lo = op_minus.evaluate(u - v)
        hi = op_plus.evaluate(u - v)
        gap = np.maximum(lo - diff, diff - hi)
        k = int(np.argmax(gap))
        if gap[k] > worst:
            worst = float(gap[k])
            worst_node = k
    return GcpReport(trials=trials, max_violation=worst, tolerance=tol,
                     worst_node=worst_node)


def check_minmax(op, phis, n_policies=20, seed=0, tol_factor=10.0):
    """Audit the min-max structure of a bellman_min D-to-N map.

    For each data vector the nonlinear value must lie below every random
    frozen-policy linearization (up to tolerance) and agree with the
    converged-policy linearization."""
    if op.spec.kind != "bellman_min":
        raise SolverError("min-max audit requires a bellman_min spec")
    rng = np.random.default_rng(seed)
    tol = tol_factor * op.grid.h
    nc = op.problem.n_controls
    n_int = op.grid.n_interior
    policies = [rng.integers(nc, size=n_int) for _ in range(n_policies)]
    frozen = [op.frozen_policy_matrix(policy=pi) for pi in policies]
    max_violation = 0.0
    max_eq_gap = 0.0
    for phi in phis:
        phi = np.asarray(phi, dtype=float)
        value = op.evaluate(phi)
        for Lm in frozen:
            max_violation = max(max_violation,
                                float((value - Lm.apply(phi)).max()))
        Lc = op.frozen_policy_matrix(phi=phi)
        max_eq_gap = max(max_eq_gap,
                         float(np.abs(value - Lc.apply(phi)).max()))
    passed = max_violation <= tol and max_eq_gap <= tol
    return {"max_violation": max_violation, "max_equality_gap": max_eq_gap,
            "tolerance": tol, "n_policies": n_policies,
            "n_data": len(phis), "pass": bool(passed)}


def check_gcp(op, trials=100, seed=0, tol_factor=10.0):
    """Audit I(u, x0) <= I(v, x0) for touching pairs u <= v, u(x0)=v(x0)."""
    rng = np.random.default_rng(seed)
    tol = tol_factor * op.grid.h
    worst = 0.0
    worst_node = -1
    viols = []
    for _ in range(trials):
        u, v, i0 = touching_pair(op.bgrid, rng)
        iu = op.evaluate(u)
        iv = op.evaluate(v)
        gap = float(iu[i0] - iv[i0])
        viols.append(gap)
        if gap > worst:
            worst = gap
            worst_node = i0
    return GcpReport(trials=trials, max_violation=worst, tolerance=tol,
                     worst_node=worst_node, violations=viols)
